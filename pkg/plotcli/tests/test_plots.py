import numpy as np
import pytest

from mhdplot.cli import main
from mhdplot.io import SnapshotTable
from mhdplot.plots import plot_field, plot_slice, plot_timeseries

from conftest import first_snapshot, last_snapshot


class TestFieldPlots:
    def test_density_heatmap(self, vortex_run, tmp_path):
        out = plot_field(SnapshotTable.read(last_snapshot(vortex_run)), "rho",
                         tmp_path / "rho.png")
        assert out.exists() and out.stat().st_size > 0

    def test_alpha_of_unlimited_run_is_uniform_zero(self, unlimited_run, tmp_path):
        table = SnapshotTable.read(last_snapshot(unlimited_run))
        assert np.all(table.quantity("alpha") == 0.0)
        out = plot_field(table, "alpha", tmp_path / "alpha.png")
        assert out.exists()

    def test_initial_vortex_density_is_constant(self, vortex_run, tmp_path):
        table = SnapshotTable.read(first_snapshot(vortex_run))
        _, _, grid = table.grid("rho")
        assert np.max(grid) - np.min(grid) <= 1e-14
        assert plot_field(table, "rho", tmp_path / "rho0.png").exists()

    def test_rotor_disk_in_log_scale(self, rotor_initial, tmp_path):
        table = SnapshotTable.read(first_snapshot(rotor_initial))
        _, _, grid = table.grid("rho")
        assert np.max(grid) / np.min(grid) >= 9.0  # the dense disk stands out
        out = plot_field(table, "rho", tmp_path / "rotor.png", log_scale=True)
        assert out.exists() and out.stat().st_size > 0

    def test_missing_column_raises(self, vortex_run, tmp_path):
        table = SnapshotTable.read(first_snapshot(vortex_run))
        with pytest.raises(KeyError):
            plot_field(table, "temperature", tmp_path / "x.png")


class TestTimeseriesPlots:
    def test_single_run_curves(self, vortex_run, tmp_path):
        out = plot_timeseries([vortex_run / "diagnostics.csv"], ["run"],
                              tmp_path / "ts.png")
        assert out.exists() and out.stat().st_size > 0

    def test_two_runs_overlay(self, vortex_run, unlimited_run, tmp_path):
        out = plot_timeseries(
            [vortex_run / "diagnostics.csv", unlimited_run / "diagnostics.csv"],
            ["limited", "unlimited"], tmp_path / "ts2.png",
        )
        assert out.exists()

    def test_label_count_mismatch(self, vortex_run, tmp_path):
        with pytest.raises(ValueError):
            plot_timeseries([vortex_run / "diagnostics.csv"], ["a", "b"],
                            tmp_path / "x.png")


class TestSlicePlots:
    def test_pressure_slice(self, vortex_run, tmp_path):
        table = SnapshotTable.read(last_snapshot(vortex_run))
        out = plot_slice(table, "y", 0.4277, "p", tmp_path / "slice.png")
        assert out.exists() and out.stat().st_size > 0

    def test_slice_of_constant_field_is_horizontal(self, vortex_run, tmp_path):
        table = SnapshotTable.read(first_snapshot(vortex_run))
        pos, values, _ = table.line("y", 0.4277, "rho")
        assert np.max(values) - np.min(values) <= 1e-14
        assert plot_slice(table, "y", 0.4277, "rho", tmp_path / "flat.png").exists()

    def test_reference_overlay(self, vortex_run, tmp_path):
        ref = tmp_path / "ref.csv"
        ref.write_text("0.0,0.1\n0.5,0.2\n1.0,0.1\n")
        table = SnapshotTable.read(last_snapshot(vortex_run))
        out = plot_slice(table, "y", 0.4277, "p", tmp_path / "sliceref.png",
                         reference_path=ref)
        assert out.exists()


class TestCli:
    def test_field_command(self, vortex_run, tmp_path, capsys):
        out = tmp_path / "cli_rho.png"
        code = main(["field", str(last_snapshot(vortex_run)),
                     "--quantity", "rho", "--out", str(out)])
        assert code == 0
        assert out.exists()

    def test_timeseries_command(self, vortex_run, tmp_path):
        out = tmp_path / "cli_ts.png"
        code = main(["timeseries", str(vortex_run / "diagnostics.csv"),
                     "--labels", "run", "--out", str(out)])
        assert code == 0 and out.exists()

    def test_slice_command(self, vortex_run, tmp_path):
        out = tmp_path / "cli_slice.png"
        code = main(["slice", str(last_snapshot(vortex_run)), "--axis", "y",
                     "--coord", "0.4277", "--quantity", "p", "--out", str(out)])
        assert code == 0 and out.exists()

    def test_bad_snapshot_is_reported(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("nope\n")
        code = main(["field", str(bad), "--out", str(tmp_path / "x.png")])
        assert code == 1
        assert "error" in capsys.readouterr().err
