import numpy as np
import pytest

from mhdplot.io import (
    SNAPSHOT_HEADER,
    FormatError,
    SnapshotTable,
    read_diagnostics,
    read_reference_curve,
)

from conftest import first_snapshot


def synthetic_snapshot(path, nx=4, ny=3, seed=0):
    rng = np.random.default_rng(seed)
    x, y = np.meshgrid(np.linspace(0, 1, nx), np.linspace(0, 1, ny))
    rows = np.column_stack(
        [x.ravel(), y.ravel()] + [rng.uniform(0.1, 2.0, x.size) for _ in range(11)]
    )
    with open(path, "w") as fh:
        fh.write(SNAPSHOT_HEADER + "\n")
        np.savetxt(fh, rows, fmt="%.17g", delimiter=",")
    return rows


class TestSnapshotTable:
    def test_round_trip_is_lossless(self, tmp_path):
        path = tmp_path / "snap.csv"
        synthetic_snapshot(path)
        table = SnapshotTable.read(path)
        rewritten = tmp_path / "snap2.csv"
        table.write(rewritten)
        again = SnapshotTable.read(rewritten)
        for name in table.columns:
            assert np.array_equal(table.columns[name], again.columns[name])

    def test_round_trip_of_real_output(self, vortex_run, tmp_path):
        table = SnapshotTable.read(first_snapshot(vortex_run))
        rewritten = tmp_path / "re.csv"
        table.write(rewritten)
        again = SnapshotTable.read(rewritten)
        for name in table.columns:
            assert np.array_equal(table.columns[name], again.columns[name])

    def test_header_is_enforced(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("x,y,rho\n0,0,1\n")
        with pytest.raises(FormatError):
            SnapshotTable.read(bad)

    def test_unknown_quantity_rejected(self, tmp_path):
        path = tmp_path / "snap.csv"
        synthetic_snapshot(path)
        with pytest.raises(KeyError):
            SnapshotTable.read(path).quantity("vorticity")

    def test_grid_reconstruction(self, tmp_path):
        path = tmp_path / "snap.csv"
        synthetic_snapshot(path, nx=5, ny=4)
        xs, ys, grid = SnapshotTable.read(path).grid("rho")
        assert xs.shape == (5,)
        assert ys.shape == (4,)
        assert grid.shape == (4, 5)

    def test_grid_averages_duplicate_nodes(self, tmp_path):
        path = tmp_path / "dup.csv"
        rows = np.zeros((2, 13))
        rows[:, 0] = 0.5  # same x
        rows[:, 1] = 0.25  # same y
        rows[0, 2], rows[1, 2] = 1.0, 3.0
        with open(path, "w") as fh:
            fh.write(SNAPSHOT_HEADER + "\n")
            np.savetxt(fh, rows, fmt="%.17g", delimiter=",")
        _, _, grid = SnapshotTable.read(path).grid("rho")
        assert grid[0, 0] == pytest.approx(2.0)

    def test_row_count_matches_dof(self, vortex_run):
        table = SnapshotTable.read(first_snapshot(vortex_run))
        assert len(table) == 64 * 64

    def test_line_extraction_picks_nearest_level(self, tmp_path):
        path = tmp_path / "snap.csv"
        synthetic_snapshot(path, nx=6, ny=5)
        pos, values, level = SnapshotTable.read(path).line("y", 0.4277, "p")
        assert pos.shape == values.shape == (6,)
        assert level == pytest.approx(0.5)  # nearest of linspace(0, 1, 5)


class TestDiagnostics:
    def test_read_real_diagnostics(self, vortex_run):
        data = read_diagnostics(vortex_run / "diagnostics.csv")
        assert data["t"][0] == 0.0
        assert np.all(np.diff(data["t"]) > 0)

    def test_missing_columns_rejected(self, tmp_path):
        bad = tmp_path / "d.csv"
        bad.write_text("t,foo\n0,1\n")
        with pytest.raises(FormatError):
            read_diagnostics(bad)


class TestReferenceCurve:
    def test_headerless(self, tmp_path):
        path = tmp_path / "ref.csv"
        path.write_text("0.0,1.0\n0.5,2.0\n")
        pos, val = read_reference_curve(path)
        assert np.array_equal(pos, [0.0, 0.5])
        assert np.array_equal(val, [1.0, 2.0])

    def test_with_header(self, tmp_path):
        path = tmp_path / "ref.csv"
        path.write_text("x,p\n0.0,1.0\n0.5,2.0\n")
        pos, val = read_reference_curve(path)
        assert np.array_equal(val, [1.0, 2.0])
