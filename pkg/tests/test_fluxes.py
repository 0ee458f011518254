import numpy as np
import pytest

from sbpmhd import fluxes, physics
from sbpmhd.fluxes import (
    CentralFlux,
    VolumeFluxUnavailable,
    central_volume_flux,
    check_volume_flux_contract,
    ec_volume_flux,
    get_volume_flux,
    glm_noncons_split,
    powell_noncons_split,
    register_volume_flux,
    rusanov_surface_flux,
    surface_noncons,
    unregister_volume_flux,
)
from sbpmhd.physics import EquationParams, prim_to_cons

from conftest import random_primitives, random_states
from test_physics import euler_flux_oracle, state

M_X = np.array([1.0, 0.0, 0.0])


class TestCentralFlux:
    def test_consistency(self, params):
        rng = np.random.default_rng(0)
        u = random_states(rng, (30,), params)
        m = np.array([0.5, 0.0, 0.0])
        f = central_volume_flux(u, u, m, params)
        assert np.max(np.abs(f - physics.flux_dot_metric(u, m, params))) <= 1e-14 * (
            1 + np.max(np.abs(f))
        )

    def test_symmetry_is_bitwise(self, params):
        rng = np.random.default_rng(1)
        ua = random_states(rng, (30,), params)
        ub = random_states(rng, (30,), params)
        assert np.array_equal(
            central_volume_flux(ua, ub, M_X, params),
            central_volume_flux(ub, ua, M_X, params),
        )

    def test_matches_euler_central_oracle(self, params):
        rng = np.random.default_rng(2)
        prim = random_primitives(rng, (2, 20))
        prim[..., 5:] = 0.0
        u = prim_to_cons(prim, params)
        ours = central_volume_flux(u[0], u[1], M_X, params)
        oracle = 0.5 * (
            euler_flux_oracle(u[0], 0, params.gamma) + euler_flux_oracle(u[1], 0, params.gamma)
        )
        assert np.max(np.abs(ours - oracle)) <= 1e-13

    def test_pair_tensor_matches_pairwise_calls(self, params):
        rng = np.random.default_rng(3)
        line = random_states(rng, (4, 5), params)
        flux = CentralFlux()
        tensor = flux.pair_tensor(line, M_X, params)
        for j in range(5):
            for k in range(5):
                pair = flux.pair(line[:, j], line[:, k], M_X, params)
                assert np.max(np.abs(tensor[:, j, k] - pair)) <= 1e-15


class TestEcSlot:
    def test_unregistered_slot_reports_unavailable(self, params):
        u = state()
        with pytest.raises(VolumeFluxUnavailable, match="unavailable"):
            ec_volume_flux(u, u, M_X, params)

    def test_registered_flux_is_served_and_checked(self, params):
        register_volume_flux("ec", CentralFlux())
        try:
            u = state()
            f = ec_volume_flux(u, u, M_X, params)
            assert np.max(np.abs(f - physics.flux_dot_metric(u, M_X, params))) <= 1e-14
            report = check_volume_flux_contract(
                get_volume_flux("ec"), params, np.random.default_rng(0), n_pairs=50
            )
            assert report["symmetry"] == 0.0
            assert report["consistency"] <= 1e-14
        finally:
            unregister_volume_flux("ec")

    def test_contract_entropy_hook(self, params):
        # the entropy-condition residual is reported when the registrant
        # supplies the entropy pair; the central flux does not satisfy it
        def fake_entropy_vars(u, p):
            return u

        def fake_potential(u, m, p):
            return np.zeros(u.shape[:-1])

        report = check_volume_flux_contract(
            CentralFlux(), params, np.random.default_rng(1), n_pairs=10,
            entropy_vars=fake_entropy_vars, flux_potential=fake_potential,
        )
        assert "entropy_condition" in report


class TestNonconsSplits:
    def test_powell_vanishes_without_field(self, params):
        u = state(v=(0.4, 0.1, 0.0))
        split = powell_noncons_split(u, np.zeros(3), M_X, params)
        assert split.sym == 0.0
        assert np.allclose(split.assembled(), 0.0, atol=1e-15)

    def test_powell_uniform_field_sym(self, params):
        b = np.array([0.7, -0.2, 0.1])
        u = state(B=tuple(b))
        split = powell_noncons_split(u, b, M_X, params)
        assert split.sym == pytest.approx(0.7, abs=1e-15)

    def test_powell_split_matches_monolithic(self, params):
        rng = np.random.default_rng(4)
        u = random_states(rng, (20,), params)
        other = random_states(rng, (20,), params)
        metric = np.array([0.5, 0.0, 0.0])
        split = powell_noncons_split(u, other[..., 5:8], metric, params)
        mono = physics.powell_phi(u, params) * (
            (0.5 * (u[..., 5:8] + other[..., 5:8]) @ metric)[..., None]
        )
        assert np.max(np.abs(split.assembled() - mono)) <= 1e-15

    def test_glm_zero_psi(self, params):
        u = state(v=(1, 0, 0))
        split = glm_noncons_split(u, 0.0, M_X, params)
        assert split.sym == 0.0

    def test_glm_zero_velocity(self, params):
        u = state(psi=5.0)
        split = glm_noncons_split(u, 1.0, M_X, params)
        assert np.allclose(split.loc, 0.0, atol=1e-15)

    def test_glm_hand_assembled(self, params):
        u = state(v=(1, 0, 0), psi=2.0)
        split = glm_noncons_split(u, 2.0, M_X, params)
        term = split.assembled()
        assert term[4] == pytest.approx(4.0, abs=1e-14)  # (v.m psi) * avg(psi)
        assert term[8] == pytest.approx(2.0, abs=1e-14)  # (v.m) * avg(psi)

    def test_symmetric_factors_are_bitwise_symmetric(self, params):
        rng = np.random.default_rng(9)
        ua = random_states(rng, (25,), params)
        ub = random_states(rng, (25,), params)
        p_ab = powell_noncons_split(ua, ub[..., 5:8], M_X, params).sym
        p_ba = powell_noncons_split(ub, ua[..., 5:8], M_X, params).sym
        assert np.array_equal(p_ab, p_ba)
        g_ab = glm_noncons_split(ua, ub[..., 8], M_X, params).sym
        g_ba = glm_noncons_split(ub, ua[..., 8], M_X, params).sym
        assert np.array_equal(g_ab, g_ba)


class TestRusanov:
    def test_consistency(self, params):
        rng = np.random.default_rng(5)
        u = random_states(rng, (30,), params)
        m = np.array([0.0, 0.5, 0.0])
        f = rusanov_surface_flux(u, u, m, params)
        assert np.max(np.abs(f - physics.flux_dot_metric(u, m, params))) <= 1e-14 * (
            1 + np.max(np.abs(f))
        )

    def test_conservation_antisymmetry(self, params):
        rng = np.random.default_rng(6)
        ua = random_states(rng, (30,), params)
        ub = random_states(rng, (30,), params)
        m = np.array([0.3, -0.4, 0.0])
        f_ab = rusanov_surface_flux(ua, ub, m, params)
        f_ba = rusanov_surface_flux(ub, ua, -m, params)
        assert np.max(np.abs(f_ab + f_ba)) <= 1e-13

    def test_still_gas_dissipation_closed_form(self):
        params = EquationParams(c_h=0.0)
        ua = state(rho=1.0, p=1.0)
        ub = state(rho=1.2, p=1.0)
        lam = np.sqrt(params.gamma * 1.0 / 1.0)  # the denser side is slower
        f = rusanov_surface_flux(ua, ub, M_X, params)
        assert f[0] == pytest.approx(-0.5 * lam * 0.2, abs=1e-14)

    def test_rejects_zero_normal(self, params):
        u = state()
        with pytest.raises(ValueError):
            rusanov_surface_flux(u, u, np.zeros(3), params)


class TestSurfaceNoncons:
    def test_zero_without_field_and_psi(self, params):
        rng = np.random.default_rng(7)
        prim = random_primitives(rng, (10,))
        prim[..., 5:] = 0.0
        u = prim_to_cons(prim, params)
        out = surface_noncons(u, np.roll(u, 1, axis=0), M_X, params)
        assert np.max(np.abs(out)) <= 1e-15

    def test_equals_volume_split_forms(self, params):
        rng = np.random.default_rng(8)
        u_in = random_states(rng, (20,), params)
        u_out = random_states(rng, (20,), params)
        m = np.array([0.0, 0.25, 0.0])
        expected = (
            powell_noncons_split(u_in, u_out[..., 5:8], m, params).assembled()
            + glm_noncons_split(u_in, u_out[..., 8], m, params).assembled()
        )
        got = surface_noncons(u_in, u_out, m, params)
        assert np.max(np.abs(got - expected)) <= 1e-15
