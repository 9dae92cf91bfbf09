import numpy as np
import pytest

from omring import (ConfigError, PhysicalConfig, UnstableSystemError,
                    basis_consistency, build_bare, build_supermode,
                    diffusion_matrix, get_preset, limit_check_single_mode,
                    lyapunov_covariance, occupation_spectrum, parseval_check)
from omring.verify import integration_grid

FIG2_TWO = get_preset("fig2_two").config
FIG2_ONE = get_preset("fig2_one").config
FIG4_TWO = get_preset("fig4_two").config
FIG4_ONE = get_preset("fig4_one").config


def variant(cfg, **kw):
    fields = dict(omega_m=cfg.omega_m, kappa_ex=cfg.kappa_ex, delta_0=cfg.delta_0,
                  j_s=cfg.j_s, j_m=cfg.j_m, gamma_0=cfg.gamma_0,
                  gamma_in=cfg.gamma_in, g_r=cfg.g_r, g_l_mode=cfg.g_l_mode,
                  n_th=cfg.n_th, two_resonators=cfg.two_resonators)
    fields.update(kw)
    return PhysicalConfig(**fields)


class TestDiffusionMatrix:
    @pytest.mark.parametrize("builder,cfg", [
        (build_bare, FIG2_TWO), (build_bare, FIG2_ONE),
        (build_bare, FIG4_TWO), (build_supermode, FIG2_TWO),
    ])
    def test_hermitian_positive_semidefinite(self, builder, cfg):
        d = diffusion_matrix(builder(cfg)).d
        assert np.abs(d - d.conj().T).max() < 1e-12 * np.abs(d).max()
        assert np.linalg.eigvalsh(d).min() >= -1e-12 * np.abs(d).max()

    def test_common_reservoir_cross_correlations(self):
        cfg = FIG2_TWO
        d = diffusion_matrix(build_bare(cfg)).d
        assert d[2, 3] == pytest.approx(cfg.gamma_0 * (cfg.n_th + 1), rel=1e-14)
        assert d[6, 7] == pytest.approx(cfg.gamma_0 * cfg.n_th, rel=1e-14)

    def test_supermode_dark_row_thermally_silent(self):
        cfg = variant(FIG2_TWO, gamma_in=0.0)
        d = diffusion_matrix(build_supermode(cfg)).d
        assert np.abs(d[3, :]).max() == 0.0
        assert np.abs(d[7, :]).max() == 0.0


class TestLyapunov:
    def test_optical_vacuum_stays_empty(self):
        cfg = variant(FIG2_TWO, g_r=0.0, g_l_mode=0j)
        rep = lyapunov_covariance(build_bare(cfg), cfg)
        assert abs(rep.c[4, 4]) < 1e-12
        assert abs(rep.c[5, 5]) < 1e-12

    def test_detailed_balance_single_thermal_bath(self):
        # j_m = 0 keeps b_1 a genuine single-bath mode; any intermode
        # coupling adds counter-rotating corrections to the occupation
        cfg = variant(FIG2_TWO, g_r=0.0, g_l_mode=0j, gamma_0=0.0, j_m=0.0)
        rep = lyapunov_covariance(build_bare(cfg), cfg)
        assert rep.c[6, 6].real == pytest.approx(cfg.n_th, rel=1e-10)

    @pytest.mark.parametrize("name", ["fig2_one", "fig2_two", "fig4_one", "fig4_two"])
    def test_residual_bound_on_presets(self, name):
        from omring.verify import LYAPUNOV_RTOL
        cfg = get_preset(name).config
        sys = build_bare(cfg)
        rep = lyapunov_covariance(sys, cfg)
        d_norm = np.abs(diffusion_matrix(sys).d).max()
        assert rep.residual < LYAPUNOV_RTOL * d_norm

    def test_unstable_system_rejected(self):
        cfg = variant(FIG4_TWO, j_s=1.0)
        with pytest.raises(UnstableSystemError):
            lyapunov_covariance(build_bare(cfg), cfg)

    def test_dark_mode_thermal_decoupling(self):
        # no drive, no private baths: only the bright mode thermalizes
        cfg = variant(FIG2_TWO, g_r=0.0, g_l_mode=0j, gamma_in=0.0)
        rep = lyapunov_covariance(build_supermode(cfg), cfg)
        assert abs(rep.c[7, 7]) < 1e-9          # dark occupation
        assert rep.c[6, 6].real == pytest.approx(cfg.n_th, rel=1e-9)


class TestParseval:
    def test_decoupled_passive_lorentzians(self):
        cfg = variant(FIG2_TWO, g_r=0.0, g_l_mode=0j, j_s=0.0, j_m=0.0, gamma_0=0.0)
        sys = build_bare(cfg)
        assert parseval_check(sys, cfg) < 1e-6

    @pytest.mark.parametrize("name", ["fig2_two", "fig4_two"])
    def test_preset_mismatch_bound(self, name):
        cfg = get_preset(name).config
        assert parseval_check(build_bare(cfg), cfg) < 1e-3

    def test_occupation_spectrum_integrates_to_covariance(self):
        cfg = FIG2_TWO
        sys = build_bare(cfg)
        grid = integration_grid(cfg)
        from scipy.integrate import simpson
        s = occupation_spectrum(sys, grid, 2)
        total = simpson(s, x=grid) / (2 * np.pi)
        occ = lyapunov_covariance(sys, cfg).c[6, 6].real
        assert total == pytest.approx(occ, rel=1e-3)

    def test_insufficient_grid_reported_distinctly(self):
        from omring import GridCoverageError
        cfg = FIG2_TWO
        sys = build_bare(cfg)
        narrow = cfg.omega_m + np.linspace(-0.05, 0.05, 501)
        with pytest.raises(GridCoverageError):
            parseval_check(sys, cfg, grid=narrow)


class TestLimitChecks:
    def test_single_resonator_single_window(self):
        assert limit_check_single_mode(FIG2_ONE)

    def test_single_resonator_amplifying_window(self):
        assert limit_check_single_mode(FIG4_ONE)
        # the one amplification window rises above unit transmission
        from omring import evaluate_point
        p = evaluate_point(build_bare(FIG4_ONE), FIG4_ONE, FIG4_ONE.omega_m)
        assert p.t_r > 1.0

    def test_two_resonator_config_rejected(self):
        with pytest.raises(ConfigError):
            limit_check_single_mode(FIG2_TWO)


class TestBasisConsistency:
    def test_rwa_free_configs_agree_to_machine_precision(self):
        cfg = variant(FIG2_TWO, j_m=0.0, gamma_0=0.0)
        assert basis_consistency(cfg) < 1e-10

    def test_resolved_preset_within_one_percent(self):
        assert basis_consistency(FIG2_TWO) < 0.01

    def test_unresolved_preset_recorded_only(self):
        dev = basis_consistency(FIG4_TWO)
        assert np.isfinite(dev)

    def test_one_resonator_rejected(self):
        with pytest.raises(ConfigError):
            basis_consistency(FIG2_ONE)
