"""Independent oracles for the spectra engine.

Two routes to the same stationary physics: the spectra engine solves the
dynamics per frequency, while the Lyapunov oracle solves the stationary
covariance algebraically from the identical noise model (same drift matrix
and input map, so a mismatch indicts the frequency-domain code rather than
the model).  A Parseval check ties them together: the frequency integral
of each mode's occupation spectrum must reproduce the corresponding
covariance diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .dynamics import DIM, DriftSystem, build_bare, build_supermode, check_stability
from .errors import ConfigError, GridCoverageError, UnstableSystemError
from .params import PhysicalConfig
from .presets import default_feature_grid
from .spectra import susceptibility, transmission

#: Acceptable Lyapunov equation residual, relative to max|D|.
LYAPUNOV_RTOL = 1e-9

#: Acceptable spectral weight outside the integration grid, relative.
TAIL_RTOL = 1e-4


@dataclass(frozen=True)
class DiffusionMatrix:
    """Noise diffusion D with the shared-reservoir cross correlations.

    Built as two blocks from the input map L and the channel occupations:
    the undaggered rows see <c c+> = (N + 1), the daggered rows <c+ c> = N.
    The common mechanical channel correlates the two mechanical rows, which
    is what makes the two thermal flow paths interfere.
    """

    d: np.ndarray   # (8, 8) complex, Hermitian PSD

    def __post_init__(self):
        self.d.setflags(write=False)


@dataclass(frozen=True)
class CovarianceReport:
    """Stationary second moments <V V+> and the equation residual."""

    c: np.ndarray       # (8, 8) complex
    residual: float     # max|M C + C M+ - D|

    def __post_init__(self):
        self.c.setflags(write=False)


def diffusion_matrix(sys: DriftSystem) -> DiffusionMatrix:
    """Assemble D = <V_in V_in+> from the system's own noise model."""
    l_top = sys.input_map[:4]
    occ = np.array([ch.occupation for ch in sys.channels])
    d = np.zeros((DIM, DIM), dtype=complex)
    d[:4, :4] = l_top @ np.diag(occ + 1.0) @ l_top.T
    d[4:, 4:] = l_top @ np.diag(occ) @ l_top.T
    herm_defect = np.abs(d - d.conj().T).max()
    min_eig = np.linalg.eigvalsh(d).min() if np.abs(d).max() > 0 else 0.0
    scale = max(np.abs(d).max(), 1.0)
    if herm_defect > 1e-12 * scale or min_eig < -1e-12 * scale:
        raise ConfigError("diffusion matrix is not Hermitian positive semidefinite")
    return DiffusionMatrix(d)


def lyapunov_covariance(sys: DriftSystem, cfg: PhysicalConfig) -> CovarianceReport:
    """Stationary covariance from M C + C M+ = D, solved directly.

    The 8x8 equation is vectorized into a 64-unknown linear system and
    solved in one shot.  Marginally stable systems (zero-decay modes that
    are also driven by nothing, e.g. a dark mode with gamma_in = 0) are
    handled by the minimum-norm solution, which leaves the undriven sector
    at zero.  Strictly unstable systems have no stationary state and
    raise.
    """
    report = check_stability(sys)
    if report.min_real_part < -report.tol:
        raise UnstableSystemError(
            f"no stationary covariance: min Re(eigenvalue) = {report.min_real_part:.6g}"
        )
    d = diffusion_matrix(sys).d
    eye = np.eye(DIM)
    a = np.kron(eye, sys.m) + np.kron(sys.m.conj(), eye)
    rhs = d.flatten(order="F")
    if report.stable:
        vec = np.linalg.solve(a, rhs)
    else:
        vec = np.linalg.lstsq(a, rhs, rcond=None)[0]
    c = vec.reshape(DIM, DIM, order="F")
    residual = float(np.abs(sys.m @ c + c @ sys.m.conj().T - d).max())
    return CovarianceReport(c, residual)


def _occupation_spectra(sys: DriftSystem, omegas) -> np.ndarray:
    """(4, n) occupation spectra of all modes, one solve per frequency."""
    l_top = sys.input_map[:4]
    occ = np.array([ch.occupation for ch in sys.channels])
    omegas = np.asarray(omegas, dtype=float)
    out = np.empty((4, omegas.size))
    for k, w in enumerate(omegas):
        u = susceptibility(sys, w).u
        a_resp = u[:4, :4] @ l_top
        b_resp = u[:4, 4:] @ l_top
        out[:, k] = (np.abs(a_resp) ** 2 @ occ
                     + np.abs(b_resp) ** 2 @ (occ + 1.0))
    return out


def occupation_spectrum(sys: DriftSystem, omegas, mode: int) -> np.ndarray:
    """Normal-ordered occupation spectrum of one mode (0..3) over omegas.

    Per channel c with occupation N_c the spectrum collects
    N_c |A_c|^2 + (N_c + 1) |B_c|^2, where A_c (B_c) is the response of the
    mode's row to the channel through the undaggered (daggered) input rows.
    Its integral over omega / 2 pi is the stationary occupation.
    """
    if not 0 <= mode < 4:
        raise ValueError("mode index must be 0..3")
    return _occupation_spectra(sys, omegas)[mode]


def integration_grid(cfg: PhysicalConfig, points_per_cluster: int = 1500) -> np.ndarray:
    """Wide two-sided grid resolving every resonance for occupation integrals.

    Geometric clusters sit on +-omega_m and +-(omega_m +- j_m), reaching in
    to a thousandth of the narrowest linewidth; linear spans carry the
    optical-width background and 1/omega^2 wings extend to 1e5 kappa_0.
    """
    wm, jm = cfg.omega_m, cfg.effective_j_m
    narrowest = min(x for x in (cfg.gamma_in, cfg.gamma_0, cfg.kappa) if x > 0)
    inner = max(narrowest * 1e-3, 1e-13)
    blocks = []
    for sign in (1.0, -1.0):
        for f in {wm, wm - jm, wm + jm}:
            r = np.geomspace(inner, 0.5, points_per_cluster)
            blocks.append(sign * f - r[::-1])
            blocks.append(np.array([sign * f]))
            blocks.append(sign * f + r)
        blocks.append(np.linspace(sign * wm - 0.6, sign * wm + 0.6, 1501))
    outer = max(80.0, 8 * wm)
    blocks.append(np.linspace(-outer, outer, 2001))
    blocks.append(np.geomspace(outer, 1e5, 301))
    blocks.append(-np.geomspace(outer, 1e5, 301))
    return np.unique(np.concatenate(blocks))


def parseval_check(sys: DriftSystem, cfg: PhysicalConfig, grid=None) -> float:
    """Max relative mismatch between integrated spectra and Lyapunov occupations.

    Integrates each mode's occupation spectrum over the grid (composite
    Simpson) and compares against the covariance diagonal.  Wing masses are
    extrapolated with the 1/omega^2 tail model; insufficient coverage
    raises GridCoverageError instead of being reported as a mismatch.
    Modes holding no population (relative to the largest) are skipped.
    """
    cov = lyapunov_covariance(sys, cfg)
    omegas = np.asarray(grid, dtype=float) if grid is not None else integration_grid(cfg)
    occupations = [cov.c[4 + r, 4 + r].real for r in range(4)]
    biggest = max(max(occupations), 0.0)
    spectra_all = _occupation_spectra(sys, omegas)
    mismatch = 0.0
    for r in range(4):
        if biggest <= 0.0 or occupations[r] < 1e-9 * biggest:
            continue
        s = spectra_all[r]
        total = float(simpson(s, x=omegas))
        tail = abs(s[0] * omegas[0]) + abs(s[-1] * omegas[-1])
        if tail > TAIL_RTOL * abs(total):
            raise GridCoverageError(
                f"mode {r}: estimated tail mass {tail:.3e} exceeds "
                f"{TAIL_RTOL:.0e} of the integral {total:.3e}"
            )
        mismatch = max(mismatch, abs(total / (2 * np.pi) - occupations[r]) / occupations[r])
    return mismatch


def limit_check_single_mode(cfg: PhysicalConfig) -> bool:
    """Single-resonator sanity: one transmission peak, no second flow path.

    Asserts that the right-mover transmission has exactly one local maximum
    within 40 gamma_m of omega_m (the window where a second resonator would
    split it in two) and that the second-path thermal flow is identically
    zero.  Raises on two-resonator configs.
    """
    if cfg.two_resonators:
        raise ConfigError("limit_check_single_mode needs two_resonators = False")
    sys = build_bare(cfg)
    fgrid = default_feature_grid(cfg)
    omegas = fgrid.omegas(cfg.gamma_m)
    window = np.abs(omegas - cfg.omega_m) <= 40 * cfg.gamma_m
    t_r = np.empty(omegas.size)
    s2_max = 0.0
    for k, w in enumerate(omegas):
        u = susceptibility(sys, w)
        t_r[k], _ = transmission(u, cfg.kappa_ex)
        if window[k]:
            s2 = cfg.kappa_ex * cfg.gamma_m * (abs(u.u[0, 3]) ** 2 + abs(u.u[0, 7]) ** 2)
            s2_max = max(s2_max, s2)
    tw = t_r[window]
    interior_max = np.flatnonzero((tw[1:-1] > tw[:-2]) & (tw[1:-1] > tw[2:]))
    return interior_max.size == 1 and s2_max == 0.0


def basis_consistency(cfg: PhysicalConfig, omegas=None) -> float:
    """Max relative deviation of T_R between the bare and supermode bases.

    Defaults to the two candidate peak frequencies omega_m +- j_m.  The
    deviation measures the counter-rotating part of the mechanical coupling
    that the supermode construction drops; it vanishes when j_m = 0 and
    gamma_0 = 0.
    """
    if not cfg.two_resonators:
        raise ConfigError("basis_consistency needs two mechanical resonators")
    if omegas is None:
        omegas = (cfg.omega_m - cfg.effective_j_m, cfg.omega_m + cfg.effective_j_m)
    bare = build_bare(cfg)
    sup = build_supermode(cfg)
    worst = 0.0
    for w in omegas:
        t_bare, _ = transmission(susceptibility(bare, w), cfg.kappa_ex)
        t_sup, _ = transmission(susceptibility(sup, w), cfg.kappa_ex)
        worst = max(worst, abs(t_bare - t_sup) / abs(t_bare))
    return worst
