"""Frequency-domain response and output spectra.

Everything here is read off the susceptibility U(omega) = (M - i omega I)^-1:
transmission and reflection of the two port directions, the thermal noise
the mechanical reservoirs inject into each output, its decomposition into
the two interfering flow paths (or into bright/dark supermode channels),
and the vacuum noise floor.  Output spectra compose as

    S_R,out = T_R S_R,in + R_R S_L,in + S_R,th + S_R,vac

and likewise for the left port.  Thermal spectra are returned normalized
by the reservoir occupation n_th, matching the usual way these curves are
plotted; the composition step restores absolute units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import DIM, Basis, DriftSystem, check_stability
from .errors import ConfigError, ResonantSingularityError, UnstableSystemError
from .grid import FrequencyGrid
from .params import PhysicalConfig

#: Condition-number estimate above which a probe frequency is treated as
#: resonantly singular.
CONDITION_LIMIT = 1e12

#: Defining-property tolerance: max-norm of (M - i omega I) U - I.
RESIDUAL_LIMIT = 1e-10

_I8 = np.eye(DIM)


@dataclass(frozen=True)
class Susceptibility:
    """U(omega) for one probe frequency, tagged with its basis."""

    omega: float
    u: np.ndarray            # (8, 8) complex
    basis: Basis

    def __post_init__(self):
        self.u.setflags(write=False)


def susceptibility(sys: DriftSystem, omega: float) -> Susceptibility:
    """Solve (M - i omega I) U = I by direct LU factorization.

    The matrix is never inverted explicitly; the identity columns are
    solved through one factorization.  Frequencies where the condition
    estimate exceeds CONDITION_LIMIT, or where the residual betrays a
    failed solve, raise ResonantSingularityError carrying omega.

    The residual gate scales with the conditioning: an exactly decoupled
    linewidth-narrow mode probed on its own resonance pushes max|U| so
    high that no double-precision representation of U can beat
    eps * |A| * |U|, even though every port observable remains perfectly
    conditioned.  On the shipped sweep grids the residual stays below
    RESIDUAL_LIMIT outright (enforced by the acceptance suite).
    """
    a = sys.m - 1j * omega * _I8
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise ResonantSingularityError(omega, cond)
    try:
        u = np.linalg.solve(a, _I8)
    except np.linalg.LinAlgError:
        raise ResonantSingularityError(omega, cond) from None
    residual = float(np.abs(a @ u - _I8).max())
    if residual >= max(RESIDUAL_LIMIT, 100 * np.finfo(float).eps * cond):
        raise ResonantSingularityError(omega, cond)
    return Susceptibility(float(omega), u, sys.basis)


def _mag2(z: complex) -> np.longdouble:
    # |z|^2 accumulated in extended precision; deep-isolation transmissions
    # live many decades below the individual terms.
    re = np.longdouble(z.real)
    im = np.longdouble(z.imag)
    return re * re + im * im


def _transmission_ld(u: Susceptibility, kappa_ex: float):
    kex = np.longdouble(kappa_ex)
    t_r = _mag2(kappa_ex * u.u[0, 0] - 1.0) + kex * kex * _mag2(u.u[0, 4])
    t_l = _mag2(kappa_ex * u.u[1, 1] - 1.0) + kex * kex * _mag2(u.u[1, 5])
    return t_r, t_l


def transmission(u: Susceptibility, kappa_ex: float) -> tuple[float, float]:
    """Port-to-port transmission (T_R, T_L).

    T_R = |kappa_ex U11 - 1|^2 + kappa_ex^2 |U15|^2, and the left mover
    reads rows 2/6.  The same index pattern applies in either basis.
    """
    t_r, t_l = _transmission_ld(u, kappa_ex)
    return float(t_r), float(t_l)


def reflection(u: Susceptibility, kappa_ex: float) -> tuple[float, float]:
    """Backscattering-mediated reflection (R_R, R_L)."""
    kex2 = kappa_ex * kappa_ex
    r_r = kex2 * float(_mag2(u.u[0, 1]) + _mag2(u.u[0, 5]))
    r_l = kex2 * float(_mag2(u.u[1, 0]) + _mag2(u.u[1, 4]))
    return r_r, r_l


def _bare_thermal_row(u: np.ndarray, cfg: PhysicalConfig, row: int) -> float:
    kex, g0, gin = cfg.kappa_ex, cfg.gamma_0, cfg.gamma_in
    coherent = abs(u[row, 2] + u[row, 3]) ** 2 + abs(u[row, 6] + u[row, 7]) ** 2
    incoherent = (abs(u[row, 2]) ** 2 + abs(u[row, 3]) ** 2
                  + abs(u[row, 6]) ** 2 + abs(u[row, 7]) ** 2)
    return kex * g0 * coherent + kex * gin * incoherent


def thermal_spectrum(u: Susceptibility, cfg: PhysicalConfig):
    """Thermal output noise and its two-path decomposition, per unit n_th.

    Returns (s_r_th, s_l_th, s1, s2).  The coherent sum |U13 + U14|^2 in
    the common-reservoir term is kept verbatim: that cross term carries the
    interference between the two noise flow paths.  s1/s2 are the separate
    flows through the first and second resonator into the right port,
    weighted by the full mechanical linewidth gamma_m.
    """
    if u.basis is not Basis.BARE:
        raise ConfigError("thermal_spectrum needs a bare-basis susceptibility")
    kex, gm = cfg.kappa_ex, cfg.gamma_m
    s_r = _bare_thermal_row(u.u, cfg, 0)
    s_l = _bare_thermal_row(u.u, cfg, 1)
    s1 = kex * gm * (abs(u.u[0, 2]) ** 2 + abs(u.u[0, 6]) ** 2)
    s2 = kex * gm * (abs(u.u[0, 3]) ** 2 + abs(u.u[0, 7]) ** 2)
    return s_r, s_l, s1, s2


def _supermode_thermal_row(u: np.ndarray, cfg: PhysicalConfig, row: int):
    kex, gin = cfg.kappa_ex, cfg.gamma_in
    gp = gin + 2 * cfg.gamma_0
    bright = kex * gp * (abs(u[row, 2]) ** 2 + abs(u[row, 6]) ** 2)
    dark = kex * gin * (abs(u[row, 3]) ** 2 + abs(u[row, 7]) ** 2)
    return bright, dark


def supermode_thermal(u_tilde: Susceptibility, cfg: PhysicalConfig) -> tuple[float, float]:
    """Bright/dark decomposition of the right-port thermal noise, per unit n_th.

    The total thermal spectrum in this basis is exactly s_plus + s_minus;
    the supermode channels carry no cross coherence by construction.
    """
    if u_tilde.basis is not Basis.SUPERMODE:
        raise ConfigError("supermode_thermal needs a supermode-basis susceptibility")
    return _supermode_thermal_row(u_tilde.u, cfg, 0)


def vacuum_spectrum(u: Susceptibility, cfg: PhysicalConfig) -> tuple[float, float]:
    """Vacuum noise added to each output (absolute units)."""
    kex, k0, g0, gin = cfg.kappa_ex, cfg.kappa_0, cfg.gamma_0, cfg.gamma_in
    out = []
    for row in (0, 1):
        uu = u.u
        optical = kex * (kex + k0) * (abs(uu[row, 4]) ** 2 + abs(uu[row, 5]) ** 2)
        if u.basis is Basis.BARE:
            mech = (kex * g0 * abs(uu[row, 6] + uu[row, 7]) ** 2
                    + kex * gin * (abs(uu[row, 6]) ** 2 + abs(uu[row, 7]) ** 2))
        else:
            gp = gin + 2 * g0
            mech = kex * gp * abs(uu[row, 6]) ** 2 + kex * gin * abs(uu[row, 7]) ** 2
        out.append(optical + mech)
    return out[0], out[1]


def isolation_db(t_r: float, t_l: float) -> float:
    """Nonreciprocity 10 log10(T_R / T_L), in dB.

    t_l = 0 maps to a signed-infinity sentinel rather than an exception,
    so fully dark reverse directions survive serialization.
    """
    if t_l == 0:
        return float(np.inf) if t_r > 0 else float(-np.inf)
    ratio = np.longdouble(t_r) / np.longdouble(t_l)
    return float(10.0 * np.log10(ratio))


@dataclass(frozen=True)
class SpectraPoint:
    """Every per-frequency quantity, thermal parts normalized by n_th.

    s1/s2 are filled in the bare basis, s_plus/s_minus in the supermode
    basis; the inapplicable pair is None.
    """

    omega: float
    basis: Basis
    t_r: float
    t_l: float
    r_r: float
    r_l: float
    s_r_th: float
    s_l_th: float
    s1: float | None
    s2: float | None
    s_plus: float | None
    s_minus: float | None
    s_r_vac: float
    s_l_vac: float
    n_th: float
    isolation_db: float


def evaluate_point(sys: DriftSystem, cfg: PhysicalConfig, omega: float) -> SpectraPoint:
    """All spectra at one probe frequency."""
    u = susceptibility(sys, omega)
    t_r_ld, t_l_ld = _transmission_ld(u, cfg.kappa_ex)
    r_r, r_l = reflection(u, cfg.kappa_ex)
    s_r_vac, s_l_vac = vacuum_spectrum(u, cfg)
    if sys.basis is Basis.BARE:
        s_r_th, s_l_th, s1, s2 = thermal_spectrum(u, cfg)
        s_plus = s_minus = None
    else:
        s_plus, s_minus = _supermode_thermal_row(u.u, cfg, 0)
        bright_l, dark_l = _supermode_thermal_row(u.u, cfg, 1)
        s_r_th, s_l_th = s_plus + s_minus, bright_l + dark_l
        s1 = s2 = None
    if t_l_ld == 0:
        iso = float(np.inf) if t_r_ld > 0 else float(-np.inf)
    else:
        iso = float(10.0 * np.log10(t_r_ld / t_l_ld))
    return SpectraPoint(
        omega=float(omega), basis=sys.basis,
        t_r=float(t_r_ld), t_l=float(t_l_ld), r_r=r_r, r_l=r_l,
        s_r_th=s_r_th, s_l_th=s_l_th, s1=s1, s2=s2,
        s_plus=s_plus, s_minus=s_minus,
        s_r_vac=s_r_vac, s_l_vac=s_l_vac, n_th=cfg.n_th, isolation_db=iso,
    )


def compose_output(point: SpectraPoint, s_r_in: float, s_l_in: float) -> tuple[float, float]:
    """Absolute output spectra for given input spectra at the same omega."""
    s_r_out = (point.t_r * s_r_in + point.r_r * s_l_in
               + point.s_r_th * point.n_th + point.s_r_vac)
    s_l_out = (point.t_l * s_l_in + point.r_l * s_r_in
               + point.s_l_th * point.n_th + point.s_l_vac)
    return s_r_out, s_l_out


@dataclass(frozen=True)
class SpectraBundle:
    """Column-oriented spectra over a frequency grid.

    All arrays share the grid's length.  Thermal columns are per unit
    n_th; s_r_out/s_l_out are the composed output spectra divided by n_th
    (absolute when n_th = 0, where the thermal part vanishes anyway), the
    normalization the noise panels are plotted in.
    """

    basis: Basis
    omega: np.ndarray
    omega_norm: np.ndarray
    t_r: np.ndarray
    t_l: np.ndarray
    r_r: np.ndarray
    r_l: np.ndarray
    s_r_th: np.ndarray
    s_l_th: np.ndarray
    s1: np.ndarray | None
    s2: np.ndarray | None
    s_plus: np.ndarray | None
    s_minus: np.ndarray | None
    s_r_vac: np.ndarray
    s_l_vac: np.ndarray
    s_r_out: np.ndarray
    s_l_out: np.ndarray
    isolation_db: np.ndarray
    stable: bool

    def __len__(self) -> int:
        return self.omega.size

    def column(self, name: str) -> np.ndarray:
        """Fetch a column by its serialized name (e.g. 'T_R', 'S1')."""
        arr = getattr(self, _COLUMN_ATTRS[name])
        if arr is None:
            raise KeyError(f"column {name} not present in {self.basis.value} basis")
        return arr


_COLUMN_ATTRS = {
    "omega": "omega", "omega_norm": "omega_norm",
    "T_R": "t_r", "T_L": "t_l", "R_R": "r_r", "R_L": "r_l",
    "S_R_th": "s_r_th", "S_L_th": "s_l_th",
    "S1": "s1", "S2": "s2", "S_plus": "s_plus", "S_minus": "s_minus",
    "S_R_vac": "s_r_vac", "S_L_vac": "s_l_vac",
    "S_R_out": "s_r_out", "S_L_out": "s_l_out",
    "isolation_db": "isolation_db",
}


def sweep(sys: DriftSystem, cfg: PhysicalConfig, grid,
          s_r_in: float = 0.0, s_l_in: float = 0.0,
          allow_unstable: bool = False) -> SpectraBundle:
    """Evaluate all spectra over a frequency grid.

    ``grid`` is a FrequencyGrid or any sequence of frequencies; raw
    sequences are swept in the order given (so callers control ordering)
    and get omega_norm in kappa_0 offsets from omega_m.  Points are
    evaluated independently (and could be evaluated in any order or in
    parallel); per-point singularities propagate with their omega
    attached.  Unstable systems are refused unless ``allow_unstable`` is
    set, in which case the bundle is flagged.
    """
    report = check_stability(sys)
    if not report.stable and not allow_unstable:
        raise UnstableSystemError(
            f"drift matrix has min Re(eigenvalue) = {report.min_real_part:.6g}; "
            "sweep refused without allow_unstable"
        )
    if isinstance(grid, FrequencyGrid):
        omegas = grid.omegas(cfg.gamma_m)
        omega_norm = grid.normalize(omegas, cfg.gamma_m)
    else:
        omegas = np.asarray(grid, dtype=float)
        omega_norm = omegas - cfg.omega_m
    n = omegas.size

    cols = {name: np.empty(n) for name in
            ("t_r", "t_l", "r_r", "r_l", "s_r_th", "s_l_th",
             "s_r_vac", "s_l_vac", "s_r_out", "s_l_out", "isolation_db")}
    decomp = {name: np.empty(n) for name in
              (("s1", "s2") if sys.basis is Basis.BARE else ("s_plus", "s_minus"))}
    scale = cfg.n_th if cfg.n_th > 0 else 1.0

    for k in range(n):
        p = evaluate_point(sys, cfg, omegas[k])
        out_r, out_l = compose_output(p, s_r_in, s_l_in)
        for name in ("t_r", "t_l", "r_r", "r_l", "s_r_th", "s_l_th",
                     "s_r_vac", "s_l_vac", "isolation_db"):
            cols[name][k] = getattr(p, name)
        cols["s_r_out"][k] = out_r / scale
        cols["s_l_out"][k] = out_l / scale
        for name in decomp:
            decomp[name][k] = getattr(p, name)

    return SpectraBundle(
        basis=sys.basis, omega=omegas, omega_norm=np.asarray(omega_norm, dtype=float),
        s1=decomp.get("s1"), s2=decomp.get("s2"),
        s_plus=decomp.get("s_plus"), s_minus=decomp.get("s_minus"),
        stable=report.stable, **cols,
    )
