"""Drift matrix and noise-input map of the linearized dynamics.

The fluctuation vector is ordered

    V = (da_R, da_L, db_1, db_2, da_R+, da_L+, db_1+, db_2+)

and evolves as dV/dt = -M V + V_in.  In the supermode basis the mechanical
entries are replaced by the bright/dark combinations b_pm = (b_1 +- b_2)/sqrt(2):
the bright mode couples to the common reservoir with amplitude sqrt(2 gamma_0)
while the dark mode decouples from it entirely, which is the mechanism that
cancels the common-reservoir thermal noise.

Stability: the system relaxes iff every eigenvalue of M has positive real
part (the drift enters with a minus sign).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, EigenSolverError
from .params import ChannelId, NoiseChannel, PhysicalConfig

DIM = 8

#: Relative floor under max|eigenvalue| below which a real part counts as zero.
STABILITY_RTOL = 1e-12


class Basis(Enum):
    BARE = "bare"
    SUPERMODE = "supermode"


@dataclass(frozen=True)
class DriftSystem:
    """Drift matrix plus the map from noise channels onto the dynamics.

    ``input_map[i, c]`` is the amplitude multiplying channel c's noise
    operator in row i of V_in; rows 4..7 multiply the daggered operator of
    the same channel.  Arrays are frozen after construction.
    """

    basis: Basis
    m: np.ndarray                      # (8, 8) complex drift matrix
    input_map: np.ndarray              # (8, n_channels) real amplitudes
    channels: tuple[NoiseChannel, ...]

    def __post_init__(self):
        self.m.setflags(write=False)
        self.input_map.setflags(write=False)

    def channel_index(self, cid: ChannelId) -> int:
        for i, ch in enumerate(self.channels):
            if ch.id is cid:
                return i
        raise KeyError(cid)


@dataclass(frozen=True)
class StabilityReport:
    """Eigenvalues of the drift matrix and the stability verdict."""

    eigenvalues: np.ndarray   # (8,) complex, sorted by (Re, Im) ascending
    min_real_part: float
    stable: bool
    tol: float

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)


def _swap_conjugate_blocks(a: np.ndarray) -> np.ndarray:
    """Exchange the first and last four rows and columns."""
    perm = [4, 5, 6, 7, 0, 1, 2, 3]
    return a[np.ix_(perm, perm)]


def conjugation_defect(m: np.ndarray) -> float:
    """Max deviation from the doubled-space symmetry M = S conj(M) S."""
    return float(np.abs(m - _swap_conjugate_blocks(m.conj())).max())


def build_bare(cfg: PhysicalConfig) -> DriftSystem:
    """Assemble the drift system in the physical (b_1, b_2) basis.

    Entries follow the linearized Langevin equations at the operating point
    (shifted detuning equal to omega_m), including the dissipative
    cross-coupling i j_m + gamma_0/2 between the two mechanical resonators
    induced by their shared reservoir.  With ``two_resonators = False`` the
    db_2 rows and columns keep only their diagonal decay and every coupling
    to b_2, including its noise inputs, vanishes.
    """
    wm, kap, gm = cfg.omega_m, cfg.kappa, cfg.gamma_m
    js, jm, g0, gin = cfg.j_s, cfg.effective_j_m, cfg.gamma_0, cfg.gamma_in
    gr, gl = cfg.g_r, cfg.g_l
    grc, glc = gr.conjugate(), gl.conjugate()
    i = 1j

    m = np.array([
        [i*wm + kap/2, i*js, -i*gr, 0, 0, 0, -i*gr, 0],
        [i*js, i*wm + kap/2, -i*gl, 0, 0, 0, -i*gl, 0],
        [-i*grc, -i*glc, i*wm + gm/2, i*jm + g0/2, -i*gr, -i*gl, 0, i*jm],
        [0, 0, i*jm + g0/2, i*wm + gm/2, 0, 0, i*jm, 0],
        [0, 0, i*grc, 0, kap/2 - i*wm, -i*js, i*grc, 0],
        [0, 0, i*glc, 0, -i*js, kap/2 - i*wm, i*glc, 0],
        [i*grc, i*glc, 0, -i*jm, i*gr, i*gl, gm/2 - i*wm, -i*jm + g0/2],
        [0, 0, -i*jm, 0, 0, 0, -i*jm + g0/2, gm/2 - i*wm],
    ], dtype=complex)

    channels = (
        NoiseChannel(ChannelId.OPT_IN_R, cfg.kappa_ex, 0.0, is_signal_port=True),
        NoiseChannel(ChannelId.OPT_VAC_R, cfg.kappa_0, 0.0),
        NoiseChannel(ChannelId.OPT_IN_L, cfg.kappa_ex, 0.0, is_signal_port=True),
        NoiseChannel(ChannelId.OPT_VAC_L, cfg.kappa_0, 0.0),
        NoiseChannel(ChannelId.MECH_COMMON, g0, cfg.n_th),
        NoiseChannel(ChannelId.MECH_PRIVATE_1, gin, cfg.n_th),
        NoiseChannel(ChannelId.MECH_PRIVATE_2, gin, cfg.n_th),
    )
    lmap = np.zeros((DIM, len(channels)))
    lmap[0, 0], lmap[0, 1] = math.sqrt(cfg.kappa_ex), math.sqrt(cfg.kappa_0)
    lmap[1, 2], lmap[1, 3] = math.sqrt(cfg.kappa_ex), math.sqrt(cfg.kappa_0)
    lmap[2, 4], lmap[2, 5] = math.sqrt(g0), math.sqrt(gin)
    lmap[3, 4], lmap[3, 6] = math.sqrt(g0), math.sqrt(gin)

    if not cfg.two_resonators:
        # b_2 absent: strip its couplings and inputs, keep the diagonal decay
        for idx in (3, 7):
            diag = m[idx, idx]
            m[idx, :] = 0
            m[:, idx] = 0
            m[idx, idx] = diag
        lmap[3, :] = 0.0

    lmap[4:] = lmap[:4]
    return DriftSystem(Basis.BARE, m, lmap, channels)


def build_supermode(cfg: PhysicalConfig) -> DriftSystem:
    """Assemble the drift system in the bright/dark mechanical basis.

    The direct mechanical coupling is rotating-wave reduced before mixing,
    so the bright and dark modes sit at omega_m +- j_m with decays
    gamma_+ = gamma_in + 2 gamma_0 and gamma_in; each couples to both
    optical movers with strength G/sqrt(2).  Only the bright row receives
    the common-reservoir noise, at amplitude sqrt(2 gamma_0).
    """
    if not cfg.two_resonators:
        raise ConfigError("supermode basis requires two mechanical resonators")
    wm, kap = cfg.omega_m, cfg.kappa
    js, jm, g0, gin = cfg.j_s, cfg.effective_j_m, cfg.gamma_0, cfg.gamma_in
    gp = gin + 2 * g0
    wplus, wminus = wm + jm, wm - jm
    grp, glp = cfg.g_r / math.sqrt(2), cfg.g_l / math.sqrt(2)
    grpc, glpc = grp.conjugate(), glp.conjugate()
    i = 1j

    m = np.array([
        [kap/2 + i*wm, i*js, -i*grp, -i*grp, 0, 0, -i*grp, -i*grp],
        [i*js, kap/2 + i*wm, -i*glp, -i*glp, 0, 0, -i*glp, -i*glp],
        [-i*grpc, -i*glpc, gp/2 + i*wplus, 0, -i*grp, -i*glp, 0, 0],
        [-i*grpc, -i*glpc, 0, gin/2 + i*wminus, -i*grp, -i*glp, 0, 0],
        [0, 0, i*grpc, i*grpc, kap/2 - i*wm, -i*js, i*grpc, i*grpc],
        [0, 0, i*glpc, i*glpc, -i*js, kap/2 - i*wm, i*glpc, i*glpc],
        [i*grpc, i*glpc, 0, 0, i*grp, i*glp, gp/2 - i*wplus, 0],
        [i*grpc, i*glpc, 0, 0, i*grp, i*glp, 0, gin/2 - i*wminus],
    ], dtype=complex)

    channels = (
        NoiseChannel(ChannelId.OPT_IN_R, cfg.kappa_ex, 0.0, is_signal_port=True),
        NoiseChannel(ChannelId.OPT_VAC_R, cfg.kappa_0, 0.0),
        NoiseChannel(ChannelId.OPT_IN_L, cfg.kappa_ex, 0.0, is_signal_port=True),
        NoiseChannel(ChannelId.OPT_VAC_L, cfg.kappa_0, 0.0),
        NoiseChannel(ChannelId.MECH_COMMON, 2 * g0, cfg.n_th),
        NoiseChannel(ChannelId.SUP_BRIGHT_PRIVATE, gin, cfg.n_th),
        NoiseChannel(ChannelId.SUP_DARK_PRIVATE, gin, cfg.n_th),
    )
    lmap = np.zeros((DIM, len(channels)))
    lmap[0, 0], lmap[0, 1] = math.sqrt(cfg.kappa_ex), math.sqrt(cfg.kappa_0)
    lmap[1, 2], lmap[1, 3] = math.sqrt(cfg.kappa_ex), math.sqrt(cfg.kappa_0)
    lmap[2, 4], lmap[2, 5] = math.sqrt(2 * g0), math.sqrt(gin)
    lmap[3, 6] = math.sqrt(gin)   # the dark mode never sees the common reservoir
    lmap[4:] = lmap[:4]
    return DriftSystem(Basis.SUPERMODE, m, lmap, channels)


def check_stability(sys: DriftSystem) -> StabilityReport:
    """Full eigenspectrum of the drift matrix and the stability verdict.

    Eigenvalues are ordered by (Re, Im) ascending so reports are
    reproducible.  A failed eigenvalue iteration raises EigenSolverError
    rather than being reported as instability.
    """
    try:
        ev = np.linalg.eigvals(sys.m)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue iteration failed: {exc}") from exc
    order = np.lexsort((ev.imag, ev.real))
    ev = ev[order]
    tol = STABILITY_RTOL * float(np.abs(ev).max(initial=0.0))
    min_real = float(ev.real.min())
    return StabilityReport(ev, min_real, stable=min_real > tol, tol=tol)
