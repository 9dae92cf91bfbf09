"""Named parameter sets and their sweep grids.

Each preset reproduces one studied regime: `fig2_*` the sideband-resolved
isolator (omega_m = 5 kappa_0), `fig3` its noise-path decomposition on a
gamma_m-normalized axis, `fig4_*` the sideband-unresolved directional
amplifier (omega_m = 0.1 kappa_0), and `fig5_*` the strong-backscattering
variants of both regimes.  `_one` presets drop the second mechanical
resonator and serve as the no-interference reference.

All presets carry n_th = 1e5, the occupation of a ~60 MHz resonator at
room temperature, so normalized noise floors map onto absolute photon
numbers directly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .grid import FrequencyGrid, GridSpan, GridUnits, Spacing
from .params import PhysicalConfig

#: Fixed serialization column order for bare-basis sweeps.
BARE_COLUMNS = ("omega", "omega_norm", "T_R", "T_L", "R_R", "R_L",
                "S_R_th", "S1", "S2", "S_R_vac", "S_R_out", "isolation_db")

#: Supermode sweeps replace the path decomposition by the bright/dark one.
SUPERMODE_COLUMNS = ("omega", "omega_norm", "T_R", "T_L", "R_R", "R_L",
                     "S_R_th", "S_plus", "S_minus", "S_R_vac", "S_R_out",
                     "isolation_db")


@dataclass(frozen=True)
class Preset:
    name: str
    config: PhysicalConfig
    grid: FrequencyGrid
    outputs: tuple[str, ...] = BARE_COLUMNS


def _config(omega_m: float, g_r: float, j_m: float, j_s: float,
            two_resonators: bool) -> PhysicalConfig:
    return PhysicalConfig(
        omega_m=omega_m,
        kappa_ex=1.0,
        delta_0=omega_m,
        j_s=j_s,
        j_m=j_m,
        gamma_0=omega_m / 1e4,
        gamma_in=omega_m / 1e8,
        g_r=g_r,
        n_th=1e5,
        two_resonators=two_resonators,
    )


def default_feature_grid(cfg: PhysicalConfig) -> FrequencyGrid:
    """Grid resolving the mechanical features on the optical background.

    A coarse wing spans the cavity-scale structure; a denser linear span
    and three geometric clusters (on omega_m and omega_m +- j_m) resolve
    the linewidth-narrow transparency/amplification features, which sit
    three to four orders of magnitude below the optical linewidth.
    """
    gm = cfg.gamma_m
    if gm <= 0:
        raise ConfigError("feature grid needs gamma_m > 0")
    jm = cfg.j_m   # keep the one- and two-resonator grids identical
    wing = 0.12 * cfg.omega_m if cfg.omega_m > 1 else 1.2
    spans = [
        GridSpan(-wing, wing, 1001),
        GridSpan(-12 * gm, 12 * gm, 1201),
        GridSpan(-8 * gm, 8 * gm, 601, Spacing.LOG_CLUSTER),
    ]
    if jm > 0:
        spans += [
            GridSpan(-jm - 8 * gm, -jm + 8 * gm, 601, Spacing.LOG_CLUSTER),
            GridSpan(jm - 8 * gm, jm + 8 * gm, 601, Spacing.LOG_CLUSTER),
        ]
    return FrequencyGrid(cfg.omega_m, tuple(spans), GridUnits.KAPPA0)


def _gamma_norm_grid(cfg: PhysicalConfig, lo: float, hi: float,
                     points: int, clusters: bool) -> FrequencyGrid:
    spans = [GridSpan(lo, hi, points)]
    if clusters:
        spans += [
            GridSpan(-28.0, -12.0, 401, Spacing.LOG_CLUSTER),
            GridSpan(-8.0, 8.0, 401, Spacing.LOG_CLUSTER),
            GridSpan(12.0, 28.0, 401, Spacing.LOG_CLUSTER),
        ]
    return FrequencyGrid(cfg.omega_m, tuple(spans), GridUnits.GAMMA_M)


def _build_presets() -> dict[str, Preset]:
    resolved_one = _config(5.0, 0.1, 0.01, 0.1, two_resonators=False)
    resolved_two = _config(5.0, 0.1, 0.01, 0.1, two_resonators=True)
    unresolved_one = _config(0.1, 0.01, 0.0002, 0.1, two_resonators=False)
    unresolved_two = _config(0.1, 0.01, 0.0002, 0.1, two_resonators=True)
    strong_resolved = _config(5.0, 0.1, 0.01, 1.0, two_resonators=True)
    strong_unresolved = _config(0.1, 0.01, 0.0002, 0.45, two_resonators=True)

    presets = [
        Preset("fig2_one", resolved_one, default_feature_grid(resolved_one)),
        Preset("fig2_two", resolved_two, default_feature_grid(resolved_two)),
        # noise-path decomposition on the gamma_m-normalized axis
        Preset("fig3", resolved_two,
               _gamma_norm_grid(resolved_two, -40.0, 0.0, 4001, clusters=False)),
        Preset("fig4_one", unresolved_one, default_feature_grid(unresolved_one)),
        Preset("fig4_two", unresolved_two, default_feature_grid(unresolved_two)),
        Preset("fig5_resolved", strong_resolved,
               _gamma_norm_grid(strong_resolved, -40.0, 40.0, 2801, clusters=True)),
        Preset("fig5_unresolved", strong_unresolved,
               _gamma_norm_grid(strong_unresolved, -40.0, 40.0, 2801, clusters=True)),
    ]
    return {p.name: p for p in presets}


PRESETS: dict[str, Preset] = _build_presets()


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {name!r}; available: {known}") from None
