"""Physical parameters of the ring-resonator optomechanical model.

The model: a whispering-gallery resonator carrying two degenerate
counter-propagating optical modes (right- and left-moving, split by
backscattering), evanescently coupled to a nanomechanical resonator that
is itself coupled to a second mechanical resonator, both directly and
through a shared thermal reservoir.  A strong pump drives the right-moving
mode and linearizes the optomechanical interaction into effective
couplings G_R and G_L.

Unit convention: every rate and frequency is dimensionless, measured in
units of the intrinsic optical decay rate kappa_0 (so kappa_0 == 1 always).
SI quantities enter only through :func:`thermal_occupation`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from scipy.constants import hbar, k as k_B

from .errors import ConfigError

#: Sentinel for ``PhysicalConfig.g_l_mode``: derive the left-moving pump
#: coupling from g_r and the backscattering instead of taking it verbatim.
DERIVED = "derived"


class ChannelId(Enum):
    """Identity of an input noise channel."""

    OPT_IN_R = "opt_in_r"            # right port, externally accessible
    OPT_VAC_R = "opt_vac_r"          # right intrinsic-loss vacuum
    OPT_IN_L = "opt_in_l"            # left port, externally accessible
    OPT_VAC_L = "opt_vac_l"          # left intrinsic-loss vacuum
    MECH_COMMON = "mech_common"      # shared mechanical reservoir
    MECH_PRIVATE_1 = "mech_private_1"
    MECH_PRIVATE_2 = "mech_private_2"
    SUP_BRIGHT_PRIVATE = "sup_bright_private"  # symmetric combination of private baths
    SUP_DARK_PRIVATE = "sup_dark_private"      # antisymmetric combination


@dataclass(frozen=True)
class NoiseChannel:
    """One statistically independent noise input.

    ``rate`` is the decay rate associated with the channel (the input
    amplitude in the Langevin equations is sqrt(rate)); ``occupation`` is
    the thermal occupation of the channel, zero for optical vacuum and
    port channels.
    """

    id: ChannelId
    rate: float
    occupation: float
    is_signal_port: bool = False

    def __post_init__(self):
        if self.rate < 0:
            raise ConfigError(f"channel {self.id.value}: rate must be >= 0")
        if self.occupation < 0:
            raise ConfigError(f"channel {self.id.value}: occupation must be >= 0")


@dataclass(frozen=True)
class PhysicalConfig:
    """All model parameters, in units of kappa_0.

    ``kappa = kappa_ex + kappa_0`` and ``gamma_m = gamma_0 + gamma_in``
    are derived properties, never stored, so they cannot drift out of
    sync with the primitive rates.

    ``g_l_mode`` is either the string ``"derived"`` (compute G_L from G_R,
    the backscattering j_s and the optical response) or an explicit
    complex value.  With ``two_resonators = False`` the second mechanical
    resonator is absent: j_m and every coupling touching it are treated
    as exactly zero, whatever values are stored.
    """

    omega_m: float                       # mechanical frequency
    kappa_ex: float                      # external (port) optical decay
    delta_0: float                       # pump detuning omega_c - omega_p
    j_s: float = 0.0                     # optical backscattering
    j_m: float = 0.0                     # direct mechanical-mechanical coupling
    gamma_0: float = 0.0                 # decay into the common mechanical reservoir
    gamma_in: float = 0.0                # decay into each private mechanical reservoir
    g_r: complex = 0j                    # effective pump-enhanced coupling, right mover
    g_l_mode: complex | str = DERIVED
    n_th: float = 0.0                    # thermal occupation of mechanical reservoirs
    two_resonators: bool = True
    kappa_0: float = 1.0                 # intrinsic optical decay; the unit, fixed

    def __post_init__(self):
        if self.omega_m <= 0:
            raise ConfigError("omega_m must be > 0")
        if self.kappa_ex < 0 or self.gamma_0 < 0 or self.gamma_in < 0:
            raise ConfigError("decay rates must be >= 0")
        if self.n_th < 0:
            raise ConfigError("n_th must be >= 0")
        if self.kappa_0 != 1.0:
            raise ConfigError("kappa_0 is the unit of rate and must be exactly 1")
        object.__setattr__(self, "g_r", complex(self.g_r))
        if isinstance(self.g_l_mode, str):
            if self.g_l_mode != DERIVED:
                raise ConfigError(f"g_l_mode must be {DERIVED!r} or a complex value")
        else:
            object.__setattr__(self, "g_l_mode", complex(self.g_l_mode))

    @property
    def kappa(self) -> float:
        """Total optical decay kappa_ex + kappa_0."""
        return self.kappa_ex + self.kappa_0

    @property
    def gamma_m(self) -> float:
        """Total mechanical decay gamma_0 + gamma_in."""
        return self.gamma_0 + self.gamma_in

    @property
    def effective_j_m(self) -> float:
        """Mechanical coupling actually applied (zero without a second resonator)."""
        return self.j_m if self.two_resonators else 0.0

    @property
    def g_l(self) -> complex:
        """Left-mover coupling: the explicit value, or the derived one."""
        if self.g_l_mode == DERIVED:
            return derive_g_l(self)
        return self.g_l_mode


@dataclass(frozen=True)
class BareSteadyState:
    """Classical operating point of the driven system.

    The mechanical displacement enters downstream physics only through
    the quadrature beta1* + beta1, which shifts the cavity resonance; the
    solver works at the operating point where the shifted detuning equals
    omega_m.
    """

    alpha_r: complex          # right-mover amplitude
    alpha_l: complex          # left-mover amplitude, backscattering-fed
    beta1_quadrature: float   # beta1* + beta1
    beta2: complex            # static displacement of the second resonator
    pump: complex             # drive amplitude Omega
    bare_coupling: complex    # single-photon coupling g

    @property
    def g_r(self) -> complex:
        """Effective right-mover coupling g * alpha_r."""
        return self.bare_coupling * self.alpha_r

    @property
    def g_l(self) -> complex:
        """Effective left-mover coupling g * alpha_l."""
        return self.bare_coupling * self.alpha_l


def derive_g_l(cfg: PhysicalConfig) -> complex:
    """Left-mover coupling implied by backscattering of the pump.

    The pump feeds the counter-propagating mode only through j_s, filtered
    by the optical response at the operating point, so

        G_L = i j_s G_R / (-kappa/2 - i omega_m).

    Total on any valid config; returns 0 when j_s = 0.
    """
    return 1j * cfg.j_s * cfg.g_r / (-cfg.kappa / 2 - 1j * cfg.omega_m)


def steady_state(cfg: PhysicalConfig, pump: complex, bare_g: complex) -> BareSteadyState:
    """Solve the factorized classical steady state for a given drive.

    Parameters
    ----------
    cfg:
        Model parameters; delta_0 sets the static mechanical displacement
        through the operating-point condition
        omega_m = delta_0 - g (beta1* + beta1).
    pump:
        Drive amplitude Omega (units of kappa_0).
    bare_g:
        Single-photon optomechanical coupling g.  Must be nonzero when
        delta_0 != omega_m, otherwise the displacement quadrature is
        undefined.

    Returns
    -------
    BareSteadyState
        Optical amplitudes, mechanical displacement quadrature, and the
        static displacement of the second resonator (leading order in
        gamma/omega_m).
    """
    d = -cfg.kappa / 2 - 1j * cfg.omega_m
    if bare_g == 0:
        if cfg.delta_0 != cfg.omega_m:
            raise ConfigError(
                "bare_g = 0 with delta_0 != omega_m: displacement quadrature undefined"
            )
        quadrature = 0.0
    else:
        quadrature = complex((cfg.delta_0 - cfg.omega_m) / bare_g).real
    alpha_r = 1j * pump / (d + cfg.j_s**2 / d)
    alpha_l = 1j * cfg.j_s * alpha_r / d
    beta2 = -(cfg.effective_j_m / cfg.omega_m) * quadrature + 0j
    return BareSteadyState(
        alpha_r=alpha_r,
        alpha_l=alpha_l,
        beta1_quadrature=quadrature,
        beta2=beta2,
        pump=complex(pump),
        bare_coupling=complex(bare_g),
    )


def thermal_occupation(omega_m_si: float, temperature: float) -> float:
    """Bose-Einstein phonon occupation of a reservoir.

    Parameters
    ----------
    omega_m_si:
        Mechanical angular frequency in rad/s.
    temperature:
        Reservoir temperature in kelvin.
    """
    if omega_m_si <= 0:
        raise ConfigError("omega_m_si must be > 0")
    if temperature <= 0:
        raise ConfigError("temperature must be > 0")
    x = hbar * omega_m_si / (k_B * temperature)
    try:
        return 1.0 / math.expm1(x)
    except OverflowError:
        return 0.0


# --- configuration files -----------------------------------------------------
#
# Flat `key = value` text, one entry per line, `#` starts a comment.  Keys are
# exactly the PhysicalConfig field names; complex values are written in Python
# literal form (`re+imj`); booleans are `true`/`false`; g_l_mode is either the
# word `derived` or a complex value.  Unknown keys are a hard error.

_REQUIRED_KEYS = ("omega_m", "kappa_ex", "delta_0")
_FLOAT_KEYS = ("omega_m", "kappa_0", "kappa_ex", "delta_0", "j_s", "j_m",
               "gamma_0", "gamma_in", "n_th")
_COMPLEX_KEYS = ("g_r",)
_BOOL_KEYS = ("two_resonators",)
_ALL_KEYS = _FLOAT_KEYS + _COMPLEX_KEYS + _BOOL_KEYS + ("g_l_mode",)


def _parse_value(key: str, raw: str):
    if key in _FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"key {key!r}: cannot parse {raw!r} as a real number") from None
    if key in _COMPLEX_KEYS:
        try:
            return complex(raw.replace(" ", ""))
        except ValueError:
            raise ConfigError(f"key {key!r}: cannot parse {raw!r} as a complex number") from None
    if key in _BOOL_KEYS:
        low = raw.lower()
        if low in ("true", "false"):
            return low == "true"
        raise ConfigError(f"key {key!r}: expected true or false, got {raw!r}")
    # g_l_mode: the word `derived` or a complex literal
    if raw.lower() == DERIVED:
        return DERIVED
    try:
        return complex(raw.replace(" ", ""))
    except ValueError:
        raise ConfigError(
            f"key 'g_l_mode': expected 'derived' or a complex value, got {raw!r}"
        ) from None


def parse_config_text(text: str) -> PhysicalConfig:
    """Parse configuration text into a validated PhysicalConfig."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw)
    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    return PhysicalConfig(**values)  # type: ignore[arg-type]


def load_config(path: str | Path) -> PhysicalConfig:
    """Read a configuration file from disk."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)
