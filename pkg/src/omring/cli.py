"""Command-line front end: presets, sweeps, verification, serialization.

Exit codes: 0 success; 2 unstable system without --allow-unstable;
3 configuration error (bad flags, bad config file, unknown preset);
4 numerical failure (resonant singularity, eigensolver breakdown, grid
coverage).  All errors are also printed as a JSON object on stderr.

Output layout: the data table goes to --output (or stdout).  With
--output PATH, auxiliary JSON documents are written next to it
(PATH.config.json sidecar for CSV runs, PATH.verify.json under --verify,
PATH.matrices.json under --dump-matrices); without --output they go to
stderr.  The environment variable OMRING_OUTDIR, when set, prefixes
relative --output paths.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
from pathlib import Path

import numpy as np

from . import verify as verify_mod
from .dynamics import Basis, DriftSystem, build_bare, build_supermode, check_stability
from .errors import (ConfigError, EigenSolverError, GridCoverageError,
                     OmringError, ResonantSingularityError, UnstableSystemError)
from .grid import FrequencyGrid, GridSpan, GridUnits
from .params import DERIVED, PhysicalConfig, load_config
from .presets import BARE_COLUMNS, PRESETS, SUPERMODE_COLUMNS, default_feature_grid, get_preset
from .spectra import SpectraBundle, sweep

_SM_EXTRA_COLUMNS = ("T_R_sm", "T_L_sm", "R_R_sm", "R_L_sm", "S_R_th_sm",
                     "S_plus", "S_minus", "S_R_vac_sm", "S_R_out_sm",
                     "isolation_db_sm")


def _fmt(x: float) -> str:
    # 17 significant digits round-trips doubles exactly
    return format(float(x), ".17g")


def _complex_json(z: complex) -> list[float]:
    return [z.real, z.imag]


def _config_dict(cfg: PhysicalConfig) -> dict:
    return {
        "omega_m": cfg.omega_m,
        "kappa_0": cfg.kappa_0,
        "kappa_ex": cfg.kappa_ex,
        "delta_0": cfg.delta_0,
        "j_s": cfg.j_s,
        "j_m": cfg.j_m,
        "gamma_0": cfg.gamma_0,
        "gamma_in": cfg.gamma_in,
        "g_r": _complex_json(cfg.g_r),
        "g_l_mode": DERIVED if cfg.g_l_mode == DERIVED else _complex_json(cfg.g_l_mode),
        "n_th": cfg.n_th,
        "two_resonators": cfg.two_resonators,
        "kappa": cfg.kappa,
        "gamma_m": cfg.gamma_m,
        "g_l_resolved": _complex_json(cfg.g_l),
    }


def serialize(bundle: SpectraBundle, format: str = "csv") -> bytes:
    """Render one bundle as CSV or JSON bytes, bit-stable across runs."""
    columns = BARE_COLUMNS if bundle.basis is Basis.BARE else SUPERMODE_COLUMNS
    if format == "csv":
        return _csv_bytes(columns, [bundle.column(c) for c in columns])
    if format == "json":
        doc = {
            "basis": bundle.basis.value,
            "stable": bundle.stable,
            "columns": list(columns),
            "rows": _rows(columns, [bundle.column(c) for c in columns]),
        }
        return (json.dumps(doc, indent=1) + "\n").encode()
    raise ConfigError(f"unknown format {format!r}")


def _rows(columns, arrays):
    n = arrays[0].size if arrays else 0
    return [[float(a[i]) for a in arrays] for i in range(n)]


def _csv_bytes(columns, arrays) -> bytes:
    lines = [",".join(columns)]
    n = arrays[0].size if arrays else 0
    for i in range(n):
        lines.append(",".join(_fmt(a[i]) for a in arrays))
    return ("\n".join(lines) + "\n").encode()


def _combined_csv(bare: SpectraBundle, sup: SpectraBundle) -> bytes:
    columns = BARE_COLUMNS + _SM_EXTRA_COLUMNS
    arrays = [bare.column(c) for c in BARE_COLUMNS]
    arrays += [sup.column(c) for c in
               ("T_R", "T_L", "R_R", "R_L", "S_R_th", "S_plus", "S_minus",
                "S_R_vac", "S_R_out", "isolation_db")]
    return _csv_bytes(columns, arrays)


def _matrices_doc(systems: dict[str, DriftSystem]) -> dict:
    doc = {}
    for name, sys_ in systems.items():
        doc[name] = {
            "m": [[[z.real, z.imag] for z in row] for row in sys_.m],
            "input_map": [[float(x) for x in row] for row in sys_.input_map],
            "channels": [
                {"id": ch.id.value, "rate": ch.rate, "occupation": ch.occupation,
                 "is_signal_port": ch.is_signal_port}
                for ch in sys_.channels
            ],
        }
    return doc


def _parse_point(expr: str, cfg: PhysicalConfig) -> float:
    """Frequency expressions: omega_m, omega_m+J_m, omega_m-J_m, or a number."""
    flat = expr.replace(" ", "").lower()
    if flat.startswith("omega="):
        flat = flat[len("omega="):]
    jm = cfg.effective_j_m
    symbolic = {"omega_m": cfg.omega_m,
                "omega_m+j_m": cfg.omega_m + jm,
                "omega_m-j_m": cfg.omega_m - jm}
    if flat in symbolic:
        return symbolic[flat]
    try:
        return float(flat)
    except ValueError:
        raise ConfigError(
            f"cannot parse --point {expr!r}: use omega_m, omega_m+J_m, "
            "omega_m-J_m, or a number in kappa_0 units"
        ) from None


def _parse_grid(spec: str, cfg: PhysicalConfig) -> FrequencyGrid:
    """--grid lo:hi:points[:units] with units kappa0 (default) or gamma_m."""
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise ConfigError(f"--grid expects lo:hi:points[:units], got {spec!r}")
    try:
        lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"--grid expects numeric lo:hi:points, got {spec!r}") from None
    units = GridUnits.KAPPA0
    if len(parts) == 4:
        try:
            units = GridUnits(parts[3])
        except ValueError:
            raise ConfigError(f"--grid units must be kappa0 or gamma_m, got {parts[3]!r}") from None
    return FrequencyGrid(cfg.omega_m, (GridSpan(lo, hi, points),), units)


def _emit_error(kind: str, exc: BaseException, **extra) -> None:
    doc = {"error": kind, "message": str(exc)}
    doc.update(extra)
    print(json.dumps(doc), file=_sys.stderr)


def _emit_aux(doc: dict, output: Path | None, suffix: str) -> None:
    payload = json.dumps(doc, indent=1) + "\n"
    if output is not None:
        Path(str(output) + suffix).write_text(payload)
    else:
        _sys.stderr.write(payload)


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; 2 is reserved for
    # instability here, so route usage problems through ConfigError.
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="omring",
                description="Nonreciprocal ring-optomechanics spectra")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS), help="named parameter set")
    src.add_argument("--config", metavar="PATH", help="key = value parameter file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", metavar="PATH", help="write data here instead of stdout")
    p.add_argument("--basis", choices=("bare", "supermode", "both"), default="bare")
    p.add_argument("--verify", action="store_true",
                   help="run the Lyapunov/Parseval oracles and emit a JSON report")
    p.add_argument("--allow-unstable", action="store_true",
                   help="sweep even when the drift matrix is unstable")
    p.add_argument("--point", metavar="EXPR",
                   help="single frequency instead of a sweep (omega_m, omega_m+-J_m, or a number)")
    p.add_argument("--grid", metavar="LO:HI:POINTS[:UNITS]",
                   help="override the sweep grid (units kappa0 or gamma_m)")
    p.add_argument("--signal", choices=("right", "left"),
                   help="inject a flat unit input spectrum at one port")
    p.add_argument("--dump-matrices", action="store_true",
                   help="emit the drift matrix and input map as JSON")
    return p


def run(argv=None) -> int:
    """Execute one CLI invocation; returns the process exit code."""
    try:
        args = _build_parser().parse_args(argv)
    except ConfigError as exc:
        _emit_error("usage", exc)
        return 3

    try:
        if args.preset:
            preset = get_preset(args.preset)
            cfg, fgrid, preset_name = preset.config, preset.grid, preset.name
        else:
            cfg = load_config(args.config)
            fgrid, preset_name = None, None
        if args.grid:
            fgrid = _parse_grid(args.grid, cfg)
        if fgrid is None and not args.point:
            fgrid = default_feature_grid(cfg)

        bases = {"bare": [Basis.BARE], "supermode": [Basis.SUPERMODE],
                 "both": [Basis.BARE, Basis.SUPERMODE]}[args.basis]
        systems: dict[str, DriftSystem] = {}
        reports = {}
        for b in bases:
            sys_ = build_bare(cfg) if b is Basis.BARE else build_supermode(cfg)
            systems[b.value] = sys_
            reports[b.value] = check_stability(sys_)
        unstable = {name: r for name, r in reports.items() if not r.stable}
        if unstable and not args.allow_unstable:
            name, rep = next(iter(unstable.items()))
            _emit_error("unstable", UnstableSystemError(
                f"{name} drift matrix min Re(eigenvalue) = {rep.min_real_part:.6g}"),
                min_real_part=rep.min_real_part)
            return 2

        s_r_in = 1.0 if args.signal == "right" else 0.0
        s_l_in = 1.0 if args.signal == "left" else 0.0
        grid_or_points = [_parse_point(args.point, cfg)] if args.point else fgrid

        bundles = {
            name: sweep(sys_, cfg, grid_or_points, s_r_in=s_r_in, s_l_in=s_l_in,
                        allow_unstable=args.allow_unstable)
            for name, sys_ in systems.items()
        }

        output = _resolve_output(args.output)
        meta = {
            "preset": preset_name,
            "basis": args.basis,
            "config": _config_dict(cfg),
            "grid": {"point": args.point} if args.point else fgrid.describe(),
            "signal": {"s_r_in": s_r_in, "s_l_in": s_l_in},
            "stable": {name: rep.stable for name, rep in reports.items()},
        }

        if args.format == "csv":
            if args.basis == "both":
                data = _combined_csv(bundles["bare"], bundles["supermode"])
            else:
                data = serialize(bundles[bases[0].value], "csv")
            _write_data(data, output)
            if output is not None:
                _emit_aux(meta, output, ".config.json")
        else:
            doc = dict(meta)
            doc["results"] = {
                name: json.loads(serialize(bundle, "json").decode())
                for name, bundle in bundles.items()
            }
            _write_data((json.dumps(doc, indent=1) + "\n").encode(), output)

        if args.dump_matrices:
            _emit_aux(_matrices_doc(systems), output, ".matrices.json")

        if args.verify:
            _emit_aux(_verify_doc(systems, cfg, reports), output, ".verify.json")
        return 0

    except ConfigError as exc:
        _emit_error("config", exc)
        return 3
    except UnstableSystemError as exc:
        _emit_error("unstable", exc)
        return 2
    except (ResonantSingularityError, EigenSolverError, GridCoverageError,
            np.linalg.LinAlgError) as exc:
        extra = {}
        if isinstance(exc, ResonantSingularityError):
            extra["omega"] = exc.omega
        _emit_error("numerical", exc, **extra)
        return 4
    except OmringError as exc:
        _emit_error("error", exc)
        return 4


def _verify_doc(systems, cfg, reports) -> dict:
    doc = {}
    for name, sys_ in systems.items():
        rep = reports[name]
        entry = {"stable": rep.stable, "min_real_part": rep.min_real_part,
                 "lyapunov_residual": None, "parseval_max_mismatch": None}
        if rep.stable:
            entry["lyapunov_residual"] = verify_mod.lyapunov_covariance(sys_, cfg).residual
            entry["parseval_max_mismatch"] = verify_mod.parseval_check(sys_, cfg)
        doc[name] = entry
    if cfg.two_resonators:
        doc["basis_consistency_max_dev"] = verify_mod.basis_consistency(cfg)
    return doc


def _resolve_output(raw: str | None) -> Path | None:
    if raw is None:
        return None
    path = Path(raw)
    outdir = os.environ.get("OMRING_OUTDIR")
    if outdir and not path.is_absolute():
        path = Path(outdir) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_data(data: bytes, output: Path | None) -> None:
    if output is None:
        _sys.stdout.write(data.decode())
    else:
        output.write_bytes(data)


def main(argv=None) -> None:
    _sys.exit(run(argv))


if __name__ == "__main__":
    main()
