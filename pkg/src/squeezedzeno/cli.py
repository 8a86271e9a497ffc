"""Command-line front end.

Five subcommands expose the library: spectrum (squeezing spectra on a
frequency grid), evolve (trajectory integration), timescales
(decay-rate and condition report for one parameter point), sweep (grid
classification), and oracle (discrete-bath convergence study plus
fit-versus-analytic rate checks).

Every output starts with a provenance block: tool version, the fully
resolved configuration, and a sha256 over the data section.  No
timestamps are written, so identical inputs give byte-identical files.
Floats are serialized with 17 significant digits.  Exit codes: 0
success, 1 usage error, 2 computation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import math
import os
import sys
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .analysis import (
    SWEEP_COLUMNS,
    angular_condition,
    angular_theta,
    regime_sweep,
    sufficient_condition_margin,
    sustainable_condition,
    timescale_ratio,
)
from .bloch import (
    BlochState,
    evolve,
    fit_decay_rate,
    population_decay_rate,
    quadrature_decay_rate,
)
from .coefficients import (
    DriveParams,
    SqueezingShifts,
    effective_coefficients,
)
from .config import RunConfig, canonical_json
from .errors import ConfigError, SqueezedZenoError
from .spectrum import SqueezedVacuumParams, spectral_m, spectral_n
from .weakmeas import (
    DaviesModel,
    davies_max_deviation,
    davies_propagator_column,
    decoherence_time,
    zeno_time,
)

TOOL = f"squeezedzeno {__version__}"


def _cell(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _csv_document(cfg: RunConfig, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    body_io = io.StringIO()
    writer = csv.writer(body_io, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    body = body_io.getvalue()
    return _provenance_lines(cfg, body) + body


def _provenance_lines(cfg: RunConfig, body: str) -> str:
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return (
        f"# tool: {TOOL}\n"
        f"# config: {canonical_json(_provenance_config(cfg))}\n"
        f"# content-sha256: {digest}\n"
    )


def _provenance_config(cfg: RunConfig) -> dict:
    # the output path is where the result goes, not part of what it is
    return {k: v for k, v in cfg.data.items() if k != "out"}


def _json_document(cfg: RunConfig, result) -> str:
    digest = hashlib.sha256(canonical_json(result).encode("utf-8")).hexdigest()
    document = {
        "provenance": {
            "tool": TOOL,
            "config": _provenance_config(cfg),
            "content_sha256": digest,
        },
        "result": result,
    }
    return canonical_json(document, indent=2) + "\n"


def _tabular(cfg: RunConfig, columns: Sequence[str], rows: list) -> str:
    if cfg.format == "json":
        payload = {"columns": list(columns), "rows": [list(r) for r in rows]}
        return _json_document(cfg, payload)
    return _csv_document(cfg, columns, rows)


def cmd_spectrum(cfg: RunConfig) -> tuple[str, int]:
    """Tabulate N and M on a frequency grid around the carrier."""
    bath = cfg.bath()
    spec = cfg.data["spectrum"]
    x = np.linspace(spec["x_min"], spec["x_max"], spec["points"])
    omega = bath.omega_L + x
    n_vals = spectral_n(bath, omega)
    m_vals = spectral_m(bath, omega)
    rows = [
        (
            float(omega[i]), float(x[i]), float(n_vals[i]),
            float(np.abs(m_vals[i])), float(m_vals[i].real), float(m_vals[i].imag),
        )
        for i in range(len(x))
    ]
    return _tabular(cfg, ("omega", "x", "N", "M_abs", "M_re", "M_im"), rows), 0


def _initial_state(spec) -> BlochState:
    if isinstance(spec, dict):
        re, im = spec["s_minus"]
        return BlochState(complex(re, im), spec["s_z"])
    return {
        "excited": BlochState.excited,
        "ground": BlochState.ground,
        "x+": lambda: BlochState.x_polarized(+1),
        "x-": lambda: BlochState.x_polarized(-1),
    }[spec]()


def cmd_evolve(cfg: RunConfig) -> tuple[str, int]:
    """Integrate one trajectory and tabulate it."""
    bath = cfg.bath()
    drive = cfg.drive()
    coeffs = effective_coefficients(bath, drive, cfg.shifts(bath, drive))
    ev = cfg.data["evolve"]
    traj = evolve(
        _initial_state(ev["initial"]),
        coeffs,
        drive,
        (0.0, ev["t_end"]),
        rtol=cfg.tolerance,
        n_samples=ev["samples"],
        method=ev["method"],
    )
    rows = [
        (
            float(traj.t[i]),
            float(traj.s_minus[i].real), float(traj.s_minus[i].imag),
            float(traj.s_z[i]), float(traj.trace_error[i]),
        )
        for i in range(len(traj))
    ]
    columns = ("t", "re_s_minus", "im_s_minus", "s_z", "trace_error")
    return _tabular(cfg, columns, rows), 0


def cmd_timescales(cfg: RunConfig) -> tuple[str, int]:
    """Report rates, timescales, ratios, and all conditions for one point."""
    bath = cfg.bath()
    drive = cfg.drive()
    n = cfg.n_measurements
    try:
        shifts = cfg.shifts(bath, drive)
        coeffs = effective_coefficients(bath, drive, shifts)
        lhs, _holds = angular_condition(bath, drive, shifts)
        result = {
            "Gamma_dec": quadrature_decay_rate(coeffs),
            "Gamma_pop": population_decay_rate(coeffs),
            "tau_dec": decoherence_time(coeffs, bath.omega_L, n),
            "tau_zeno": zeno_time(coeffs, bath.omega_L, n),
            "ratio_derived": timescale_ratio(coeffs, bath.omega_L, n, "derived"),
            "ratio_paper": timescale_ratio(coeffs, bath.omega_L, n, "paper"),
            "cond_derived": sustainable_condition(coeffs, "derived"),
            "cond_paper": sustainable_condition(coeffs, "paper"),
            "theta": angular_theta(bath, drive, shifts),
            "angular_lhs": lhs,
            "sufficient_margin": sufficient_condition_margin(bath, drive),
        }
    except SqueezedZenoError as exc:
        error = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        return _json_document(cfg, error), 2
    if cfg.format == "json":
        return _json_document(cfg, result), 0
    return _csv_document(cfg, tuple(result), [tuple(result.values())]), 0


def cmd_sweep(cfg: RunConfig, threads: int) -> tuple[str, int]:
    """Classify the configured grid; skipped points stay in the table."""
    rows = regime_sweep(cfg.sweep_grid(), cfg.mode, threads)
    return _tabular(cfg, SWEEP_COLUMNS, [r.as_tuple() for r in rows]), 0


def _rate_comparisons(cfg: RunConfig) -> list[dict]:
    """Deterministic fit-versus-analytic probes for both decay rates.

    Both probes pin the squeezing phase to pi and the detuning to zero;
    that puts Im M~ + delta = 0 exactly, so each observable is a clean
    single exponential and the fit isolates the analytic rate.
    """
    base = cfg.data["bath"]
    bath = SqueezedVacuumParams(base["gamma"], base["epsilon"], math.pi, base["omega_L"])
    rows = []
    for label, observable, omega, initial in (
        ("Gamma_pop", "sigma_z", 0.0, BlochState.excited()),
        ("Gamma_dec", "sigma_x", cfg.data["drive"]["Omega"], BlochState.x_polarized()),
    ):
        drive = DriveParams(omega, 0.0)
        coeffs = effective_coefficients(bath, drive, SqueezingShifts.asymptotic(bath, drive))
        analytic = (
            population_decay_rate(coeffs) if label == "Gamma_pop"
            else quadrature_decay_rate(coeffs)
        )
        traj = evolve(
            initial, coeffs, drive, (0.0, 3.0 / analytic),
            rtol=1e-10, atol=1e-13, n_samples=600, method="bloch",
        )
        fitted = fit_decay_rate(traj, observable).rate
        rows.append({
            "rate": label,
            "observable": observable,
            "Omega": drive.Omega,
            "analytic": analytic,
            "fitted": fitted,
            "rel_error": abs(fitted - analytic) / abs(analytic),
        })
    return rows


def cmd_oracle(cfg: RunConfig) -> tuple[str, int]:
    """Discrete-bath convergence table plus rate-fit cross-checks."""
    if cfg.format == "csv":
        raise ConfigError("the oracle report is structured; use --format json")
    o = cfg.data["oracle"]
    times = np.linspace(0.0, 3.0 / o["Gamma"], o["samples"])
    davies_rows = []
    for r_count, delta_e in o["schedule"]:
        model = DaviesModel(o["Gamma"], r_count, delta_e)
        max_dev = davies_max_deviation(model, times, dim_cap=o["dim_cap"])
        column = davies_propagator_column(model, float(times[-1]), dim_cap=o["dim_cap"])
        defect = abs(float(np.sum(np.abs(column) ** 2)) - 1.0)
        davies_rows.append({
            "R": r_count,
            "Delta_E": delta_e,
            "bandwidth": r_count * delta_e,
            "max_deviation": max_dev,
            "unitarity_defect": defect,
        })
    result = {"davies": davies_rows, "rates": _rate_comparisons(cfg)}
    return _json_document(cfg, result), 0


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage failures map to exit code 1."""

    def error(self, message: str):
        raise ConfigError(message)


def build_parser() -> _Parser:
    parser = _Parser(
        prog="squeezedzeno",
        description="Squeezed-bath atom dynamics: spectra, trajectories, "
        "weak-measurement timescales, and regime classification.",
        epilog="Defaults (override via --config file or flags):\n"
        + canonical_json(DEFAULT_SUMMARY, indent=2),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=TOOL)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    descriptions = {
        "spectrum": "tabulate N(omega) and M(omega) on a grid around the carrier",
        "evolve": "integrate the master equation and emit the trajectory",
        "timescales": "report decay rates, timescales, and coherence conditions",
        "sweep": "classify a parameter grid into coherence regimes",
        "oracle": "discrete-bath convergence study and rate-fit cross-checks",
    }
    for name, help_text in descriptions.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--config", metavar="PATH", help="JSON or YAML config file")
        sp.add_argument("--out", metavar="PATH", help="output file (default stdout)")
        sp.add_argument("--format", choices=["csv", "json"], help="output format")
        sp.add_argument("--mode", choices=["paper", "derived"],
                        help="condition mode for classification")
        sp.add_argument("--threads", type=int, metavar="N",
                        help="sweep parallelism (default $SQUEEZEDZENO_THREADS or 1)")
        sp.add_argument("--tolerance", type=float, metavar="X",
                        help="integrator relative tolerance")
    return parser


# what --help advertises; the full resolved config lands in every output
DEFAULT_SUMMARY = {
    "bath": {"gamma": 1.0, "epsilon": 0.5, "phi": math.pi, "omega_L": 100.0},
    "drive": {"Omega": 10.0, "Delta": 0.0},
    "shifts": "asymptotic",
    "schedule": {"n": 100},
    "mode": "derived",
    "tolerance": 1e-9,
    "format": "csv",
}


def _resolve_threads(flag_value: int | None) -> int:
    if flag_value is not None:
        threads = flag_value
    else:
        raw = os.environ.get("SQUEEZEDZENO_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigError(
                f"SQUEEZEDZENO_THREADS must be an integer, got {raw!r}"
            ) from None
    if threads < 1:
        raise ConfigError(f"thread count must be >= 1, got {threads}")
    return threads


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig.load(
            args.config,
            overrides={
                "mode": args.mode,
                "format": args.format,
                "out": args.out,
                "tolerance": args.tolerance,
            },
        )
        threads = _resolve_threads(args.threads)
        if args.command == "spectrum":
            content, code = cmd_spectrum(cfg)
        elif args.command == "evolve":
            content, code = cmd_evolve(cfg)
        elif args.command == "timescales":
            content, code = cmd_timescales(cfg)
        elif args.command == "sweep":
            content, code = cmd_sweep(cfg, threads)
        else:
            content, code = cmd_oracle(cfg)
        if cfg.out is None:
            sys.stdout.write(content)
        else:
            Path(cfg.out).write_text(content)
        return code
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SqueezedZenoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
