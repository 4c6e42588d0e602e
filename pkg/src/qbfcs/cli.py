"""Command line interface: ``qbfcs curves | moments | validate``.

Exit codes: 0 ok, 1 validation failure, 2 config error, 3 truncation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import validation
from .battery import charging_curves, snr
from .dynamics import JCParams, QubitDensity
from .errors import ConfigError, NoChargingError, TruncationError
from .fcs import MAX_ORDER, QUANTITIES, cumulant_table, generating_function
from .fockspace import (DEFAULT_TAIL_TOL, CavityDensity, CavityStateSpec, Coherent, Fock,
                        SqueezedCoherent, Thermal, TruncationPolicy, build_cavity_state,
                        required_cutoff)

CSV_COLUMNS = ("state", "g_tau", "mean_dU_over_hw", "var_dU_over_hw2", "snr", "power_over_hw2", "fidelity")
CONFIG_KEYS = {"omega_qub", "omega_cav", "detuning_ratio", "g_ratio", "states", "tau_grid",
               "n_order", "truncation", "output"}
EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_TRUNCATION = 0, 1, 2, 3


@dataclass
class RunConfig:
    omega_qub: float
    omega_cav: float
    g_ratio: float
    states: list[tuple[str, CavityStateSpec]]
    gtau_min: float = 0.0
    gtau_max: float = 3.0
    points: int = 300
    n_order: int = 4
    n_max: int | None = None
    tail_tol: float = DEFAULT_TAIL_TOL
    output_path: str | None = None
    output_format: str = "csv"
    source: dict = field(default_factory=dict, repr=False)

    @property
    def params(self) -> JCParams:
        return JCParams(self.omega_qub, self.omega_cav, self.g_ratio * self.omega_qub)

    def gtau_grid(self) -> np.ndarray:
        if self.gtau_min == 0:
            # open at zero: the power is undefined at tau = 0
            return np.linspace(0.0, self.gtau_max, self.points + 1)[1:]
        return np.linspace(self.gtau_min, self.gtau_max, self.points)

    def build_states(self) -> dict[str, CavityDensity]:
        out = {}
        for label, spec in self.states:
            n_max = self.n_max if self.n_max is not None else required_cutoff(spec, self.tail_tol)
            out[label] = build_cavity_state(spec, TruncationPolicy(n_max, self.tail_tol))
        return out


def _complex(value, key) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"{key}: expected a number or [re, im], got {value!r}")


def parse_state(entry: dict, omega_cav: float) -> CavityStateSpec:
    if not isinstance(entry, dict) or "kind" not in entry:
        raise ConfigError(f"state entry needs a 'kind': {entry!r}")
    kind = entry["kind"]
    try:
        if kind == "fock":
            return Fock(int(entry["N"]))
        if kind == "coherent":
            return Coherent(_complex(entry["alpha"], "alpha"))
        if kind == "thermal":
            if "N" in entry:
                # beta = ln((N+1)/N) / (hbar omega_cav), i.e. mean occupation N
                N = float(entry["N"])
                return Thermal(beta=math.log((N + 1) / N) / omega_cav, omega_cav=omega_cav)
            if "beta" in entry:
                return Thermal(beta=float(entry["beta"]), omega_cav=omega_cav)
            return Thermal(nbar=float(entry["nbar"]))
        if kind == "squeezed_coherent":
            return SqueezedCoherent(_complex(entry["zeta"], "zeta"), _complex(entry["alpha_tilde"], "alpha_tilde"))
    except KeyError as exc:
        raise ConfigError(f"state {kind!r} missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {kind!r} state: {exc}") from exc
    raise ConfigError(f"unknown state kind {kind!r}")


def parse_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("omega_qub", "g_ratio", "states"):
        if key not in doc:
            raise ConfigError(f"missing config key {key!r}")
    if ("omega_cav" in doc) == ("detuning_ratio" in doc):
        raise ConfigError("exactly one of omega_cav / detuning_ratio must be given")
    omega_qub = float(doc["omega_qub"])
    omega_cav = float(doc["omega_cav"]) if "omega_cav" in doc else omega_qub * (1.0 - float(doc["detuning_ratio"]))
    if not omega_qub > 0 or not omega_cav > 0:
        raise ConfigError("frequencies must be positive")
    g_ratio = float(doc["g_ratio"])
    if not g_ratio > 0:
        raise ConfigError("g_ratio must be positive")

    if not isinstance(doc["states"], list) or not doc["states"]:
        raise ConfigError("states must be a non-empty list")
    states, seen = [], set()
    for entry in doc["states"]:
        spec = parse_state(entry, omega_cav)
        label = entry.get("label", entry["kind"])
        if label in seen:
            raise ConfigError(f"duplicate state label {label!r}; set 'label' explicitly")
        seen.add(label)
        states.append((label, spec))

    grid = doc.get("tau_grid", {})
    gmin, gmax, pts = float(grid.get("gtau_min", 0.0)), float(grid.get("gtau_max", 3.0)), int(grid.get("points", 300))
    if pts < 2 or gmin < 0 or gmax <= gmin:
        raise ConfigError("tau_grid needs points >= 2 and 0 <= gtau_min < gtau_max")
    n_order = int(doc.get("n_order", 4))
    _check_order(n_order)
    trunc = doc.get("truncation", {})
    n_max = trunc.get("n_max")
    tail_tol = float(trunc.get("tail_tol", DEFAULT_TAIL_TOL))
    if not 0 < tail_tol <= 1:
        raise ConfigError("truncation.tail_tol must lie in (0, 1]")
    if n_max is not None and int(n_max) < 1:
        raise ConfigError("truncation.n_max must be >= 1")
    out = doc.get("output", {})
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {fmt!r}")
    return RunConfig(omega_qub, omega_cav, g_ratio, states, gmin, gmax, pts, n_order,
                     None if n_max is None else int(n_max), tail_tol, out.get("path"), fmt, doc)


def _check_order(n_order: int) -> None:
    if not 1 <= n_order <= MAX_ORDER:
        raise ConfigError(f"n_order must lie in 1..{MAX_ORDER}, got {n_order}")


def load_config(name: str) -> RunConfig:
    """Read a config file, falling back to the bundled ``fig2``/``fig3`` presets."""
    path = Path(name)
    try:
        if path.is_file():
            text = path.read_text()
        else:
            stem = path.name if path.suffix == ".json" else f"{path.name}.json"
            bundled = resources.files("qbfcs") / "configs" / stem
            if not bundled.is_file():
                raise ConfigError(f"config {name!r} not found")
            text = bundled.read_text()
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse {name!r}: {exc}") from exc
    return parse_config(doc)


# -- formatting -----------------------------------------------------------------


def fmt_float(x: float) -> str:
    """Shortest round-trip representation; infinities as 'inf'."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def curve_rows(curves) -> list[dict[str, str]]:
    rows = []
    for label, points in curves.items():
        for p in points:
            rows.append({
                "state": label,
                "g_tau": fmt_float(p.g_tau),
                "mean_dU_over_hw": fmt_float(p.mean_dU),
                "var_dU_over_hw2": fmt_float(p.var_dU),
                "snr": fmt_float(p.snr),
                "power_over_hw2": fmt_float(p.power),
                "fidelity": fmt_float(p.fidelity),
            })
    return rows


def render_rows(rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"columns": list(CSV_COLUMNS), "rows": rows}, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# -- commands -------------------------------------------------------------------


def cmd_curves(cfg: RunConfig, out: str | None, fmt: str | None, workers: int) -> int:
    fmt = fmt or cfg.output_format
    curves = charging_curves(cfg.params, cfg.build_states(), cfg.gtau_grid(), workers=workers)
    text = render_rows(curve_rows(curves), fmt)
    target = out or cfg.output_path
    if target in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(target).write_text(text)
        print(f"wrote {sum(len(v) for v in curves.values())} rows to {target}", file=sys.stderr)
    return EXIT_OK


def _select_state(cfg: RunConfig, name: str) -> tuple[str, CavityStateSpec]:
    for label, spec in cfg.states:
        if name in (label, spec.kind):
            return label, spec
    raise ConfigError(f"state {name!r} not in config (have {[l for l, _ in cfg.states]})")


def moments_report(cfg: RunConfig, state: str, gtau: float, order: int) -> str:
    _check_order(order)
    label, spec = _select_state(cfg, state)
    n_max = cfg.n_max if cfg.n_max is not None else required_cutoff(spec, cfg.tail_tol)
    rho_cav = build_cavity_state(spec, TruncationPolicy(n_max, cfg.tail_tol))
    params = cfg.params
    G = generating_function(QubitDensity.ground(), rho_cav, params, gtau / params.g)
    t = cumulant_table(G, order)
    hw = params.omega_qub
    lines = [f"state={label} g_tau={fmt_float(gtau)} n_max={n_max} (energies in units of hbar*omega_qub)"]
    for z in QUANTITIES:
        lines.append(f"[{z}]")
        lines.append(f"{'n':>3} {'raw':>24} {'central':>24} {'cumulant':>24}")
        for k in range(order):
            s = hw ** (k + 1)
            lines.append(f"{k + 1:>3} {t.raw[z][k] / s:>24.16e} {t.central[z][k] / s:>24.16e} "
                         f"{t.cumulants[z][k] / s:>24.16e}")
    r = params.omega_cav / params.omega_qub
    lines.append("[ratios]")
    du = t.raw["dU"][0]
    lines.append(f"<Q>/<dU> = {fmt_float(t.raw['Q'][0] / du) if du else 'nan'}  (omega_cav/omega_qub = {fmt_float(r)})")
    lines.append(f"<W>/<dU> = {fmt_float(t.raw['W'][0] / du) if du else 'nan'}  (1 - omega_cav/omega_qub = {fmt_float(1 - r)})")
    lines.append(f"scaling relations max rel. error (n <= {order}) = {validation.scaling_errors(G, order):.3e}")
    var = t.variance("dU") if order >= 2 else float("nan")
    if order >= 2:
        lines.append(f"SNR(dU) = {fmt_float(snr(t.mean('dU'), var))}")
    lines.append(f"imaginary residue = {t.imag_residue:.3e}")
    return "\n".join(lines) + "\n"


def cmd_validate(cfg: RunConfig, cases) -> int:
    results = validation.run_cases(cfg.params, cfg.build_states(), cases)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(r.line())
    if failed:
        print("FAILED: " + ", ".join(f"{r.case}:{r.ident}" for r in failed))
        return EXIT_VALIDATION
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbfcs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curves", help="SNR / power / fidelity curves versus g*tau")
    p.add_argument("--config", default="fig2")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("moments", help="moment table of dU, Q, W at one g*tau")
    p.add_argument("--config", default="fig2")
    p.add_argument("--state", required=True)
    p.add_argument("--gtau", type=float, required=True)
    p.add_argument("--order", type=int)

    p = sub.add_parser("validate", help="run the oracle cross-check suite")
    p.add_argument("--config", default="fig2")
    p.add_argument("--cases", nargs="+", help=f"subset of {', '.join(validation.CASES)}")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "curves":
            return cmd_curves(cfg, args.out, args.format, args.workers)
        if args.command == "moments":
            order = cfg.n_order if args.order is None else args.order
            sys.stdout.write(moments_report(cfg, args.state, args.gtau, order))
            return EXIT_OK
        cases = validation.CASES
        if args.cases:
            cases = tuple(c for item in args.cases for c in item.split(",") if c)
            unknown = set(cases) - set(validation.CASES)
            if unknown:
                raise ConfigError(f"unknown validation cases {sorted(unknown)}")
        return cmd_validate(cfg, cases)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationError as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except NoChargingError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
