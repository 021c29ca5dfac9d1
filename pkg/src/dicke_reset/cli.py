"""Command-line entry point: ``dicke-reset <subcommand>``.

Exit codes: 0 success, 2 configuration error, 3 integration failure,
4 invariant or bound breach. Every common flag can also be set through an
environment variable ``DICKE_RESET_<FLAG>`` (e.g. ``DICKE_RESET_BETA``,
``DICKE_RESET_N``); precedence is flag > environment > config file > default.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import yaml

from . import bounds, experiments, oracle, thermo
from .dynamics import (IntegratorOptions, fmt, integrate, read_trajectory_csv,
                       write_trajectory_csv)
from .errors import (DickeResetError, DomainError, InconsistencyError, IntegrationError,
                     IntegrityError)
from .model import SystemParams, figure_protocols, protocol_from_dict

log = logging.getLogger("dicke_reset")

EXIT_OK, EXIT_CONFIG, EXIT_INTEGRATION, EXIT_BREACH = 0, 2, 3, 4
SCHEMA_VERSION = 1
ENV_PREFIX = "DICKE_RESET_"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    protocol: object
    integrator: IntegratorOptions
    output_path: Path
    emit_states: bool = False


# ---------------------------------------------------------------------------
# config resolution
# ---------------------------------------------------------------------------

_COMMON = {
    # dest: (type, env suffix)
    "n_qubits": (int, "N"),
    "beta": (float, "BETA"),
    "gamma0": (float, "GAMMA0"),
    "tau": (float, "TAU"),
    "protocol": (str, "PROTOCOL"),
    "omega": (float, "OMEGA"),
    "rel_tol": (float, "REL_TOL"),
    "abs_tol": (float, "ABS_TOL"),
    "out": (str, "OUT"),
    "config": (str, "CONFIG"),
}


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("-N", "--n-qubits", dest="n_qubits", type=int,
                   help="number of qubits [env DICKE_RESET_N]")
    p.add_argument("--beta", type=float, help="inverse temperature (default 1)")
    p.add_argument("--gamma0", type=float, help="bare coupling rate (default 1)")
    p.add_argument("--tau", type=float, help="protocol duration (default 1)")
    p.add_argument("--protocol",
                   help="quench | linear | exponential | file=PATH (default quench)")
    p.add_argument("--omega", type=float,
                   help="quench splitting (default 1/beta); ignored by other kinds")
    p.add_argument("--rel-tol", dest="rel_tol", type=float, help="integrator relative tolerance")
    p.add_argument("--abs-tol", dest="abs_tol", type=float, help="integrator absolute tolerance")
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--config", help="YAML/JSON run config file")


def _env_value(dest):
    caster, suffix = _COMMON[dest]
    raw = os.environ.get(ENV_PREFIX + suffix)
    if raw is None:
        return None
    try:
        return caster(raw)
    except ValueError:
        raise ConfigError(f"{ENV_PREFIX}{suffix}={raw!r} is not a valid {caster.__name__}") from None


def _resolve(args, dest):
    value = getattr(args, dest, None)
    if value is not None:
        return value
    return _env_value(dest)


def load_document(path) -> dict:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} must hold a key-value document")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{path}: unsupported schema_version {version!r}")
    return doc


def resolve_run_config(args) -> RunConfig:
    """Merge flags, environment and an optional config document into a RunConfig."""
    cfg_path = _resolve(args, "config")
    doc = load_document(cfg_path) if cfg_path else {}
    base = Path(cfg_path).parent if cfg_path else Path(".")
    p_doc = dict(doc.get("params", {}))
    i_doc = dict(doc.get("integrator", {}))
    o_doc = dict(doc.get("output", {}))

    def pick(dest, section, key, default):
        value = _resolve(args, dest)
        if value is None:
            value = section.get(key, default)
        return value

    try:
        params = SystemParams(pick("n_qubits", p_doc, "n_qubits", 1),
                              pick("beta", p_doc, "beta", 1.0),
                              pick("gamma0", p_doc, "gamma0", 1.0),
                              pick("tau", p_doc, "tau", 1.0))
        protocol = _resolve_protocol(args, doc, params, base)
        integrator = IntegratorOptions(float(pick("rel_tol", i_doc, "rel_tol", 1e-8)),
                                       float(pick("abs_tol", i_doc, "abs_tol", 1e-12)),
                                       int(i_doc.get("max_steps", 500_000)))
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    out = _resolve(args, "out") or o_doc.get("path", ".")
    emit = bool(getattr(args, "emit_states", False) or o_doc.get("emit_states", False))
    return RunConfig(params, protocol, integrator, Path(out), emit)


def _resolve_protocol(args, doc, params, base):
    spec = _resolve(args, "protocol")
    omega = _resolve(args, "omega")
    if spec is None and "protocol" in doc:
        pdoc = doc["protocol"]
        if isinstance(pdoc, str):
            spec = pdoc
        else:
            pdoc = dict(pdoc)
            if omega is not None and str(pdoc.get("kind", "")).lower() == "quench":
                pdoc["omega"] = omega
            return protocol_from_dict(pdoc, params.tau)
    spec = (spec or "quench").strip()
    if spec.startswith("file="):
        path = Path(spec[5:])
        if not path.is_absolute() and not path.exists():
            path = base / path
        return protocol_from_dict(load_document(path), params.tau)
    named = figure_protocols(params)
    if spec not in named:
        raise ConfigError(f"unknown protocol {spec!r}; use quench, linear, exponential or file=PATH")
    if spec == "quench" and omega is not None:
        return protocol_from_dict({"kind": "quench", "omega": omega}, params.tau)
    return named[spec]


def _prepare_out(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from None
    if not os.access(path, os.W_OK):
        raise ConfigError(f"output directory {path} is not writable")
    return path


def _rounded(value):
    if isinstance(value, float):
        return float(fmt(value)) if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v) for v in value]
    return value


def summary_document(summary: thermo.ResetSummary, cfg: RunConfig) -> dict:
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(summary.as_dict())
    doc["protocol_spec"] = cfg.protocol.to_dict()
    doc["rel_tol"] = cfg.integrator.rel_tol
    doc["abs_tol"] = cfg.integrator.abs_tol
    return _rounded(doc)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = resolve_run_config(args)
    out = _prepare_out(cfg.output_path)
    traj = integrate(cfg.params, cfg.protocol, cfg.integrator)
    summary = thermo.summarize(traj, cfg.params)
    write_trajectory_csv(traj, out / "trajectory.csv", emit_states=cfg.emit_states)
    doc = summary_document(summary, cfg)
    (out / "summary.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(json.dumps(doc, sort_keys=True))
    return EXIT_OK


class RecordedRun:
    """Just enough of a Trajectory, rebuilt from ``simulate`` outputs, for the bound checks."""

    def __init__(self, summary_doc: dict, table: dict):
        self.params = SystemParams(summary_doc["n_qubits"], summary_doc["beta"],
                                   summary_doc["gamma0"], summary_doc["tau"])
        self.protocol = protocol_from_dict(summary_doc["protocol_spec"], self.params.tau)
        self.times = table["t"]
        self.epsilon = table["epsilon"]
        self.zeta = table["zeta"]


def _summary_from_doc(doc) -> thermo.ResetSummary:
    fields = thermo.ResetSummary.__dataclass_fields__
    return thermo.ResetSummary(**{k: doc[k] for k in fields if k in doc})


def cmd_bounds(args) -> int:
    if args.from_dir:
        src = Path(args.from_dir)
        try:
            doc = json.loads((src / "summary.json").read_text())
            table = read_trajectory_csv(src / "trajectory.csv")
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read run outputs in {src}: {exc}") from None
        run = RecordedRun(doc, table)
        summary = _summary_from_doc(doc)
        params = run.params
        out = _prepare_out(Path(_resolve(args, "out") or src))
    else:
        cfg = resolve_run_config(args)
        out = _prepare_out(cfg.output_path)
        run = integrate(cfg.params, cfg.protocol, cfg.integrator)
        summary = thermo.summarize(run, cfg.params)
        params = cfg.params
    reports = bounds.check_all(run, summary, params)
    experiments.write_bounds_csv(reports, out / "bounds.csv")
    for r in reports:
        kind = "hard" if r.hard else "info"
        print(f"{r.name:18s} {kind}  lhs={fmt(r.lhs):>14s} rhs={fmt(r.rhs):>14s}  {r.status}")
    failed = bounds.hard_failures(reports)
    if failed:
        log.error("hard inequality violated: %s", ", ".join(r.name for r in failed))
        return EXIT_BREACH
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    cfg = resolve_run_config(args)
    if cfg.params.n_qubits > oracle.MAX_QUBITS:
        raise ConfigError(f"oracle-check supports N <= {oracle.MAX_QUBITS}")
    report = oracle.oracle_check(cfg.params, cfg.protocol, n_samples=args.samples,
                                 opts=cfg.integrator)
    print(f"N={cfg.params.n_qubits} protocol={cfg.protocol.kind}")
    print(f"max_population_deviation {fmt(report.max_population_deviation)}")
    print(f"heat_deviation {fmt(report.heat_deviation)}")
    print(f"max_leakage {fmt(report.max_leakage)}")
    if not report.within(args.tolerance):
        log.error("oracle deviation exceeds %g", args.tolerance)
        return EXIT_BREACH
    return EXIT_OK


def _int_list(text):
    try:
        return [int(v) for v in str(text).replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"bad integer list {text!r}") from None


def _float_list(text):
    try:
        return [float(v) for v in str(text).replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"bad number list {text!r}") from None


def _first(*values):
    return next((v for v in values if v is not None), None)


def resolve_sweep(args) -> tuple[experiments.SweepSpec, tuple]:
    doc = load_document(args.spec) if args.spec else {}
    p_doc = dict(doc.get("params", {}))
    try:
        base = SystemParams(1,
                            _first(_resolve(args, "beta"), p_doc.get("beta"), 1.0),
                            _first(_resolve(args, "gamma0"), p_doc.get("gamma0"), 1.0),
                            _first(_resolve(args, "tau"), p_doc.get("tau"), 1.0))
        if args.n_values:
            n_values = _int_list(args.n_values)
        else:
            n_values = doc.get("n_values", experiments.DEFAULT_N_VALUES)
        if "protocols" in doc:
            protocols = {name: protocol_from_dict(p, base.tau) for name, p in doc["protocols"].items()}
        else:
            protocols = figure_protocols(base)
        i_doc = dict(doc.get("integrator", {}))
        opts = IntegratorOptions(float(_first(_resolve(args, "rel_tol"), i_doc.get("rel_tol"), 1e-8)),
                                 float(_first(_resolve(args, "abs_tol"), i_doc.get("abs_tol"), 1e-12)))
        spec = experiments.SweepSpec(tuple(n_values), protocols, base, opts)
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    figure = args.figure or str(doc.get("figure", "all"))
    figures = ("2", "3") if figure == "all" else (figure,)
    return spec, figures


def cmd_sweep(args) -> int:
    spec, figures = resolve_sweep(args)
    out = _prepare_out(Path(_first(_resolve(args, "out"), ".")))
    rows = experiments.sweep(spec, workers=args.workers)
    written = experiments.emit_figures(rows, out, figures, beta=spec.params_base.beta)
    experiments.write_bounds_csv(rows, out / "bounds.csv")
    for path in written + [out / "bounds.csv"]:
        print(path)
    failed = [r for r in rows if not r.ok]
    for r in failed:
        log.error("N=%d %s: %s", r.n_qubits, r.protocol, r.error)
    if failed:
        return EXIT_INTEGRATION
    if any(bounds.hard_failures(r.reports) for r in rows):
        return EXIT_BREACH
    return EXIT_OK


def cmd_quasistatic(args) -> int:
    cfg = resolve_run_config(args)
    out = _prepare_out(cfg.output_path)
    n_values = _int_list(args.n_values) if args.n_values else [cfg.params.n_qubits]
    taus = _float_list(args.taus)
    rows = []
    try:
        for n in n_values:
            pts = experiments.quasistatic_convergence(n, taus, args.final_omega, cfg.params.beta,
                                                      cfg.params.gamma0, cfg.integrator)
            rows.append((n, pts))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    with open(out / "quasistatic.csv", "w", newline="") as fh:
        fh.write("N,tau,heat_total,landauer,epsilon\n")
        for n, pts in rows:
            for p in pts:
                fh.write(",".join([str(n), fmt(p.tau), fmt(p.heat_total), fmt(p.landauer),
                                   fmt(p.epsilon_final)]) + "\n")
    for n, pts in rows:
        last = pts[-1]
        print(f"N={n} tau={fmt(last.tau)} Q_N={fmt(last.heat_total)} "
              f"ln(N+1)/beta={fmt(last.landauer)} eps={fmt(last.epsilon_final)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicke-reset",
        description="Collective qubit reset in the Dicke sector.",
        epilog="exit codes: 0 ok, 2 config error, 3 integration failure, 4 invariant/bound breach")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one run: trajectory.csv + summary.json")
    _add_common(p)
    p.add_argument("--emit-states", action="store_true", help="add p_0..p_N columns")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="N sweep over protocols: fig2a/fig2b/fig3 CSVs",
                       epilog="exit 3 if any point failed to integrate, 4 if a hard bound failed")
    _add_common(p)
    p.add_argument("--figure", choices=["2", "3", "all"], help="which tables to emit (default all)")
    p.add_argument("--spec", help="YAML sweep spec (params, n_values, protocols)")
    p.add_argument("--n-values", help="comma-separated N grid (default 1,2,4,...,1024)")
    p.add_argument("--workers", type=int, default=None, help="process pool size")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", help="evaluate every inequality for one run -> bounds.csv",
                       epilog="exit 4 iff a hard (non-asymptotic) inequality fails")
    _add_common(p)
    p.add_argument("--from", dest="from_dir",
                   help="directory with summary.json + trajectory.csv from `simulate`")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("oracle-check", help="compare against the full 2^N Lindblad integration",
                       epilog="exit 4 iff a deviation exceeds --tolerance or leakage exceeds 1e-8")
    _add_common(p)
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("quasistatic", help="heat of slow linear ramps vs ln(N+1)/beta")
    _add_common(p)
    p.add_argument("--taus", default="10,100,1000,10000")
    p.add_argument("--final-omega", type=float, default=10.0)
    p.add_argument("--n-values", help="comma-separated N list (default: -N)")
    p.set_defaults(func=cmd_quasistatic)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except IntegrationError as exc:
        log.error("integration failure: %s", exc)
        return EXIT_INTEGRATION
    except (IntegrityError, InconsistencyError) as exc:
        log.error("invariant breach: %s", exc)
        return EXIT_BREACH
    except DickeResetError as exc:
        log.error("%s", exc)
        return EXIT_INTEGRATION


if __name__ == "__main__":
    sys.exit(main())
