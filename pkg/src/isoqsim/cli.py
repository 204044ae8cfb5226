"""Command line entry point: ``isoqsim {run,scaling,table,export-qasm,validate}``.

Exit codes: 0 success, 1 configuration error, 2 validation failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import protocol as pr
from . import qasm, validation
from .channels import BathParams
from .circuit import prefix as circuit_prefix

MODES = ("exact", "hybrid-enumerate", "hybrid-mc", "fully-quantum")
FORMATS = ("csv", "json")
ANCILLA_MODES = ("reset", "accumulate")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    beta: float = 1.0
    gamma0: float = 1.0
    omega_start: float = 1.0
    omega_end: float = 2.0
    num_steps: int = 2
    delta_tau: float = 0.5
    spacing: str = pr.DEFAULT_SPACING
    mode: str = "exact"
    shots: int | None = None
    trajectories: int | None = None
    seed: int = 0
    ancilla_mode: str | None = None
    output_format: str = "csv"
    output_path: str | None = None

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.output_format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.output_format!r}")
        if self.ancilla_mode is not None and self.ancilla_mode not in ANCILLA_MODES:
            raise ConfigError(f"ancilla mode must be one of {ANCILLA_MODES}")
        if self.spacing not in pr.SPACINGS:
            raise ConfigError(f"spacing must be one of {pr.SPACINGS}")
        if self.shots is not None and self.shots < 1:
            raise ConfigError("shots must be positive")
        if self.trajectories is not None and self.trajectories < 1:
            raise ConfigError("trajectories must be positive")
        try:
            self.schedule()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def schedule(self) -> pr.Schedule:
        return pr.make_schedule(
            BathParams(self.beta, self.gamma0),
            self.omega_start,
            self.omega_end,
            self.num_steps,
            self.delta_tau,
            self.spacing,
        )


# flag dest -> RunConfig field
_FLAG_FIELDS = {
    "beta": "beta",
    "gamma0": "gamma0",
    "omega_start": "omega_start",
    "omega_end": "omega_end",
    "steps": "num_steps",
    "dtau": "delta_tau",
    "spacing": "spacing",
    "mode": "mode",
    "shots": "shots",
    "trajectories": "trajectories",
    "seed": "seed",
    "ancilla_mode": "ancilla_mode",
    "format": "output_format",
    "out": "output_path",
}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with any RunConfig fields; flags override it")
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma0", type=float)
    p.add_argument("--omega-start", type=float)
    p.add_argument("--omega-end", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--dtau", type=float)
    p.add_argument("--spacing", choices=pr.SPACINGS)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--shots", type=int)
    p.add_argument("--trajectories", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--ancilla-mode", choices=ANCILLA_MODES)
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out")


def load_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        known = {f.name for f in fields(RunConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(raw)
    for dest, name in _FLAG_FIELDS.items():
        v = getattr(args, dest, None)
        if v is not None:
            values[name] = v
    return RunConfig(**values).validate()


def execute(cfg: RunConfig) -> pr.WorkSummary:
    sched = cfg.schedule()
    if cfg.mode == "exact":
        return pr.run_exact(sched)
    if cfg.mode == "hybrid-enumerate":
        return pr.run_hybrid_enumerate(sched)
    if cfg.mode == "hybrid-mc":
        return pr.run_hybrid_montecarlo(sched, cfg.trajectories or 100_000, cfg.seed)
    return pr.run_fully_quantum(sched, cfg.shots, cfg.seed, cfg.ancilla_mode or "reset")


def _g(v: float) -> str:
    return f"{v:.12g}"


def format_run(summary: pr.WorkSummary, cfg: RunConfig) -> str:
    if cfg.output_format == "json":
        doc = {
            "mean_work": summary.mean_work,
            "delta_F": summary.delta_F,
            "extra_work": summary.extra_work,
            "N": summary.num_steps,
            "delta_tau": summary.delta_tau,
            "mode": cfg.mode,
            "shots": summary.shots,
            "seed": cfg.seed,
            "populations": summary.populations,
            "step_works": summary.step_works,
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "t", "omega", "p_e", "W_step", "W_cumulative"])
    total = 0.0
    after = list(summary.populations[1:]) + [summary.final_population]
    for j, (p, work) in enumerate(zip(after, summary.step_works), start=1):
        total += work
        # row j: state at the end of step j; W_step is the quench that opened it
        w.writerow([j, _g(j * summary.delta_tau), _g(summary.omegas[j]), _g(p), _g(work), _g(total)])
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    cfg = load_config(args)
    _emit(format_run(execute(cfg), cfg), cfg.output_path)
    return 0


def _parse_n_list(text: str) -> list[int]:
    try:
        out = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError as exc:
        raise ConfigError(f"bad --n-list {text!r}") from exc
    if not out or out != sorted(out) or out[0] < 1:
        raise ConfigError("--n-list must be ascending positive integers")
    return out


def format_scaling(cfg: RunConfig, n_list: list[int]) -> str:
    sweep = pr.scaling_sweep(BathParams(cfg.beta, cfg.gamma0), cfg.omega_start, cfg.omega_end, cfg.delta_tau, n_list, cfg.spacing)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "tau", "mean_work", "extra_work", "N_times_extra"])
    for n, s in sweep:
        w.writerow([n, _g(n * cfg.delta_tau), _g(s.mean_work), _g(s.extra_work), _g(n * s.extra_work)])
    try:
        fit = pr.fit_power_law([(n, s.extra_work) for n, s in sweep])
        buf.write(f"# slope={_g(fit.slope)}\n# C={_g(fit.coefficient)}\n")
    except ValueError as exc:
        print(f"isoqsim: power-law fit skipped: {exc}", file=sys.stderr)
        buf.write(f"# fit skipped: {exc}\n")
    return buf.getvalue()


def cmd_scaling(args) -> int:
    cfg = load_config(args)
    _emit(format_scaling(cfg, _parse_n_list(args.n_list)), cfg.output_path)
    return 0


def format_table() -> str:
    bath = BathParams(1.0, 1.0)
    rows = [("hybrid", n) for n in (2, 3, 4)] + [("fully quantum", 2)]
    lines = [f"{'simulation':<15}{'N':>3}  {'dtau=0.5':>9}  {'dtau=10':>9}"]
    for kind, n in rows:
        cells = []
        for dtau in (0.5, 10.0):
            sched = pr.make_schedule(bath, 1.0, 2.0, n, dtau)
            s = pr.run_hybrid_enumerate(sched) if kind == "hybrid" else pr.run_fully_quantum(sched, ancilla_mode="accumulate")
            cells.append(f"{s.mean_work:>9.3f}")
        lines.append(f"{kind:<15}{n:>3}  " + "  ".join(cells))
    return "\n".join(lines) + "\n"


def cmd_table(args) -> int:
    sys.stdout.write(format_table())
    return 0


def export_files(cfg: RunConfig, prefix: str, selection: str | None) -> list[Path]:
    if cfg.mode in ("hybrid-enumerate", "hybrid-mc"):
        if not selection:
            raise ConfigError("hybrid export needs --selection, e.g. --selection dd")
    elif cfg.mode == "fully-quantum":
        selection = None
    else:
        raise ConfigError("export-qasm needs --mode fully-quantum or a hybrid mode")
    sched = cfg.schedule()
    try:
        circ = pr.process_circuit(sched, cfg.ancilla_mode or "accumulate", "coherent", selection)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    paths = []
    for j in range(1, sched.num_steps + 1):
        path = Path(f"{prefix}_step{j}.qasm")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(qasm.export_qasm(circuit_prefix(circ, j)), encoding="utf-8")
        paths.append(path)
    return paths


def cmd_export_qasm(args) -> int:
    cfg = load_config(args)
    for p in export_files(cfg, args.prefix, args.selection):
        print(p)
    return 0


def cmd_validate(args) -> int:
    results = validation.run_all(seed=args.seed)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 2 if failed else 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage mistakes are configuration errors (exit 1); 2 is reserved for failed validation
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="isoqsim", description="Discrete-step quantum isothermal process simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run one protocol and write per-step work")
    _add_config_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("scaling", help="extra work versus N with a log-log fit")
    _add_config_flags(p)
    p.add_argument("--n-list", default="4,8,16,32,64", help="comma-separated ascending N values")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("table", help="recompute the exact-work table")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("export-qasm", help="write one OpenQASM 2.0 file per measured step")
    _add_config_flags(p)
    p.add_argument("--prefix", default="circuit", help="output path prefix; files are <prefix>_step<j>.qasm")
    p.add_argument("--selection", help="hybrid branch string, e.g. dd, du, or arrows")
    p.set_defaults(func=cmd_export_qasm)

    p = sub.add_parser("validate", help="run the invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"isoqsim: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
