"""Command-line interface.

Every subcommand is deterministic given its flags (seeds included) and
emits machine-readable CSV or JSON only; plotting is left to external
tools.  Exit codes: 0 success or pass, 1 quantitative check failed,
2 input or feasibility error.

All flags have config-file equivalents: ``--config`` names a key=value
file (one pair per line, ``#`` comments allowed) whose keys match the long
flag names with dashes or underscores; explicit flags override file values.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .evolve import (
    HomogeneousCoinParams,
    McConfig,
    asymptotic_density,
    closed_form_wavefield,
    evolve_qw,
    evolve_qw_complex,
    evolve_rw_exact,
    simulate_rw,
)
from .feasibility import validate_sequence
from .lattice import (
    CoinSchedule,
    ProbabilitySequence,
    WalkError,
    probability_from_wavefield,
    site_positions,
)
from .synthesis import (
    mimic_quantum_walk,
    reconstruct_wavefield,
    synthesize_coins,
    synthesize_jumps,
)
from .targets import TargetSpec

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

ROUNDTRIP_TOL = 1e-10

# Quasi-symmetric initial state: eta = 3 pi / 8 gives
# (sqrt(2 - sqrt 2) / 2, sqrt(2 + sqrt 2) / 2); gamma = 0 keeps it real.
FIG1_PARAMS = HomogeneousCoinParams(theta=math.pi / 4, eta=3 * math.pi / 8,
                                    gamma=0.0)
FIG2_PARAMS = HomogeneousCoinParams(theta=math.pi / 4, eta=math.pi / 4,
                                    gamma=math.pi / 2)


def _emit_field(field, args, default_name: str) -> None:
    out = getattr(args, "out", None)
    if out is None:
        doc = {
            "schema_version": io.SCHEMA_VERSION,
            "horizon": len(field.slices) - 1,
            "slices": [[float(v) for v in s] for s in field.slices],
        }
        json.dump(doc, sys.stdout)
        sys.stdout.write("\n")
        return
    out = Path(out)
    if out.is_dir():
        ext = "csv" if args.format == "csv" else "json"
        out = out / f"{default_name}.{ext}"
    if args.format == "csv":
        io.write_field_csv(field, out)
    else:
        io.write_field_json(field, out)


def _print_json(doc) -> None:
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _require(args, *names) -> None:
    """Presence check deferred past config merging, so every flag can come
    from a --config file instead of the command line."""
    missing = [name for name in names if getattr(args, name, None) is None]
    if missing:
        flags = ", ".join("--" + m.replace("_", "-") for m in missing)
        raise WalkError(f"missing required argument(s): {flags}")


def _target_sequence(args) -> ProbabilitySequence:
    _require(args, "target")
    spec = TargetSpec.parse(args.target)
    return spec.realize(getattr(args, "horizon", None))


def cmd_validate(args) -> int:
    rho = _target_sequence(args)
    report = validate_sequence(rho, tol=args.tol)
    doc = report.to_dict()
    doc["schema_version"] = io.SCHEMA_VERSION
    _print_json(doc)
    return EXIT_OK if report.feasible else EXIT_FAIL


def _synthesize(rho: ProbabilitySequence, walk: str):
    report = validate_sequence(rho)
    if not report.feasible:
        sites = ", ".join(f"(n={v.n}, t={v.t})" for v in report.violations[:5])
        raise WalkError(f"target is infeasible; flux bound violated at {sites}")
    if walk == "qw":
        return synthesize_coins(rho, reconstruct_wavefield(rho))
    return synthesize_jumps(rho)


def cmd_synth(args) -> int:
    _require(args, "walk", "out")
    rho = _target_sequence(args)
    schedule = _synthesize(rho, args.walk)
    io.write_schedule_json(schedule, args.out)
    return EXIT_OK


def cmd_evolve(args) -> int:
    _require(args, "schedule")
    schedule = io.read_schedule_json(args.schedule)
    steps = args.horizon if args.horizon is not None else schedule.steps
    if isinstance(schedule, CoinSchedule):
        init = tuple(float(x) for x in args.init.split(","))
        if len(init) != 2:
            raise WalkError("--init takes two comma-separated amplitudes")
        norm = init[0] ** 2 + init[1] ** 2
        if abs(norm - 1.0) > 1e-9:
            raise WalkError(f"initial state norm {norm!r} != 1")
        rho = probability_from_wavefield(evolve_qw(schedule, init, steps))
    else:
        rho = evolve_rw_exact(schedule, steps)
    _emit_field(rho, args, "rho")
    return EXIT_OK


def cmd_mc(args) -> int:
    _require(args, "schedule")
    schedule = io.read_schedule_json(args.schedule)
    steps = args.horizon if args.horizon is not None else schedule.steps
    cfg = McConfig(trajectories=args.trajectories, seed=args.seed,
                   horizon=steps)
    rho_hat, stderr = simulate_rw(schedule, cfg)
    out = getattr(args, "out", None)
    if out is None:
        doc = {
            "schema_version": io.SCHEMA_VERSION,
            "horizon": steps,
            "rho": [[float(v) for v in s] for s in rho_hat.slices],
            "stderr": [[float(v) for v in s] for s in stderr.slices],
        }
        _print_json(doc)
    else:
        io.write_mc_csv(rho_hat, stderr, out)
    return EXIT_OK


def _hadamard_params(args) -> HomogeneousCoinParams:
    return HomogeneousCoinParams(theta=args.theta, eta=args.eta,
                                 gamma=args.gamma, alpha=args.alpha,
                                 beta=args.beta, chi=args.chi)


def cmd_hadamard(args) -> int:
    _require(args, "theta")
    params = _hadamard_params(args)
    horizon = args.horizon
    if args.route == "asymptotic":
        t = horizon
        rows = []
        limit = t * abs(math.cos(params.theta))
        for n in site_positions(t):
            if abs(n) < limit:
                rows.append((t, int(n), asymptotic_density(params, int(n), t)))
        if args.out is None:
            _print_json({
                "schema_version": io.SCHEMA_VERSION,
                "t": t,
                "entries": [{"n": n, "value": v} for _, n, v in rows],
            })
        else:
            with open(args.out, "w") as fh:
                fh.write("t,n,value\n")
                for t_, n, v in rows:
                    fh.write(f"{t_},{n},{v!r}\n")
        return EXIT_OK
    if args.route == "closed-form":
        field = closed_form_wavefield(params, horizon)
    else:
        field = evolve_qw_complex(params, horizon)
    _emit_field(probability_from_wavefield(field), args, "rho")
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    _require(args, "walk")
    rho = _target_sequence(args)
    schedule = _synthesize(rho, args.walk)
    if args.walk == "qw":
        evolved = probability_from_wavefield(evolve_qw(schedule))
    else:
        evolved = evolve_rw_exact(schedule)
    max_err = 0.0
    for t in range(rho.horizon + 1):
        err = float(np.max(np.abs(evolved.slices[t] - rho.slices[t])))
        max_err = max(max_err, err)
    passed = max_err < ROUNDTRIP_TOL
    _print_json({
        "schema_version": io.SCHEMA_VERSION,
        "walk": args.walk,
        "target": args.target,
        "max_error": max_err,
        "tolerance": ROUNDTRIP_TOL,
        "pass": passed,
    })
    return EXIT_OK if passed else EXIT_FAIL


def cmd_figure(args) -> int:
    _require(args, "which")
    params = FIG1_PARAMS if args.which == "fig1" else FIG2_PARAMS
    t_plot = args.horizon
    field = evolve_qw_complex(params, t_plot + 1)
    exact = probability_from_wavefield(field)
    schedule = mimic_quantum_walk(field)
    cfg = McConfig(trajectories=args.trajectories, seed=args.seed,
                   horizon=t_plot)
    rho_hat, stderr = simulate_rw(schedule, cfg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / f"{args.which}.csv"
    ns = site_positions(t_plot)
    with open(out, "w") as fh:
        fh.write("n,exact,mc,stderr\n")
        for k, n in enumerate(ns):
            fh.write(f"{n},{float(exact.slices[t_plot][k])!r},"
                     f"{float(rho_hat.slices[t_plot][k])!r},"
                     f"{float(stderr.slices[t_plot][k])!r}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walkforge",
        description="Inverse design and simulation of discrete-time walks "
                    "on the integer line.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, target=False, horizon=False, out_field=False):
        p.add_argument("--config", default=None,
                       help="key=value file with flag defaults")
        if target:
            p.add_argument("--target", default=None,
                           help="uniform | binomial:p | "
                                "hadamard:theta,eta,gamma | file:path")
        if horizon:
            p.add_argument("-T", "--horizon", type=int, default=None,
                           help="time horizon")
        if out_field:
            p.add_argument("--out", default=None,
                           help="output file or directory (default: stdout)")
            p.add_argument("--format", choices=("csv", "json"),
                           default="json")

    p = sub.add_parser("validate", help="check a target against the flux bound")
    common(p, target=True, horizon=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="synthesize a coin or jump schedule")
    common(p, target=True, horizon=True)
    p.add_argument("--walk", choices=("qw", "rw"), default=None)
    p.add_argument("--out", default=None, help="schedule JSON path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("evolve", help="forward-evolve a schedule exactly")
    common(p, horizon=True, out_field=True)
    p.add_argument("--walk", choices=("qw", "rw"), default=None,
                   help="must match the schedule kind if given")
    p.add_argument("--schedule", default=None)
    p.add_argument("--init", default="1,0",
                   help="initial chirality amplitudes a,b (qw only)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("mc", help="Monte Carlo random-walk trajectories")
    common(p, horizon=True)
    p.add_argument("--schedule", default=None)
    p.add_argument("-N", "--trajectories", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="CSV path (default: JSON to stdout)")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("hadamard", help="homogeneous complex walk distribution")
    common(p, horizon=True, out_field=True)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--chi", type=float, default=0.0)
    route = p.add_mutually_exclusive_group()
    route.add_argument("--closed-form", dest="route", action="store_const",
                       const="closed-form")
    route.add_argument("--recursion", dest="route", action="store_const",
                       const="recursion")
    route.add_argument("--asymptotic", dest="route", action="store_const",
                       const="asymptotic")
    p.set_defaults(route="recursion", func=cmd_hadamard)

    p = sub.add_parser("roundtrip",
                       help="synthesize, evolve, and compare against the target")
    common(p, target=True, horizon=True)
    p.add_argument("--walk", choices=("qw", "rw"), default=None)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("figure",
                       help="emit exact-vs-sampled comparison data series")
    common(p)
    p.add_argument("--which", choices=("fig1", "fig2"), default=None)
    p.add_argument("-N", "--trajectories", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-T", "--horizon", type=int, default=30)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_figure)

    return parser


def _load_config(path: str) -> dict[str, str]:
    pairs = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise WalkError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        pairs[key.strip().replace("-", "_")] = value.strip()
    return pairs


def _apply_config(args, argv, parser) -> None:
    config = _load_config(args.config)
    sub_actions = next(a for a in parser._actions
                       if isinstance(a, argparse._SubParsersAction))
    subparser = sub_actions.choices[args.command]
    for action in subparser._actions:
        if action.dest in ("help", "config") or action.dest not in config:
            continue
        if any(opt in argv for opt in action.option_strings):
            continue  # explicit flag wins
        raw = config[action.dest]
        value = action.type(raw) if action.type else raw
        if action.choices and value not in action.choices:
            raise WalkError(
                f"config value {action.dest}={raw!r} not in {action.choices}")
        setattr(args, action.dest, value)
    unknown = set(config) - {a.dest for a in subparser._actions}
    if unknown:
        raise WalkError(f"unknown config keys: {sorted(unknown)}")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            _apply_config(args, argv, parser)
        return args.func(args)
    except WalkError as exc:
        json.dump({"error": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_INPUT


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
