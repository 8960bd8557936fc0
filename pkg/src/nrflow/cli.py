"""Command-line entry point.

    nrflow run <config.toml> [-o DIR] [--T V] [--alpha V] [--dt V] [--duration V] [--seed N]
    nrflow experiment <name> [-o DIR]
    nrflow stability --a V --T V [--alpha V]
    nrflow sweep <grid.toml> [-o DIR]

Exit codes: 0 ok, 2 usage, 3 validation, 4 numeric/divergence (only when the
scenario sets ``expect_stable``), 5 singular Jacobian. Failures print one
``error class=<Name> ...`` line on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np
import tomli

from .errors import NRFlowError, ValidationError
from .lti_analysis import position_stability_report, position_sweep
from .scenarios import experiments, output
from .scenarios.platoon import simulate_platoon
from .scenarios.simulate import simulate_closed_loop
from .config import load_config

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_SINGULAR = 0, 2, 3, 4, 5


def _error_line(exc: BaseException) -> str:
    parts = [f"error class={type(exc).__name__}"]
    field = getattr(exc, "field", None)
    if field:
        parts.append(f"field={field}")
    msg = str(exc).replace("\n", " ").replace('"', "'")
    parts.append(f'message="{msg}"')
    return " ".join(parts)


def _apply_overrides(spec, args):
    ctl = {}
    if args.T is not None:
        ctl["T"] = args.T
    if args.alpha is not None:
        ctl["alpha"] = args.alpha
    if args.dt is not None:
        ctl["dt"] = args.dt
    if ctl:
        spec = dataclasses.replace(spec, controller=dataclasses.replace(spec.controller, **ctl))
    if args.duration is not None:
        spec = dataclasses.replace(spec, duration=args.duration)
    if args.seed is not None:
        if spec.platoon is None:
            raise ValidationError("--seed only applies to platoon scenarios", field="platoon.seed")
        spec = dataclasses.replace(spec, platoon=dataclasses.replace(spec.platoon, seed=args.seed))
    return spec


def cmd_run(args) -> int:
    spec = _apply_overrides(load_config(args.config), args)
    out = Path(args.output)
    if spec.platoon is not None:
        trajs, times, spacing = simulate_platoon(spec)
        for i, traj in enumerate(trajs):
            output.write_text(out, f"{spec.name}_agent{i + 1}.csv", output.trajectory_to_csv(traj))
        output.write_text(out, "spacing.csv", output.spacing_to_csv(times, spacing))
        late = times >= times[-1] - 5.0 - 1e-9
        record = {
            "name": spec.name,
            "status": trajs[0].status,
            "max_spacing_error_last_5s": float(np.max(np.abs(spacing[late] - spec.platoon.spacing))),
        }
        status = trajs[0].status
        labels = [(f"agent{i + 1}", f"{spec.name}_agent{i + 1}.csv", "y_1") for i in range(len(trajs))]
    else:
        traj = simulate_closed_loop(spec)
        output.write_text(out, f"{spec.name}.csv", output.trajectory_to_csv(traj))
        record = {
            "name": spec.name,
            "status": traj.status,
            "samples": len(traj),
            "final_error": float(traj.errors[-1]),
            "tail_sup_error_25pct": float(np.max(traj.errors[int(0.75 * (len(traj) - 1)):])),
            "peak_udot": traj.peak_control_rate,
        }
        if traj.message:
            record["message"] = traj.message
        status = traj.status
        labels = [(spec.name, f"{spec.name}.csv", "y_1")]
    output.write_text(out, f"{spec.name}_summary.txt", output.summary_text(record))
    output.write_text(out, f"{spec.name}_plot.py",
                      output.plot_script(spec.name, labels, f"{spec.name}.png"))
    sys.stdout.write(output.summary_text(record))
    if status == "singular":
        print(f'error class=SingularJacobianError message="{record.get("message", "")}"',
              file=sys.stderr)
        return EXIT_SINGULAR
    if status == "diverged" and spec.expect_stable:
        print(f'error class=DivergenceError message="{record.get("message", "")}"', file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_experiment(args) -> int:
    bundle = experiments.run_named_experiment(args.name)
    for path in bundle.write(args.output):
        print(path)
    sys.stdout.write(output.summary_text(bundle.metrics))
    return EXIT_OK


def cmd_stability(args) -> int:
    report = position_stability_report(args.a, args.T, args.alpha)
    record = {"a": args.a, "T": args.T, "alpha": args.alpha, **report.as_record()}
    sys.stdout.write(output.summary_text(record))
    return EXIT_OK


_GRID_KEYS = {"a_min", "a_max", "a_num", "T_min", "T_max", "T_num", "alphas"}


def cmd_sweep(args) -> int:
    with open(args.grid, "rb") as fh:
        try:
            doc = tomli.load(fh)
        except tomli.TOMLDecodeError as exc:
            raise ValidationError(f"parse error: {exc}") from exc
    grid = doc.get("grid", doc)
    unknown = set(grid) - _GRID_KEYS
    if unknown:
        raise ValidationError(f"unknown grid keys {sorted(unknown)}", field=f"grid.{sorted(unknown)[0]}")
    a_values = np.linspace(grid.get("a_min", -2.0), grid.get("a_max", 1.5), int(grid.get("a_num", 36)))
    T_values = np.linspace(grid.get("T_min", 0.1), grid.get("T_max", 4.0), int(grid.get("T_num", 40)))
    # a = 0 is outside the position family (linspace may land a hair off zero)
    a_values = a_values[np.abs(a_values) > 1e-12]
    if a_values.size == 0:
        raise ValidationError("grid has no admissible a values (a != 0)", field="grid.a_min")
    if np.any(T_values <= 0):
        raise ValidationError("grid T values must be positive", field="grid.T_min")
    rows = position_sweep(a_values, T_values, grid.get("alphas", [1.0]))
    lines = ["a,T,alpha,verdict,max_real_eig"]
    lines += [f"{a:.9g},{T:.9g},{al:.9g},{v},{e:.9g}" for a, T, al, v, e in rows]
    path = output.write_text(args.output, "sweep.csv", "\n".join(lines) + "\n")
    print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nrflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario file")
    run.add_argument("config")
    run.add_argument("-o", "--output", default=".")
    run.add_argument("--T", type=float)
    run.add_argument("--alpha", type=float)
    run.add_argument("--dt", type=float)
    run.add_argument("--duration", type=float)
    run.add_argument("--seed", type=int)
    run.set_defaults(func=cmd_run)

    exp = sub.add_parser("experiment", help="run a named experiment set")
    exp.add_argument("name", choices=experiments.NAMES)
    exp.add_argument("-o", "--output", default=".")
    exp.set_defaults(func=cmd_experiment)

    stab = sub.add_parser("stability", help="position-system stability report")
    stab.add_argument("--a", type=float, required=True)
    stab.add_argument("--T", type=float, required=True)
    stab.add_argument("--alpha", type=float, default=1.0)
    stab.set_defaults(func=cmd_stability)

    sweep = sub.add_parser("sweep", help="stability verdicts over an (a, T, alpha) grid")
    sweep.add_argument("grid")
    sweep.add_argument("-o", "--output", default=".")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NRFlowError as exc:
        print(_error_line(exc), file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(_error_line(exc), file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
