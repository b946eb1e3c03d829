"""Command-line front end: ``solve``, ``sweep`` and ``check-family``.

Exit codes:
  0  success (solve: every check passed)
  1  solve finished but a check failed / check-family hypotheses fail
  2  invalid family, initial conditions or hypotheses
  3  integration aborted (DomainExit, StepUnderflow, StepLimit)
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

from .exceptions import InvalidConfiguration
from .profile_ode import InitialConditions, SolveOptions, integrate, validate_initial_conditions
from .symfun import check_theorem_hypotheses, parse_family

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_ABORT = 0, 1, 2, 3
CSV_HEADER = "h,r,rdot,rddot,Q,domain_quantity,residual"
SWEEP_HEADER = "h0,r0,rdot0,h_star,r_min,r_max,all_pass,status"


def fmt(x: float) -> str:
    return "%.17g" % x


def _json_num(x):
    # strict JSON has no NaN/Infinity
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _json_clean(obj):
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    return _json_num(obj)


@dataclass(frozen=True)
class RunConfig:
    family: str = "H"
    n: int = 2
    ic: InitialConditions = InitialConditions(-1.0, 1.5, 0.3)
    options: SolveOptions = field(default_factory=SolveOptions)
    out_csv: Optional[str] = None
    out_json: Optional[str] = None
    out_plot: Optional[str] = None
    format: str = "text"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "ic" in data:
            data["ic"] = InitialConditions(**{k: float(v) for k, v in data["ic"].items()})
        if "options" in data:
            data["options"] = SolveOptions(**data["options"])
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))


def _write_csv(path, t):
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        cols = (t.h, t.r, t.rdot, t.rddot, t.q, t.domain_quantity, t.residual)
        for row in zip(*cols):
            fh.write(",".join(fmt(float(v)) for v in row) + "\n")


def _write_plot(path, t):
    with open(path, "w", newline="") as fh:
        fh.write("h,r\n")
        for h, r in zip(t.h, t.r):
            fh.write(f"{fmt(float(h))},{fmt(float(r))}\n")


def summary_dict(report) -> dict:
    return _json_clean({
        "family": report.family,
        "n": report.n,
        "ic": asdict(report.ic),
        "h_star": report.h_star,
        "r_min_est": report.r_min_est,
        "r_max_est": report.r_max_est,
        "lower_bound_c": report.lower_bound_c,
        "upper_bound_K": report.upper_bound_K,
        "termination": report.termination.to_dict(),
        "branch_terminations": [k.to_dict() for k in report.branch_terminations],
        "all_pass": report.all_pass,
        "verdicts": [v.to_dict() for v in report.invariant_verdicts],
    })


def _exit_code(report) -> int:
    if not report.termination.ok:
        return EXIT_ABORT
    return EXIT_OK if report.all_pass else EXIT_FAIL


def cmd_solve(config: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        f = parse_family(config.family, config.n)
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID
    try:
        t, report = integrate(f, config.ic, config.options)
    except InvalidConfiguration as exc:
        for v in exc.violations:
            print(f"error: {v}", file=err)
        return EXIT_INVALID

    summary = summary_dict(report)
    if config.out_csv:
        _write_csv(config.out_csv, t)
    if config.out_json:
        with open(config.out_json, "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    if config.out_plot:
        _write_plot(config.out_plot, t)

    if config.format == "json":
        json.dump(summary, out, indent=2)
        out.write("\n")
    else:
        print(f"family       {report.family} (n={report.n})", file=out)
        print(f"termination  {report.termination}", file=out)
        print(f"h_star       {fmt(report.h_star)}", file=out)
        print(f"r_min_est    {fmt(report.r_min_est)}", file=out)
        print(f"r_max_est    {fmt(report.r_max_est)}", file=out)
        for v in report.invariant_verdicts:
            status = "pass" if v.passed else "FAIL"
            print(f"  {v.check_id.value:<20} {status}  margin={v.worst_margin:.3g} "
                  f"at h={v.worst_location_h:.6g}", file=out)
    code = _exit_code(report)
    if code == EXIT_ABORT:
        print(f"error: integration aborted: {report.termination}", file=err)
    return code


def _sweep_row(job):
    family, n, ic, options = job
    f = parse_family(family, n)
    cells = [fmt(ic.h0), fmt(ic.r0), fmt(ic.rdot0)]
    violations = validate_initial_conditions(ic)
    if violations:
        return ",".join(cells + ["", "", "", "false", "invalid: " + "; ".join(violations)])
    try:
        _, report = integrate(f, ic, options)
    except InvalidConfiguration as exc:
        return ",".join(cells + ["", "", "", "false", "invalid: " + "; ".join(exc.violations)])
    if not report.termination.ok:
        status = str(report.termination)
    else:
        status = "ok" if report.all_pass else "check-failed"
    return ",".join(cells + [fmt(report.h_star), fmt(report.r_min_est), fmt(report.r_max_est),
                             "true" if report.all_pass else "false", status])


def cmd_sweep(family: str, n: int, h0s, r0s, rdot0s, options: SolveOptions,
              jobs: int = 1, format: str = "csv") -> str:
    """Solve every initial condition of the grid; rows follow grid order."""
    parse_family(family, n)
    grid = [InitialConditions(float(a), float(b), float(c))
            for a, b, c in itertools.product(h0s, r0s, rdot0s)]
    work = [(family, n, ic, options) for ic in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, work))
    else:
        rows = [_sweep_row(w) for w in work]
    if format == "json":
        keys = SWEEP_HEADER.split(",")
        return json.dumps([dict(zip(keys, r.split(",", len(keys) - 1))) for r in rows], indent=2) + "\n"
    return SWEEP_HEADER + "\n" + "".join(r + "\n" for r in rows)


def cmd_check_family(family: str, n: int, out=None) -> int:
    out = out or sys.stdout
    try:
        f = parse_family(family, n)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    rep = check_theorem_hypotheses(f)
    tag = " (estimated)" if rep.estimated else ""
    print(f"family  {f.spec} (n={f.n})", file=out)
    print(f"alpha   {rep.alpha:g}", file=out)
    print(f"beta    {rep.beta:g}", file=out)
    print(f"gamma   {rep.gamma:g}", file=out)
    print(f"C       {rep.derivative_bound:g}{tag}", file=out)
    checks = [
        ("cylinder direction in cone", rep.cylinder_admissible),
        ("alpha > 0", rep.alpha > 0),
        ("beta > 1", rep.beta > 1),
        ("rho_hat -> 0 at -alpha", rep.rho_hat_vanishes_at_minus_alpha),
        ("uniform bound C", math.isfinite(rep.derivative_bound)),
    ]
    for name, ok in checks:
        print(f"  {name:<28} {'pass' if ok else 'FAIL'}", file=out)
    for msg in rep.failures:
        print(f"failure: {msg}", file=out)
    print("verdict: " + ("pass" if rep.passes_theorem else "fail"), file=out)
    return EXIT_OK if rep.passes_theorem else EXIT_FAIL


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_common(p, sweep=False):
    p.add_argument("--family", default=None)
    p.add_argument("--n", type=int, default=None)
    num = _float_list if sweep else float
    p.add_argument("--h0", type=num, default=None)
    p.add_argument("--r0", type=num, default=None)
    p.add_argument("--rdot0", type=num, default=None)
    p.add_argument("--rtol", type=float, default=None)
    p.add_argument("--atol", type=float, default=None)
    p.add_argument("--span", type=float, default=None)
    p.add_argument("--tail-eps", type=float, default=None)
    p.add_argument("--max-steps", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="selfexpanders",
                                     description="Bottle-shaped self-expander profiles.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="integrate one profile")
    _add_common(solve)
    solve.add_argument("--config", help="JSON document mirroring RunConfig")
    solve.add_argument("--out-csv")
    solve.add_argument("--out-json")
    solve.add_argument("--out-plot")
    solve.add_argument("--format", choices=("text", "json"), default=None)

    sweep = sub.add_parser("sweep", help="solve a grid of initial conditions")
    _add_common(sweep, sweep=True)
    sweep.add_argument("--jobs", type=int, default=1)
    sweep.add_argument("--out", help="write the table here instead of stdout")
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")

    check = sub.add_parser("check-family", help="report the hypotheses of a family")
    check.add_argument("--family", required=True)
    check.add_argument("--n", type=int, required=True)
    return parser


def _options(args, base: SolveOptions) -> SolveOptions:
    updates = {k: getattr(args, k) for k in ("rtol", "atol", "span", "tail_eps", "max_steps")
               if getattr(args, k) is not None}
    return replace(base, **updates)


def config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        with open(args.config) as fh:
            cfg = RunConfig.from_json(fh.read())
    ic = cfg.ic
    ic = InitialConditions(*(getattr(args, k) if getattr(args, k) is not None else getattr(ic, k)
                             for k in ("h0", "r0", "rdot0")))
    updates = {k: getattr(args, k) for k in ("family", "n", "out_csv", "out_json", "out_plot", "format")
               if getattr(args, k) is not None}
    return replace(cfg, ic=ic, options=_options(args, cfg.options), **updates)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        try:
            config = config_from_args(args)
        except (OSError, ValueError, TypeError) as exc:
            print(f"error: bad config: {exc}", file=sys.stderr)
            return EXIT_INVALID
        return cmd_solve(config)
    if args.command == "check-family":
        return cmd_check_family(args.family, args.n)

    defaults = RunConfig()
    grid = [args.h0 or [defaults.ic.h0], args.r0 or [defaults.ic.r0],
            args.rdot0 or [defaults.ic.rdot0]]
    try:
        text = cmd_sweep(args.family or defaults.family, args.n or defaults.n, *grid,
                         options=_options(args, SolveOptions()), jobs=args.jobs, format=args.format)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
