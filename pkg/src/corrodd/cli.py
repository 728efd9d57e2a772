"""Command line interface.

::

    corrodd check --config cfg.json
    corrodd simulate --config cfg.json --out run/ [--unsafe-dt] [--unsafe-pzc] [--set key=value ...]
    corrodd sweep --config cfg.json --param V --from 0 --to 1 --points 5 --out sweep/
    corrodd convergence --config cfg.json --dts tau/2,tau/4,tau/8,tau/16 --out conv/

Exit status is 0 on success, 1 on a usage or configuration error and 2 when
a run aborts because a density left its admissible range.  Output
directories hold an ``INCOMPLETE`` file until everything has been written.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import output, plotting
from .config import apply_overrides, config_from_dict, dump_config, read_json, set_key
from .diagnostics import temporal_order, weak_residual
from .errors import BoundViolationError, ConfigError, CorroddError
from .params import check_admissibility
from .timeloop import run

log = logging.getLogger("corrodd")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BOUND = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(args, overrides=()):
    data = apply_overrides(read_json(args.config), list(getattr(args, "set", None) or ()) + list(overrides))
    return config_from_dict(
        data,
        base_dir=Path(args.config).parent,
        unsafe_dt=getattr(args, "unsafe_dt", False),
        unsafe_pzc=getattr(args, "unsafe_pzc", False),
    )


def cmd_check(args) -> int:
    data = apply_overrides(read_json(args.config), args.set)
    cfg = config_from_dict(data, base_dir=Path(args.config).parent, check=False)
    report = check_admissibility(cfg.params)
    print(report.format())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(report.format() + "\n", encoding="utf-8")
        output.write_json(out / "report.json", report.to_dict())
    return EXIT_OK if report.passed else EXIT_USAGE


def simulate_to(cfg, out_dir, figures: bool = True):
    """Run ``cfg`` and write all outputs to ``out_dir``; returns the trajectory."""
    out = Path(out_dir)
    output.mark_incomplete(out)
    output.write_json(out / "config.json", dump_config(cfg))
    try:
        traj = run(cfg)
    except BoundViolationError as exc:
        dump = {"error": str(exc)}
        if exc.state is not None:
            dump["k"] = exc.state.k
            dump["t"] = exc.state.t
            output.write_snapshot(out / "violation_state.csv", exc.state, cfg.grid)
        output.write_json(out / "violation.json", dump)
        raise

    for s in traj.snapshots:
        output.write_snapshot(out / output.snapshot_name(s.t), s, cfg.grid)
    if cfg.series:
        output.write_series(out / "series.csv", traj.diagnostics)
    summary = {
        "dt": traj.dt,
        "tau": cfg.tau(),
        "steps": traj.steps,
        "t_final": traj.final.t,
        "max_abs_psi": float(np.max(np.abs(traj.Psi))),
        "weak_residual": {w: weak_residual(traj, w) for w in ("poisson", "carrier_P", "carrier_N")},
        "bound_violations": list(traj.violations),
    }
    if traj.diagnostics:
        last = traj.diagnostics[-1]
        summary["final_currents"] = {n: getattr(last, n) for n in ("JP0", "JP1", "JN0", "JN1")}
        summary["max_mass_residual"] = max(
            max(abs(r.massResP), abs(r.massResN)) for r in traj.diagnostics
        )
    output.write_json(out / "summary.json", summary)
    if figures:
        plotting.profiles(traj.snapshots, cfg.grid, cfg.params, out / "profiles.png")
        if traj.diagnostics:
            plotting.series(traj.diagnostics, out / "series.png")
    output.mark_complete(out)
    return traj


def cmd_simulate(args) -> int:
    cfg = _load(args)
    try:
        simulate_to(cfg, args.out, figures=not args.no_figures)
    except BoundViolationError as exc:
        log.error("%s", exc)
        return EXIT_BOUND
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.points < 1:
        raise ConfigError("--points must be at least 1")
    base = apply_overrides(read_json(args.config), args.set)
    values = np.linspace(args.start, args.stop, args.points)
    out = Path(args.out)
    output.mark_incomplete(out)
    rows = []
    currents = {n: [] for n in ("JP0", "JP1", "JN0", "JN1")}
    failures = set()
    for i, v in enumerate(values):
        data = apply_overrides(base, ())
        set_key(data, args.param, float(v))
        point_dir = out / f"point_{i:03d}"
        status = "ok"
        last = None
        try:
            cfg = config_from_dict(
                data,
                base_dir=Path(args.config).parent,
                unsafe_dt=args.unsafe_dt,
                unsafe_pzc=args.unsafe_pzc,
            )
            traj = simulate_to(cfg, point_dir, figures=not args.no_figures)
            last = traj.diagnostics[-1] if traj.diagnostics else None
        except BoundViolationError as exc:
            log.error("point %d (%s = %g): %s", i, args.param, v, exc)
            status = "bound_violation"
            failures.add(EXIT_BOUND)
        except ConfigError as exc:
            log.error("point %d (%s = %g): %s", i, args.param, v, exc)
            output.mark_incomplete(point_dir)
            status = "config_error"
            failures.add(EXIT_USAGE)
        vals = {n: (getattr(last, n) if last is not None else None) for n in currents}
        for n in currents:
            currents[n].append(vals[n])
        rows.append((i, float(v), status, vals))

    with open(out / "summary.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(["index", args.param, "status", *currents]) + "\n")
        for i, v, status, vals in rows:
            cells = [str(i), output.fmt(v), status]
            cells += ["" if vals[n] is None else output.fmt(vals[n]) for n in currents]
            fh.write(",".join(cells) + "\n")
    if not args.no_figures:
        plotting.sweep(args.param, [float(v) for v in values], currents, out / "sweep.png")
    if failures:
        return EXIT_BOUND if EXIT_BOUND in failures else EXIT_USAGE
    output.mark_complete(out)
    return EXIT_OK


def parse_dts(text: str, tau: float) -> list:
    """Comma list of numbers or ``tau/n`` / ``tau*x`` expressions."""
    dts = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "")
        if not tok:
            continue
        try:
            if tok == "tau":
                dts.append(tau)
            elif tok.startswith("tau/"):
                dts.append(tau / float(tok[4:]))
            elif tok.startswith("tau*"):
                dts.append(tau * float(tok[4:]))
            else:
                dts.append(float(tok))
        except ValueError:
            raise ConfigError(f"cannot parse time step {tok!r}") from None
    return dts


def cmd_convergence(args) -> int:
    cfg = _load(args)
    dts = parse_dts(args.dts, cfg.tau())
    out = Path(args.out)
    output.mark_incomplete(out)
    cfg = replace(cfg, snapshot_times=())
    try:
        result = temporal_order(cfg, dts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    output.write_csv(out / "convergence.csv", ["dt", "error"], zip(result.steps, result.errors))
    output.write_json(
        out / "convergence.json",
        {
            "dts": sorted(dts, reverse=True),
            "order": result.order,
            "indeterminate": result.indeterminate,
            "reference": "richardson(2*u(dt_min) - u(2*dt_min))",
        },
    )
    if not args.no_figures:
        plotting.convergence(result, out / "convergence.png")
    order = "indeterminate" if result.order is None else f"{result.order:.4f}"
    print(f"observed temporal order: {order}")
    output.mark_complete(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="corrodd", description="1D drift-diffusion corrosion simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(p, out_required=True):
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
        if out_required is not None:
            p.add_argument("--out", required=out_required, help="output directory")

    p = sub.add_parser("check", help="report on the admissibility hypotheses")
    common(p, out_required=False)
    p.set_defaults(func=cmd_check)

    for name, func, helptext in (
        ("simulate", cmd_simulate, "run one simulation"),
        ("sweep", cmd_sweep, "run a linear sweep over one parameter"),
        ("convergence", cmd_convergence, "measure the temporal convergence order"),
    ):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--unsafe-dt", action="store_true", help="allow dt above the stability bound")
        p.add_argument("--unsafe-pzc", action="store_true", help="allow pzc drops outside their intervals")
        p.add_argument("--no-figures", action="store_true", help="skip PNG figures")
        p.set_defaults(func=func)
        if name == "sweep":
            p.add_argument("--param", required=True, help="dotted config key, e.g. V or kinetics.P.side0.m")
            p.add_argument("--from", dest="start", type=float, required=True)
            p.add_argument("--to", dest="stop", type=float, required=True)
            p.add_argument("--points", type=int, required=True)
        if name == "convergence":
            p.add_argument("--dts", required=True, help="comma list, e.g. tau/2,tau/4,tau/8,tau/16")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except CorroddError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
