"""Command-line entry point: ``frwkg <subcommand> ...``.

Exit codes: 0 ok, 1 error, 2 blow-up, 3 inadmissible (classify).
The output directory is taken from ``--out``, then ``$FRWKG_OUT_DIR``,
then the config's ``[output] directory``.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, default_config, parse_config, parse_number
from .errors import FRWError
from .evolve import Status
from .io import (atomic_write_json, load_trajectory, report_row, save_trajectory,
                 series_columns, write_csv)
from .plotting import render_plot
from .regimes import classify

log = logging.getLogger("frwkg")

OUT_ENV = "FRWKG_OUT_DIR"
EXIT_OK, EXIT_ERROR, EXIT_BLOWUP, EXIT_INADMISSIBLE = 0, 1, 2, 3
MAX_SWEEP_POINTS = 10**6


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def load_config(path) -> RunConfig:
    if path is None:
        return default_config()
    text = Path(path).read_text()
    fmt = "json" if str(path).endswith(".json") else None
    return parse_config(text, fmt)


def out_dir(args, cfg: RunConfig | None = None):
    if getattr(args, "out", None):
        return Path(args.out)
    if os.environ.get(OUT_ENV):
        return Path(os.environ[OUT_ENV])
    return Path(cfg.output["directory"] if cfg is not None else "run")


def _apply_seed(args, cfg):
    if getattr(args, "seed", None) is not None:
        cfg.run["seed"] = args.seed
    return cfg


def _write_series(path, cfg, traj):
    from .runner import reports

    k_max = cfg.output["k_max"]
    reps = reports(cfg, traj)
    write_csv(path, series_columns(k_max), (report_row(r, k_max) for r in reps))
    return reps


def _headline(reps, k_max):
    if not reps:
        return {}
    last = reps[-1]
    return {
        "final_tau": last.tau,
        "final_Hk": {str(k): last.Hk[k] for k in range(k_max + 1)},
        "final_energy_norm": {str(k): last.energy_norm[k] for k in range(k_max + 1)},
        "decay_product_max": max(r.decay_product for r in reps),
    }


def _plots(odir, cfg):
    o, made = cfg.output, []
    series = odir / "series.csv"
    if o["plot_energy"]:
        cols = [f"Hk_{k}" for k in range(o["k_max"] + 1)]
        made.append(render_plot(series, cols, odir / "energy.svg", logy=True))
    if o["plot_decay"]:
        made.append(render_plot(series, ["decay_product"], odir / "decay.svg"))
    return [p.name for p in made]


def _run_solver(args, mode):
    from .runner import run

    manifest = {"tool": "frwkg", "version": __version__, "command": mode, "start": _now()}
    odir = None
    code = EXIT_ERROR
    try:
        cfg = _apply_seed(args, load_config(args.config))
        manifest["config"] = cfg.to_dict()
        odir = out_dir(args, cfg)
        odir.mkdir(parents=True, exist_ok=True)
        t0 = time.perf_counter()
        result = run(cfg, mode="picard" if mode == "picard" else "mol")
        traj = result.trajectory
        save_trajectory(odir / "trajectory.npz", traj, cfg.to_dict())
        reps = _write_series(odir / "series.csv", cfg, traj)
        manifest["headline"] = _headline(reps, cfg.output["k_max"])
        manifest["status"] = traj.status.value
        manifest["runtime_s"] = round(time.perf_counter() - t0, 3)
        if traj.status is Status.BLOWUP:
            manifest["blowup_tau"] = traj.blowup_tau
            code = EXIT_BLOWUP
            log.error("blow-up at tau=%s", traj.blowup_tau)
        else:
            code = EXIT_OK
        if result.trace is not None:
            tr = result.trace
            write_csv(odir / "picard_gaps.csv", ["iteration", "gap"],
                      ((i + 1, g) for i, g in enumerate(tr.gaps)))
            manifest["picard"] = {"converged": tr.converged, "iterations": tr.iterations,
                                  "k": tr.k, "final_gap": tr.gaps[-1] if tr.gaps else None}
            if not tr.converged and code == EXIT_OK:
                manifest["status"] = "no_convergence"
                code = EXIT_ERROR
                log.error("Picard iteration did not reach tol after %d iterates", tr.iterations)
        manifest["plots"] = _plots(odir, cfg)
    except FRWError as exc:
        manifest["status"] = "error"
        manifest["error"] = f"{type(exc).__name__}: {exc}"
        log.error("%s", manifest["error"])
        code = EXIT_ERROR
    finally:
        manifest["end"] = _now()
        manifest["exit_code"] = code
        if odir is None:
            odir = out_dir(args)
        atomic_write_json(odir / "manifest.json", manifest)
    return code


def cmd_evolve(args):
    return _run_solver(args, "evolve")


def cmd_picard(args):
    return _run_solver(args, "picard")


def cmd_energy(args):
    """Recompute the diagnostics series from a stored trajectory."""
    traj, cfg_dict = load_trajectory(args.trajectory)
    cfg = parse_config(json.dumps(cfg_dict), "json") if cfg_dict else default_config()
    if args.k_max is not None:
        cfg.output["k_max"] = args.k_max
    odir = out_dir(args, cfg)
    _write_series(odir / "series.csv", cfg, traj)
    if not args.quiet:
        print(odir / "series.csv")
    return EXIT_OK


def _classify_kwargs(ns):
    kw = dict(xi=parse_number(ns.xi), p=parse_number(ns.p), tau0=parse_number(ns.tau0),
              rate=float(ns.rate), family=ns.family)
    if ns.w is not None:
        kw["w"] = parse_number(ns.w)
    if ns.alpha is not None:
        kw["alpha"] = parse_number(ns.alpha)
    return kw


def cmd_classify(args):
    verdict = classify(int(args.D), **_classify_kwargs(args))
    print(json.dumps(verdict.to_dict(), indent=None if args.quiet else 2, default=str))
    return EXIT_OK if verdict.admissible else EXIT_INADMISSIBLE


def parse_range(text):
    """'v', 'a,b,c' or 'start:stop:num' (inclusive linspace) -> list of values."""
    text = str(text).strip()
    if ":" in text:
        start, stop, num = text.split(":")
        num = int(num)
        if num == 1:
            return [parse_number(start)]
        return [float(v) for v in np.linspace(float(parse_number(start)),
                                               float(parse_number(stop)), num)]
    if text == "":
        return []
    return [parse_number(v) for v in text.split(",")]


SWEEP_COLUMNS = ["D", "w", "alpha", "xi", "p", "tau0", "case", "assumption1", "h_coefficient",
                 "A_converges", "A", "p_bound_dir", "p_bound", "xi_bound_dir", "xi_bound",
                 "table_conditions_hold", "admissible"]


def _verdict_row(D, key, val, xi, p, tau0, rate, family):
    kw = {key: val, "xi": xi, "p": p, "tau0": tau0, "rate": rate, "family": family}
    v = classify(D, **kw)
    xb = v.xi_bound
    return [D, v.w, v.alpha, xi, p, tau0, v.case_label.value, v.assumption1.passed,
            v.assumption1.coefficient, v.assumption3.converges, v.assumption3.value,
            v.p_bound.direction, float(v.p_bound.value),
            "" if xb is None else xb.direction, "" if xb is None else float(xb.value),
            v.table_conditions_hold, v.admissible]


def cmd_sweep(args):
    key = "w" if args.w is not None else "alpha"
    axes = [parse_range(args.D), parse_range(args.w if key == "w" else args.alpha),
            parse_range(args.xi), parse_range(args.p), parse_range(args.tau0)]
    total = int(np.prod([len(a) for a in axes]))
    limit = min(args.max_points, MAX_SWEEP_POINTS)
    truncated = total > limit
    points = list(itertools.islice(itertools.product(*axes), limit))

    def one(pt):
        D, val, xi, p, tau0 = pt
        return _verdict_row(int(D), key, val, xi, p, tau0, args.rate, args.family)

    if args.workers > 1:
        with ThreadPoolExecutor(args.workers) as pool:
            rows = list(pool.map(one, points))
    else:
        rows = [one(pt) for pt in points]
    odir = out_dir(args)
    write_csv(odir / "verdicts.csv", SWEEP_COLUMNS, rows)
    atomic_write_json(odir / "manifest.json", {
        "tool": "frwkg", "version": __version__, "command": "sweep", "end": _now(),
        "points": len(rows), "requested_points": total, "truncated": truncated,
        "admissible_points": sum(1 for r in rows if r[-1]),
        "status": "truncated" if truncated else "completed",
    })
    if truncated:
        log.error("sweep has %d points, over the budget of %d; wrote the first %d",
                  total, limit, len(rows))
        return EXIT_ERROR
    if not args.quiet:
        print(odir / "verdicts.csv")
    return EXIT_OK


def cmd_plot(args):
    columns = [c.strip() for c in args.columns.split(",") if c.strip()]
    out = Path(args.output) if args.output else Path(args.csv).with_suffix(".svg")
    render_plot(args.csv, columns, out, x=args.x, logx=args.logx, logy=args.logy,
                title=args.title)
    if not args.quiet:
        print(out)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="run config (INI or JSON)")
    common.add_argument("--out", metavar="DIR", help=f"output directory (overrides ${OUT_ENV})")
    common.add_argument("--seed", type=int, help="seed for randomized initial data")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="frwkg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("evolve", parents=[common], help="method-of-lines run"
                   ).set_defaults(func=cmd_evolve)
    sub.add_parser("picard", parents=[common], help="Picard-iteration run"
                   ).set_defaults(func=cmd_picard)

    p = sub.add_parser("energy", parents=[common], help="recompute diagnostics from trajectory.npz")
    p.add_argument("trajectory")
    p.add_argument("--k-max", type=int, dest="k_max")
    p.set_defaults(func=cmd_energy)

    def model_args(p, ranges=False):
        kind = "range" if ranges else "value"
        p.add_argument("--D", required=True, help=f"spacetime dimension ({kind})")
        grp = p.add_mutually_exclusive_group(required=True)
        grp.add_argument("--w", help=f"equation of state ({kind}; fractions like 1/3 ok)")
        grp.add_argument("--alpha", help=f"power-law exponent or exponential rate ({kind})")
        p.add_argument("--xi", default="0", help=f"curvature coupling ({kind})")
        p.add_argument("--p", default="1", help=f"potential power ({kind})")
        p.add_argument("--tau0", default="1", help=f"time offset ({kind})")
        p.add_argument("--family", choices=["power", "exponential"], default=None)
        p.add_argument("--rate", default=1.0, type=float,
                       help="exponential rate used on the degenerate w line")

    p = sub.add_parser("classify", parents=[common], help="admissibility of one parameter point")
    model_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sweep", parents=[common],
                       help="classify a lattice of points; ranges are v, a,b,c or start:stop:num")
    model_args(p, ranges=True)
    p.add_argument("--max-points", type=int, default=MAX_SWEEP_POINTS)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", parents=[common], help="render CSV columns to SVG")
    p.add_argument("csv")
    p.add_argument("--columns", required=True, help="comma-separated column names")
    p.add_argument("--x", default="tau")
    p.add_argument("--logx", action="store_true")
    p.add_argument("--logy", action="store_true")
    p.add_argument("--title")
    p.add_argument("-o", "--output", help="SVG path (default: next to the CSV)")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="frwkg: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (FRWError, OSError, ValueError, KeyError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
