#!/usr/bin/env python3
"""
run.py
──────────────────────────────────────────────────────────────────────────────
Command-line entry point.

    python run.py count square.txt
    python run.py curves module.txt --closed-deaths
    python run.py boundary module.txt --field 101
    python run.py check --window 0 0 2 2 --seed 3 --field 101
    python run.py gen --window 0 0 3 3 --seed 7 > pres.txt
    python run.py plot pres.txt --field 101 --svg out.svg

Results go to stdout as JSON (gen prints a presentation file instead).
Errors print one line on stderr and exit with the status of their class.
──────────────────────────────────────────────────────────────────────────────
"""

import argparse
import logging
import sys
from collections import Counter
from typing import Callable, Dict, NamedTuple, Optional

from config import JobConfig, configure_logging
from core.betti import betti_from_curves, betti_from_square_counts, koszul_betti, square_counts
from core.boundary import boundary_components
from core.counts import n2, n_bth, n_dth
from core.decomp import decompose_grid, is_spread_decomposable, set_size_cap
from core.endcurves import births, corner_data, curves_summary, deaths
from core.errors import CheckFailedError, ContractViolationError, GridModError, SizeLimitError
from core.gridmod import Window, random_module, random_presentation
from core.oneparam import bar_count, diagonal_path, slice_module
from core.oracles import count_gpd, count_hilbert, count_hooks, count_int_euler, count_signed_barcode
from ingest.formats import serialize_presentation
from ingest.loader import load_module, read_input
from utils.stringifier import display_json_data, emit_json
from utils.svg_plot import plot_summary

logger = logging.getLogger("run")


class Outcome(NamedTuple):
    payload: object
    exit_code: int = 0
    text: Optional[str] = None


# ─────────────────────────────────────────────────────────────────────────────
# 1.  ARGUMENTS
# ─────────────────────────────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridmod",
        description="Counts, end-curves, Betti tables and boundaries of bigraded modules on finite grids.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=int, help="prime p of the coefficient field F_p")
    common.add_argument("--window", type=int, nargs=4, metavar=("X0", "Y0", "X1", "Y1"))
    common.add_argument("--closed-deaths", action="store_true", help="report deaths shifted back by (1,1)")
    common.add_argument("--seed", type=int, help="seed for randomized splitting and generators")
    common.add_argument("--cap", type=int, help="total-dimension cap for decompositions")
    common.add_argument("--budget", type=int, help="random draws per splitting attempt")
    common.add_argument("--workers", type=int, help="threads for per-grade homology")
    common.add_argument("--degree", type=int, default=0, help="homological degree for bifiltration input")
    common.add_argument("-v", "--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_input in (
        ("count", True),
        ("curves", True),
        ("betti", True),
        ("boundary", True),
        ("decompose", True),
        ("check", False),
        ("plot", True),
    ):
        cmd = sub.add_parser(name, parents=[common])
        cmd.add_argument("input", nargs=None if needs_input else "?", help="input file, or - for stdin")
        if name == "plot":
            cmd.add_argument("--svg", required=True, help="path of the SVG file to write")
        if name == "boundary":
            cmd.add_argument("--transfer", action="store_true", help="also print the raw monodromy matrices")
    gen = sub.add_parser("gen", parents=[common])
    gen.add_argument("--gens", type=int, default=2)
    gen.add_argument("--rels", type=int, default=3)
    gen.add_argument("--finite-support", action="store_true")
    return parser


def _config(args: argparse.Namespace) -> JobConfig:
    return JobConfig.from_env(
        field=args.field,
        window=tuple(args.window) if args.window else None,
        closed_deaths=args.closed_deaths or None,
        seed=args.seed,
        cap=args.cap,
        budget=args.budget,
        workers=args.workers,
        log_level="DEBUG" if args.verbose else None,
    )


def _load(args: argparse.Namespace, cfg: JobConfig):
    text = read_input(args.input)
    m = load_module(text, p=args.field, window=cfg.grid_window(), degree=args.degree, workers=cfg.workers)
    if m.total_dim > cfg.cap:
        raise SizeLimitError(f"module has total dimension {m.total_dim}, above the cap of {cfg.cap}")
    logger.info(f"[RUN] module over F_{m.p} on {m.window.lo}..{m.window.hi}, total dim {m.total_dim}")
    return m


# ─────────────────────────────────────────────────────────────────────────────
# 2.  COMMANDS
# ─────────────────────────────────────────────────────────────────────────────


def cmd_count(args, cfg) -> Outcome:
    m = _load(args, cfg)
    return Outcome(
        {
            "n2": n2(m),
            "n_bth": n_bth(m, cfg.seed, cfg.budget),
            "n_dth": n_dth(m, cfg.seed, cfg.budget),
        }
    )


def cmd_curves(args, cfg) -> Outcome:
    m = _load(args, cfg)
    corners = corner_data(m)
    return Outcome(
        {
            "births": curves_summary(births(m, cfg.seed, cfg.budget)),
            "deaths": curves_summary(deaths(m, cfg.seed, cfg.budget, closed=cfg.closed_deaths)),
            "topleft": corners.topleft,
            "botright": corners.botright,
        }
    )


def cmd_betti(args, cfg) -> Outcome:
    m = _load(args, cfg)
    koszul = koszul_betti(m)
    curves = betti_from_curves(births(m, cfg.seed, cfg.budget), deaths(m, cfg.seed, cfg.budget), corner_data(m))
    agree = koszul == curves
    payload = dict(koszul.as_dict(), curves_agree=agree)
    return Outcome(payload, 0 if agree else CheckFailedError.exit_code)


def cmd_boundary(args, cfg) -> Outcome:
    m = _load(args, cfg)
    comps = boundary_components(m, cfg.seed, cfg.budget, keep_transfer=args.transfer, max_total_dim=cfg.cap)
    return Outcome({"p": m.p, "components": [c.as_dict() for c in comps]})


def cmd_decompose(args, cfg) -> Outcome:
    m = _load(args, cfg)
    summands = decompose_grid(m, cfg.seed, cfg.budget)
    flag, supports = is_spread_decomposable(m, cfg.seed, cfg.budget)
    return Outcome(
        {
            "n_dec": len(summands),
            "spread_decomposable": flag,
            "summands": [
                {
                    "dims": [[q.x, q.y, s.dim(q)] for q in s.points() if s.dim(q)],
                    "thin": all(s.dim(q) <= 1 for q in s.points()),
                }
                for s in summands
            ],
            "spread_supports": [sorted([q.x, q.y] for q in sup) for sup in supports] if flag else None,
        }
    )


def run_checks(m, cfg: JobConfig) -> Dict[str, object]:
    """Every count and Betti identity the toolkit knows, evaluated on one module."""
    values = {
        "n2": n2(m),
        "n_bth": n_bth(m, cfg.seed, cfg.budget),
        "n_dth": n_dth(m, cfg.seed, cfg.budget),
        "count_gpd": count_gpd(m),
        "count_signed_barcode": count_signed_barcode(m),
        "count_hooks": count_hooks(m),
        "count_int_euler": count_int_euler(m),
        "count_hilbert": count_hilbert(m),
        "dim_at_max": m.dim(m.window.hi),
    }
    koszul = koszul_betti(m)
    curves = betti_from_curves(births(m, cfg.seed, cfg.budget), deaths(m, cfg.seed, cfg.budget), corner_data(m))
    tables = [Counter(koszul.table(k)) for k in range(3)]
    squares_ok = True
    for ell in Window(m.window.lo, m.window.hi.plus((1, 1))).points():
        local = betti_from_square_counts(square_counts(m, ell, cfg.seed, cfg.budget))
        if any(local[k] != tables[k][ell] for k in range(3)):
            squares_ok = False
    slices_ok = True
    for dx in range(m.window.hi.x - m.window.lo.x + 1):
        for dy in range(m.window.hi.y - m.window.lo.y + 1):
            if dx and dy:
                continue
            if bar_count(slice_module(m, diagonal_path(m, (dx, dy)))) > values["n2"]:
                slices_ok = False
    counts = [values[k] for k in ("n2", "n_bth", "n_dth", "count_gpd", "count_signed_barcode", "count_hooks", "count_int_euler")]
    checks = {
        "counts_equal": len(set(counts)) == 1,
        "count_nonnegative": values["n2"] >= 0,
        "hilbert_is_top_dim": values["count_hilbert"] == values["dim_at_max"],
        "betti_from_curves": koszul == curves,
        "betti_from_squares": squares_ok,
        "slice_monotone": slices_ok,
    }
    return {"values": values, "checks": checks, "ok": all(checks.values())}


def cmd_check(args, cfg) -> Outcome:
    if args.input:
        m = _load(args, cfg)
    else:
        window = cfg.grid_window() or Window.square(3)
        m = random_module(window, cfg.seed, cfg.field)
        logger.info(f"[RUN] random module from seed {cfg.seed}, total dim {m.total_dim}")
    report = run_checks(m, cfg)
    return Outcome(report, 0 if report["ok"] else CheckFailedError.exit_code)


def cmd_gen(args, cfg) -> Outcome:
    if args.gens < 0 or args.rels < 0:
        raise ContractViolationError("--gens and --rels must be nonnegative")
    window = cfg.grid_window() or Window.square(3)
    pr = random_presentation(args.gens, args.rels, window, cfg.seed, cfg.field, args.finite_support)
    return Outcome(None, text=serialize_presentation(pr))


def cmd_plot(args, cfg) -> Outcome:
    m = _load(args, cfg)
    born = births(m, cfg.seed, cfg.budget)
    dead = deaths(m, cfg.seed, cfg.budget, closed=True)
    corners = corner_data(m)
    comps = boundary_components(m, cfg.seed, cfg.budget, max_total_dim=cfg.cap)
    svg = plot_summary(m.window, born, dead, corners.topleft, corners.botright, comps)
    svg.save(args.svg)
    return Outcome({"svg": args.svg, "births": len(born), "deaths": len(dead), "components": len(comps)})


COMMANDS: Dict[str, Callable[[argparse.Namespace, JobConfig], Outcome]] = {
    "count": cmd_count,
    "curves": cmd_curves,
    "betti": cmd_betti,
    "boundary": cmd_boundary,
    "decompose": cmd_decompose,
    "check": cmd_check,
    "gen": cmd_gen,
    "plot": cmd_plot,
}


# ─────────────────────────────────────────────────────────────────────────────
# 3.  MAIN
# ─────────────────────────────────────────────────────────────────────────────


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        configure_logging(cfg)
        set_size_cap(cfg.cap)
        outcome = COMMANDS[args.command](args, cfg)
    except GridModError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if outcome.text is not None:
        sys.stdout.write(outcome.text)
    else:
        sys.stdout.write(emit_json(outcome.payload))
    if args.verbose and outcome.payload is not None:
        display_json_data(outcome.payload, title=f"gridmod {args.command}", level="DEBUG")
    if outcome.exit_code:
        logger.warning(f"[RUN] {args.command}: an invariant check failed")
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
