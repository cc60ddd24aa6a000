"""Command line: ``gen``, ``optimize`` and ``bench``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict

from .bench_harness import Budgets, Suite, emit_report, run_suite
from .generator import GeneratorSpec, Structure, generate
from .layout_model import dump_instance, load_instance
from .optimizer import branch_and_bound, deep_enumeration_optimize, warm_start_optimize


def parse_seeds(text: str) -> list[int]:
    """``"0..10"`` (inclusive), ``"3"`` or ``"1,4,7"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"no seeds in {text!r}")
    return out


def _gen(args) -> int:
    spec = GeneratorSpec(args.rows, args.cols, args.structure, args.rho, args.rho_soft, args.seed)
    text = dump_instance(generate(spec)) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


def _optimize(args) -> int:
    with open(args.file) as fh:
        instance = load_instance(fh)
    if args.mode == "cold":
        res = branch_and_bound(instance, time_limit=args.time_limit)
    elif args.mode == "warm":
        res = warm_start_optimize(instance, time_limit=args.time_limit)
    else:
        res = deep_enumeration_optimize(instance, args.max_samples, time_limit=args.time_limit)
    rec = asdict(res)
    rec["mode"] = args.mode
    rec["status"] = res.status.value
    rec["best_layout"] = None if res.best_layout is None else list(res.best_layout.slot_of)
    json.dump(rec, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _bench(args) -> int:
    budgets = Budgets(args.feas_timeout, args.opt_timeout, args.max_samples)

    def progress(rec):
        logging.info("%s %dx%d seed=%d %s %s %.3fs", rec.method, rec.rows, rec.cols,
                     rec.seed, rec.symmetry_mode, rec.status, rec.runtime_seconds)

    records = run_suite(args.suite, args.seeds, budgets, progress=progress)
    with open(args.out, "w") as fh:
        fh.write(emit_report(records, "csv"))
    if args.markdown:
        with open(args.markdown, "w") as fh:
            fh.write(emit_report(records, "markdown"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="layoutsat", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a seeded instance as JSON")
    g.add_argument("--rows", type=int, required=True)
    g.add_argument("--cols", type=int, required=True)
    g.add_argument("--structure", choices=[s.value for s in Structure], default="mixed")
    g.add_argument("--rho", type=float, default=0.0, help="hard-constraint density")
    g.add_argument("--rho-soft", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="-")
    g.set_defaults(func=_gen)

    o = sub.add_parser("optimize", help="minimise the layout cost of an instance file")
    o.add_argument("file")
    o.add_argument("--mode", choices=["cold", "warm", "enum"], default="warm")
    o.add_argument("--max-samples", type=int, default=75_000)
    o.add_argument("--time-limit", type=float, default=60.0)
    o.set_defaults(func=_optimize)

    b = sub.add_parser("bench", help="run an experiment suite")
    b.add_argument("--suite", choices=[s.value for s in Suite], required=True)
    b.add_argument("--seeds", type=parse_seeds, default=parse_seeds("0..10"))
    b.add_argument("--feas-timeout", type=float, default=10.0)
    b.add_argument("--opt-timeout", type=float, default=60.0)
    b.add_argument("--max-samples", type=int, default=75_000)
    b.add_argument("--out", required=True)
    b.add_argument("--markdown")
    b.set_defaults(func=_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
