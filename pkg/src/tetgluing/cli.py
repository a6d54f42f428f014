"""Command-line entry point: ``tetgluing <command> ...`` or ``python -m tetgluing``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from .complex import summarize
from .errors import GluingError, InsufficientData
from .model import derive_seed, sample_simple, sample_uniform, write_instance
from .peeling import peel_algorithm1, peel_algorithm2, trace_report, write_traces_csv


def _cmd_sample(args) -> int:
    inst = sample_simple(args.n, args.seed) if args.simple else sample_uniform(args.n, args.seed)
    write_instance(inst, args.out)
    s = summarize(inst)
    print(f"n={s.n} V={s.V} E={s.E} genus={list(s.genus_list)} -> {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    config = harness.ExperimentConfig.load(args.config)
    if args.out is not None:
        config.output_dir = args.out
    result = harness.run_sweep(config)
    for n in result.stats.n_values:
        if result.stats.has(n, "E"):
            e = result.stats.summary(n, "E")
            print(f"n={n} trials={e.count} mean E={e.mean:.4f} (var {e.variance:.4f})")
    if result.stats.regression is not None:
        r = result.stats.regression
        print(f"mean E = {r.slope:.4f} ln n + {r.intercept:.4f}  (R^2 {r.r2:.4f})")
    if config.output_dir:
        print(f"records and aggregates written to {config.output_dir}")
    return 0


def _cmd_peel(args) -> int:
    traces = []
    closures = []
    for trial in range(args.trials):
        seed = derive_seed(args.seed, args.n, trial)
        if args.algorithm == 1:
            _, tr = peel_algorithm1(args.n, seed)
        else:
            _, kl, tr, _ = peel_algorithm2(args.n, seed, with_trace=True)
            closures.append(kl)
        traces.append(tr)
    if args.trace_out:
        write_traces_csv(args.trace_out, traces)
    rep = trace_report(traces)
    print(f"algorithm {args.algorithm}, n={args.n}, trials={args.trials}: mean E = {rep.mean_total_edges:.4f}")
    print(f"max mean singular faces = {rep.mean_F_sing.max():.4f}")
    if closures:
        ks = np.array([k for k, _ in closures], dtype=float)
        ls = np.array([l for _, l in closures], dtype=float)
        print(f"mean closure lengths: k={ks.mean():.3f} l={ls.mean():.3f}")
    return 0


def _cmd_enumerate(args) -> int:
    table = harness.exact_distribution(args.n)
    rows = []
    for (V, E, hist, shist, dual), p in table.items():
        rows.append({
            "V": V,
            "E": E,
            "edge_histogram": [list(x) for x in hist],
            "simple_histogram": [list(x) for x in shist],
            "dual_simple": dual[0],
            "dual_connected": dual[1],
            "dual_loops": dual[2],
            "probability": f"{p.numerator}/{p.denominator}",
        })
    with open(args.out, "w") as fh:
        json.dump({"n": args.n, "atoms": rows}, fh, indent=1)
    print(f"{len(rows)} atoms, total probability {sum(table.values())} -> {args.out}")
    return 0


def _cmd_homology(args) -> int:
    config = harness.ExperimentConfig(
        n_list=[args.n],
        trials=args.trials,
        master_seed=args.seed,
        conditioning="simple" if args.simple else "uniform",
        panels=("edges", "boundary", "homology"),
    )
    res = harness.run_sweep(config)
    for rec in res.records:
        if rec.homology_skipped:
            print(f"trial {rec.trial}: skipped")
            continue
        print(
            f"trial {rec.trial}: b1(M,dM)={rec.b1_rel} b1(M)={rec.b1_abs} b1(DM)={rec.b1_double} "
            f"torsion={rec.torsion_factors} heegaard=[{rec.heegaard_lower}, {rec.heegaard_upper}]"
        )
    return 0


def _cmd_theory_report(args) -> int:
    records = harness.read_records(Path(args.in_dir) / "records.jsonl")
    stats = harness.AggregateStats.from_records(records)
    try:
        report = harness.compare_theory(stats)
        text = report.text()
        payload = report.to_dict()
    except InsufficientData as exc:
        text = f"insufficient data: {exc}\n"
        payload = {"passed": None, "error": str(exc)}
    with open(args.out, "w") as fh:
        fh.write(text)
    with open(str(args.out) + ".json", "w") as fh:
        json.dump(payload, fh, indent=1)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tetgluing", description="Random gluings of tetrahedra.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw one gluing and write it as text")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--simple", action="store_true", help="condition on a simple dual graph")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_sample)

    s = sub.add_parser("sweep", help="run an experiment described by a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default=None, help="override the config's output_dir")
    s.set_defaults(func=_cmd_sweep)

    s = sub.add_parser("peel", help="run a peeling algorithm and export step traces")
    s.add_argument("--algorithm", type=int, choices=(1, 2), required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, default=0, help="master seed")
    s.add_argument("--trace-out", default=None)
    s.set_defaults(func=_cmd_peel)

    s = sub.add_parser("enumerate", help="exact distribution table for n = 1 or 2")
    s.add_argument("--n", type=int, choices=(1, 2), required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_enumerate)

    s = sub.add_parser("homology", help="Betti numbers and Heegaard bounds per trial")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--trials", type=int, required=True)
    s.add_argument("--seed", type=int, default=0, help="master seed")
    s.add_argument("--simple", action="store_true")
    s.set_defaults(func=_cmd_homology)

    s = sub.add_parser("theory-report", help="compare a sweep directory with the asymptotic laws")
    s.add_argument("--in", dest="in_dir", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_theory_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GluingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
