"""Command-line front end.

Exit codes: 0 success, 1 domain failure (infeasible instance, invalid
partition), 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .algorithms import ALGORITHMS, Options, UsageError, run_algorithm
from .grid import (PartitionError, ResourceLimitError, build_prefix_sum, evaluate_partition,
                   validate_partition)
from .hybrid import PHASE1
from .instances import (KINDS, GenSpec, ParseError, generate, read_matrix, read_partition,
                        write_matrix, write_partition)

CSV_HEADER = ["instance", "algo", "variant", "m", "P", "Q", "lmax", "lavg", "imbalance",
              "runtime_ms", "seed"]
DEFAULT_M = [k * k for k in range(4, 101)]  # squares from 16 to 10000
M_WAY = ["jag-m-heur", "jag-m-heur-probe", "jag-m-opt", "hier-rb", "hier-relaxed", "hier-opt"]


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")


def _stats_line(st) -> str:
    return (f"lmax={st.lmax} lavg={float(st.lavg):.6f} imbalance={float(st.imbalance):.6f} "
            f"runtime_ms={st.runtime_ms:.3f}")


def _spec_from(args, seed: Optional[int] = None) -> GenSpec:
    try:
        return GenSpec(args.kind, args.n1, args.n2, args.delta, args.peaks,
                       args.seed if seed is None else seed)
    except PartitionError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    spec = _spec_from(args)
    write_matrix(generate(spec), args.out)
    print(json.dumps({"kind": spec.kind, "n1": spec.n1, "n2": spec.n2, "delta": spec.delta,
                      "peaks": spec.peak_count, "seed": spec.seed, "prng": "PCG64",
                      "out": str(args.out)}))
    return 0


def _options(args) -> Options:
    return Options(P=args.p, Q=args.q, orientation=args.orientation, variant=args.variant,
                   min_P=args.min_p, phase1=args.phase1, phase2_fast=args.phase2_fast,
                   phase2_slow=args.phase2_slow, alloc=args.alloc)


def cmd_partition(args) -> int:
    ps = build_prefix_sum(read_matrix(args.matrix))
    res = run_algorithm(args.algo, ps, args.m, _options(args))
    st = evaluate_partition(ps, res.partition, res.runtime_ms)
    if args.out:
        write_partition(res.partition, args.out)
    print(_stats_line(st))
    return 0


def _load_pair(args):
    p = read_partition(args.partition)
    if args.matrix is None:
        return None, p
    mat = read_matrix(args.matrix)
    if (p.n1, p.n2) != (mat.n1, mat.n2):
        raise ParseError(args.partition, 1,
                         f"partition is for {p.n1}x{p.n2}, matrix is {mat.n1}x{mat.n2}")
    return build_prefix_sum(mat), p


def cmd_validate(args) -> int:
    _, p = _load_pair(args)
    bad = validate_partition(p)
    if bad:
        for v in bad:
            print(str(v))
        return 1
    print("valid")
    return 0


def cmd_evaluate(args) -> int:
    if args.matrix is None:
        raise UsageError("evaluate needs --matrix")
    ps, p = _load_pair(args)
    bad = validate_partition(p)
    if bad:
        for v in bad:
            print(str(v))
        return 1
    print(_stats_line(evaluate_partition(ps, p)))
    return 0


# ---------------------------------------------------------------------------
# benchmark


def _bench_one(job) -> Dict[str, object]:
    instance, seed, source, algo, m, opts = job
    row: Dict[str, object] = {"instance": instance, "algo": algo, "variant": "", "m": m,
                              "P": "", "Q": "", "lmax": "", "lavg": "", "imbalance": "",
                              "runtime_ms": "", "seed": "" if seed is None else seed}
    try:
        matrix = read_matrix(source) if isinstance(source, str) else generate(source)
        ps = build_prefix_sum(matrix)
        res = run_algorithm(algo, ps, m, opts)
        st = evaluate_partition(ps, res.partition, res.runtime_ms)
    except (PartitionError, UsageError, ResourceLimitError, ParseError) as exc:
        row["variant"] = f"error: {exc}"
        return row
    row.update(variant=res.variant, P="" if res.P is None else res.P,
               Q="" if res.Q is None else res.Q, lmax=st.lmax, lavg=_frac(st.lavg),
               imbalance=f"{float(st.imbalance):.9f}", runtime_ms=f"{st.runtime_ms:.3f}")
    row["_lavg"] = st.lavg
    return row


def _frac(x: Fraction) -> str:
    return f"{float(x):.6f}"


def _aggregate(rows: Sequence[Dict[str, object]]) -> List[Dict[str, object]]:
    """One row per (algo, m): sum of lmax over sum of lavg, minus one."""
    groups: Dict[Tuple[str, int], List[Dict[str, object]]] = {}
    for r in rows:
        if r["lmax"] != "":
            groups.setdefault((r["algo"], r["m"]), []).append(r)
    out = []
    for (algo, m), rs in sorted(groups.items()):
        smax = sum(int(r["lmax"]) for r in rs)
        savg = sum((r["_lavg"] for r in rs), Fraction(0))
        imb = Fraction(smax) / savg - 1 if savg else Fraction(0)
        out.append({"instance": "aggregate", "algo": algo, "variant": f"runs={len(rs)}", "m": m,
                    "P": "", "Q": "", "lmax": smax, "lavg": _frac(savg),
                    "imbalance": f"{float(imb):.9f}",
                    "runtime_ms": f"{sum(float(r['runtime_ms']) for r in rs) / len(rs):.3f}",
                    "seed": ""})
    return out


def cmd_benchmark(args) -> int:
    opts = _options(args)
    sources = []
    if args.matrix:
        for path in args.matrix:
            read_matrix(path)  # fail fast on parse errors
            sources.append((Path(path).stem, None, str(path)))
    else:
        if args.kind is None or args.n1 is None or args.n2 is None:
            raise UsageError("benchmark needs --matrix files or --kind/--n1/--n2")
        for seed in args.seeds:
            spec = _spec_from(args, seed)
            sources.append((f"{spec.kind}-{spec.n1}x{spec.n2}-s{seed}", seed, spec))
    jobs = [(inst, seed, src, algo, m, opts)
            for inst, seed, src in sources for algo in args.algos for m in args.m]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    rows.sort(key=lambda r: (str(r["instance"]), str(r["algo"]), int(r["m"]), str(r["seed"])))
    rows += _aggregate(rows)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=CSV_HEADER, extrasaction="ignore")
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.out:
            out.close()
    failed = sum(1 for r in rows if str(r["variant"]).startswith("error:"))
    if failed:
        print(f"{failed} run(s) failed; see the variant column", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------


def _add_gen_flags(p, required: bool):
    p.add_argument("--kind", choices=KINDS, required=required)
    p.add_argument("--n1", type=int, required=required)
    p.add_argument("--n2", type=int, required=required)
    p.add_argument("--delta", type=float, default=1.0, help="uniform: max/min cell ratio")
    p.add_argument("--peaks", type=int, default=3, help="multipeak: reference point count")


def _add_algo_flags(p):
    p.add_argument("--p", type=int, help="stripes / grid rows (default sqrt(m))")
    p.add_argument("--q", type=int, help="grid columns for P x Q algorithms")
    p.add_argument("--orientation", choices=["hor", "ver", "best"], default="best")
    p.add_argument("--variant", choices=["load", "dist", "hor", "ver"], default="load")
    p.add_argument("--min-p", dest="min_p", type=int, help="hybrid sweep lower end")
    p.add_argument("--phase1", choices=PHASE1, default="hier-relaxed")
    p.add_argument("--phase2-fast", dest="phase2_fast", choices=M_WAY, default="jag-m-heur-probe")
    p.add_argument("--phase2-slow", dest="phase2_slow", choices=M_WAY, default="jag-m-opt")
    p.add_argument("--alloc", type=_int_list, help="jag-m-alloc: processors per stripe")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rectpart", description="Rectangular load partitioning.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="write a synthetic load matrix")
    _add_gen_flags(g, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("partition", help="partition a matrix file")
    p.add_argument("--algo", choices=sorted(ALGORITHMS), required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--out")
    _add_algo_flags(p)
    p.set_defaults(func=cmd_partition)

    for name, func in (("validate", cmd_validate), ("evaluate", cmd_evaluate)):
        v = sub.add_parser(name, help=f"{name} a partition file")
        v.add_argument("--partition", required=True)
        v.add_argument("--matrix")
        v.set_defaults(func=func)

    b = sub.add_parser("benchmark", help="run algorithms x m x seeds to CSV")
    b.add_argument("--algos", type=lambda s: s.split(","),
                   default=["rect-uniform", "rect-nicol", "jag-pq-heur", "jag-m-heur",
                            "jag-m-heur-probe", "hier-rb", "hier-relaxed"])
    b.add_argument("--m", type=_int_list, default=DEFAULT_M)
    b.add_argument("--seeds", type=_int_list, default=list(range(10)))
    b.add_argument("--matrix", nargs="+", help="matrix files instead of generated instances")
    _add_gen_flags(b, required=False)
    b.add_argument("--out", help="CSV path (default: standard output)")
    b.add_argument("--jobs", type=int, default=1)
    _add_algo_flags(b)
    b.set_defaults(func=cmd_benchmark)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "algos", None):
        unknown = [a for a in args.algos if a not in ALGORITHMS]
        if unknown:
            ap.error(f"unknown algorithm(s): {', '.join(unknown)}")
    try:
        return args.func(args)
    except (UsageError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PartitionError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
