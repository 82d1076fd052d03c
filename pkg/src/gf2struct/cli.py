"""Command-line front end: ``gf2struct {analyze,freiman,bsg,verify,recheck,sweep}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import GF2StructError
from .exact import format_rational, parse_rational
from .fourier import NINE_TENTHS, SpectrumThreshold, spectrum_mask, walsh_transform
from .generators import FAMILIES, PRNG_ALGORITHM, GeneratorSpec, generate
from .gf2 import DenseSet
from .pipelines import bsg_pipeline, freiman_pipeline, single_set_bsg, single_set_freiman
from .report import build_report, dumps, recheck_text
from .stats import BRUTE_ENERGY_LIMIT, doubling, energy, pair_energy
from .verify import SUITES, run_suite

ANALYZE_ALPHAS = (("9/10", NINE_TENTHS), ("1/2", SpectrumThreshold.of("1/2")), ("1/4", SpectrumThreshold.of("1/4")))


def _add_set_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("set sources")
    g.add_argument("--input", action="append", default=[], metavar="PATH",
                   help='set literal file {"dim": n, "elements": [...]}; repeatable')
    g.add_argument("--family", choices=FAMILIES)
    g.add_argument("--dim", type=int)
    g.add_argument("--seed", type=int, nargs="+", default=[0], help="one generated set per seed")
    g.add_argument("--rank", type=int)
    g.add_argument("--cosets", type=int)
    g.add_argument("--noise", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--density", type=float)


def _load_sets(args) -> tuple[list[DenseSet], list[GeneratorSpec] | None]:
    if args.input:
        sets = [DenseSet.from_json(json.loads(Path(p).read_text())) for p in args.input]
        return sets, None
    if args.family is None or args.dim is None:
        raise SystemExit("error: give --input files or --family with --dim")
    specs = [
        GeneratorSpec(args.family, args.dim, s, rank=args.rank, cosets=args.cosets,
                      noise=args.noise, m=args.m, density=args.density).resolved()
        for s in args.seed
    ]
    return [generate(s) for s in specs], specs


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + ("" if text.endswith("\n") else "\n"))
    else:
        print(text)


def analyze_set(a: DenseSet) -> dict:
    dbl = doubling(a, a)
    e = energy(a, a, a, a)
    table = walsh_transform(a)
    brute = pair_energy(a) if a.cardinality**2 <= BRUTE_ENERGY_LIMIT else None
    return {
        "dim": a.dim,
        "size": a.cardinality,
        "sumset_size": dbl.sumset_size,
        "dbl_squared": format_rational(dbl.squared),
        "dbl": float(dbl),
        "quadruple_count": e.quadruple_count,
        "brute_quadruple_count": brute,
        "omega": e.omega,
        "omega_fourth": format_rational(e.omega_fourth()),
        **{f"spec_size_{name}": int(spectrum_mask(table, alpha).sum()) for name, alpha in ANALYZE_ALPHAS},
    }


def _csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def cmd_analyze(args) -> int:
    sets, _ = _load_sets(args)
    rows = [analyze_set(a) for a in sets]
    if args.walsh_csv:
        Path(args.walsh_csv).write_text(walsh_transform(sets[0]).to_csv())
    if args.format == "csv":
        _emit(_csv(rows), args.out)
    else:
        _emit("\n".join(json.dumps(r) for r in rows), args.out)
    return 0


def run_freiman(sets: Sequence[DenseSet], fixed_k: bool):
    if len(sets) == 1:
        return single_set_freiman(sets[0], fixed_k)
    if len(sets) == 2:
        return freiman_pipeline(sets[0], sets[1], fixed_k)
    raise SystemExit("error: freiman takes one or two sets")


def run_bsg(sets: Sequence[DenseSet], k: Fraction | None, fixed_k: bool):
    if len(sets) not in (1, 4):
        raise SystemExit("error: bsg takes one or four sets")
    quad = list(sets) * (4 // len(sets))
    if k is None:
        k = energy(*quad).inverse_ceiling()
    if len(sets) == 1:
        return single_set_bsg(sets[0], k, fixed_k)
    return bsg_pipeline(quad, k, fixed_k)


def cmd_freiman(args) -> int:
    sets, specs = _load_sets(args)
    result = run_freiman(sets, args.fixed_k)
    _emit(dumps(build_report("freiman", sets, result, specs)), args.out)
    return 0 if result.passed else 1


def cmd_bsg(args) -> int:
    sets, specs = _load_sets(args)
    k = parse_rational(args.k) if args.k else None
    result = run_bsg(sets, k, args.fixed_k)
    _emit(dumps(build_report("bsg", sets, result, specs)), args.out)
    return 0 if result.passed else 1


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    results = [run_suite(name, args.budget, args.seed) for name in names]
    _emit(json.dumps({"passed": all(r.passed for r in results), "suites": [r.to_json() for r in results]}), args.out)
    return 0 if all(r.passed for r in results) else 1


def cmd_recheck(args) -> int:
    text = sys.stdin.read() if args.path == "-" else Path(args.path).read_text()
    entries = recheck_text(text)
    checked = [e for e in entries if "failures" in e]
    ok = bool(checked) and all(not e["failures"] for e in checked)
    summary = {"passed": ok, "reports": len(checked), "skipped": len(entries) - len(checked), "entries": entries}
    _emit(json.dumps(summary), args.out)
    return 0 if ok else 1


def run_trial(trial: dict) -> dict:
    """One sweep trial; module-level so process pools can pickle it."""
    spec = GeneratorSpec(**trial["generator"])
    a = generate(spec)
    base = {"trial": trial["index"], "pipeline": trial["pipeline"], "generator": spec.to_json()}
    try:
        if trial["pipeline"] == "freiman":
            result = single_set_freiman(a, trial["fixed_k"])
        else:
            e = energy(a, a, a, a)
            min_omega = trial.get("min_omega")
            if min_omega is not None and e.omega_fourth() < Fraction(min_omega) ** 4:
                return {**base, "status": "skipped", "omega": e.omega}
            result = single_set_bsg(a, e.inverse_ceiling(), trial["fixed_k"])
    except GF2StructError as exc:
        return {**base, "status": "error", "error": f"{type(exc).__name__}: {exc}"}
    report = build_report(trial["pipeline"], [a], result, [spec])
    return {**base, "status": "ok" if result.passed else "failed", **report}


def sweep_trials(pipeline: str, families: Sequence[str], dims: Sequence[int], seeds: Sequence[int],
                 fixed_k: bool = False, min_omega: str | None = None) -> list[dict]:
    trials = []
    for family in families:
        for n in dims:
            for s in seeds:
                trials.append({
                    "index": len(trials),
                    "pipeline": pipeline,
                    "generator": GeneratorSpec(family, n, s).resolved().to_json(),
                    "fixed_k": fixed_k,
                    "min_omega": min_omega,
                })
    return trials


def run_sweep(trials: Sequence[dict], jobs: int = 1) -> list[dict]:
    if jobs <= 1:
        return [run_trial(t) for t in trials]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_trial, trials, chunksize=4))  # map keeps trial order


def _summary_row(line: dict) -> dict:
    res = line.get("result", {})
    trace = res.get("trace", {})
    gen = line["generator"]
    return {
        "trial": line["trial"],
        "pipeline": line["pipeline"],
        "family": gen["family"],
        "dim": gen["dim"],
        "seed": gen["seed"],
        "status": line["status"],
        "iterations": trace.get("iterations", ""),
        "H_size": res.get("H_size", ""),
        "intersection": (res.get("intersections") or [""])[0],
        "K_fourth": res.get("K", {}).get("K_fourth", ""),
        "h_over_size": (res.get("h_over_sizes") or [""])[0],
    }


def cmd_sweep(args) -> int:
    seeds = range(args.seed_start, args.seed_start + args.seeds)
    trials = sweep_trials(args.pipeline, args.families, args.dims, seeds, args.fixed_k, args.min_omega)
    lines = run_sweep(trials, args.jobs)
    if args.format == "csv":
        _emit(_csv([_summary_row(line) for line in lines]), args.out)
    else:
        header = {"trace_version": 1, "prng": PRNG_ALGORITHM, "trials": len(lines)}
        _emit("\n".join([json.dumps(header)] + [dumps(line) for line in lines]), args.out)
    return 0 if all(line["status"] in ("ok", "skipped") for line in lines) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gf2struct", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="sizes, doubling, energy and spectrum sizes of sets")
    _add_set_args(p)
    p.add_argument("--walsh-csv", metavar="PATH", help="dump the Walsh table of the first set")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("freiman", help="subspace extraction from small doubling (one or two sets)")
    _add_set_args(p)
    p.add_argument("--fixed-k", action="store_true", help="keep the initial K for every step")
    p.add_argument("--out")
    p.set_defaults(func=cmd_freiman)

    p = sub.add_parser("bsg", help="subspace extraction from large energy (one or four sets)")
    _add_set_args(p)
    p.add_argument("--k", help="exact rational K with omega >= 1/K, e.g. 3/2 (default: 1/omega rounded up to 0.01)")
    p.add_argument("--fixed-k", action="store_true", help="keep the given K for every step")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bsg)

    p = sub.add_parser("verify", help="run oracle and property suites")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("--budget", type=int, help="number of randomised trials")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("recheck", help="re-validate certificates in a JSON or JSON-lines report")
    p.add_argument("path", help="report file, or - for stdin")
    p.add_argument("--out")
    p.set_defaults(func=cmd_recheck)

    p = sub.add_parser("sweep", help="batch runs over generator families, dimensions and seeds")
    p.add_argument("--pipeline", choices=("freiman", "bsg"), default="freiman")
    p.add_argument("--families", nargs="+", choices=FAMILIES, default=list(FAMILIES))
    p.add_argument("--dims", type=int, nargs="+", default=[8, 10, 12])
    p.add_argument("--seeds", type=int, default=10, help="number of seeds per (family, dim)")
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--min-omega", help="bsg only: skip sets with omega below this rational")
    p.add_argument("--fixed-k", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GF2StructError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
