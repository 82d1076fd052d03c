"""Versioned JSON reports and their independent re-verification."""

from __future__ import annotations

import json
from math import prod
from typing import Iterable, Sequence

from .exact import KParam, parse_rational
from .extraction import hlower_holds, intersection_size
from .generators import PRNG_ALGORITHM, GeneratorSpec
from .gf2 import DenseSet, Subspace
from .pipelines import TheoremResult
from .stats import doubling, energy

TRACE_VERSION = 1


def build_report(
    command: str,
    sets: Sequence[DenseSet],
    result: TheoremResult,
    generators: Sequence[GeneratorSpec] | None = None,
) -> dict:
    return {
        "trace_version": TRACE_VERSION,
        "prng": PRNG_ALGORITHM,
        "command": command,
        "inputs": {
            "sets": [s.to_json() for s in sets],
            "generators": [g.to_json() for g in generators] if generators else None,
        },
        "result": result.to_json(),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, separators=(",", ":"))


def _k_from(obj: dict) -> KParam:
    return KParam(parse_rational(obj["K_fourth"]))


def recheck(report: dict) -> list[str]:
    """Re-validate every integer inequality of a report from its serialised data.

    Returns a list of failure descriptions; empty means the report checks out.
    """
    failures: list[str] = []
    if report.get("trace_version") != TRACE_VERSION:
        return [f"unsupported trace_version {report.get('trace_version')!r}"]
    res = report["result"]
    sets = [DenseSet.from_json(s) for s in report["inputs"]["sets"]]
    dim = sets[0].dim
    basis = tuple(int(b) for b in res["H_basis"])
    h = Subspace(dim, basis)
    if h.basis != basis:
        failures.append("H_basis is not in reduced row echelon form")
    if h.cardinality != res["H_size"]:
        failures.append("H_size disagrees with H_basis")
    k = _k_from(res["K"])
    k_final = _k_from(res["K_final"])
    if k_final.fourth > k.fourth:
        failures.append("final K exceeds the stated K")
    kind = res["kind"]
    translates = [int(x) for x in res["translates"]]

    if kind in ("freiman", "single_freiman"):
        a = sets[0]
        b = sets[1] if len(sets) > 1 else sets[0]
        if doubling(a, b).squared ** 2 != k.fourth:
            failures.append("K does not equal Dbl(A, B)")
        targets = [a, b] if kind == "freiman" else [a]
    elif kind in ("bsg", "single_bsg"):
        quad = sets if len(sets) == 4 else [sets[0]] * 4
        if not energy(*quad).at_least_inverse(k):
            failures.append("input energy is below 1/K")
        targets = quad if kind == "bsg" else [sets[0]]
    else:
        return failures + [f"unknown result kind {kind!r}"]

    if len(targets) != len(translates):
        return failures + ["translate count does not match the sets"]
    inter = [intersection_size(s, h, x) for s, x in zip(targets, translates)]
    if inter != [int(c) for c in res["intersections"]]:
        failures.append(f"intersections recomputed as {inter}, report says {res['intersections']}")
    h4 = h.cardinality**4
    # prod I^(4/m) (2K)^4 >= |H|^4 for m translates
    power = 4 // len(inter)
    if not prod(c**power for c in inter) * 16 * k.fourth >= h4:
        failures.append("theorem inequality fails")

    ext = res["extraction"]
    if not hlower_holds(h.cardinality, [int(s) for s in ext["sizes"]]):
        failures.append("extraction |H| lower bound fails")
    if not 16 * _k_from(ext).fourth * prod(int(c) for c in ext["intersections"]) >= h4:
        failures.append("extraction intersection bound fails")
    if [int(s) for s in res["sizes"]] != [s.cardinality for s in targets]:
        failures.append("set sizes disagree with the serialised sets")
    return failures


def recheck_text(text: str) -> list[dict]:
    """Recheck a single JSON report or a JSON-lines stream; one entry per report."""
    try:
        objs: Iterable[dict] = [json.loads(text)]
    except json.JSONDecodeError:
        objs = [json.loads(line) for line in text.splitlines() if line.strip()]
    out = []
    for i, obj in enumerate(objs):
        if "result" not in obj:
            out.append({"index": i, "skipped": obj.get("status", "no result")})
            continue
        out.append({"index": i, "failures": recheck(obj)})
    return out

