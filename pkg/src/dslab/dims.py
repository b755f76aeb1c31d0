"""Exact DS, Natarajan, and VC dimensions via shattering searches.

A class ell-DS shatters a coordinate set when some non-empty subfamily of the
restriction gives every member at least ell i-neighbors in every direction
(an i-neighbor agrees everywhere except coordinate i).  Valid subfamilies are
closed under union, so the unique maximal one is the fixed point of peeling
away deficient members, exactly like a k-core decomposition run per
direction.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

from .errors import BudgetError
from .hclass import HypothesisClass, check_coords, restrict

__all__ = [
    "ShatterWitness",
    "ds_shatter_core",
    "ds_dimension",
    "natarajan_dimension",
    "vc_dimension",
    "validate_witness",
    "witness_to_json",
    "witness_from_json",
]


@dataclass(frozen=True)
class ShatterWitness:
    coords: tuple[int, ...]          # 1-based coordinates of the shattered set
    subfamily: HypothesisClass       # witnessing family over those coordinates
    kind: str                        # "DS" | "Natarajan"
    ell: int


def ds_shatter_core(W: HypothesisClass, ell: int) -> HypothesisClass | None:
    """Maximal subfamily where every member has >= ell i-neighbors everywhere.

    Returns None when no such subfamily exists.  The result is independent of
    peeling order: removing any deficient member can never repair another
    member's deficit.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    alive = set(range(len(W)))
    hyps = W.hyps
    changed = True
    while changed and alive:
        changed = False
        for i in range(W.n):
            buckets: dict[tuple[int, ...], int] = {}
            for v in alive:
                h = hyps[v]
                key = h[:i] + h[i + 1:]
                buckets[key] = buckets.get(key, 0) + 1
            drop = [v for v in alive
                    if buckets[hyps[v][:i] + hyps[v][i + 1:]] < ell + 1]
            if drop:
                alive.difference_update(drop)
                changed = True
    if not alive:
        return None
    rows = tuple(hyps[v] for v in sorted(alive))
    return HypothesisClass(k=W.k, n=W.n, hyps=rows)


def _subset_budget(n: int, d_max: int, budget: int | None) -> None:
    if budget is None:
        return
    total = sum(math.comb(n, d) for d in range(1, d_max + 1))
    if total > budget:
        raise BudgetError(
            f"{total} coordinate subsets exceed budget {budget}", best_found=0)


def ds_dimension(H: HypothesisClass, ell: int,
                 budget: int | None = None) -> tuple[int, ShatterWitness | None]:
    """Largest d such that some d-coordinate set has a non-empty shatter core.

    Searches subset sizes from the top down and returns at the first success;
    d = 0 with no witness when no single coordinate is shattered.  Distinct
    coordinates suffice: on a repeated coordinate no member can have an
    i-neighbor (the off positions pin the repeated value), so any core over a
    sequence with duplicates is empty.
    """
    _subset_budget(H.n, H.n, budget)
    for d in range(H.n, 0, -1):
        for S in itertools.combinations(range(1, H.n + 1), d):
            core = ds_shatter_core(restrict(H, S), ell)
            if core is not None:
                return d, ShatterWitness(coords=S, subfamily=core, kind="DS", ell=ell)
    return 0, None


def natarajan_dimension(H: HypothesisClass, ell: int,
                        budget: int | None = None) -> tuple[int, ShatterWitness | None]:
    """Largest d admitting label lists y_1..y_d of size ell+1 with the full
    product embedded in the restriction.

    Returns 0 when ell + 1 > k (no list of ell+1 distinct labels exists).
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if ell + 1 > H.k:
        return 0, None
    _subset_budget(H.n, H.n, budget)
    for d in range(H.n, 0, -1):
        for S in itertools.combinations(range(1, H.n + 1), d):
            W = restrict(H, S)
            lists = _find_product(W, ell + 1)
            if lists is not None:
                rows = tuple(sorted(itertools.product(*lists)))
                fam = HypothesisClass(k=W.k, n=W.n, hyps=rows)
                return d, ShatterWitness(coords=S, subfamily=fam, kind="Natarajan", ell=ell)
    return 0, None


def _find_product(W: HypothesisClass, width: int) -> tuple[tuple[int, ...], ...] | None:
    """First (lex order) choice of width-sized label lists whose product is in W."""
    rows = set(W.hyps)
    prefixes: list[set[tuple[int, ...]]] = [set()] * (W.n + 1)
    prefixes[W.n] = rows
    for i in range(W.n - 1, -1, -1):
        prefixes[i] = {r[:i] for r in rows}
    per_coord = [sorted({h[i] for h in W.hyps}) for i in range(W.n)]

    def extend(depth: int, chosen: list[tuple[int, ...]], partial: list[tuple[int, ...]]):
        if depth == W.n:
            return tuple(chosen)
        for ys in itertools.combinations(per_coord[depth], width):
            nxt = [p + (y,) for p in partial for y in ys]
            if all(q in prefixes[depth + 1] for q in nxt):
                got = extend(depth + 1, chosen + [ys], nxt)
                if got is not None:
                    return got
        return None

    if any(len(c) < width for c in per_coord):
        return None
    return extend(0, [], [()])


def vc_dimension(H: HypothesisClass, budget: int | None = None) -> int:
    """Exact VC dimension by subset enumeration; binary classes only."""
    if H.k != 2:
        raise ValueError("vc_dimension requires k = 2")
    _subset_budget(H.n, H.n, budget)
    for d in range(H.n, 0, -1):
        full = 1 << d
        for S in itertools.combinations(range(1, H.n + 1), d):
            patterns = {tuple(h[c - 1] for c in S) for h in H.hyps}
            if len(patterns) == full:
                return d
    return 0


def validate_witness(H: HypothesisClass, w: ShatterWitness) -> bool:
    """Re-check a witness from first principles against ``H``."""
    try:
        check_coords(H.n, w.coords)
    except ValueError:
        return False
    proj = restrict(H, w.coords)
    if not set(w.subfamily.hyps) <= set(proj.hyps):
        return False
    if w.kind == "DS":
        core = set(w.subfamily.hyps)
        for h in core:
            for i in range(len(w.coords)):
                neighbors = sum(
                    1 for g in core
                    if g != h and g[i] != h[i] and g[:i] + g[i + 1:] == h[:i] + h[i + 1:]
                )
                if neighbors < w.ell:
                    return False
        return True
    if w.kind == "Natarajan":
        d = len(w.coords)
        lists = [sorted({h[i] for h in w.subfamily.hyps}) for i in range(d)]
        if any(len(ys) != w.ell + 1 for ys in lists):
            return False
        product = set(itertools.product(*lists))
        return product == set(w.subfamily.hyps)
    return False


def witness_to_json(w: ShatterWitness) -> str:
    payload = {
        "kind": w.kind,
        "ell": w.ell,
        "coords": list(w.coords),
        "subfamily": {"k": w.subfamily.k, "n": w.subfamily.n,
                      "hyps": [list(h) for h in w.subfamily.hyps]},
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def witness_from_json(text: str) -> ShatterWitness:
    obj = json.loads(text)
    sub = obj["subfamily"]
    fam = HypothesisClass(k=int(sub["k"]), n=int(sub["n"]),
                          hyps=tuple(sorted(tuple(int(v) for v in h) for h in sub["hyps"])))
    return ShatterWitness(coords=tuple(int(c) for c in obj["coords"]),
                          subfamily=fam, kind=str(obj["kind"]), ell=int(obj["ell"]))
