"""One-inclusion hypergraphs, exact densities, and list orientations.

The one-inclusion graph of a class W over n coordinates has W as its vertex
set and, for every direction i, one edge per distinct off-i behavior grouping
all vertices that agree everywhere except coordinate i.  Every vertex is
adjacent to exactly n edges (singleton edges included).

Densities are exact rationals throughout: dens_ell(W) = (1/|W|) * sum over
edges of max(|e| - ell, 0).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .errors import BudgetError
from .hclass import HypothesisClass, restrict

__all__ = [
    "EdgeGroup",
    "OneInclusionGraph",
    "Orientation",
    "build_oig",
    "density",
    "max_density_subfamily",
    "mu",
    "mu_with_witness",
    "mu_prime",
    "min_max_orientation",
    "outdegrees",
    "orientation_to_json",
    "format_ratio",
    "parse_ratio",
    "DEFAULT_SUBSET_CAP",
]

DEFAULT_SUBSET_CAP = 22  # exact subfamily search enumerates 2^|W| bitmasks


@dataclass(frozen=True)
class EdgeGroup:
    """One hyperedge: all vertices sharing ``key`` off ``direction``.

    ``direction`` is 0-based internally; ``members`` are ascending vertex
    indices into the canonical row order of the base class; ``mask`` is the
    same membership as a bitmask.
    """

    direction: int
    key: tuple[int, ...]
    members: tuple[int, ...]

    @property
    def mask(self) -> int:
        m = 0
        for v in self.members:
            m |= 1 << v
        return m

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class OneInclusionGraph:
    base: HypothesisClass
    by_direction: tuple[tuple[EdgeGroup, ...], ...]

    @property
    def n_directions(self) -> int:
        return len(self.by_direction)

    @property
    def n_vertices(self) -> int:
        return len(self.base)

    def edges(self) -> Iterator[EdgeGroup]:
        for groups in self.by_direction:
            yield from groups

    @property
    def n_edges(self) -> int:
        return sum(len(g) for g in self.by_direction)


@dataclass(frozen=True)
class Orientation:
    """Per-edge assignment of at most ``ell`` member vertices.

    Assignments are stored in the same (direction, key) order as the graph's
    edges; after normalization every edge is assigned min(ell, |e|) members.
    """

    ell: int
    assign: tuple[tuple[int, tuple[int, ...], tuple[int, ...]], ...]  # (dir, key, vertices)


def build_oig(W: HypothesisClass, dead_dirs: Sequence[int] = ()) -> OneInclusionGraph:
    """Group the vertices of ``W`` into edges, one partition per direction.

    ``dead_dirs`` (0-based) forces those directions into singleton edges.
    This models directions that correspond to repeated sample coordinates:
    two hypotheses that agree off such a position also agree on it, so no
    non-trivial edge can exist there.
    """
    dead = frozenset(dead_dirs)
    dirs = []
    for i in range(W.n):
        if i in dead:
            groups = tuple(
                EdgeGroup(i, h[:i] + h[i + 1:], (v,)) for v, h in enumerate(W.hyps)
            )
        else:
            buckets: dict[tuple[int, ...], list[int]] = {}
            for v, h in enumerate(W.hyps):
                buckets.setdefault(h[:i] + h[i + 1:], []).append(v)
            groups = tuple(
                EdgeGroup(i, key, tuple(vs)) for key, vs in sorted(buckets.items())
            )
        assert sum(len(g) for g in groups) == len(W)  # partition per direction
        dirs.append(groups)
    return OneInclusionGraph(base=W, by_direction=tuple(dirs))


def density(W: HypothesisClass, ell: int, graph: OneInclusionGraph | None = None) -> Fraction:
    """Exact ell-density of ``W``: average per-vertex edge oversize."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    G = graph if graph is not None else build_oig(W)
    num = sum(max(len(g) - ell, 0) for g in G.edges())
    val = Fraction(num, len(W))
    assert 0 <= val <= W.n
    return val


# -- exact subfamily search --------------------------------------------------
#
# The edges of a subfamily F <= W are exactly W's edges intersected with F,
# so every subfamily's density can be scored from W's edge masks alone.  The
# search enumerates all bitmasks with numpy and a 16-bit popcount table.

_POP16 = None


def _pop16():
    global _POP16
    if _POP16 is None:
        _POP16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.int8)
    return _POP16


def _best_subfamily_mask(group_masks: list[int], n_rows: int, ell: int, gross: bool) -> tuple[int, int, int]:
    """Maximize the density objective over all non-empty vertex bitmasks.

    ``gross=False`` scores sum over edges of (|e & F| - ell)_+ (the usual
    excess); ``gross=True`` scores sum of |e & F| over edges with
    |e & F| > 1.  Ties break toward smaller subfamilies, then the
    lexicographically smallest member index tuple.  Returns
    (numerator, size, mask).
    """
    pop = _pop16()
    arr = np.arange(1, 1 << n_rows, dtype=np.uint32)
    sizes = (pop[arr & 0xFFFF] + pop[arr >> 16]).astype(np.int16)
    num = np.zeros(arr.shape[0], dtype=np.int32)
    for g in group_masks:
        x = arr & np.uint32(g)
        cnt = (pop[x & 0xFFFF] + pop[x >> 16]).astype(np.int32)
        if gross:
            num += np.where(cnt >= 2, cnt, 0)
        else:
            np.maximum(cnt - ell, 0, out=cnt)
            num += cnt
    lcm = math.lcm(*range(1, n_rows + 1))
    per_size = np.zeros(n_rows + 1, dtype=np.int64)
    for s in range(1, n_rows + 1):
        per_size[s] = lcm // s
    score = num.astype(np.int64) * per_size[sizes]
    # same score -> prefer fewer members; encoded so one argmax suffices
    combined = score * (n_rows + 1) + (n_rows - sizes)
    best = int(combined.max())
    ties = np.flatnonzero(combined == best)
    if ties.shape[0] == 1:
        idx = int(ties[0])
    else:
        idx = min((int(m) for m in arr[ties]),
                  key=lambda m: tuple(v for v in range(n_rows) if m >> v & 1))
        idx -= 1  # arr[j] == j + 1
    return int(num[idx]), int(sizes[idx]), int(arr[idx])


def _mask_to_class(W: HypothesisClass, mask: int) -> HypothesisClass:
    rows = [W.hyps[v] for v in range(len(W)) if mask >> v & 1]
    return HypothesisClass(k=W.k, n=W.n, hyps=tuple(rows))


def max_density_subfamily(W: HypothesisClass, ell: int, mode: str = "exact",
                          cap: int = DEFAULT_SUBSET_CAP) -> tuple[Fraction, HypothesisClass]:
    """Best ell-density over all non-empty subfamilies of ``W``.

    Exact mode enumerates every subfamily (requires |W| <= cap) and returns
    the true maximizer; heuristic mode hill-climbs by single add/remove moves
    and returns a certified lower bound with its witness.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    G = build_oig(W)
    live = [g.mask for g in G.edges() if len(g) > ell]
    if mode == "exact":
        if len(W) > cap:
            raise BudgetError(f"|W|={len(W)} exceeds exact subfamily cap {cap}")
        if len(W) > 26:  # uint32 bitmask enumeration; memory explodes anyway
            raise BudgetError(f"exact subfamily search unsupported beyond 26 rows, got {len(W)}")
        if not live:
            return Fraction(0), _mask_to_class(W, 1)
        num, size, mask = _best_subfamily_mask(live, len(W), ell, gross=False)
        return Fraction(num, size), _mask_to_class(W, mask)
    if mode == "heuristic":
        return _hill_climb(W, live, ell)
    raise ValueError(f"unknown mode {mode!r}")


def _hill_climb(W: HypothesisClass, live: list[int], ell: int) -> tuple[Fraction, HypothesisClass]:
    n_rows = len(W)

    def dens_of(mask: int) -> Fraction:
        size = mask.bit_count()
        if size == 0:
            return Fraction(-1)
        num = sum(max((mask & g).bit_count() - ell, 0) for g in live)
        return Fraction(num, size)

    cur = (1 << n_rows) - 1
    cur_val = dens_of(cur)
    improved = True
    while improved:
        improved = False
        for v in range(n_rows):
            cand = cur ^ (1 << v)
            val = dens_of(cand)
            if val > cur_val:
                cur, cur_val = cand, val
                improved = True
    return cur_val, _mask_to_class(W, cur)


def mu_with_witness(H: HypothesisClass, n_samples: int, ell: int,
                    cap: int = DEFAULT_SUBSET_CAP) -> tuple[Fraction, tuple[int, ...], HypothesisClass]:
    """Maximum ell-density over restrictions: value, coordinates, subfamily.

    Restrictions range over all non-empty coordinate subsets of size up to
    min(n_samples, n).  A sequence with repeated coordinates never beats a
    plain subset: a repeated direction only carries singleton edges (its off
    positions already pin the repeated value), and extra context coordinates
    only refine edge groups.  Witness ties break toward smaller, then
    lexicographically earlier, coordinate sets.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    best = (Fraction(-1), (), None)
    for size in range(1, min(n_samples, H.n) + 1):
        for T in itertools.combinations(range(1, H.n + 1), size):
            W = restrict(H, T)
            val, F = max_density_subfamily(W, ell, cap=cap)
            if val > best[0]:
                best = (val, T, F)
    return best


def mu(H: HypothesisClass, n_samples: int, ell: int, cap: int = DEFAULT_SUBSET_CAP) -> Fraction:
    """Maximum ell-density function of ``H`` for sample size ``n_samples``."""
    return mu_with_witness(H, n_samples, ell, cap=cap)[0]


def mu_prime(H: HypothesisClass, n_samples: int, cap: int = DEFAULT_SUBSET_CAP) -> Fraction:
    """Variant density maximum summing full sizes of edges with |e| > 1.

    Agrees with ``mu(..., ell=1)`` up to a factor of two:
    mu' / 2 <= mu <= mu'.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    best = Fraction(0)
    for size in range(1, min(n_samples, H.n) + 1):
        for T in itertools.combinations(range(1, H.n + 1), size):
            W = restrict(H, T)
            if len(W) > cap:
                raise BudgetError(f"|W|={len(W)} exceeds exact subfamily cap {cap}")
            G = build_oig(W)
            live = [g.mask for g in G.edges() if len(g) >= 2]
            if not live:
                continue
            num, sz, _ = _best_subfamily_mask(live, len(W), ell=1, gross=True)
            best = max(best, Fraction(num, sz))
    return best


# -- min-max ell-outdegree orientation ---------------------------------------


def min_max_orientation(G: OneInclusionGraph, ell: int) -> tuple[Orientation, int]:
    """Orientation minimizing the maximum ell-outdegree, with optimal value.

    Feasibility of a target t is decided by an exact integral max-flow:
    source -> edge with capacity min(ell, |e|), edge -> member with capacity
    1, vertex -> sink with capacity (deg - t)_+.  All sink arcs saturate iff
    every vertex can be covered by all but t of its edges.  The returned
    t_star is certified minimal by infeasibility at t_star - 1.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    edges = list(G.edges())
    n_dirs = G.n_directions
    if all(len(e) <= ell for e in edges):
        assign = tuple((e.direction, e.key, e.members) for e in edges)
        return Orientation(ell=ell, assign=assign), 0

    lo, hi = 0, n_dirs
    feasible_assign = None
    while lo < hi:
        mid = (lo + hi) // 2
        got = _flow_assignment(G, edges, ell, mid)
        if got is not None:
            hi = mid
            feasible_assign = got
        else:
            lo = mid + 1
    t_star = lo
    if feasible_assign is None or hi != t_star:
        feasible_assign = _flow_assignment(G, edges, ell, t_star)
    assert feasible_assign is not None
    if t_star > 0:
        assert _flow_assignment(G, edges, ell, t_star - 1) is None  # minimality certificate

    assign = []
    for e, picked in zip(edges, feasible_assign):
        want = min(ell, len(e))
        chosen = sorted(picked)
        for v in e.members:  # pad deterministically up to the size bound
            if len(chosen) >= want:
                break
            if v not in picked:
                chosen.append(v)
        assign.append((e.direction, e.key, tuple(sorted(chosen))))
    return Orientation(ell=ell, assign=tuple(assign)), t_star


def _flow_assignment(G: OneInclusionGraph, edges: list[EdgeGroup], ell: int, t: int):
    """Per-edge covered-vertex sets if max outdegree t is achievable, else None."""
    V = G.n_vertices
    need = G.n_directions - t
    if need <= 0:
        return [set() for _ in edges]
    E = len(edges)
    source, sink = 0, 1 + E + V
    rows, cols, caps = [], [], []
    for j, e in enumerate(edges):
        rows.append(source)
        cols.append(1 + j)
        caps.append(min(ell, len(e)))
        for v in e.members:
            rows.append(1 + j)
            cols.append(1 + E + v)
            caps.append(1)
    for v in range(V):
        rows.append(1 + E + v)
        cols.append(sink)
        caps.append(need)
    graph = csr_matrix((np.array(caps, dtype=np.int32), (rows, cols)),
                       shape=(sink + 1, sink + 1))
    res = maximum_flow(graph, source, sink)
    if res.flow_value != need * V:
        return None
    flow = res.flow.tocsr()
    picked = []
    for j, e in enumerate(edges):
        row = flow.getrow(1 + j)
        sel = {int(c) - 1 - E for c, f in zip(row.indices, row.data) if f > 0}
        picked.append(sel)
    return picked


def outdegrees(G: OneInclusionGraph, sigma: Orientation) -> list[int]:
    """Per-vertex count of adjacent edges oriented away from the vertex."""
    edges = list(G.edges())
    if len(edges) != len(sigma.assign):
        raise ValueError("mismatched orientation: edge count differs")
    out = [0] * G.n_vertices
    for e, (d, key, chosen) in zip(edges, sigma.assign):
        if (d, key) != (e.direction, e.key):
            raise ValueError("mismatched orientation: edge identity differs")
        if not set(chosen) <= set(e.members):
            raise ValueError("orientation assigns non-member vertex")
        if len(chosen) > max(sigma.ell, 0):
            raise ValueError("orientation exceeds list size")
        for v in e.members:
            if v not in chosen:
                out[v] += 1
    return out


def orientation_to_json(sigma: Orientation) -> str:
    """Serialize with 1-based directions and 1-based vertex indices."""
    payload = {
        "ell": sigma.ell,
        "edges": [
            {"dir": d + 1, "key": list(key), "assign": [v + 1 for v in chosen]}
            for d, key, chosen in sigma.assign
        ],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def format_ratio(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_ratio(s: str) -> Fraction:
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den) if den else 1)
