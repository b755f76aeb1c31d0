"""Independent brute-force oracles used to pin expected values.

Everything here recomputes quantities from first principles, avoiding the
library's hashing/bitmask/flow shortcuts, so the two paths can check each
other.
"""

from fractions import Fraction
from itertools import combinations, product

from dslab.hclass import HypothesisClass


def naive_edges(W: HypothesisClass) -> list[tuple[int, tuple[int, ...]]]:
    """Edges by all-pairs scanning: (direction, sorted member indices)."""
    edges = []
    for i in range(W.n):
        seen = set()
        for v in range(len(W)):
            if v in seen:
                continue
            members = tuple(
                u for u in range(len(W))
                if all(W.hyps[u][j] == W.hyps[v][j] for j in range(W.n) if j != i)
            )
            edges.append((i, members))
            seen.update(members)
    return edges


def naive_density(W: HypothesisClass, ell: int) -> Fraction:
    num = sum(max(len(m) - ell, 0) for _i, m in naive_edges(W))
    return Fraction(num, len(W))


def subclasses(W: HypothesisClass):
    """All non-empty subfamilies, as classes."""
    for size in range(1, len(W) + 1):
        for rows in combinations(W.hyps, size):
            yield HypothesisClass(k=W.k, n=W.n, hyps=rows)


def brute_max_density(W: HypothesisClass, ell: int) -> Fraction:
    return max(naive_density(F, ell) for F in subclasses(W))


def brute_mu(H: HypothesisClass, n_samples: int, ell: int) -> Fraction:
    from dslab.hclass import restrict

    best = Fraction(0)
    for size in range(1, min(n_samples, H.n) + 1):
        for T in combinations(range(1, H.n + 1), size):
            best = max(best, brute_max_density(restrict(H, T), ell))
    return best


def brute_min_max_outdegree(G, ell: int) -> int:
    """Exhaustive search over all orientations with full-size assignments."""
    edges = list(G.edges())
    options = []
    for e in edges:
        w = min(ell, len(e))
        options.append([frozenset(c) for c in combinations(e.members, w)])
    best = None
    for choice in product(*options):
        out = [0] * G.n_vertices
        for e, chosen in zip(edges, choice):
            for v in e.members:
                if v not in chosen:
                    out[v] += 1
        worst = max(out)
        if best is None or worst < best:
            best = worst
    return best


def brute_has_valid_subfamily(W: HypothesisClass, ell: int) -> bool:
    """Does any subfamily give every member >= ell i-neighbors everywhere?"""
    for F in subclasses(W):
        rows = set(F.hyps)
        ok = True
        for h in rows:
            for i in range(F.n):
                nbrs = sum(1 for g in rows
                           if g != h and g[i] != h[i]
                           and g[:i] + g[i + 1:] == h[:i] + h[i + 1:])
                if nbrs < ell:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def fraction_rank(rows) -> int:
    """Plain Gaussian elimination over exact rationals."""
    mat = [[Fraction(v) for v in row] for row in rows]
    if not mat or not mat[0]:
        return 0
    n_rows, n_cols = len(mat), len(mat[0])
    rank = 0
    for col in range(n_cols):
        piv = next((r for r in range(rank, n_rows) if mat[r][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        for r in range(rank + 1, n_rows):
            if mat[r][col]:
                f = mat[r][col] / mat[rank][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def random_class(rng, k_max=4, n_max=4, size_max=12) -> HypothesisClass:
    from dslab.hclass import gen_random

    k = int(rng.integers(2, k_max + 1))
    n = int(rng.integers(1, n_max + 1))
    size = int(rng.integers(1, min(size_max, k**n) + 1))
    return gen_random(k, n, size, seed=int(rng.integers(0, 2**31)))
