"""Monomial spanning sets, exact integer ranks, and the density/DS auditor.

Every class W over n coordinates carries a vector space of real functions on
its rows.  The monomials w -> w_1^a_1 * ... * w_n^a_n with per-coordinate
degree below the number of realized labels, and with at most s coordinates of
degree >= ell, span that space whenever s is at least the ell-DS dimension of
W.  Ranks are computed exactly: first modulo a random 62-bit prime, with a
fraction-free integer elimination as the confirmation path whenever the
modular answer is not already provably tight.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .dims import ds_dimension, natarajan_dimension
from .errors import BudgetError
from .hclass import HypothesisClass, dumps_class, restrict
from .oig import (build_oig, format_ratio, max_density_subfamily,
                  min_max_orientation, mu_with_witness, DEFAULT_SUBSET_CAP)

__all__ = [
    "Monomial",
    "EvalMatrix",
    "AuditReport",
    "monomial_set",
    "eval_matrix",
    "rank_exact",
    "rank_mod_p",
    "rank_bareiss",
    "random_prime",
    "is_probable_prime",
    "check_spanning",
    "direction_subspace_dim",
    "extract_basis",
    "in_direction_subspace",
    "audit_theorem",
    "DEFAULT_MATRIX_BUDGET",
]

DEFAULT_MATRIX_BUDGET = 2_000_000  # max matrix cells materialized per operation
_PRIME_SEED = 0x5D5_1AB  # default stream for the modular-rank prime


@dataclass(frozen=True)
class Monomial:
    """Exponent vector; ``heavy`` counts coordinates with exponent >= ell."""

    alpha: tuple[int, ...]
    heavy: int

    def evaluate(self, row: tuple[int, ...]) -> int:
        val = 1
        for base, exp in zip(row, self.alpha):
            if exp:
                val *= base**exp
        return val


@dataclass(frozen=True)
class EvalMatrix:
    monomials: tuple[Monomial, ...]
    base: HypothesisClass
    entries: tuple[tuple[int, ...], ...]  # rows = monomials, cols = hypotheses

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.base)


def monomial_set(W: HypothesisClass, ell: int, s: int,
                 budget: int = DEFAULT_MATRIX_BUDGET) -> list[Monomial]:
    """All exponent vectors with a_i < k_i and at most s heavy coordinates.

    k_i is the number of distinct labels realized at coordinate i; shrinking
    the degree bound per coordinate loses nothing because degree-(k_i - 1)
    polynomials already interpolate any function on k_i points.  Enumeration
    order is lexicographic in the exponent vector.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if not 0 <= s <= W.n:
        raise ValueError(f"need 0 <= s <= n, got s={s}")
    k_per = [len(W.labels_at(i + 1)) for i in range(W.n)]
    count = 0
    out: list[Monomial] = []

    def rec(i: int, heavy: int, alpha: list[int]):
        nonlocal count
        if i == W.n:
            count += 1
            if count > budget:
                raise BudgetError(f"monomial enumeration exceeds budget {budget}")
            out.append(Monomial(alpha=tuple(alpha), heavy=heavy))
            return
        for a in range(k_per[i]):
            h = heavy + (1 if a >= ell else 0)
            if h > s:
                break  # exponents scan upward; heavier only gets worse
            alpha.append(a)
            rec(i + 1, h, alpha)
            alpha.pop()

    rec(0, 0, [])
    return out


def eval_matrix(W: HypothesisClass, monomials: list[Monomial],
                budget: int = DEFAULT_MATRIX_BUDGET) -> EvalMatrix:
    """Exact integer evaluations; rows follow monomial order, columns the
    canonical row order of ``W``."""
    cells = len(monomials) * len(W)
    if cells > budget:
        raise BudgetError(f"evaluation matrix of {cells} cells exceeds budget {budget}")
    rows = tuple(tuple(m.evaluate(h) for h in W.hyps) for m in monomials)
    for r in rows:
        assert all(v >= 1 for v in r)  # labels are positive
    return EvalMatrix(monomials=tuple(monomials), base=W, entries=rows)


# -- exact rank --------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)  # deterministic below 2^64


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int = 62, seed: int = _PRIME_SEED) -> int:
    rng = random.Random(seed)
    while True:
        cand = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(cand):
            return cand


def rank_mod_p(rows, p: int) -> int:
    """Gaussian elimination over GF(p)."""
    mat = [[v % p for v in row] for row in rows]
    n_rows = len(mat)
    n_cols = len(mat[0]) if n_rows else 0
    rank = 0
    for col in range(n_cols):
        piv = next((r for r in range(rank, n_rows) if mat[r][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], p - 2, p)
        prow = mat[rank]
        for r in range(rank + 1, n_rows):
            f = mat[r][col]
            if f:
                f = f * inv % p
                row = mat[r]
                for c in range(col, n_cols):
                    row[c] = (row[c] - f * prow[c]) % p
        rank += 1
        if rank == n_rows:
            break
    return rank


def rank_bareiss(rows) -> int:
    """Fraction-free integer elimination; every division below is exact."""
    mat = [list(map(int, row)) for row in rows]
    n_rows = len(mat)
    n_cols = len(mat[0]) if n_rows else 0
    rank = 0
    prev = 1
    for col in range(n_cols):
        piv = next((r for r in range(rank, n_rows) if mat[r][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        pv = mat[rank][col]
        for r in range(rank + 1, n_rows):
            row = mat[r]
            f = row[col]
            for c in range(col, n_cols):
                row[c] = (pv * row[c] - f * mat[rank][c]) // prev
        prev = pv
        rank += 1
        if rank == n_rows:
            break
    return rank


def rank_exact(M: EvalMatrix | list, prime: int | None = None) -> int:
    """True rank over the rationals.

    The modular rank can only undershoot (bad primes kill minors), so a
    modular result equal to min(rows, cols) is already certified.  Any
    deficit triggers the fraction-free integer elimination, whose answer is
    exact and is returned.
    """
    rows = M.entries if isinstance(M, EvalMatrix) else M
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    p = prime if prime is not None else random_prime()
    r_mod = rank_mod_p(rows, p)
    if r_mod == min(len(rows), len(rows[0])):
        return r_mod
    r_exact = rank_bareiss(rows)
    assert r_exact >= r_mod
    return r_exact


def check_spanning(W: HypothesisClass, ell: int, s: int,
                   budget: int = DEFAULT_MATRIX_BUDGET,
                   prime: int | None = None) -> tuple[bool, int, int]:
    """Do the bounded-support monomials span all functions on W?

    Returns (spans, rank, |W|); spans iff rank == |W|.
    """
    mons = monomial_set(W, ell, s, budget=budget)
    mat = eval_matrix(W, mons, budget=budget)
    rank = rank_exact(mat, prime=prime)
    return rank == len(W), rank, len(W)


def direction_subspace_dim(W: HypothesisClass, i: int, ell: int,
                           prime: int | None = None) -> int:
    """Dimension of the functions that are degree-(ell-1) polynomials in the
    i-th label on every direction-i edge.

    The formula value  sum over edges of min(ell, |e|)  is checked against
    the independently computed rank of the stacked per-edge Vandermonde
    columns before being returned.
    """
    if not 1 <= i <= W.n:
        raise ValueError(f"direction {i} out of range")
    G = build_oig(W)
    groups = G.by_direction[i - 1]
    formula = sum(min(ell, len(g)) for g in groups)
    stacked = []
    for g in groups:
        zs = [W.hyps[v][i - 1] for v in g.members]
        for c in range(ell):
            row = [0] * len(W)
            for v, z in zip(g.members, zs):
                row[v] = z**c
            stacked.append(row)
    rank = rank_exact(stacked, prime=prime)
    if rank != formula:
        raise AssertionError(
            f"direction {i}: stacked Vandermonde rank {rank} != formula {formula}")
    return formula


def extract_basis(W: HypothesisClass, ell: int, s: int,
                  budget: int = DEFAULT_MATRIX_BUDGET) -> tuple[list[Monomial], EvalMatrix]:
    """Greedy basis among the monomial evaluations, deterministic pivot order.

    Scans monomials in enumeration order and keeps each one that is linearly
    independent from those already kept (exact Fraction elimination).
    """
    mons = monomial_set(W, ell, s, budget=budget)
    mat = eval_matrix(W, mons, budget=budget)
    kept: list[int] = []
    echelon: list[list[Fraction]] = []
    pivots: list[int] = []
    for ridx, row in enumerate(mat.entries):
        vec = [Fraction(v) for v in row]
        for erow, pc in zip(echelon, pivots):
            if vec[pc]:
                f = vec[pc] / erow[pc]
                vec = [a - f * b for a, b in zip(vec, erow)]
        pc = next((c for c, v in enumerate(vec) if v), None)
        if pc is not None:
            kept.append(ridx)
            echelon.append(vec)
            pivots.append(pc)
        if len(kept) == len(W):
            break
    basis = [mat.monomials[j] for j in kept]
    rows = tuple(mat.entries[j] for j in kept)
    return basis, EvalMatrix(monomials=tuple(basis), base=W, entries=rows)


def in_direction_subspace(W: HypothesisClass, i: int, ell: int, values) -> bool:
    """Is the function (given as per-row values) a degree-(ell-1) polynomial
    in the i-th label on every direction-i edge?  Exact rank comparison of
    the per-edge Vandermonde system against its augmentation."""
    G = build_oig(W)
    for g in G.by_direction[i - 1]:
        zs = [W.hyps[v][i - 1] for v in g.members]
        vand = [[z**c for c in range(ell)] for z in zs]
        aug = [row + [values[v]] for row, v in zip(vand, g.members)]
        if rank_bareiss(aug) != rank_bareiss(vand):
            return False
    return True


# -- end-to-end audit ---------------------------------------------------------


@dataclass(frozen=True)
class AuditReport:
    class_id: str
    ell: int
    n: int
    n_samples: int
    mu_value: Fraction | None
    ceil_mu: int | None
    d_ds: int | None
    d_nat: int | None
    t_star: int | None
    spanning_ok: bool | None
    spanning_rank: int | None
    class_size: int
    modulus: int
    authoritative: bool
    verdicts: dict = field(compare=False)
    mu_lower_bound: Fraction | None = None  # heuristic fallback past the cap

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> dict:
        return {
            "class_id": self.class_id,
            "ell": self.ell,
            "n": self.n,
            "n_samples": self.n_samples,
            "mu": None if self.mu_value is None else format_ratio(self.mu_value),
            "ceil_mu": self.ceil_mu,
            "d_ds": self.d_ds,
            "d_nat": self.d_nat,
            "t_star": self.t_star,
            "spanning": self.spanning_ok,
            "spanning_rank": self.spanning_rank,
            "class_size": self.class_size,
            "modulus": self.modulus,
            "authoritative": self.authoritative,
            "lower_bound_only": self.mu_lower_bound is not None,
            "mu_lower_bound": None if self.mu_lower_bound is None
                              else format_ratio(self.mu_lower_bound),
            "verdicts": dict(self.verdicts),
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def csv_row(self) -> list:
        mu_num = self.mu_value.numerator if self.mu_value is not None else ""
        mu_den = self.mu_value.denominator if self.mu_value is not None else ""
        return [self.class_id, self.ell, mu_num, mu_den, self.ceil_mu,
                self.d_ds, self.d_nat, self.t_star, self.spanning_ok, self.verdict]

    CSV_HEADER = ["class_id", "ell", "mu_num", "mu_den", "ceil_mu",
                  "d_ds", "d_nat", "t_star", "spanning", "verdict"]


def class_id(H: HypothesisClass) -> str:
    return hashlib.sha256(dumps_class(H).encode()).hexdigest()[:16]


def audit_theorem(H: HypothesisClass, ell: int, n_samples: int | None = None,
                  subset_cap: int = DEFAULT_SUBSET_CAP,
                  matrix_budget: int = DEFAULT_MATRIX_BUDGET,
                  prime_seed: int = _PRIME_SEED) -> AuditReport:
    """Audit the ceiling-of-density bound and its companions on one class.

    Verdicts: ceil(mu) <= d_DS, d_Nat <= d_DS, t_star == ceil(mu) on the
    density-maximizing restriction, and spanning at s = d_DS.  Any failed
    verdict marks the report FAIL: it would contradict the bound being
    audited or expose an implementation bug.  Budget overruns produce a
    partial, non-authoritative report instead of a guess.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    ns = H.n if n_samples is None else n_samples
    prime = random_prime(seed=prime_seed)
    cid = class_id(H)

    authoritative = True
    mu_val = ceil_mu = t_star = mu_lower = None
    try:
        mu_val, T_star, _F = mu_with_witness(H, ns, ell, cap=subset_cap)
        ceil_mu = math.ceil(mu_val)
        W_star = restrict(H, T_star)
        _sigma, t_star = min_max_orientation(build_oig(W_star), ell)
    except BudgetError:
        # past the cap only the hill-climbing lower bound is available
        authoritative = False
        mu_lower, _F = max_density_subfamily(H, ell, mode="heuristic")

    d_ds, _w = ds_dimension(H, ell)
    d_nat, _wn = natarajan_dimension(H, ell)

    spanning_ok = spanning_rank = None
    try:
        spanning_ok, spanning_rank, _size = check_spanning(
            H, ell, d_ds, budget=matrix_budget, prime=prime)
    except BudgetError:
        authoritative = False

    verdicts = {}
    if ceil_mu is not None:
        verdicts["ceil_mu_le_d_ds"] = ceil_mu <= d_ds
        verdicts["t_star_eq_ceil_mu"] = t_star == ceil_mu
    elif mu_lower is not None:
        # a certified lower bound can still falsify, never confirm
        verdicts["ceil_mu_lower_le_d_ds"] = math.ceil(mu_lower) <= d_ds
    verdicts["d_nat_le_d_ds"] = d_nat <= d_ds
    if spanning_ok is not None:
        verdicts["spanning"] = spanning_ok

    return AuditReport(
        class_id=cid, ell=ell, n=H.n, n_samples=ns,
        mu_value=mu_val, ceil_mu=ceil_mu, d_ds=d_ds, d_nat=d_nat,
        t_star=t_star, spanning_ok=spanning_ok, spanning_rank=spanning_rank,
        class_size=len(H), modulus=prime, authoritative=authoritative,
        verdicts=verdicts, mu_lower_bound=mu_lower,
    )
