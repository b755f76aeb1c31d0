"""Finite multiclass hypothesis classes.

A class is a finite set of label vectors of length ``n`` with labels in
``1..k``.  Vectors are stored deduplicated and in lexicographic order so that
equal classes always serialize to identical bytes.  All public interfaces are
1-based (labels and coordinate indices alike).
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetError

__all__ = [
    "HypothesisClass",
    "check_coords",
    "load_class",
    "loads_class",
    "save_class",
    "dumps_class",
    "to_csv",
    "restrict",
    "gen_cube",
    "gen_random",
]

_GEN_BUDGET = 1_000_000  # refuse to materialize product classes above this size


@dataclass(frozen=True)
class HypothesisClass:
    """Canonical finite hypothesis class over coordinates ``1..n``.

    ``hyps`` holds distinct label vectors sorted lexicographically.  ``meta``
    carries construction bookkeeping (duplicate counters, seeds) and never
    participates in equality or hashing.
    """

    k: int
    n: int
    hyps: tuple[tuple[int, ...], ...]
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("label count k must be >= 1")
        if self.n < 1:
            raise ValueError("coordinate count n must be >= 1")
        if not self.hyps:
            raise ValueError("hypothesis class must be non-empty")
        for h in self.hyps:
            if len(h) != self.n:
                raise ValueError(f"ragged row: expected length {self.n}, got {len(h)}")
            if not all(1 <= v <= self.k for v in h):
                raise ValueError(f"label out of range in {h}")
        if any(a >= b for a, b in zip(self.hyps, self.hyps[1:])):
            raise ValueError("rows must be strictly ascending (canonical order)")

    def __len__(self) -> int:
        return len(self.hyps)

    def labels_at(self, i: int) -> tuple[int, ...]:
        """Distinct labels realized at 1-based coordinate ``i``, ascending."""
        return tuple(sorted({h[i - 1] for h in self.hyps}))

    def row_index(self, vec: Sequence[int]) -> int:
        """Index of ``vec`` in canonical order; raises KeyError if absent."""
        v = tuple(vec)
        idx = getattr(self, "_index", None)
        if idx is None:
            idx = {h: j for j, h in enumerate(self.hyps)}
            object.__setattr__(self, "_index", idx)
        if v not in idx:
            raise KeyError(f"vector {v} not in class")
        return idx[v]


def make_class(k: int, n: int, rows: Iterable[Sequence[int]], meta: dict | None = None) -> HypothesisClass:
    """Validate, deduplicate and canonicalize ``rows`` into a class.

    The number of dropped duplicate rows is recorded under
    ``meta["duplicates_removed"]``.
    """
    seen = set()
    dups = 0
    for row in rows:
        t = tuple(int(v) for v in row)
        if len(t) != n:
            raise ValueError(f"ragged row: expected length {n}, got {len(t)}")
        for v in t:
            if not 1 <= v <= k:
                raise ValueError(f"label out of range: {v} not in [1, {k}]")
        if t in seen:
            dups += 1
        else:
            seen.add(t)
    md = dict(meta or {})
    md["duplicates_removed"] = dups
    return HypothesisClass(k=k, n=n, hyps=tuple(sorted(seen)), meta=md)


def check_coords(n: int, coords: Sequence[int], allow_repeats: bool = False) -> tuple[int, ...]:
    """Validate a 1-based coordinate sequence against a class of width ``n``."""
    cs = tuple(int(c) for c in coords)
    if not cs:
        raise ValueError("coordinate sequence must be non-empty")
    for c in cs:
        if not 1 <= c <= n:
            raise ValueError(f"coordinate index out of range: {c} not in [1, {n}]")
    if not allow_repeats and len(set(cs)) != len(cs):
        raise ValueError(f"repeated coordinate in {cs}")
    return cs


def restrict(H: HypothesisClass, coords: Sequence[int], allow_repeats: bool = False) -> HypothesisClass:
    """Project ``H`` onto the given coordinate sequence and deduplicate.

    ``k`` is unchanged and the new width equals ``len(coords)``.  Repeated
    coordinates are rejected unless ``allow_repeats`` is set (learning code
    projects onto samples, which may repeat instances).
    """
    cs = check_coords(H.n, coords, allow_repeats=allow_repeats)
    rows = {tuple(h[c - 1] for c in cs) for h in H.hyps}
    return HypothesisClass(k=H.k, n=len(cs), hyps=tuple(sorted(rows)))


def gen_cube(k: int, ell: int, s: int, m: int) -> HypothesisClass:
    """Product class with ``s`` full-alphabet coordinates and ``m - s``
    coordinates restricted to the first ``ell`` labels.

    Size is exactly ``k**s * ell**(m-s)``.
    """
    if not 1 <= ell < k:
        raise ValueError(f"need 1 <= ell < k, got ell={ell}, k={k}")
    if not 0 <= s <= m:
        raise ValueError(f"need 0 <= s <= m, got s={s}, m={m}")
    if m < 1:
        raise ValueError("m must be >= 1")
    size = k**s * ell ** (m - s)
    if size > _GEN_BUDGET:
        raise BudgetError(f"product class of size {size} exceeds budget {_GEN_BUDGET}")
    ranges = [range(1, k + 1)] * s + [range(1, ell + 1)] * (m - s)
    rows = itertools.product(*ranges)
    return HypothesisClass(k=k, n=m, hyps=tuple(sorted(rows)),
                           meta={"generator": {"cube": {"k": k, "ell": ell, "s": s, "m": m}}})


def gen_random(k: int, n: int, target_size: int, seed: int) -> HypothesisClass:
    """Uniformly sampled class of ``target_size`` distinct vectors."""
    total = k**n
    if not 1 <= target_size <= total:
        raise ValueError(f"target_size {target_size} not in [1, {total} = k**n]")
    rng = np.random.default_rng(seed)
    if total <= 4_000_000:
        picks = rng.choice(total, size=target_size, replace=False)
        rows = [_decode(int(p), k, n) for p in picks]
    else:
        chosen: set[tuple[int, ...]] = set()
        while len(chosen) < target_size:
            chosen.add(tuple(int(v) for v in rng.integers(1, k + 1, size=n)))
        rows = list(chosen)
    return HypothesisClass(k=k, n=n, hyps=tuple(sorted(rows)),
                           meta={"generator": {"random": {"k": k, "n": n, "size": target_size, "seed": seed}}})


def _decode(idx: int, k: int, n: int) -> tuple[int, ...]:
    digits = []
    for _ in range(n):
        digits.append(idx % k + 1)
        idx //= k
    return tuple(reversed(digits))


def loads_class(text: str) -> HypothesisClass:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed class JSON: {exc}") from exc
    for key in ("k", "n", "hyps"):
        if key not in obj:
            raise ValueError(f"class JSON missing key {key!r}")
    return make_class(int(obj["k"]), int(obj["n"]), obj["hyps"])


def load_class(path) -> HypothesisClass:
    """Read a class from a JSON file: ``{"k": int, "n": int, "hyps": [[...]]}``."""
    with open(path, "r", encoding="utf-8") as fh:
        cls = loads_class(fh.read())
    cls.meta["source"] = str(path)
    return cls


def dumps_class(H: HypothesisClass) -> str:
    return json.dumps({"k": H.k, "n": H.n, "hyps": [list(h) for h in H.hyps]},
                      sort_keys=True, separators=(",", ":"))


def save_class(H: HypothesisClass, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_class(H))
        fh.write("\n")


def to_csv(H: HypothesisClass) -> str:
    """One hypothesis per row, decimal labels."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    for h in H.hyps:
        writer.writerow(h)
    return buf.getvalue()
