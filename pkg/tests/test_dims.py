import itertools

import numpy as np
import pytest

from helpers import brute_has_valid_subfamily, random_class
from dslab.hclass import HypothesisClass, gen_cube, restrict
from dslab.dims import (ds_dimension, ds_shatter_core, natarajan_dimension,
                        validate_witness, vc_dimension, witness_from_json,
                        witness_to_json)


def test_core_full_square():
    W = gen_cube(2, 1, 2, 2)
    assert ds_shatter_core(W, 1) == W


def test_core_square_minus_vertex_is_empty():
    W = HypothesisClass(k=2, n=2, hyps=((1, 1), (1, 2), (2, 1)))
    assert ds_shatter_core(W, 1) is None
    assert not brute_has_valid_subfamily(W, 1)


def test_core_triangle_ell2():
    W = gen_cube(3, 2, 1, 1)
    assert ds_shatter_core(W, 2) == W


def test_core_agrees_with_brute_force_existence():
    rng = np.random.default_rng(21)
    for _ in range(20):
        W = random_class(rng, size_max=7)
        for ell in (1, 2):
            got = ds_shatter_core(W, ell)
            assert (got is not None) == brute_has_valid_subfamily(W, ell)


def test_core_is_order_independent():
    # one-at-a-time removal in random order reaches the same fixed point
    rng = np.random.default_rng(22)
    for _ in range(10):
        W = random_class(rng, size_max=9)
        core = ds_shatter_core(W, 1)

        alive = set(range(len(W)))
        order = list(alive)
        rng.shuffle(order)
        changed = True
        while changed and alive:
            changed = False
            for v in order:
                if v not in alive:
                    continue
                h = W.hyps[v]
                for i in range(W.n):
                    nbrs = sum(1 for u in alive if u != v
                               and W.hyps[u][i] != h[i]
                               and W.hyps[u][:i] + W.hyps[u][i + 1:] == h[:i] + h[i + 1:])
                    if nbrs < 1:
                        alive.discard(v)
                        changed = True
                        break
        expected = None
        if alive:
            expected = HypothesisClass(k=W.k, n=W.n,
                                       hyps=tuple(W.hyps[v] for v in sorted(alive)))
        assert core == expected


def test_ds_dimension_square():
    H = gen_cube(2, 1, 2, 2)
    d, w = ds_dimension(H, 1)
    assert d == 2 and w is not None and validate_witness(H, w)
    assert ds_dimension(H, 2) == (0, None)


def test_ds_dimension_of_product_classes():
    assert ds_dimension(gen_cube(4, 2, 2, 3), 2)[0] == 2
    assert ds_dimension(gen_cube(4, 1, 2, 3), 1)[0] == 2
    assert ds_dimension(gen_cube(8, 1, 3, 4), 1)[0] == 3


def test_ds_dimension_nonincreasing_in_ell():
    rng = np.random.default_rng(23)
    for _ in range(10):
        H = random_class(rng)
        ds = [ds_dimension(H, ell)[0] for ell in (1, 2, 3)]
        assert ds[0] >= ds[1] >= ds[2]


def test_ds_dimension_cannot_grow_under_projection():
    rng = np.random.default_rng(24)
    for _ in range(10):
        H = random_class(rng, n_max=4)
        d_full = ds_dimension(H, 1)[0]
        for size in range(1, H.n):
            for S in itertools.combinations(range(1, H.n + 1), size):
                assert ds_dimension(restrict(H, S), 1)[0] <= d_full


def test_duplicated_coordinate_never_shatters():
    # the two copies pin each other, so no member has an i-neighbor there
    rng = np.random.default_rng(25)
    for _ in range(10):
        H = random_class(rng)
        W = restrict(H, [1, 1], allow_repeats=True)
        assert ds_shatter_core(W, 1) is None


def test_natarajan_square():
    d, w = natarajan_dimension(gen_cube(2, 1, 2, 2), 1)
    assert d == 2 and w.kind == "Natarajan"


def test_natarajan_diagonal_pair():
    # brute force: both 2x2 products fail, the single-coordinate list works
    H = HypothesisClass(k=2, n=2, hyps=((1, 1), (2, 2)))
    d, w = natarajan_dimension(H, 1)
    assert d == 1
    assert validate_witness(H, w)


def test_natarajan_at_most_ds():
    rng = np.random.default_rng(26)
    for _ in range(20):
        H = random_class(rng)
        for ell in (1, 2):
            assert natarajan_dimension(H, ell)[0] <= ds_dimension(H, ell)[0]


def test_natarajan_needs_enough_labels():
    assert natarajan_dimension(gen_cube(2, 1, 2, 2), 2) == (0, None)


def test_vc_examples():
    assert vc_dimension(gen_cube(2, 1, 2, 2)) == 2
    assert vc_dimension(HypothesisClass(k=2, n=2, hyps=((1, 2),))) == 0
    with pytest.raises(ValueError):
        vc_dimension(gen_cube(3, 1, 1, 2))


def test_vc_equals_ds_at_ell_one_binary():
    rng = np.random.default_rng(27)
    for _ in range(20):
        H = random_class(rng, k_max=2, n_max=3, size_max=8)
        assert vc_dimension(H) == ds_dimension(H, 1)[0]


def test_witness_json_roundtrip_and_validation():
    H = gen_cube(3, 1, 2, 3)
    for getter, ell in ((ds_dimension, 1), (natarajan_dimension, 1), (ds_dimension, 2)):
        d, w = getter(H, ell)
        if w is None:
            continue
        w2 = witness_from_json(witness_to_json(w))
        assert w2 == w
        assert validate_witness(H, w2)


def test_witness_validation_rejects_tampering():
    H = gen_cube(2, 1, 2, 2)
    _d, w = ds_dimension(H, 1)
    bad = witness_from_json(witness_to_json(w).replace('"ell":1', '"ell":2'))
    assert not validate_witness(H, bad)
