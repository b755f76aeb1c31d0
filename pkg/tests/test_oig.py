import json
from fractions import Fraction

import numpy as np
import pytest

from helpers import (brute_max_density, brute_min_max_outdegree, brute_mu,
                     naive_density, naive_edges, random_class, subclasses)
from dslab.errors import BudgetError
from dslab.hclass import HypothesisClass, gen_cube, gen_random, restrict
from dslab.oig import (build_oig, density, format_ratio, max_density_subfamily,
                       min_max_orientation, mu, mu_prime, mu_with_witness,
                       orientation_to_json, outdegrees, parse_ratio)


def test_build_single_coordinate():
    G = build_oig(gen_cube(3, 2, 1, 1))
    assert G.n_directions == 1 and G.n_edges == 1
    assert len(next(G.edges())) == 3


def test_build_square_matches_hand_enumeration():
    W = gen_cube(2, 1, 2, 2)
    G = build_oig(W)
    assert G.n_edges == 4
    assert all(len(e) == 2 for e in G.edges())
    got = {(e.direction, e.members) for e in G.edges()}
    assert got == set(naive_edges(W))


def test_build_singleton():
    G = build_oig(HypothesisClass(k=2, n=2, hyps=((1, 1),)))
    assert G.n_edges == 2
    assert all(len(e) == 1 for e in G.edges())


def test_build_matches_naive_on_random_classes():
    rng = np.random.default_rng(11)
    for _ in range(25):
        W = random_class(rng)
        got = {(e.direction, e.members) for e in build_oig(W).edges()}
        assert got == set(naive_edges(W))


def test_build_dead_dirs_forces_singletons():
    W = gen_cube(2, 1, 2, 2)
    G = build_oig(W, dead_dirs=[0])
    sizes = sorted(len(e) for e in G.by_direction[0])
    assert sizes == [1, 1, 1, 1]
    assert all(len(e) == 2 for e in G.by_direction[1])


def test_density_examples():
    assert density(gen_cube(3, 2, 1, 1), 1) == Fraction(2, 3)
    assert density(gen_cube(2, 1, 2, 2), 1) == 1
    assert naive_density(gen_cube(2, 1, 2, 2), 1) == 1


@pytest.mark.parametrize("k,ell,s,m", [(3, 1, 1, 2), (4, 1, 2, 3), (6, 2, 2, 3), (4, 2, 1, 2)])
def test_density_of_product_class(k, ell, s, m):
    # closed form s * (1 - ell/k), exact
    H = gen_cube(k, ell, s, m)
    assert density(H, ell) == Fraction(s) * (1 - Fraction(ell, k))


def test_density_antimonotone_in_ell_and_bounded():
    rng = np.random.default_rng(2)
    for _ in range(20):
        W = random_class(rng)
        vals = [density(W, ell) for ell in range(1, W.k + 2)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert all(0 <= v <= W.n for v in vals)


def test_max_density_subfamily_square():
    W = gen_cube(2, 1, 2, 2)
    val, F = max_density_subfamily(W, 1)
    assert val == 1 and F == W
    assert brute_max_density(W, 1) == 1


def test_max_density_subfamily_singleton():
    W = HypothesisClass(k=3, n=1, hyps=((2,),))
    val, F = max_density_subfamily(W, 1)
    assert val == 0 and F == W


def test_max_density_subfamily_triangle_ell2():
    W = gen_cube(3, 2, 1, 1)
    val, F = max_density_subfamily(W, 2)
    assert val == Fraction(1, 3) and F == W


def test_max_density_subfamily_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(15):
        W = random_class(rng, size_max=8)
        for ell in (1, 2):
            val, F = max_density_subfamily(W, ell)
            assert val == brute_max_density(W, ell)
            assert density(F, ell) == val  # witness recomputes


def test_max_density_tie_break_is_smallest_then_lex():
    # two isolated vertices: all densities are 0, want the single first row
    W = HypothesisClass(k=2, n=2, hyps=((1, 1), (2, 2)))
    val, F = max_density_subfamily(W, 1)
    assert val == 0
    assert F.hyps == ((1, 1),)


def test_max_density_cap():
    with pytest.raises(BudgetError):
        max_density_subfamily(gen_random(2, 5, 25, seed=0), 1, cap=22)


def test_heuristic_mode_is_certified_lower_bound():
    rng = np.random.default_rng(4)
    for _ in range(10):
        W = random_class(rng, size_max=8)
        exact, _ = max_density_subfamily(W, 1)
        approx, F = max_density_subfamily(W, 1, mode="heuristic")
        assert approx <= exact
        assert density(F, 1) == approx


def test_mu_square():
    H = gen_cube(2, 1, 2, 2)
    assert mu(H, 2, 1) == 1
    assert mu(H, 1, 1) == Fraction(1, 2)


def test_mu_large_ell_is_zero():
    rng = np.random.default_rng(5)
    for _ in range(5):
        H = random_class(rng, size_max=8)
        assert mu(H, H.n, H.k) == 0


def test_mu_matches_brute_force():
    rng = np.random.default_rng(6)
    for _ in range(10):
        H = random_class(rng, n_max=3, size_max=7)
        for ell in (1, 2):
            assert mu(H, H.n, ell) == brute_mu(H, H.n, ell)


def test_mu_dominates_all_repeat_sequences():
    # maximizing over plain coordinate subsets loses nothing: projections
    # onto sequences with repeated coordinates never score higher
    import itertools
    rng = np.random.default_rng(14)
    for _ in range(6):
        H = random_class(rng, k_max=3, n_max=2, size_max=6)
        m = mu(H, 2, 1)
        for seq in itertools.product(range(1, H.n + 1), repeat=2):
            W = restrict(H, seq, allow_repeats=True)
            assert brute_max_density(W, 1) <= m


def test_mu_nondecreasing_in_sample_size():
    rng = np.random.default_rng(7)
    for _ in range(10):
        H = random_class(rng)
        vals = [mu(H, n, 1) for n in range(1, H.n + 2)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_mu_witness_consistency():
    H = gen_cube(4, 1, 2, 3)
    val, T, F = mu_with_witness(H, 3, 1)
    assert density(F, 1) == val
    assert set(F.hyps) <= set(restrict(H, T).hyps)


def test_mu_prime_examples():
    assert mu_prime(gen_cube(2, 1, 2, 2), 2) == 2
    assert mu_prime(HypothesisClass(k=2, n=1, hyps=((1,),)), 1) == 0


def test_mu_prime_sandwich():
    rng = np.random.default_rng(8)
    for _ in range(12):
        H = random_class(rng, size_max=9)
        m, mp = mu(H, H.n, 1), mu_prime(H, H.n)
        assert mp / 2 <= m <= mp


def test_orientation_single_big_edge():
    G = build_oig(gen_cube(3, 2, 1, 1))
    sigma, t = min_max_orientation(G, 1)
    assert t == 1
    assert brute_min_max_outdegree(G, 1) == 1


def test_orientation_square():
    G = build_oig(gen_cube(2, 1, 2, 2))
    _sigma, t = min_max_orientation(G, 1)
    assert t == 1
    assert brute_min_max_outdegree(G, 1) == 1


def test_orientation_all_edges_small():
    G = build_oig(gen_cube(3, 2, 1, 1))
    sigma, t = min_max_orientation(G, 3)
    assert t == 0
    assert all(len(chosen) == 3 for _d, _k, chosen in sigma.assign)


def test_orientation_flow_matches_exhaustive():
    rng = np.random.default_rng(9)
    checked = 0
    for _ in range(40):
        W = random_class(rng, size_max=7)
        G = build_oig(W)
        if G.n_edges > 6 or any(len(e) > 4 for e in G.edges()):
            continue
        for ell in (1, 2):
            _sigma, t = min_max_orientation(G, ell)
            assert t == brute_min_max_outdegree(G, ell)
        checked += 1
    assert checked >= 10


def test_orientation_achieves_exactly_t_star():
    rng = np.random.default_rng(10)
    for _ in range(15):
        W = random_class(rng, size_max=10)
        G = build_oig(W)
        sigma, t = min_max_orientation(G, 1)
        assert max(outdegrees(G, sigma)) == t


def test_outdegrees_manual():
    W = gen_cube(3, 2, 1, 1)
    G = build_oig(W)
    from dslab.oig import Orientation
    sigma = Orientation(ell=1, assign=(((0), (), (0,)),))
    out = outdegrees(G, sigma)
    assert out == [0, 1, 1]


def test_outdegrees_singleton_class_zero():
    W = HypothesisClass(k=2, n=3, hyps=((1, 2, 1),))
    G = build_oig(W)
    sigma, t = min_max_orientation(G, 1)
    assert outdegrees(G, sigma) == [0] and t == 0


def test_outdegree_sum_identity():
    rng = np.random.default_rng(12)
    for _ in range(10):
        W = random_class(rng, size_max=10)
        G = build_oig(W)
        sigma, _t = min_max_orientation(G, 1)
        total = sum(outdegrees(G, sigma))
        assert total == sum(len(e) - len(a) for e, (_d, _k, a) in zip(G.edges(), sigma.assign))


def test_max_outdegree_dominates_subfamily_density():
    # counting bound: no orientation can beat the densest subfamily
    rng = np.random.default_rng(13)
    for _ in range(10):
        W = random_class(rng, size_max=8)
        G = build_oig(W)
        _sigma, t = min_max_orientation(G, 1)
        for F in list(subclasses(W))[::7]:
            assert t >= naive_density(F, 1)


def test_orientation_mismatch_detected():
    G1 = build_oig(gen_cube(2, 1, 2, 2))
    G2 = build_oig(gen_cube(3, 1, 1, 2))
    sigma, _t = min_max_orientation(G2, 1)
    with pytest.raises(ValueError, match="mismatched"):
        outdegrees(G1, sigma)


def test_orientation_json_schema():
    G = build_oig(gen_cube(2, 1, 2, 2))
    sigma, _t = min_max_orientation(G, 1)
    doc = json.loads(orientation_to_json(sigma))
    assert set(doc) == {"ell", "edges"}
    for e in doc["edges"]:
        assert set(e) == {"dir", "key", "assign"}
        assert 1 <= e["dir"] <= 2
        assert all(v >= 1 for v in e["assign"])


def test_ratio_format_roundtrip():
    x = Fraction(22, 7)
    assert parse_ratio(format_ratio(x)) == x
    assert format_ratio(Fraction(3)) == "3/1"
