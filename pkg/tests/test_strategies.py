import math
import warnings
from fractions import Fraction

import pytest

from hatlab.errors import UndefinedStrategy
from hatlab.hatspace import SpaceParams, check_independent, enumerate_space, perfect_size, space_size
from hatlab.strategies import (
    best_residues,
    best_sigma,
    bit,
    default_B,
    generate,
    make_strategy,
    member,
    parse_strategy,
    teirlinck_criterion,
)

DP18 = """123 134 145 152 215 231 253 312 325
          341 354 413 435 451 514 521 532 543""".split()


def digits(s):
    return tuple(int(c) for c in s)


def test_parity_k1_small():
    assert len(generate(make_strategy("parity_k1", 2))) == 3


def test_modular_k2_three_prisoners():
    s = generate(make_strategy("modular_k2", 3))
    assert len(s) == 12
    assert Fraction(len(s), 60) == Fraction(1, 5)


def test_double_parity_matches_listing():
    s = generate(make_strategy("double_parity", 3))
    assert set(s) == {digits(x) for x in DP18}


def test_double_parity_n4():
    s = generate(make_strategy("double_parity", 4))
    assert len(s) == 108
    assert Fraction(108, 360) == Fraction(1, 4) + Fraction(1, 4 * 5)


def test_mod_t_sigma_zero_with_t2_is_empty():
    assert len(generate(make_strategy("mod_t", 3, 2, t=2, sigma=0))) == 0


def test_cyclic_n2():
    s = generate(make_strategy("cyclic_n2", 2, 4))
    assert set(s) == {(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)}


def test_affine_equals_even_k_rule_at_k2():
    a = generate(make_strategy("affine_n3_k2", 3))
    b = generate(make_strategy("n3_even_k", 3, 2))
    assert len(a) == 20
    assert a.members == b.members


@pytest.mark.parametrize("name,n,k,size", [
    ("parity_k1", 4, 1, 60),
    ("n3_odd_k", 3, 3, 30),
    ("n4_even_k", 4, 2, 120),
    ("n4_even_k", 4, 4, 336),
])
def test_generate_sizes(name, n, k, size):
    assert len(generate(make_strategy(name, n, k))) == size


def test_member_agrees_with_generate():
    spec = make_strategy("mod_t", 3, 3, t=3, sigma=0)
    s = generate(spec)
    for a in enumerate_space(spec.space):
        assert member(spec, a) == (a in s)


# -- central claim: every variant yields an independent set -------------------

MATRIX = (
    [("parity_k1", n, 1, {}) for n in range(1, 7)]
    + [("modular_k2", n, 2, {}) for n in range(1, 7)]
    + [("double_parity", n, 2, {}) for n in range(1, 7)]
    + [("mod_t", n, k, {}) for n in range(1, 5) for k in range(2, 5) if n + k <= 8]
    + [("mod_t", n, k, {"t": k, "sigma": s}) for n in range(1, 5) for k in range(2, 5)
       for s in range(k) if n + k <= 7]
    + [("cyclic_n2", 2, k, {}) for k in range(0, 8)]
    + [("affine_n3_k2", 3, 2, {})]
    + [("n3_even_k", 3, k, {}) for k in (0, 2, 4, 6)]
    + [("n3_odd_k", 3, k, {}) for k in (1, 3, 5)]
    + [("n4_even_k", 4, k, {}) for k in (2, 4)]
    + [("appendix_code", n, k, {}) for n in range(1, 6) for k in range(1, 5) if n + k <= 8]
)


@pytest.mark.parametrize("name,n,k,params", MATRIX)
def test_every_strategy_is_independent(name, n, k, params):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        s = generate(make_strategy(name, n, k, **params))
    assert check_independent(s) is None
    assert len(s) <= perfect_size(SpaceParams(n, k))


@pytest.mark.parametrize("n", range(1, 7))
def test_parity_half(n):
    p = SpaceParams(n, 1)
    assert 2 * len(generate(make_strategy("parity_k1", n))) == space_size(p)


@pytest.mark.parametrize("n", range(2, 7))
def test_modular_ratio(n):
    s = generate(make_strategy("modular_k2", n))
    assert Fraction(len(s), space_size(s.params)) == Fraction(1, 2 * math.ceil(n / 2) + 1)


def dp_formula(n):
    tail = n + 1 if n % 2 == 0 else n + 2
    return Fraction(1, 4) + Fraction(1, 4 * tail)


@pytest.mark.parametrize("n", range(2, 8))
def test_double_parity_sizes(n):
    s = generate(make_strategy("double_parity", n))
    assert Fraction(len(s), space_size(s.params)) == dp_formula(n)
    if n == 7:
        assert len(s) == 50400


@pytest.mark.parametrize("n", range(2, 7))
def test_mod_t2_sigma1_is_double_parity(n):
    a = generate(make_strategy("mod_t", n, 2, t=2, sigma=1))
    b = generate(make_strategy("double_parity", n))
    assert a.members == b.members


@pytest.mark.parametrize("name,n,k", [
    ("cyclic_n2", 2, 1), ("cyclic_n2", 2, 5), ("affine_n3_k2", 3, 2),
    ("n3_even_k", 3, 4), ("n3_odd_k", 3, 1), ("n3_odd_k", 3, 5),
    ("n4_even_k", 4, 2), ("n4_even_k", 4, 4),
])
def test_constructions_are_perfect(name, n, k):
    s = generate(make_strategy(name, n, k))
    assert len(s) == perfect_size(SpaceParams(n, k))


@pytest.mark.parametrize("n", range(1, 6))
@pytest.mark.parametrize("B", [1, 2, 3])
def test_appendix_k1_degenerates_to_parity(n, B):
    parity = generate(make_strategy("parity_k1", n))
    base = generate(make_strategy("appendix_code", n, 1, B=B, r_sum=0, r_pos=0))
    assert base.members == parity.members
    for rs in range(B):
        for rp in range(2):
            if (rs, rp) != (0, 0):
                assert len(generate(make_strategy("appendix_code", n, 1, B=B,
                                                  r_sum=rs, r_pos=rp))) == 0


def test_bit_examples():
    assert bit(3, 6) == 2
    assert bit(1, 2) == 1
    assert bit(4, 5) == 0
    assert bit(4, 6) == 1
    with pytest.raises(ValueError):
        bit(5, 5)


def test_bit_properties_exhaustive():
    top = 64
    for u in range(top + 1):
        for v in range(u + 1, top + 1):
            assert bit(u, v) == bit(v, u)
            ref = max(i for i in range(8) if (u >> i) & 1 != (v >> i) & 1)
            assert bit(u, v) == ref
            for w in range(v + 1, top + 1):
                buv, bvw, buw = bit(u, v), bit(v, w), bit(u, w)
                assert buv != bvw
                assert buw in (buv, bvw)


def brute_best_residues(n, k, B):
    best = None
    for rs in range(B):
        for rp in range(k + 1):
            c = len(generate(make_strategy("appendix_code", n, k, B=B, r_sum=rs, r_pos=rp)))
            if best is None or c > best[2]:
                best = (rs, rp, c)
    return best


@pytest.mark.parametrize("n,k,B", [(3, 2, 2), (2, 3, 2), (3, 3, 4), (2, 4, 4)])
def test_best_residues_matches_brute_force(n, k, B):
    assert best_residues(n, k, B) == brute_best_residues(n, k, B)


@pytest.mark.parametrize("n,k,B,floor", [(4, 2, 2, 15), (5, 2, 2, 105)])
def test_best_residues_meets_bound(n, k, B, floor):
    _, _, count = best_residues(n, k, B)
    assert floor == math.ceil(Fraction(space_size(SpaceParams(n, k)), 4 * (k + 1) * B))
    assert count >= floor


def brute_best_sigma(n, k, t):
    counts = []
    for s in range(t):
        counts.append(len(generate(make_strategy("mod_t", n, k, t=t, sigma=s))))
    best = max(counts)
    return counts.index(best), best


@pytest.mark.parametrize("n,k,t", [(3, 2, 2), (2, 2, 2), (4, 3, 3), (3, 4, 8), (2, 3, 4)])
def test_best_sigma(n, k, t):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert best_sigma(n, k, t) == brute_best_sigma(n, k, t)


def test_best_sigma_known_values():
    assert best_sigma(3, 2, 2) == (1, 18)
    assert best_sigma(2, 2, 2) == (1, 4)


def test_default_B():
    assert default_B(2) == 2
    assert default_B(3) == 4
    assert default_B(4) == 4
    assert default_B(5) == 5
    assert default_B(1) == 1


@pytest.mark.parametrize("n,k,want", [(5, 6, True), (5, 36, True), (4, 3, False),
                                      (5, 31, True), (2, 1, False), (1, 1, True)])
def test_teirlinck(n, k, want):
    assert teirlinck_criterion(n, k) is want


def test_teirlinck_prime_power_product():
    # 32 = 2^5 gives 5*1 = 5, 26+1 = 27 = 3^3 gives 3*2 = 6
    assert teirlinck_criterion(5, 31)
    assert teirlinck_criterion(6, 26)
    assert not teirlinck_criterion(7, 26)


def test_undefined_strategies():
    with pytest.raises(UndefinedStrategy):
        make_strategy("cyclic_n2", 3, 2)
    with pytest.raises(UndefinedStrategy):
        make_strategy("n3_odd_k", 3, 2)
    with pytest.raises(UndefinedStrategy):
        make_strategy("n4_even_k", 4, 3)
    with pytest.raises(UndefinedStrategy):
        make_strategy("parity_k1", 3, 2)
    with pytest.raises(UndefinedStrategy):
        make_strategy("mod_t", 3, 2, t=2, sigma=2)
    with pytest.raises(UndefinedStrategy):
        make_strategy("nonsense", 3, 2)
    with pytest.raises(UndefinedStrategy):
        make_strategy("cyclic_n2", 2, 2, t=3)


def test_mod_t_warns_when_unsatisfiable():
    with pytest.warns(UserWarning):
        spec = make_strategy("mod_t", 2, 3, t=2, sigma=0)
    assert len(generate(spec)) == 0


def test_mod_t_defaults():
    assert make_strategy("mod_t", 3, 4).param("t") == 8
    assert make_strategy("mod_t", 3, 3, t=3).param("sigma") == 0
    assert make_strategy("mod_t", 3, 4, t=4).param("sigma") == 2


def test_modular_residue_override():
    assert make_strategy("modular_k2", 2).param("residue") == 1
    assert make_strategy("modular_k2", 3).param("residue") == 0
    assert make_strategy("modular_k2", 3, residue=2).param("residue") == 2


def test_parse_strategy_strings():
    spec = parse_strategy("mod_t:t=2,sigma=1", n=3, k=2)
    assert spec.params == (("t", 2), ("sigma", 1))
    spec = parse_strategy("appendix:B=2,rs=1,rp=2", n=4, k=2)
    assert spec.name == "appendix_code"
    assert dict(spec.params) == {"B": 2, "r_sum": 1, "r_pos": 2}
    spec = parse_strategy("dataset:n5k2")
    assert spec.space == SpaceParams(5, 2)
    assert len(generate(spec)) == 840
    with pytest.raises(UndefinedStrategy):
        parse_strategy("mod_t:t", n=3, k=2)


def test_parallel_generate_is_deterministic():
    spec = make_strategy("double_parity", 5)
    assert generate(spec, workers=2).members == generate(spec).members
