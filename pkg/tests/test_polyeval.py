import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from divram.errors import CoefficientOutOfRange, DomainExceeded, RadixTooSmall, WitnessTooSmall
from divram.opcore import CountedContext
from divram.poly import MultiPoly, Poly
from divram.polyeval import (
    decide_finite_language,
    default_block_size,
    eval_adaptive,
    eval_adaptive_multi,
    eval_blocked,
    eval_horner,
    eval_multi,
    eval_prepared,
    interpolate,
    pow_tower,
    prepare,
    prepare_adaptive,
    prepare_adaptive_multi,
    prepare_language,
    prepare_multi,
    prepare_sequence,
    radix_bound,
)


def power_sum(p: Poly, x):
    # independent of Horner: explicit monomials
    return sum(c * x**i for i, c in enumerate(p.coeffs))


coeff_lists = st.lists(st.integers(-10**6, 10**6), min_size=0, max_size=12)


# -- Poly -----------------------------------------------------------------

def test_poly_normalises_and_splits():
    p = Poly((1, -2, 3, 0, 0))
    assert p.coeffs == (1, -2, 3) and p.degree == 2 and p.norm1 == 6
    pos, neg = p.split()
    assert pos.coeffs == (1, 0, 3) and neg.coeffs == (0, 2)
    assert p.mirror().coeffs == (1, 2, 3)
    assert Poly.from_json(p.to_json()) == p
    assert Poly.from_json('["0x10", "-3"]').coeffs == (16, -3)


def test_multipoly_json_roundtrip():
    m = MultiPoly(2, 3, {(1, 2): 5, (0, 0): -1})
    assert MultiPoly.from_json(m.to_json()) == m
    with pytest.raises(ValueError):
        MultiPoly(2, 2, {(2, 0): 1})


# -- Horner ---------------------------------------------------------------

def test_horner_examples():
    ctx = CountedContext()
    assert eval_horner(ctx, Poly((7,)), 123) == 7
    assert eval_horner(ctx, Poly((3, 2, 1)), 2) == 11


@given(coeff_lists, st.integers(-10**9, 10**9))
def test_horner_matches_power_sum_and_counts(coeffs, x):
    p = Poly(tuple(coeffs))
    ctx = CountedContext()
    assert eval_horner(ctx, p, x) == power_sum(p, x)
    snap = ctx.snapshot()
    d = len(p.coeffs) - 1 if p.coeffs else 0
    assert snap["mul"] == d and snap["add"] == d


# -- blocked --------------------------------------------------------------

def test_blocked_all_ones():
    p = Poly((1,) * 16)
    assert eval_blocked(CountedContext(), p, 3, P=2) == (3**16 - 1) // 2


def test_blocked_k1_degenerates_to_horner():
    rng = random.Random(1)
    p = Poly(tuple(rng.randint(0, 4) for _ in range(30)))
    assert eval_blocked(CountedContext(), p, 7, k=1, P=5) == eval_horner(CountedContext(), p, 7)


def test_blocked_rejects_large_coefficient():
    with pytest.raises(CoefficientOutOfRange):
        eval_blocked(CountedContext(), Poly((0, 2)), 3, P=2)


@pytest.mark.parametrize("d,expected", [(256, 163), (1024, 465), (4096, 1531), (16384, 5321)])
def test_blocked_op_count_regression(d, expected):
    # cost depends only on (d, P, k): 2(P^k - P) table ops + 1 + 2(blocks - 1)
    rng = random.Random(d)
    p = Poly(tuple(rng.randint(0, 1) for _ in range(d - 1)) + (1,))
    ctx = CountedContext()
    assert eval_blocked(ctx, p, 2, P=2) == eval_horner(CountedContext(), p, 2)
    snap = ctx.snapshot()
    assert snap["add"] + snap["mul"] == expected
    if d == 4096:
        assert expected <= 0.75 * d


def test_default_block_size_respects_budget():
    assert default_block_size(2**20, 2, budget=1 << 10) <= 10
    assert default_block_size(10, 16) == 1


# -- prepared -------------------------------------------------------------

def test_prepare_radix_example():
    assert radix_bound(2, 6, 4) == 96
    assert prepare(Poly((3, 2, 1)), 4).radix == 128


def test_published_radices_admitted():
    assert prepare(Poly((0, 0, 0, 56)), 21, radix=0x80000).radix == 0x80000
    assert prepare(Poly((1, 1, 1, 1, 1)), 4, degree=5, radix=0x1401).radix == 0x1401
    with pytest.raises(RadixTooSmall):
        prepare(Poly((1, 1, 1, 1, 1)), 4, degree=5, radix=0x1400)


def test_eval_prepared_examples():
    ctx = CountedContext()
    prep = prepare(Poly((3, 2, 1)), 4)
    assert eval_prepared(ctx, prep, 2) == 11
    assert eval_prepared(ctx, prepare(Poly((-17, 5, 9)), 30), 0) == -17
    with pytest.raises(DomainExceeded):
        eval_prepared(ctx, prep, 5)


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=9), st.integers(1, 500), st.data())
def test_eval_prepared_matches_horner(coeffs, X, data):
    p = Poly(tuple(coeffs))
    x = data.draw(st.integers(-X, X))
    assert eval_prepared(CountedContext(), prepare(p, X), x) == eval_horner(CountedContext(), p, x)


def test_eval_prepared_constant_op_count():
    deltas = set()
    for coeffs, X, x in [((3, 2, 1), 4, 2), (tuple(range(-20, 21)), 1000, -977), ((5,), 1, 0)]:
        ctx = CountedContext()
        eval_prepared(ctx, prepare(Poly(coeffs), X), x)
        deltas.add(ctx.snapshot())
    assert len(deltas) == 1


# -- sequences and languages ----------------------------------------------

def test_sequences():
    ctx = CountedContext()
    assert eval_prepared(ctx, prepare_sequence([5]), 0) == 5
    sq = prepare_sequence([0, 1, 4, 9])
    assert [eval_prepared(ctx, sq, n) for n in range(4)] == [0, 1, 4, 9]
    alt = prepare_sequence([1, 0, 1, 0, 1])
    assert [eval_prepared(ctx, alt, n) for n in range(5)] == [1, 0, 1, 0, 1]
    assert alt.divisor > 1


@given(st.lists(st.integers(-10**4, 10**4), min_size=1, max_size=14))
def test_sequence_property(ys):
    prep = prepare_sequence(ys)
    ctx = CountedContext()
    assert [eval_prepared(ctx, prep, n) for n in range(len(ys))] == ys


def test_interpolation_is_exact():
    coeffs = interpolate([1, 0, 1, 0, 1])
    for n, y in enumerate([1, 0, 1, 0, 1]):
        assert sum(c * n**i for i, c in enumerate(coeffs)) == y


def test_finite_language():
    ctx = CountedContext()
    L = prepare_language({1, 3}, 3)
    assert decide_finite_language(ctx, L, 3)
    assert not decide_finite_language(ctx, L, 2)
    empty = prepare_language(set(), 5)
    assert not any(decide_finite_language(ctx, empty, n) for n in range(6))
    with pytest.raises(DomainExceeded):
        decide_finite_language(ctx, L, 4)


# -- multivariate ---------------------------------------------------------

def test_eval_multi_examples():
    ctx = CountedContext()
    assert eval_multi(ctx, prepare_multi(MultiPoly(2, 2, {(1, 1): 1}), 5), (3, 4)) == 12
    p = MultiPoly(3, 2, {(1, 0, 0): 1, (0, 1, 0): 1, (0, 0, 1): 1})
    assert eval_multi(ctx, prepare_multi(p, 1), (1, 1, 1)) == 3
    with pytest.raises(DomainExceeded):
        eval_multi(ctx, prepare_multi(p, 1), (2, 0, 0))


def random_multipoly(rng, n, d, lo=-9, hi=9):
    terms = {tuple(rng.randrange(d) for _ in range(n)): rng.randint(lo, hi)
             for _ in range(rng.randint(0, d**n))}
    return MultiPoly(n, d, terms)


def test_eval_multi_random_against_monomial_sum():
    rng = random.Random(9)
    ctx = CountedContext()
    for _ in range(30):
        n, d = rng.randint(1, 3), rng.randint(1, 3)
        p = random_multipoly(rng, n, d)
        X = rng.randint(1, 20)
        prep = prepare_multi(p, X)
        for _ in range(100):
            xs = [rng.randint(-X, X) for _ in range(n)]
            assert eval_multi(ctx, prep, xs) == p.at(xs)


def test_eval_multi_linear_op_count():
    totals = []
    for n in (1, 2, 3, 4):
        p = MultiPoly(n, 2, {(1,) * n: 3})
        ctx = CountedContext()
        eval_multi(ctx, prepare_multi(p, 3), [2] * n)
        totals.append(ctx.snapshot().total())
    steps = {b - a for a, b in zip(totals, totals[1:])}
    assert len(steps) == 1  # exactly linear in n


# -- adaptive -------------------------------------------------------------

def test_eval_adaptive_examples():
    ctx = CountedContext()
    ap = prepare_adaptive(Poly((3, 2, 1)))
    assert eval_adaptive(ctx, ap, 2) == 11
    assert eval_adaptive(ctx, ap, 10**6) == 10**12 + 2 * 10**6 + 3
    const = prepare_adaptive(Poly((42,)))
    assert all(eval_adaptive(ctx, const, x) == 42 for x in (0, 1, 2**100))


def test_eval_adaptive_degree64_regression():
    rng = random.Random(64)
    p = Poly(tuple(rng.randint(0, 15) for _ in range(64)) + (1,))
    x = rng.getrandbits(256)
    ctx = CountedContext()
    assert eval_adaptive(ctx, prepare_adaptive(p), x) == eval_horner(CountedContext(), p, x)
    snap = ctx.snapshot()
    # measured: 29 = mul + div + and at d = 64
    assert snap["mul"] + snap["div"] + snap["and"] <= 5 * 6


@given(st.lists(st.integers(-50, 50), min_size=1, max_size=10), st.integers(-2**300, 2**300))
def test_eval_adaptive_property(coeffs, x):
    p = Poly(tuple(coeffs))
    assert eval_adaptive(CountedContext(), prepare_adaptive(p), x) == power_sum(p, x)


def test_eval_adaptive_huge_argument():
    rng = random.Random(16)
    p = Poly((5, 0, 3, 1))
    x = rng.getrandbits(1 << 16) | (1 << ((1 << 16) - 1))
    assert eval_adaptive(CountedContext(), prepare_adaptive(p), x) == power_sum(p, x)


def test_eval_adaptive_multi_examples():
    ctx = CountedContext()
    ap = prepare_adaptive_multi(MultiPoly(2, 2, {(1, 1): 1}))
    assert eval_adaptive_multi(ctx, ap, (3, 4)) == 12
    p = MultiPoly(2, 3, {(0, 0): -7, (2, 1): 4})
    assert eval_adaptive_multi(ctx, prepare_adaptive_multi(p), (0, 0)) == -7


def test_eval_adaptive_multi_random():
    rng = random.Random(24)
    ctx = CountedContext()
    for _ in range(5):
        p = random_multipoly(rng, 2, 4)
        ap = prepare_adaptive_multi(p)
        for _ in range(100):
            xs = [rng.randint(-2**80, 2**80) for _ in range(2)]
            assert eval_adaptive_multi(ctx, ap, xs) == p.at(xs)


@pytest.mark.parametrize("k,m", [(k, m) for k in range(1, 9) for m in range(k, 9)])
def test_mask_identity_power_of_two(k, m):
    Y, Z = 1 << k, 1 << m
    for n in range(1, 5):
        if Y**n <= 1 << 16:
            q = np.array(list(itertools.product(range(Y), repeat=n)), dtype=np.uint64)
        else:
            q = np.random.default_rng(k * 64 + m).integers(0, Y, size=(1 << 16, n), dtype=np.uint64)
        powers = np.array([Z**j for j in range(n)], dtype=np.uint64)
        packed = (q * powers).sum(axis=1)
        for j in range(n):
            assert np.array_equal(packed & np.uint64((Y - 1) * Z**j), q[:, j] * powers[j])


def test_mask_identity_fails_off_power_of_two():
    # the mask reading is only valid for power-of-two radices
    Y, Z, q = 4, 12, (0, 1)
    packed = q[0] + q[1] * Z
    assert packed & ((Y - 1) * Z) != q[1] * Z


# -- power tower ----------------------------------------------------------

def test_pow_tower_examples():
    ctx = CountedContext()
    assert pow_tower(ctx, 3, 4, 2 * 3**16) == 43046721
    assert pow_tower(ctx, 2, 1, 16) == 4
    ctx = CountedContext()
    assert pow_tower(ctx, 2, 9, 2**513) == 2**512
    snap = ctx.snapshot()
    assert snap["mul"] + snap["rem"] - 3 <= 3 * 3  # setup b^(2^3) is 3 squarings


def test_pow_tower_exhaustive_small():
    for a in range(6):
        for k in range(17):
            b = max(2 * a ** (1 << k), 2)
            assert pow_tower(CountedContext(), a, k, b) == a ** (1 << k)


def test_pow_tower_detects_small_witness():
    with pytest.raises(WitnessTooSmall):
        pow_tower(CountedContext(), 3, 9, 3**100)
