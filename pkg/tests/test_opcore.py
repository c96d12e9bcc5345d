import json
import random

import pytest
from hypothesis import given, strategies as st

from divram.errors import BothZero, ForbiddenOp, NegativeOperand, ZeroDivisor
from divram.opcore import (
    HEADLINE,
    PRIMITIVES,
    CountedContext,
    OpTally,
    Phantom,
    bitlen,
    div_rem,
    format_int,
    gcdex,
    parse_int,
    parse_ops,
    tally_snapshot,
)
from divram.packing import geom_series

big = st.integers(min_value=0, max_value=2**4096)


def test_div_rem_examples():
    ctx = CountedContext()
    assert div_rem(ctx, 7, 3) == (2, 1)
    assert div_rem(ctx, 2097152, 126) == (16644, 8)
    assert div_rem(ctx, 5, 5) == (1, 0)
    assert ctx.snapshot()["div"] == 3 and ctx.snapshot()["rem"] == 3


def test_single_output_wrappers_count_one_primitive():
    ctx = CountedContext()
    ctx.div(10, 3)
    ctx.rem(10, 3)
    assert dict(ctx.snapshot()) == {**dict.fromkeys(PRIMITIVES, 0), "div": 1, "rem": 1}


def test_div_errors():
    ctx = CountedContext()
    with pytest.raises(ZeroDivisor):
        div_rem(ctx, 1, 0)
    with pytest.raises(ZeroDivisionError):
        ctx.div(1, 0)
    with pytest.raises(NegativeOperand):
        ctx.rem(-1, 3)


@given(big, st.integers(min_value=1, max_value=2**4096))
def test_div_rem_property(a, b):
    q, r = div_rem(CountedContext(), a, b)
    assert a == q * b + r and 0 <= r < b


def test_div_rem_randomized_bulk():
    rng = random.Random(11)
    ctx = CountedContext()
    for _ in range(10_000):
        a = rng.getrandbits(rng.randint(1, 4096))
        b = rng.getrandbits(rng.randint(1, 4096)) or 1
        q, r = div_rem(ctx, a, b)
        assert a == q * b + r and 0 <= r < b


def test_power_of_two_division_path():
    ctx = CountedContext()
    a = (1 << 9000) + 12345
    assert div_rem(ctx, a, 1 << 4000) == divmod(a, 1 << 4000)
    huge = 3**30000
    assert div_rem(ctx, huge, 7**9000 + 2) == divmod(huge, 7**9000 + 2)


def test_gcdex_examples():
    ctx = CountedContext()
    g, s, t = gcdex(ctx, 12, 8)
    assert g == 4 and 12 * s + 8 * t == 4
    assert gcdex(ctx, 5, 0) == (5, 1, 0)
    g, s, t = gcdex(ctx, 1, 1)
    assert g == 1 and s + t == 1
    with pytest.raises(BothZero):
        gcdex(ctx, 0, 0)


@given(big, big)
def test_gcdex_bezout(a, b):
    if a == 0 and b == 0:
        return
    g, s, t = gcdex(CountedContext(), a, b)
    assert g == s * a + t * b
    assert a % g == 0 and b % g == 0


def test_gcdex_bulk_large_operands():
    rng = random.Random(5)
    ctx = CountedContext()
    for _ in range(10_000):
        a, b = rng.getrandbits(rng.randint(1, 600)), rng.getrandbits(rng.randint(1, 600))
        if a == b == 0:
            continue
        g, s, t = gcdex(ctx, a, b)
        assert g == s * a + t * b
    a, b = 3**20000 + 1, 5**15000 + 2
    g, s, t = gcdex(ctx, a, b)
    assert g == s * a + t * b


def test_bitlen():
    ctx = CountedContext()
    assert [bitlen(ctx, v) for v in (0, 1, 2**19)] == [0, 1, 20]
    assert ctx.snapshot()["shift"] == 3


def test_tally_snapshot():
    ctx = CountedContext()
    assert tally_snapshot(ctx).total(PRIMITIVES) == 0
    ctx.mul(3, 4)
    assert tally_snapshot(ctx) == {**dict.fromkeys(PRIMITIVES, 0), "mul": 1}


def test_geom_series_trace():
    # pow(100, 3) is two multiplications, then one sub and one div
    ctx = CountedContext()
    assert geom_series(ctx, 100, 3, 2) == 10000 + 300 + 9
    snap = ctx.snapshot()
    assert snap["div"] == 1 and snap["mul"] == 2 and snap["sub"] == 1
    assert snap.total() == 4


@given(*[st.dictionaries(st.sampled_from(PRIMITIVES), st.integers(0, 10**6)) for _ in range(3)])
def test_tally_merge_associative_commutative(a, b, c):
    ta, tb, tc = OpTally(a), OpTally(b), OpTally(c)
    assert (ta + tb) + tc == ta + (tb + tc)
    assert ta + tb == tb + ta
    assert (ta + tb) - tb == ta


def test_tally_json_roundtrip():
    t = OpTally({"add": 3, "cmp": 2})
    assert OpTally.from_json(t.to_json()) == t
    assert set(json.loads(t.to_json())) == set(PRIMITIVES)
    assert t.total() == 3 and "cmp" not in HEADLINE


@pytest.mark.parametrize("call", [
    lambda c: c.div(4, 2), lambda c: c.rem(4, 2), lambda c: c.div_rem(4, 2),
    lambda c: c.and_(4, 2), lambda c: c.gcd(4, 2), lambda c: c.gcdex(4, 2),
])
def test_ring_only_context_rejects_non_arithmetic(call):
    ctx = CountedContext(ops="+,-,*")
    with pytest.raises(ForbiddenOp):
        call(ctx)
    assert ctx.add(1, 2) == 3 and ctx.sub(1, 2) == -1 and ctx.mul(2, 3) == 6


def test_each_primitive_individually_gated():
    calls = {
        "add": lambda c: c.add(1, 1), "sub": lambda c: c.sub(1, 1), "mul": lambda c: c.mul(1, 1),
        "div": lambda c: c.div(1, 1), "rem": lambda c: c.rem(1, 1), "and": lambda c: c.and_(1, 1),
        "gcd": lambda c: c.gcd(1, 1), "gcdex": lambda c: c.gcdex(1, 1),
    }
    for kind, call in calls.items():
        # the "div" token grants both div and rem
        others = [k for k in calls if k != kind and not (kind == "rem" and k == "div")]
        ctx = CountedContext(ops=others)
        with pytest.raises(ForbiddenOp) as err:
            call(ctx)
        assert err.value.kind == kind
        for k in others:
            calls[k](ctx)


def test_parse_ops_tokens():
    assert parse_ops("+,-,*,div") >= {"add", "sub", "mul", "div", "rem", "cmp", "shift"}
    assert "and" in parse_ops("&") and "and" not in parse_ops("+")
    with pytest.raises(ValueError):
        parse_ops("sqrt")


@given(st.integers(min_value=-2**5000, max_value=2**5000))
def test_int_string_roundtrip(v):
    assert parse_int(format_int(v)) == v
    assert parse_int(format_int(v, 16)) == v


def test_parse_int_forms():
    assert parse_int("0x1401") == 5121
    assert parse_int("-0x10") == -16
    assert format_int(0) == "0"
    with pytest.raises(ValueError):
        parse_int("12a")


def test_phantom_context_counts_without_materialising():
    ctx = CountedContext(max_bits=1000)
    x = ctx.pow(3, 2000)
    assert isinstance(x, Phantom) and x.bit_length() > 1000
    y = ctx.div(ctx.mul(x, x), 7)
    assert isinstance(y, Phantom)
    assert ctx.snapshot()["div"] == 1
