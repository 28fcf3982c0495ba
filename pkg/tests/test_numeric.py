import math
import random
from fractions import Fraction as F

import pytest

from realsort.numeric import (
    DomainError,
    EqualValuesError,
    ParseError,
    ScaleFactor,
    exp2_ceil,
    floor_scale,
    floor_shift,
    match_at_level,
    parse_real,
    separating_exponent,
    separating_level,
)


def pow2_ceil_by_doubling(m):
    p = 1
    while p < m:
        p *= 2
    return p


@pytest.mark.parametrize("m,expected", [(1, 1), (5, 8), (8, 8), (9, 16), (2, 2), (3, 4)])
def test_exp2_ceil_examples(m, expected):
    assert exp2_ceil(m).value == expected


def test_exp2_ceil_matches_doubling_on_large_values():
    rng = random.Random(3)
    for _ in range(500):
        m = rng.randrange(1, 1 << rng.randrange(1, 3000))
        assert exp2_ceil(m).value == pow2_ceil_by_doubling(m)


@pytest.mark.parametrize("m", [0, -4])
def test_exp2_ceil_rejects_nonpositive(m):
    with pytest.raises(DomainError):
        exp2_ceil(m)


@pytest.mark.parametrize(
    "r,f,expected",
    [(F(1, 3), 8, 2), (F(1, 2), 1, 0), (F(7, 8), 8, 7)],
)
def test_floor_scale_examples(r, f, expected):
    assert floor_scale(r, ScaleFactor(f.bit_length() - 1)) == expected


def test_floor_scale_agrees_with_math_floor():
    rng = random.Random(5)
    for _ in range(1000):
        q = rng.randrange(2, 10**30)
        r = F(rng.randrange(1, q), q)
        e = rng.randrange(0, 200)
        k = floor_scale(r, ScaleFactor(e))
        assert k == math.floor(r * 2**e)
        assert 0 <= k < 2**e


@pytest.mark.parametrize("r", [F(0), F(1), F(3, 2), F(-1, 2)])
def test_floor_scale_domain(r):
    with pytest.raises(DomainError):
        floor_scale(r, ScaleFactor(3))


def test_floor_shift_skips_domain_check():
    assert floor_shift(F(3, 2), 2) == 6


def test_scale_factor_rejects_negative_exponent():
    with pytest.raises(DomainError):
        ScaleFactor(-1)
    assert ScaleFactor(4) < ScaleFactor(5)
    assert int(ScaleFactor(10)) == 1024


def test_separating_level_three_quarters_one_quarter():
    L = separating_level(F(3, 4), F(1, 4))
    assert L.value == 4
    assert floor_scale(F(3, 4), L) == 3
    assert floor_scale(F(1, 4), L) == 1


def test_separating_level_half_third():
    # d = 1/6, floor(1/d) = 6, next power of two 8, doubled 16
    L = separating_level(F(1, 2), F(1, 3))
    assert L.value == 16
    assert (floor_scale(F(1, 2), L), floor_scale(F(1, 3), L)) == (8, 5)


def test_separating_level_thousandth():
    a, b = F(1, 2) + F(1, 1000), F(1, 2)
    L = separating_level(a, b)
    assert L.value == 2048
    assert math.floor(a * 2048) != math.floor(b * 2048)


def test_separating_level_is_symmetric():
    a, b = F(2, 7), F(5, 11)
    assert separating_level(a, b) == separating_level(b, a)


def test_separating_level_equal_values():
    with pytest.raises(EqualValuesError):
        separating_level(F(1, 3), F(1, 3))


def test_separating_exponent_tiny_gap():
    a = F(1, 3)
    b = a + F(1, 2**4096)
    s = separating_exponent(a, b)
    assert s == 4097
    assert floor_shift(a, s) != floor_shift(b, s)


def test_match_at_level_examples():
    assert match_at_level(F(1, 3), F(3, 8), ScaleFactor(2))
    assert not match_at_level(F(1, 3), F(3, 8), ScaleFactor(4))
    for e in (0, 1, 7, 300):
        assert match_at_level(F(5, 9), F(5, 9), ScaleFactor(e))


@pytest.mark.parametrize(
    "text,value",
    [
        ("3/4", F(3, 4)),
        ("-6/8", F(-3, 4)),
        ("0.125", F(1, 8)),
        ("-0.5", F(-1, 2)),
        ("12", F(12)),
        (".5", F(1, 2)),
        ("5.", F(5)),
        ("3e-4", F(3, 10000)),
        ("1.5E2", F(150)),
        ("  7/2  ", F(7, 2)),
        ("0.100000000000000000000000000001", F(10**29 + 1, 10**30)),
    ],
)
def test_parse_real(text, value):
    assert parse_real(text) == value


@pytest.mark.parametrize("text", ["", "abc", "1/0", "1/-2", "1.2.3", "e5", "--1", "1/2/3", "."])
def test_parse_real_rejects(text):
    with pytest.raises(ParseError):
        parse_real(text)
