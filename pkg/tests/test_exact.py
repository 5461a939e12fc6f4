from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irrquiver import exact as ex
from irrquiver.exact import CQ

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
gauss = st.builds(CQ, rationals, rationals)


def test_parse_forms():
    assert CQ.parse("3/2") == CQ(Fraction(3, 2))
    assert CQ.parse("1/2-1i") == CQ(Fraction(1, 2), -1)
    assert CQ.parse("-3/2i") == CQ(0, Fraction(-3, 2))
    assert CQ.parse("i") == CQ(0, 1)
    assert CQ.parse("-i") == CQ(0, -1)


def test_format_roundtrip():
    for text in ["0", "3/2", "1/2-1i", "2i", "-7/3+5/4i"]:
        assert ex.format_scalar(CQ.parse(text)) == text


def test_floats_rejected():
    with pytest.raises(TypeError):
        CQ(0.5)
    with pytest.raises(TypeError):
        CQ.coerce(1j)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        CQ(1) / CQ(0)


@settings(max_examples=100)
@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if b:
        assert (a / b) * b == a
    assert complex(a * b) == pytest.approx(complex(a) * complex(b))


def test_int_and_fraction_equality_and_hash():
    assert CQ(3) == 3 and hash(CQ(3)) == hash(3)
    assert CQ(Fraction(1, 2)) == Fraction(1, 2)
    assert len({CQ(2), 2, Fraction(2)}) == 1


def _rand_exact(rng, m, n):
    return ex.exact_matrix([[CQ(int(rng.integers(-3, 4)), int(rng.integers(-3, 4))) for _ in range(n)] for _ in range(m)])


@pytest.mark.parametrize("seed", range(10))
def test_image_factorization_exact(seed):
    rng = np.random.default_rng(seed)
    m, n, r = 5, 4, int(rng.integers(0, 4))
    a = _rand_exact(rng, m, r).dot(_rand_exact(rng, r, n)) if r else ex.zeros(m, n)
    q, p = ex.image_factorization(a)
    assert ex.exact_equal(q.dot(p) if q.shape[1] else ex.zeros(m, n), a)
    assert q.shape[1] == ex.rank(a) == np.linalg.matrix_rank(ex.to_complex_array(a))


@pytest.mark.parametrize("seed", range(5))
def test_nullspace(seed):
    rng = np.random.default_rng(seed)
    a = _rand_exact(rng, 2, 5)
    k = ex.nullspace(a)
    assert k.shape[1] == 5 - ex.rank(a)
    assert all(v == 0 for v in a.dot(k).flat)


def test_shift_and_scale():
    a = ex.identity(2)
    assert ex.exact_equal(ex.shift(a, CQ(1)), ex.scale(a, 2))
