from __future__ import annotations

import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trifold.cyclotomic import Cyclotomic, cyclotomic_poly, phi, reduce_ring, root_over_one_minus_root


def test_small_cyclotomic_polynomials():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)


@pytest.mark.parametrize("n", [1, 2, 5, 8, 9, 12, 24, 30])
def test_phi(n):
    assert phi(n) == sum(1 for k in range(1, n + 1) if __import__("math").gcd(k, n) == 1)


def test_sum_of_roots_vanishes():
    for n in (2, 3, 5, 6, 8, 12):
        total = sum((Cyclotomic.root(n, k) for k in range(n)), Cyclotomic.rational(0))
        assert total == 0


def test_reduce_ring_matches_complex():
    vec = [3, -1, 4, 1, -5, 9, 2, -6]
    z = cmath.exp(2j * cmath.pi / 8)
    direct = sum(c * z ** k for k, c in enumerate(vec))
    red = reduce_ring(vec, 8)
    assert abs(sum(c * z ** k for k, c in enumerate(red)) - direct) < 1e-12


def test_mixed_conductors():
    i = Cyclotomic.root(4)
    w = Cyclotomic.root(3)
    x = i * w + w.conj()
    assert abs(x.to_complex() - (1j * cmath.exp(2j * cmath.pi / 3) + cmath.exp(-2j * cmath.pi / 3))) < 1e-12


def test_rational_roundtrip():
    q = Cyclotomic.rational(Fraction(-7, 3))
    assert q.is_rational() and q.as_fraction() == Fraction(-7, 3)
    assert not q.is_integral()
    assert (Cyclotomic.root(5) + Cyclotomic.root(5).conj()).real_part() == Cyclotomic.root(5) + Cyclotomic.root(5, 4)


def test_galois_action():
    z = Cyclotomic.root(7)
    assert z.galois(3) == Cyclotomic.root(7, 3)
    assert z.galois(-1) == z.conj()


def test_division_by_rational():
    a = Cyclotomic.root(5) * 6 + 2
    assert a / 2 == Cyclotomic.root(5) * 3 + 1
    assert abs((a / Fraction(4, 3)).to_complex() - a.to_complex() * 0.75) < 1e-12


@pytest.mark.parametrize("n,t", [(2, 1), (5, 2), (8, 3), (12, 4), (9, 6)])
def test_root_over_one_minus_root(n, t):
    vec = root_over_one_minus_root(n, t)
    w = cmath.exp(2j * cmath.pi * t / n)
    z = cmath.exp(2j * cmath.pi / n)
    got = sum(float(c) * z ** k for k, c in enumerate(vec))
    assert abs(got - w / (1 - w)) < 1e-12


coeffs = st.lists(st.integers(-5, 5), min_size=1, max_size=6)


@settings(max_examples=60, deadline=None)
@given(coeffs, coeffs, st.sampled_from([3, 4, 5, 6, 8, 12]))
def test_ring_axioms_against_complex(a, b, n):
    x = Cyclotomic.from_ring(n, (a + [0] * n)[:n])
    y = Cyclotomic.from_ring(n, (b + [0] * n)[:n])
    for got, want in ((x + y, x.to_complex() + y.to_complex()),
                      (x * y, x.to_complex() * y.to_complex()),
                      (x - y, x.to_complex() - y.to_complex()),
                      (x.conj(), x.to_complex().conjugate())):
        assert abs(got.to_complex() - want) < 1e-9
    assert x * y == y * x
    assert hash(x + y) == hash(y + x)
