import itertools
import math
from fractions import Fraction

import pytest
import sympy

from z2tower.arith import is_squarefree
from z2tower.biquad import (
    MINKOWSKI_LIMIT,
    BiquadField,
    OracleError,
    _square_root,
    kuroda_class_number,
    minkowski_class_number,
    prime_decomposition,
    two_part,
    unit_coordinates,
    unit_index,
)
from z2tower.quadform import ResourceError, fundamental_unit, quadratic_discriminant
from z2tower.tower import scan
from oracles import sympy_unit_index

SMALL_FIELDS = [
    BiquadField(m, n)
    for m, n in itertools.combinations([2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 23], 2)
]


def trace(x):
    return 4 * x[0]


def test_field_basics():
    K = BiquadField(2, 5289)
    assert K.radicands == (2, 5289, 10578)
    assert K.discriminant == 8 * 5289 * 42312
    assert BiquadField(6, 10).k == 15
    assert str(BiquadField(2, 3)) == "Q(sqrt2, sqrt3)"
    with pytest.raises(ValueError):
        BiquadField(4, 3)
    with pytest.raises(ValueError):
        BiquadField(3, 3)


@pytest.mark.parametrize("m,n", [(2, 3), (2, 5), (3, 5), (5, 13), (6, 10), (3, 7), (5, 21)])
def test_integral_basis_has_field_discriminant(m, n):
    K = BiquadField(m, n)
    basis = K.integral_basis
    assert all(K.is_integral(w) for w in basis)
    gram = sympy.Matrix(4, 4, lambda i, j: trace(K.mul(basis[i], basis[j])))
    assert gram.det() == K.discriminant


def test_char_poly_and_norm():
    K = BiquadField(2, 3)
    x = (Fraction(0), Fraction(1), Fraction(1), Fraction(0))  # sqrt2 + sqrt3
    assert K.char_poly(x) == [1, 0, -10, 0, 1]
    assert K.norm((Fraction(1), Fraction(1), Fraction(0), Fraction(0))) == 1
    assert not K.is_integral((Fraction(1, 2), Fraction(1, 2), Fraction(0), Fraction(0)))


@pytest.mark.parametrize("m,n,h,Q", [(2, 3, 1, 4), (2, 5, 1, 2), (3, 5, 1, 2), (2, 7, 1, 4), (5, 13, 1, 2)])
def test_kuroda_matches_minkowski(m, n, h, Q):
    K = BiquadField(m, n)
    res = kuroda_class_number(K)
    assert (res.h, res.Q) == (h, Q)
    assert minkowski_class_number(K) == res.h


def test_kuroda_worked_field():
    res = kuroda_class_number(BiquadField(2, 5289))
    assert res.h_2part == 4 and res.Q == 2
    assert res.subfield_class_numbers == (1, 2, 4)


def test_unit_index_witnesses_are_exact_and_index_is_a_subgroup_size():
    for K in SMALL_FIELDS + [BiquadField(2, 5289), BiquadField(2, 137 * 3 * 11)]:
        res = unit_index(K)
        assert res.Q in (1, 2, 4, 8)
        assert res.Q == 1 + len(res.witnesses)
        coords = [
            unit_coordinates(K, d, fundamental_unit(quadratic_discriminant(d))) for d in K.radicands
        ]
        for subset, sign, root in res.witnesses:
            assert all((4 * c).denominator == 1 for c in root)
            z = (Fraction(sign),) + (Fraction(0),) * 3
            for i in subset:
                z = K.mul(z, coords[i])
            assert K.mul(root, root) == z
        h = kuroda_class_number(K)
        assert h.Q * math.prod(h.subfield_class_numbers) % 4 == 0


@pytest.mark.parametrize("m,n", [(2, 3), (2, 5), (5, 34), (10, 17), (3, 7), (6, 10)])
def test_unit_index_matches_symbolic_membership(m, n):
    assert unit_index(BiquadField(m, n)).Q == sympy_unit_index(m, n)


def test_unit_index_can_be_one():
    res = unit_index(BiquadField(5, 34))
    assert res.Q == 1 and res.witnesses == []


def test_precision_ladder_failure_is_explicit():
    K = BiquadField(2, 3)
    root = (Fraction(10**40 + 7), Fraction(3), Fraction(5), Fraction(1))
    z = K.mul(root, K.mul(root, (Fraction(1),) + (Fraction(0),) * 3))
    with pytest.raises(OracleError):
        _square_root(K, z, max_bits=32, start_bits=16)
    assert _square_root(K, z, max_bits=1 << 12, start_bits=64) in (root, tuple(-c for c in root))


def test_minkowski_refuses_large_fields():
    K = BiquadField(2, 5289)
    assert K.minkowski_bound() > MINKOWSKI_LIMIT
    with pytest.raises(OracleError):
        minkowski_class_number(K)


def test_prime_decomposition():
    K = BiquadField(2, 3)
    assert prime_decomposition(K, 2) == (4, 1, 1)
    assert prime_decomposition(K, 3) == (2, 2, 1)  # ramified in Q(sqrt3), inert in Q(sqrt2)
    assert prime_decomposition(K, 23) == (1, 1, 4)
    assert prime_decomposition(K, 5) == (1, 2, 2)
    for K in SMALL_FIELDS:
        for ell in sympy.primerange(2, 60):
            e, f, g = prime_decomposition(K, ell)
            assert e * f * g == 4


def test_two_part():
    assert [two_part(n) for n in (1, 2, 12, 40, 7)] == [1, 2, 4, 8, 1]


def test_kuroda_resource_bound():
    with pytest.raises(ResourceError):
        kuroda_class_number(BiquadField(2, 5289), bound=1000)


def test_two_part_is_four_on_scan():
    for p, q, r in scan(500, 100, 100):
        assert kuroda_class_number(BiquadField(2, p * q * r)).h_2part == 4
