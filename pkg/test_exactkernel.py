#!/usr/bin/env python3
"""
Tests for the exact kernel
Rationals, cyclotomic elements, field matrices and polygon integration
"""

import random
import sys
from fractions import Fraction

import pytest
import sympy
from sympy import QQ, Poly

from exactkernel import (
    U,
    V,
    CycloElement,
    FieldMatrix,
    IncompatibleFieldsError,
    InputError,
    MathematicalError,
    clip_polygon,
    convex_order,
    evaluate,
    format_rational,
    integrate_poly,
    integrate_polygon,
    mpoly_det,
    polygon_area,
    scalar_from_json,
    scalar_to_json,
    to_rational,
    zeta,
)


def test_to_rational():
    assert to_rational("3/4") == Fraction(3, 4)
    assert to_rational(-2) == Fraction(-2)
    assert to_rational(sympy.Rational(5, 7)) == Fraction(5, 7)
    assert format_rational(Fraction(10, 4)) == "5/2"
    with pytest.raises(InputError):
        to_rational("abc")
    with pytest.raises(InputError):
        to_rational(True)


def test_roots_of_unity():
    i = zeta(4)
    assert i * i == -1
    assert zeta(3) + zeta(3, 2) == -1
    sqrt2 = zeta(8) + zeta(8, 7)
    assert sqrt2 * sqrt2 == 2
    assert zeta(5) ** 5 == 1
    assert zeta(5).conjugate() == zeta(5, 4)


def test_conductor_folding():
    # Q(zeta_6) is stored as Q(zeta_3)
    assert zeta(6) == -zeta(3, 2)
    assert zeta(6).conductor == 3
    assert zeta(2) == -1


def test_mixed_conductors():
    assert zeta(4) * zeta(3) == zeta(12, 7)
    assert zeta(4) + 0 == zeta(4)
    assert 2 * zeta(5) - zeta(5) == zeta(5)
    with pytest.raises(IncompatibleFieldsError):
        zeta(7) + zeta(19)


def test_inverse_and_division():
    x = 1 + zeta(5)
    assert x * x.inverse() == 1
    assert (zeta(12) / zeta(12, 5)) == zeta(12, 8)
    assert zeta(8) ** -1 == zeta(8, 7)
    with pytest.raises(ZeroDivisionError):
        CycloElement.rational(0).inverse()


def test_hash_agrees_with_equality():
    a = zeta(4)
    b = zeta(4).promote(12)
    assert a == b
    assert hash(a) == hash(b)
    assert len({a, b, zeta(4, 3)}) == 2
    assert hash(CycloElement.rational(Fraction(1, 2))) == hash(Fraction(1, 2))
    # elements of a subfield written over a larger conductor
    for small, large in ((zeta(3), zeta(9, 3)), (zeta(4), zeta(16, 4)), (zeta(8, 3), zeta(16, 6)),
                         (1 + zeta(3), 1 + zeta(9, 3)), (zeta(12), zeta(36, 3))):
        assert small == large
        assert hash(small) == hash(large)
        assert len({small, large}) == 1
        assert large.minimal().conductor == small.conductor
    assert zeta(12, 3).minimal() == zeta(4)
    assert zeta(12, 3).minimal().conductor == 4
    assert zeta(9).minimal().conductor == 9


def test_galois_action():
    x = zeta(5) + 2 * zeta(5, 2)
    assert x.galois(2) == zeta(5, 2) + 2 * zeta(5, 4)
    with pytest.raises(InputError):
        x.galois(5)


def test_scalar_json():
    assert scalar_to_json(Fraction(-3, 2)) == "-3/2"
    z = 1 + zeta(5, 3)
    assert scalar_from_json(scalar_to_json(z)) == z
    assert scalar_from_json("7/9") == Fraction(7, 9)


def test_matrix_rank_and_det():
    m = FieldMatrix([[1, 2], [3, 4]])
    assert m.det() == -2
    assert FieldMatrix([[1, 2], [2, 4]]).rank() == 1
    i = zeta(4)
    c = FieldMatrix([[i, 1], [1, -i]])
    assert c.rank() == 1
    assert c.det() == 0


def test_matrix_solve_and_nullspace():
    m = FieldMatrix([[2, 1], [1, 3]])
    assert m.solve([3, 5]) == [Fraction(4, 5), Fraction(7, 5)]
    assert all(type(x) is Fraction for x in m.solve([3, 5]))
    assert type(m.det()) is Fraction
    assert all(type(x) is Fraction for r in m.rows for x in r)
    row = FieldMatrix([[1, 2, 3]])
    basis = row.nullspace()
    assert len(basis) == 2
    for vector in basis:
        assert row.apply(vector) == [0]
    with pytest.raises(MathematicalError):
        FieldMatrix([[1, 2], [2, 4]]).solve([1, 1])


def test_matrix_product():
    a = FieldMatrix([[1, 2], [0, 1]])
    b = FieldMatrix([[1, -2], [0, 1]])
    assert a @ b == FieldMatrix.identity(2)
    assert a.transpose() == FieldMatrix([[1, 0], [2, 1]])
    with pytest.raises(InputError):
        FieldMatrix([[1, 2], [3]])


def test_random_inverse_products():
    rng = random.Random(2016)
    for _ in range(20):
        rows = [[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(3)] for _ in range(3)]
        m = FieldMatrix(rows)
        if m.det() == 0:
            continue
        rhs = [Fraction(rng.randint(-9, 9)) for _ in range(3)]
        assert m.apply(m.solve(rhs)) == rhs


def test_polynomial_determinant():
    x, y = sympy.symbols("x y")
    p = lambda e: Poly(e, x, y, domain=QQ)
    det = mpoly_det([[p(x), p(y)], [p(y), p(x)]])
    assert det == p(x ** 2 - y ** 2)
    assert evaluate(det, (Fraction(3), Fraction(1))) == 8


def test_integrate_poly():
    assert integrate_poly(U ** 2, 0, 3) == 9
    assert integrate_poly(Poly(2 * U + 1, U, domain=QQ), Fraction(1, 2), 1) == Fraction(5, 4)
    assert integrate_poly(U, 1, 1) == 0
    with pytest.raises(InputError):
        integrate_poly(U, 2, 1)


def test_polygons():
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    triangle = [(0, 0), (1, 0), (0, 1)]
    assert polygon_area(square) == 1
    assert polygon_area(triangle) == Fraction(1, 2)
    assert len(convex_order(square + [(Fraction(1, 2), Fraction(1, 2))])) == 4
    half = clip_polygon(square, (-1, 0, Fraction(1, 2)))
    assert polygon_area(half) == Fraction(1, 2)


def test_integrate_polygon():
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    triangle = [(0, 0), (1, 0), (0, 1)]
    assert integrate_polygon(Poly(1, U, V, domain=QQ), square) == 1
    assert integrate_polygon(U, triangle) == Fraction(1, 6)
    assert integrate_polygon(U * V, square) == Fraction(1, 4)
    # (2 - u - v)^2 over the triangle u, v >= 0, u + v <= 2
    assert integrate_polygon((2 - U - V) ** 2, [(0, 0), (2, 0), (0, 2)]) == Fraction(4, 3)


def main():
    """Run all tests"""
    print("🔍 Fanocheck Exact Kernel Tests")
    print("=" * 40)

    tests = [(name, func) for name, func in globals().items() if name.startswith("test_")]
    passed = 0
    for name, func in tests:
        try:
            func()
            print(f"✅ PASS {name}")
            passed += 1
        except Exception as e:
            print(f"❌ FAIL {name}: {e}")

    print(f"\nPassed: {passed}/{len(tests)} tests")
    sys.exit(0 if passed == len(tests) else 1)


if __name__ == "__main__":
    main()
