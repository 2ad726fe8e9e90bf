#!/usr/bin/env python3
"""
Tests for the discriminant quartic
"""

import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from sympy import QQ, Poly

from exactkernel import ChartError, InputError, evaluate, mpoly_det
from modelstore import ModelStore
from quartic import (
    X,
    SingularPoint,
    discriminant,
    exceptional_surface_type,
    fiber_type,
    hessian_matrix,
    kstability_certificate,
    load_audit,
    load_pencil,
    quadric_matrix,
    singular_at,
    symbolic_identity,
)

STORE = ModelStore(Path(__file__).parent / "models")
x1, x2, x3 = X


def example():
    return load_pencil(STORE.resolve("pencil_example"))


def random_pencil(rng: random.Random):
    coeffs = lambda n: [rng.randint(-3, 3) for _ in range(n)]
    alpha1 = [rng.randint(1, 3)] + coeffs(2)
    return load_pencil({"alpha": [coeffs(6), alpha1, coeffs(3), coeffs(3)],
                        "beta": [coeffs(6), coeffs(3), coeffs(3), coeffs(3)]})


def test_symbolic_identity_constant():
    assert symbolic_identity() == -2


def test_example_discriminant():
    curve = discriminant(example())
    assert curve.delta == Poly(x1 ** 4 - 4 * x1 ** 2 * x2 * x3, *X, domain=QQ)
    assert curve.constant == -2
    assert curve.pivot == 1
    assert not curve.degenerate


def test_example_fibers():
    p = example()
    assert fiber_type(p, (1, 0, 0)) == "smooth"
    assert fiber_type(p, (2, 1, 1)) == "two_lines"
    assert fiber_type(p, (0, 0, 1)) == "double_line"
    with pytest.raises(InputError):
        fiber_type(p, (0, 0, 0))


def test_example_singular_points():
    curve = discriminant(example())
    for point in ((0, 0, 1), (0, 1, 0), (0, 1, 1)):
        assert singular_at(curve, point)
    # on the curve but smooth there
    assert not singular_at(curve, (2, 1, 1))
    assert not singular_at(curve, (1, 0, 0))


def test_kstability_certificate():
    curve = discriminant(example())
    points = load_audit(STORE.resolve("audit_example"))
    assert len(points) == 3
    cert = kstability_certificate(curve, points)
    assert cert.verdict == "K-stable"
    assert cert.route == "no-fixed-singular-points"
    assert kstability_certificate(curve, []).route == "smooth-discriminant"
    fixed = [SingularPoint(point=(Fraction(0), Fraction(0), Fraction(1)), defined_over_k=True, g_fixed=True)]
    assert kstability_certificate(curve, fixed).verdict == "inconclusive"
    bogus = [SingularPoint(point=(Fraction(1), Fraction(0), Fraction(0)), defined_over_k=True, g_fixed=True)]
    with pytest.raises(InputError):
        kstability_certificate(curve, bogus)


def test_exceptional_surface():
    assert exceptional_surface_type(example()) == "P1xP1"
    p = load_pencil({"alpha": ["0", "x1", "x1", "x2"], "beta": ["0", "0", "0", "0"]})
    assert exceptional_surface_type(p) == "F2"


def test_exceptional_surface_under_substitution():
    # x1 -> x1 + x2, x3 -> x1 + x3 is invertible, so the rank of alpha1..alpha3 is kept
    independent = load_pencil({"alpha": ["0", "x1 + x2", "x2", "x1 + x3"], "beta": ["0", "0", "0", "0"]})
    assert exceptional_surface_type(independent) == "P1xP1"
    dependent = load_pencil({"alpha": ["0", "x1 + x2", "x1 + x2", "x2"], "beta": ["0", "0", "0", "0"]})
    assert exceptional_surface_type(dependent) == "F2"
    with pytest.raises(InputError):
        exceptional_surface_type(load_pencil({"alpha": ["x1**2", "0", "0", "0"], "beta": ["0", "0", "0", "0"]}))


def test_hessian_at_every_pivot():
    p = example()
    curve = discriminant(p)
    for pivot in (1, 2, 3):
        det = mpoly_det(hessian_matrix(p, pivot))
        assert det == p.alpha[pivot] ** 4 * curve.delta * -2, pivot
    with pytest.raises(InputError):
        hessian_matrix(p, 0)


def test_pivot_fallback():
    p = load_pencil({"alpha": ["0", "0", "x2", "x3"], "beta": ["x1**2", "x1", "0", "0"]})
    matrix = quadric_matrix(p)
    assert len(matrix) == 3
    assert discriminant(p).pivot == 2
    with pytest.raises(ChartError):
        discriminant(load_pencil({"alpha": ["x1**2", "0", "0", "0"], "beta": ["0", "0", "0", "0"]}))


def test_malformed_pencil():
    with pytest.raises(InputError):
        load_pencil({"alpha": ["x1", "x1", "x2", "x3"], "beta": ["0", "0", "0", "0"]})
    with pytest.raises(InputError):
        load_pencil({"alpha": [[1, 2], "x1", "x2", "x3"], "beta": ["0", "0", "0", "0"]})
    with pytest.raises(InputError):
        load_pencil({"beta": ["0", "0", "0", "0"]})


def test_random_pencils_fiber_rank_matches_discriminant():
    rng = random.Random(2016)
    for _ in range(8):
        p = random_pencil(rng)
        curve = discriminant(p)
        for _ in range(10):
            point = tuple(rng.randint(-3, 3) for _ in range(3))
            if not any(point):
                continue
            try:
                kind = fiber_type(p, point)
            except ChartError:
                continue
            on_curve = evaluate(curve.delta, tuple(Fraction(c) for c in point)) == 0
            assert (kind == "smooth") == (not on_curve), point


def main():
    """Run all tests"""
    print("🔍 Fanocheck Quartic Tests")
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
