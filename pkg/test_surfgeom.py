#!/usr/bin/env python3
"""
Tests for surface geometry
Zariski decompositions, volumes and the effective cone on the shipped surfaces
"""

import dataclasses
import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from exactkernel import InputError, NotPseudoEffectiveError
from modelstore import ModelStore
from surfgeom import (
    DivisorClass,
    bl2p2_chamber,
    bl2p2_volume_formula,
    intersect,
    is_nef,
    is_pseudo_effective,
    load_surface,
    pseff_threshold,
    volume,
    zariski_surface,
)

STORE = ModelStore(Path(__file__).parent / "models")


def surface(name: str):
    return load_surface(STORE.resolve(name))


def random_effective(lattice, rng: random.Random) -> DivisorClass:
    total = DivisorClass((0,) * lattice.rank)
    for g in lattice.eff_generators:
        total = total + DivisorClass(g) * Fraction(rng.randint(0, 4), rng.randint(1, 3))
    return total


def test_dp4_lattice():
    dp4 = surface("dp4")
    K = dp4.divisor("-K")
    assert intersect(dp4, K, K) == 4
    assert intersect(dp4, "L1", "L1") == -1
    assert intersect(dp4, "L1", "L2") == 1
    assert intersect(dp4, "Gamma", "Gamma") == 0
    assert intersect(dp4, K, "Gamma") == 2
    assert len(dp4.eff_generators) == 16
    assert is_nef(dp4, K)


def test_bl2p2_volume_example():
    bl2p2 = surface("bl2p2")
    assert volume(bl2p2, [3, -2, -2]) == 2
    assert bl2p2_chamber(3, 2, 2) == "P"
    result = zariski_surface(bl2p2, [3, -2, -2])
    assert result.to_json(bl2p2)["negative"] == {"L12": "1"}


def test_bl2p2_chambers():
    assert bl2p2_chamber(1, 0, 0) == "nef"
    assert bl2p2_chamber(1, -1, -1) == "L"
    assert bl2p2_chamber(1, -1, 0) == "Q1"
    assert bl2p2_chamber(1, 0, -1) == "Q2"
    assert bl2p2_volume_formula(1, -1, 0) == 1


def test_bl2p2_formula_grid():
    bl2p2 = surface("bl2p2")
    grid = [(Fraction(b1, 2), Fraction(-9 + 2 * k, 9)) for b1 in range(-2, 3) for k in range(10)]
    assert len(grid) == 50
    for b1, b2 in grid:
        assert volume(bl2p2, [1, -b1, -b2]) == bl2p2_volume_formula(1, b1, b2), (b1, b2)


def test_f2_negative_section():
    f2 = surface("f2")
    result = zariski_surface(f2, [1, 1])
    assert result.to_json(f2)["negative"] == {"s": "1/2"}
    assert volume(f2, [1, 1]) == Fraction(1, 2)


def test_dp4_single_line_support():
    dp4 = surface("dp4")
    D = dp4.divisor("-K") + dp4.curve("L2") * 2
    result = zariski_surface(dp4, D)
    assert result.to_json(dp4)["negative"] == {"L2": "1"}
    assert volume(dp4, D) == 5


def test_not_pseudo_effective():
    bl2p2 = surface("bl2p2")
    assert not is_pseudo_effective(bl2p2, [-1, 0, 0])
    with pytest.raises(NotPseudoEffectiveError):
        zariski_surface(bl2p2, [-1, 0, 0])


def test_rank_mismatch():
    bl2p2 = surface("bl2p2")
    with pytest.raises(InputError):
        bl2p2.divisor([1, 2])
    with pytest.raises(InputError):
        bl2p2.divisor("nowhere")


def test_pseff_threshold():
    bl1p2 = surface("bl1p2")
    assert pseff_threshold(bl1p2, [1, 0], [0, -1]) == 1
    dp4 = surface("dp4")
    # -K - (3/2)L1 is half the sum of the five disjoint exceptional lines
    assert pseff_threshold(dp4, dp4.divisor("-K"), -dp4.curve("L1")) == Fraction(3, 2)


def test_malformed_surface():
    with pytest.raises(InputError):
        load_surface({"name": "broken", "diagonal": [1, -1]})
    with pytest.raises(InputError):
        load_surface({"name": "asym", "basis": ["a", "b"], "gram": [[0, 1], [2, 0]]})


def test_zariski_properties():
    rng = random.Random(2016)
    lattices = [surface(name) for name in ("bl1p2", "bl2p2", "f2", "dp4")]
    for k in range(500):
        lattice = lattices[k % len(lattices)]
        D = random_effective(lattice, rng)
        result = zariski_surface(lattice, D)
        P = result.positive
        # reconstruction
        assert P + result.negative_class(lattice) == D
        # nef and orthogonal to the support
        assert is_nef(lattice, P)
        for i in result.support:
            assert intersect(lattice, P, lattice.tracked_curves[i]) == 0
            assert result.coefficient(i) > 0
        # idempotence
        assert not zariski_surface(lattice, P).negative
        # homogeneity of the volume
        assert volume(lattice, D * 2) == 4 * volume(lattice, D)


def test_zariski_order_independence():
    rng = random.Random(7)
    dp4 = surface("dp4")
    order = list(range(len(dp4.curve_names)))
    rng.shuffle(order)
    shuffled = dataclasses.replace(
        dp4,
        curve_names=tuple(dp4.curve_names[i] for i in order),
        tracked_curves=tuple(dp4.tracked_curves[i] for i in order),
    )
    for _ in range(40):
        D = random_effective(dp4, rng)
        a = zariski_surface(dp4, D)
        b = zariski_surface(shuffled, D)
        assert a.positive == b.positive
        assert a.to_json(dp4)["negative"] == b.to_json(shuffled)["negative"]


def test_volume_root_is_superadditive():
    # vol^(1/2) is concave on the big cone: sqrt(vol(A+B)) >= sqrt(vol A) + sqrt(vol B)
    rng = random.Random(11)
    bl2p2 = surface("bl2p2")
    for _ in range(60):
        A = random_effective(bl2p2, rng) + bl2p2.divisor([1, 0, 0])
        B = random_effective(bl2p2, rng) + bl2p2.divisor([1, 0, 0])
        va, vb, vab = volume(bl2p2, A), volume(bl2p2, B), volume(bl2p2, A + B)
        assert va > 0 and vb > 0
        gap = vab - va - vb
        assert gap >= 0
        assert gap * gap >= 4 * va * vb


def main():
    """Run all tests"""
    print("🔍 Fanocheck Surface Geometry Tests")
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
