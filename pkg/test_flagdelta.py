#!/usr/bin/env python3
"""
Tests for flag delta bounds
Ambient integrals on the threefold, chambered Zariski decompositions on the flag
surfaces and the bound for every shipped case
"""

import sys
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import pytest

from exactkernel import IdentityCheckError, InputError
from flagdelta import (
    PointData,
    QuotientCase,
    beta_threefold,
    blowup_config,
    blowup_lattice,
    chambered_zariski,
    delta_bound,
    flag_bound,
    format_report,
    integrate_by_slices,
    load_case,
    load_threefold,
    plt_bound,
    polygon_integral,
    pseff_threshold_2d,
    quotient_bound,
    s_threefold,
    s_w_curve,
    s_w_exceptional,
    s_w_point,
    s_w_point_on_exceptional,
    threefold_path,
)
from modelstore import ModelStore
from surfgeom import intersect, load_surface

F = Fraction
STORE = ModelStore(Path(__file__).parent / "models")


def threefold():
    return load_threefold(STORE.resolve("threefold_2_16"))


@lru_cache(maxsize=None)
def case(name: str):
    return load_case(STORE.resolve(f"case_{name.replace('-', '_')}"), STORE.resolve)


@lru_cache(maxsize=None)
def report(name: str):
    return delta_bound(case(name), validation_points=20)


@lru_cache(maxsize=None)
def chambers(name: str):
    return chambered_zariski(case(name).config, validation_points=20)


def subcase(rep, name: str):
    return next(s for s in rep.subcases if s.name == name)


def test_threefold_model():
    model = threefold()
    assert model.volume == 22
    assert model.cube((F(1), F(0))) == 4
    assert model.triple((F(1), F(0)), (F(0), F(1)), (F(0), F(1))) == -2


def test_threefold_path():
    model = threefold()
    path = threefold_path(model, model.anticanonical, (-1, 1))
    assert path.tau == 2
    assert s_threefold(model, path) == F(13, 22)
    assert beta_threefold(model, path) == F(9, 22)
    piece = path.piece_at(F(3, 2))
    assert piece.has_negative
    assert not path.piece_at(F(1, 2)).has_negative
    with pytest.raises(InputError):
        path.piece_at(3)


def test_threefold_self_test_rejects_bad_cube():
    data = dict(STORE.resolve("threefold_2_16"))
    data["self_test"] = {"class": ["2-u", "u-1"], "cube": "6*u**2-24*u+21"}
    with pytest.raises(IdentityCheckError):
        load_threefold(data)
    data = dict(STORE.resolve("threefold_2_16"))
    data["volume"] = 20
    with pytest.raises(IdentityCheckError):
        load_threefold(data)


def test_pseff_threshold_on_flag_surface():
    config = case("dp4-reducible-fiber").config
    assert pseff_threshold_2d(config, 0) == F(5, 2)
    assert pseff_threshold_2d(config, F(1, 2)) == 2
    assert pseff_threshold_2d(config, 1) == F(3, 2)
    assert pseff_threshold_2d(config, F(3, 2)) == F(3, 4)


def test_chambers_tile_the_domain():
    cz = chambers("dp4-reducible-fiber")
    assert cz.chambers
    for chamber in cz.chambers:
        assert chamber.area > 0
    chamber = cz.locate(F(1, 4), F(1, 4))
    assert chamber.contains(F(1, 4), F(1, 4))


def test_slices_agree_with_polygons():
    config = case("iskovskikh-fiber").config
    assert integrate_by_slices(config) == polygon_integral(chambers("iskovskikh-fiber"))


def test_dp4_reducible_fiber():
    rep = report("dp4-reducible-fiber")
    assert rep.values["S_X(S)"] == F(13, 22)
    assert rep.values["S(W;L1)"] == F(161, 176)
    expected = {
        "generic": F(0),
        "on-L2": F(3, 16),
        "on-e1": F(5, 176),
        "on-Gamma": F(1, 22),
        "Gamma-e1": F(13, 176),
        "Gamma-L2": F(41, 176),
    }
    for name, correction in expected.items():
        sub = subcase(rep, name)
        assert sub.values["base"] == F(69, 88), name
        assert sub.values["F_P"] == correction, name
    assert subcase(rep, "Gamma-L2").values["S(W;P)"] == F(179, 176)
    assert rep.bound == F(176, 171)
    assert rep.conclusive


def test_dp4_reducible_fiber_blowup():
    sub = subcase(report("dp4-reducible-fiber"), "Gamma-L2")
    assert sub.shape == "plt"
    assert sub.values["S(W;G)"] == F(85, 44)
    assert sub.values["S(W;G):ord"] == F(1, 22)
    assert sub.values["A_S(G)"] == 2
    for name, correction in (("O-generic", 0), ("O-on-L1", F(87, 176)),
                             ("O-on-L2", F(87, 176)), ("O-on-Gamma", F(9, 88))):
        assert sub.values[f"{name}:base"] == F(37, 88), name
        assert sub.values[f"{name}:F_O"] == correction, name
    assert sub.values["O-on-Gamma:S(W;O)"] == F(23, 44)
    assert sub.values["flag bound"] == F(176, 179)
    assert sub.values["plt bound"] == F(88, 85)
    assert sub.bound == F(88, 85)
    assert any("typo" in note for note in sub.notes)


def test_blowup_stage_step_by_step():
    c = case("dp4-reducible-fiber")
    assert s_w_curve(c.config, chambers("dp4-reducible-fiber")) == F(161, 176)
    point = next(p for p in c.config.points if p.name == "Gamma-L2")
    blown, model = blowup_config(c.config, point, c.blowup_for("Gamma-L2"))
    assert blown.curve == "G"
    cz = chambered_zariski(blown, validation_points=10)
    assert s_w_exceptional(blown, cz) == F(85, 44)
    on_gamma = next(p for p in blown.points if p.name == "O-on-Gamma")
    rep = s_w_point_on_exceptional(blown, cz, on_gamma)
    assert (rep.base, rep.correction, rep.total) == (F(37, 88), F(9, 88), F(23, 44))


def test_iskovskikh_fiber():
    rep = report("iskovskikh-fiber")
    assert rep.values["S(W;C)"] == F(19, 22)
    assert subcase(rep, "generic").values["S(W;P)"] == F(8, 11)
    assert rep.bound == F(22, 19)


def test_nonreduced_fiber_is_inconclusive():
    rep = report("nonreduced-fiber")
    assert rep.values["S(W;L)"] == F(31, 22)
    assert rep.bound == F(22, 31)
    assert not rep.conclusive
    assert "inconclusive" in format_report(rep)


def test_quotient_cases():
    expected = {
        "dp4-quotient-smooth": F(176, 161),
        "dp4-quotient-smooth-on-e": F(176, 169),
        "dp4-quotient-reducible": F(88, 85),
        "dp4-quotient-reducible-on-e": F(88, 89),
    }
    for name, bound in expected.items():
        c = case(name)
        assert isinstance(c, QuotientCase)
        assert quotient_bound(c) == bound, name
        assert report(name).bound == bound, name
    smooth = report("dp4-quotient-smooth").values
    assert smooth["quotient"] == F(13, 16)
    assert smooth["tail"] == F(9, 88)
    assert report("dp4-quotient-smooth-on-e").values["on_e"] == F(1, 22)
    assert report("dp4-quotient-reducible").values["quotient"] == F(19, 22)
    assert not report("dp4-quotient-reducible-on-e").conclusive


def test_point_must_lie_on_flag_curve():
    config = case("dp4-reducible-fiber").config
    with pytest.raises(InputError):
        s_w_point(config, chambers("dp4-reducible-fiber"), PointData(name="off", through=("L2",)))


def test_blowup_lattice():
    dp4 = load_surface(STORE.resolve("dp4"))
    point = PointData(name="x", through=("L1", "L2"))
    lattice, model = blowup_lattice(dp4, point)
    assert model.log_discrepancy == 2
    assert intersect(lattice, "G", "G") == -1
    assert intersect(lattice, "L1", "L1") == -2
    assert intersect(lattice, "L1", "G") == 1
    lattice, model = blowup_lattice(dp4, point, (1, 2), {"L1": 1, "L2": 1})
    assert model.log_discrepancy == 3
    assert model.g_square == F(-1, 2)
    assert model.different_order("axis-2") == F(1, 2)
    with pytest.raises(InputError):
        blowup_lattice(dp4, point, (1, 2))
    with pytest.raises(InputError):
        blowup_lattice(dp4, point, (2, 4), {"L1": 1, "L2": 1})
    with pytest.raises(InputError):
        blowup_lattice(dp4, point, (1, 1), {"L1": 1})


def test_bound_helpers():
    assert flag_bound(F(13, 22), F(161, 176), F(171, 176)) == F(176, 171)
    assert flag_bound(F(13, 22), F(31, 22), F(0)) == F(22, 31)
    assert plt_bound(F(13, 22), F(2), F(85, 44), [(F(0), F(23, 44))]) == F(88, 85)
    with pytest.raises(InputError):
        flag_bound(F(0), F(0), F(0))
    # enlarging any S-value never raises the bound
    base = (F(13, 22), F(161, 176), F(69, 88))
    for k in range(3):
        for extra in (F(1, 176), F(1, 3), F(2)):
            larger = list(base)
            larger[k] += extra
            assert flag_bound(*larger) <= flag_bound(*base)


def test_malformed_case():
    with pytest.raises(InputError):
        load_case({"name": "broken", "threefold": "threefold_2_16"}, STORE.resolve)
    data = dict(STORE.resolve("case_dp4_quotient_smooth"))
    data["fiber"] = "cuspidal"
    with pytest.raises(InputError):
        load_case(data, STORE.resolve)


def main():
    """Run all tests"""
    print("🔍 Fanocheck Flag Delta Tests")
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
