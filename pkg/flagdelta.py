#!/usr/bin/env python3
"""
Fanocheck - Flag Delta
Exact S-invariants along flags of surfaces and curves, and the local delta bounds built from them
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import QQ, Poly

from coxcone import Sector, cone, cross
from exactkernel import (
    U,
    V,
    ChamberValidationError,
    FieldMatrix,
    IdentityCheckError,
    InputError,
    NonPolynomialIntegrandError,
    NotEffectiveError,
    NotPseudoEffectiveError,
    affine_poly,
    clip_polygon,
    convex_order,
    evaluate,
    format_rational,
    from_sympy,
    integrate_poly,
    integrate_polygon,
    polygon_area,
    polygon_centroid,
    to_rational,
    to_sympy,
)
from surfgeom import (
    DivisorClass,
    SurfaceLattice,
    cone_facets,
    intersect,
    load_surface,
    pseff_threshold,
    zariski_surface,
)

logger = logging.getLogger(__name__)

Class2 = Tuple[Fraction, Fraction]
Affine1 = Tuple[Fraction, Fraction]                # c0 + c1*u
Affine2 = Tuple[Fraction, Fraction, Fraction]      # c + du*u + dv*v
Point2 = Tuple[Fraction, Fraction]
Vector = Tuple[Fraction, ...]

ZERO1: Affine1 = (Fraction(0), Fraction(0))
MAX_HALVINGS = 40
MAX_SPLIT_DEPTH = 30
MAX_FLOOD_ROUNDS = 12
PROBE_EXPONENTS = (6, 10, 16)


def _class2(value: Sequence[Any]) -> Class2:
    coords = tuple(to_rational(x) for x in value)
    if len(coords) != 2:
        raise InputError(f"threefold classes have two coordinates, got {len(coords)}")
    return coords


def _affine_at(a: Affine1, u: Fraction) -> Fraction:
    return a[0] + a[1] * u


def _affine2_at(a: Affine2, u: Fraction, v: Fraction) -> Fraction:
    return a[0] + a[1] * u + a[2] * v


def _poly_u(a: Affine1) -> Poly:
    return Poly(to_sympy(a[0]) + to_sympy(a[1]) * U, U, domain=QQ)


# ================================================================ threefold

@dataclass(frozen=True)
class ThreefoldModel:
    """Rank-2 threefold: basis (H, E), symmetric trilinear form and the two cones"""

    name: str
    labels: Tuple[str, str]
    tensor: Tuple[Fraction, Fraction, Fraction, Fraction]
    anticanonical: Class2
    nef_generators: Tuple[Class2, ...]
    eff_generators: Tuple[Class2, ...]

    def triple(self, a: Class2, b: Class2, c: Class2) -> Fraction:
        # symmetric tensor: the entry only depends on how many E slots are used
        total = Fraction(0)
        for i in (0, 1):
            for j in (0, 1):
                for k in (0, 1):
                    if a[i] and b[j] and c[k]:
                        total += a[i] * b[j] * c[k] * self.tensor[i + j + k]
        return total

    def cube(self, x: Class2) -> Fraction:
        return self.triple(x, x, x)

    def cube_poly(self, x: Tuple[Affine1, Affine1]) -> Poly:
        h, e = _poly_u(x[0]), _poly_u(x[1])
        t0, t1, t2, t3 = (to_sympy(t) for t in self.tensor)
        return h ** 3 * t0 + h ** 2 * e * (3 * t1) + h * e ** 2 * (3 * t2) + e ** 3 * t3

    @property
    def volume(self) -> Fraction:
        return self.cube(self.anticanonical)

    @property
    def nef_cone(self) -> Sector:
        return cone(self.nef_generators)

    @property
    def eff_cone(self) -> Sector:
        return cone(self.eff_generators)


@dataclass(frozen=True)
class PathPiece:
    lo: Fraction
    hi: Fraction
    positive: Tuple[Affine1, Affine1]
    negative: Tuple[Affine1, Affine1]

    def positive_at(self, u: Any) -> Class2:
        u = to_rational(u)
        return (_affine_at(self.positive[0], u), _affine_at(self.positive[1], u))

    def negative_at(self, u: Any) -> Class2:
        u = to_rational(u)
        return (_affine_at(self.negative[0], u), _affine_at(self.negative[1], u))

    @property
    def has_negative(self) -> bool:
        return any(a != ZERO1 for a in self.negative)


@dataclass(frozen=True)
class DivisorPath1D:
    base: Class2
    direction: Class2
    tau: Fraction
    pieces: Tuple[PathPiece, ...]

    def piece_at(self, u: Any) -> PathPiece:
        u = to_rational(u)
        for piece in self.pieces:
            if piece.lo <= u <= piece.hi:
                return piece
        raise InputError(f"u = {u} outside [0, {self.tau}]")


def threefold_path(model: ThreefoldModel, base: Sequence[Any], direction: Sequence[Any]) -> DivisorPath1D:
    """Zariski data of base + u*direction for u in [0, tau]"""
    base, direction = _class2(base), _class2(direction)
    eff, nef = model.eff_cone, model.nef_cone
    if eff.kind != "sector" or nef.kind == "zero":
        raise InputError(f"{model.name}: effective cone must be two-dimensional")
    if not eff.contains(base):
        raise NotEffectiveError(f"{[str(c) for c in base]} is not effective on {model.name}")

    def crossing(ray: Class2, flip: bool) -> Affine1:
        c0, c1 = cross(ray, base), cross(ray, direction)
        return (-c0, -c1) if flip else (c0, c1)

    tau: Optional[Fraction] = None
    for wall in (crossing(eff.first, False), crossing(eff.second, True)):
        if wall[1] < 0:
            limit = wall[0] / -wall[1]
            tau = limit if tau is None else min(tau, limit)
    if tau is None:
        raise NotPseudoEffectiveError(f"direction {[str(c) for c in direction]} never leaves the effective cone")

    breaks = {Fraction(0), tau}
    for ray in nef.rays:
        c0, c1 = crossing(ray, False)
        if c1 != 0 and 0 < -c0 / c1 < tau:
            breaks.add(-c0 / c1)
    points = sorted(breaks)
    if len(points) == 1:
        points = points * 2

    pieces = []
    for lo, hi in zip(points, points[1:]):
        mid = (lo + hi) / 2
        D_mid = (base[0] + mid * direction[0], base[1] + mid * direction[1])
        if nef.contains(D_mid):
            positive = ((base[0], direction[0]), (base[1], direction[1]))
            pieces.append(PathPiece(lo, hi, positive, (ZERO1, ZERO1)))
            continue
        if cross(nef.first, D_mid) < 0:
            e, n = eff.first, nef.first
        else:
            e, n = eff.second, nef.second
        det = cross(e, n)
        x = (cross(base, n) / det, cross(direction, n) / det)
        y_mid = cross(e, D_mid) / det
        if _affine_at(x, mid) < 0 or y_mid < 0:
            raise IdentityCheckError(f"{model.name}: projection onto the nef cone failed at u = {mid}")
        negative = ((x[0] * e[0], x[1] * e[0]), (x[0] * e[1], x[1] * e[1]))
        positive = ((base[0] - negative[0][0], direction[0] - negative[0][1]),
                    (base[1] - negative[1][0], direction[1] - negative[1][1]))
        pieces.append(PathPiece(lo, hi, positive, negative))
    logger.debug(f"{model.name}: tau = {tau}, breakpoints {[str(p) for p in points]}")
    return DivisorPath1D(base=base, direction=direction, tau=tau, pieces=tuple(pieces))


def s_threefold(model: ThreefoldModel, path: DivisorPath1D) -> Fraction:
    """(1/V) times the integral of P(u)^3 over [0, tau]"""
    total = Fraction(0)
    for piece in path.pieces:
        total += integrate_poly(model.cube_poly(piece.positive), piece.lo, piece.hi)
    return total / model.volume


def beta_threefold(model: ThreefoldModel, path: DivisorPath1D, log_discrepancy: Any = 1) -> Fraction:
    """A_X(S) - S_X(S); a prime divisor on X has log discrepancy 1"""
    return to_rational(log_discrepancy) - s_threefold(model, path)


def load_threefold(data: Dict[str, Any]) -> ThreefoldModel:
    try:
        labels = tuple(data["labels"])
        if len(labels) != 2 or any(len(label) != 1 for label in labels):
            raise InputError("threefold labels must be two single letters")
        tensor = [None] * 4
        for key, value in data["tensor"].items():
            if len(key) != 3 or any(ch not in labels for ch in key):
                raise InputError(f"bad tensor key {key!r}")
            tensor[key.count(labels[1])] = to_rational(value)
        if any(t is None for t in tensor):
            raise InputError("tensor needs all four entries")
        model = ThreefoldModel(
            name=data["name"],
            labels=labels,
            tensor=tuple(tensor),
            anticanonical=_class2(data["anticanonical"]),
            nef_generators=tuple(_class2(g) for g in data["nef"]),
            eff_generators=tuple(_class2(g) for g in data["effective"]),
        )
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed threefold model: missing or invalid field {e}")

    if "volume" in data and model.volume != to_rational(data["volume"]):
        raise IdentityCheckError(f"{model.name}: anticanonical volume {model.volume}, declared {data['volume']}")
    test = data.get("self_test")
    if test:
        coords = [sympy.sympify(c, locals={"u": U}) for c in test["class"]]
        t0, t1, t2, t3 = (to_sympy(t) for t in model.tensor)
        h, e = coords
        cube = t0 * h ** 3 + 3 * t1 * h ** 2 * e + 3 * t2 * h * e ** 2 + t3 * e ** 3
        expected = sympy.sympify(test["cube"], locals={"u": U})
        if sympy.expand(cube - expected) != 0:
            raise IdentityCheckError(f"{model.name}: self-test cube {sympy.expand(cube)} != {expected}")
    logger.info(f"Loaded threefold {model.name}: volume {model.volume}")
    return model


# ============================================================ flag surfaces

@dataclass(frozen=True)
class PointData:
    name: str
    through: Tuple[str, ...]
    multiplicities: Tuple[Tuple[str, Fraction], ...] = ()
    formal: bool = False
    note: str = ""

    def multiplicity(self, curve: str) -> Fraction:
        """Local intersection number at the point with the flag curve"""
        for name, m in self.multiplicities:
            if name == curve:
                return m
        return Fraction(1) if curve in self.through else Fraction(0)


@dataclass(frozen=True)
class RestrictedPiece:
    lo: Fraction
    hi: Fraction
    base: Vector
    slope: Vector
    negative: Tuple[Tuple[str, Affine1], ...]
    order: Affine1

    def class_at(self, u: Any) -> DivisorClass:
        return DivisorClass(self.base) + DivisorClass(self.slope) * u


@dataclass(frozen=True)
class FlagSurfaceConfig:
    """P(u)|_S and N(u)|_S on a surface, a curve C in it and points on C"""

    name: str
    lattice: SurfaceLattice
    curve: str
    volume: Fraction
    pieces: Tuple[RestrictedPiece, ...]
    points: Tuple[PointData, ...] = ()

    @property
    def flag_index(self) -> int:
        return self.lattice.curve_index(self.curve)

    @property
    def flag_class(self) -> DivisorClass:
        return self.lattice.curve(self.curve)

    @property
    def direction(self) -> DivisorClass:
        return -self.flag_class

    def piece_index(self, u: Any) -> int:
        u = to_rational(u)
        for i, piece in enumerate(self.pieces):
            if piece.lo <= u <= piece.hi:
                return i
        raise InputError(f"{self.name}: u = {u} outside the parameter domain")

    def divisor_at(self, index: int, u: Any, v: Any) -> DivisorClass:
        return self.pieces[index].class_at(u) + self.direction * v

    def point(self, name: str) -> PointData:
        for p in self.points:
            if p.name == name:
                return p
        raise InputError(f"{self.name}: unknown point {name!r}")


def _curve_terms(lattice: SurfaceLattice, spec: Any) -> Dict[str, Fraction]:
    if isinstance(spec, str):
        spec = {spec: 1}
    if not isinstance(spec, dict) or any(name not in lattice.curve_names for name in spec):
        raise InputError(f"{lattice.name}: restriction {spec!r} of a negative part must be a combination of tracked curves")
    return {name: to_rational(c) for name, c in spec.items()}


def restrict_to_flag(name: str, model: ThreefoldModel, path: DivisorPath1D, lattice: SurfaceLattice,
                     restriction: Dict[str, Any], curve: str, points: Sequence[PointData] = ()) -> FlagSurfaceConfig:
    """Restrict the threefold path to a surface S given the restrictions of H and E"""
    lattice.curve_index(curve)
    missing = [label for label in model.labels if label not in restriction]
    if missing:
        raise InputError(f"{name}: restriction missing for {missing}")
    images = [lattice.divisor(restriction[label]) for label in model.labels]
    pieces = []
    for piece in path.pieces:
        base = images[0] * piece.positive[0][0] + images[1] * piece.positive[1][0]
        slope = images[0] * piece.positive[0][1] + images[1] * piece.positive[1][1]
        negative: Dict[str, Affine1] = {}
        for label, coeff in zip(model.labels, piece.negative):
            if coeff == ZERO1:
                continue
            for curve_name, mult in _curve_terms(lattice, restriction[label]).items():
                old = negative.get(curve_name, ZERO1)
                negative[curve_name] = (old[0] + mult * coeff[0], old[1] + mult * coeff[1])
        order = negative.get(curve, ZERO1)
        pieces.append(RestrictedPiece(piece.lo, piece.hi, base.coeffs, slope.coeffs,
                                      tuple(sorted(negative.items())), order))
    for left, right in zip(pieces, pieces[1:]):
        u = left.hi
        if left.class_at(u) != right.class_at(u):
            raise InputError(f"{name}: restricted pieces disagree at u = {u}")
    for point in points:
        _check_point(lattice, curve, point)
    return FlagSurfaceConfig(name=name, lattice=lattice, curve=curve, volume=model.volume,
                             pieces=tuple(pieces), points=tuple(points))


def _check_point(lattice: SurfaceLattice, curve: str, point: PointData):
    if curve not in point.through:
        raise InputError(f"point {point.name!r} not on {curve}")
    for name in point.through:
        lattice.curve_index(name)
    if point.formal:
        return
    for name in point.through:
        if name != curve and intersect(lattice, lattice.curve(name), lattice.curve(curve)) <= 0:
            logger.warning(f"Point {point.name!r}: {name} and {curve} have no positive intersection")


def pseff_threshold_2d(config: FlagSurfaceConfig, u: Any) -> Fraction:
    """t(u): largest v with P(u)|_S - v*C pseudo-effective"""
    index = config.piece_index(u)
    return pseff_threshold(config.lattice, config.divisor_at(index, u, 0), config.direction)


# ================================================================== blow-up

@dataclass(frozen=True)
class PltBlowupModel:
    center: str
    exceptional: str
    weights: Tuple[int, int]
    g_square: Fraction
    multiplicities: Tuple[Tuple[str, Fraction], ...]
    orbifold_orders: Tuple[Tuple[str, int], ...] = ()

    @property
    def log_discrepancy(self) -> Fraction:
        """A_S(G)"""
        return Fraction(self.weights[0] + self.weights[1])

    def multiplicity(self, curve: str) -> Fraction:
        for name, m in self.multiplicities:
            if name == curve:
                return m
        return Fraction(0)

    def different_order(self, point: str) -> Fraction:
        """ord_O of the different on G: (n-1)/n at an orbifold point of order n"""
        for name, n in self.orbifold_orders:
            if name == point:
                return Fraction(n - 1, n)
        return Fraction(0)


@dataclass(frozen=True)
class BlowupSpec:
    weights: Tuple[int, int] = (1, 1)
    multiplicities: Tuple[Tuple[str, Fraction], ...] = ()
    orbifold: Tuple[Tuple[str, int], ...] = ()
    points: Tuple[PointData, ...] = ()


def blowup_lattice(surface: SurfaceLattice, point: PointData, weights: Tuple[int, int] = (1, 1),
                   multiplicities: Optional[Dict[str, Any]] = None, orbifold: Optional[Dict[str, int]] = None,
                   exceptional: str = "G") -> Tuple[SurfaceLattice, PltBlowupModel]:
    """Blow up a point, ordinary or weighted, and extend the lattice by the exceptional curve

    Old basis vectors stand for their pullbacks; tracked curves are replaced by
    strict transforms C - m_C*G.
    """
    w1, w2 = int(weights[0]), int(weights[1])
    if w1 < 1 or w2 < 1 or gcd(w1, w2) != 1:
        raise InputError(f"weights {weights} must be coprime positive integers")
    if exceptional in surface.curve_names or exceptional in surface.basis_names:
        raise InputError(f"exceptional name {exceptional!r} already used on {surface.name}")
    if multiplicities is None:
        if (w1, w2) != (1, 1):
            raise InputError("weighted blow-up needs explicit multiplicities")
        multiplicities = {name: 1 for name in point.through}
    mult = {name: to_rational(m) for name, m in multiplicities.items()}
    for name, m in mult.items():
        surface.curve_index(name)
        if (m > 0) != (name in point.through) or m < 0:
            raise InputError(f"inconsistent multiplicities: {name} has multiplicity {m} at {point.name}")
    for name in point.through:
        if mult.get(name, 0) <= 0:
            raise InputError(f"inconsistent multiplicities: {name} passes through {point.name} with multiplicity 0")

    g_square = Fraction(-1, w1 * w2)
    zero = Fraction(0)
    gram = tuple(row + (zero,) for row in surface.gram) + ((zero,) * surface.rank + (g_square,),)
    strict = []
    for name, vec in zip(surface.curve_names, surface.tracked_curves):
        strict.append(vec + (-mult.get(name, zero),))
    g_vector = (zero,) * surface.rank + (Fraction(1),)
    eff = None
    if surface.eff_generators is not None:
        by_vector = {vec: s for vec, s in zip(surface.tracked_curves, strict)}
        eff = [by_vector.get(g, g + (zero,)) for g in surface.eff_generators]
        eff += [s for name, s in zip(surface.curve_names, strict) if name in mult and s not in eff]
        eff.append(g_vector)
    lattice = SurfaceLattice(
        name=f"{surface.name}+{exceptional}",
        basis_names=surface.basis_names + (exceptional,),
        gram=gram,
        curve_names=surface.curve_names + (exceptional,),
        tracked_curves=tuple(strict) + (g_vector,),
        eff_generators=tuple(eff) if eff is not None else None,
        classes=tuple((key, vec + (zero,)) for key, vec in surface.classes),
    )
    orders = dict(orbifold or {})
    if not orbifold:
        for axis, w in (("axis-1", w1), ("axis-2", w2)):
            if w > 1:
                orders[axis] = w
    model = PltBlowupModel(
        center=point.name,
        exceptional=exceptional,
        weights=(w1, w2),
        g_square=g_square,
        multiplicities=tuple(sorted(mult.items())),
        orbifold_orders=tuple(sorted((k, int(n)) for k, n in orders.items())),
    )
    logger.info(f"Blew up {point.name} on {surface.name}: G^2 = {g_square}, A_S(G) = {model.log_discrepancy}")
    return lattice, model


def blowup_config(config: FlagSurfaceConfig, point: PointData, spec: BlowupSpec,
                  exceptional: str = "G") -> Tuple[FlagSurfaceConfig, PltBlowupModel]:
    """The flag data after blowing up the point, with G as the new flag curve"""
    lattice, model = blowup_lattice(config.lattice, point, spec.weights,
                                    dict(spec.multiplicities) or None, dict(spec.orbifold) or None, exceptional)
    pieces = []
    for piece in config.pieces:
        order = ZERO1
        for name, coeff in piece.negative:
            m = model.multiplicity(name)
            order = (order[0] + m * coeff[0], order[1] + m * coeff[1])
        pieces.append(RestrictedPiece(piece.lo, piece.hi, piece.base + (Fraction(0),),
                                      piece.slope + (Fraction(0),), piece.negative, order))
    for p in spec.points:
        _check_point(lattice, exceptional, p)
    blown = FlagSurfaceConfig(name=f"{config.name}/{point.name}", lattice=lattice, curve=exceptional,
                              volume=config.volume, pieces=tuple(pieces), points=spec.points)
    return blown, model


# ================================================================= chambers

@dataclass(frozen=True)
class Regime:
    support: Tuple[int, ...]
    coefficients: Tuple[Tuple[int, Affine2], ...]
    p_square: Poly
    p_dot: Tuple[Affine2, ...]

    def constraints(self) -> List[Tuple[Tuple[str, int], Affine2]]:
        """Affine functions that stay nonnegative inside the regime"""
        items = [(("coefficient", i), a) for i, a in self.coefficients]
        items += [(("dot", k), d) for k, d in enumerate(self.p_dot) if k not in self.support]
        return items


@dataclass(frozen=True)
class Chamber:
    piece: int
    polygon: Tuple[Point2, ...]
    regime: Regime

    @property
    def support(self) -> Tuple[int, ...]:
        return self.regime.support

    @property
    def area(self) -> Fraction:
        return polygon_area(self.polygon)

    def coefficient(self, index: int) -> Affine2:
        for i, a in self.regime.coefficients:
            if i == index:
                return a
        return (Fraction(0), Fraction(0), Fraction(0))

    def contains(self, u: Any, v: Any) -> bool:
        return _hull_contains(self.polygon, (to_rational(u), to_rational(v)))


@dataclass(frozen=True)
class ChamberedZariski:
    config_name: str
    regions: Tuple[Tuple[Point2, ...], ...]
    chambers: Tuple[Chamber, ...]

    def locate(self, u: Any, v: Any) -> Chamber:
        u, v = to_rational(u), to_rational(v)
        for chamber in self.chambers:
            if chamber.contains(u, v):
                return chamber
        raise InputError(f"({u}, {v}) outside the domain of {self.config_name}")


def _hull_contains(hull: Sequence[Point2], x: Point2) -> bool:
    if len(hull) < 3:
        return False
    for i in range(len(hull)):
        p, q = hull[i], hull[(i + 1) % len(hull)]
        if (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]) < 0:
            return False
    return True


def _regime(config: FlagSurfaceConfig, index: int, support: Sequence[int]) -> Regime:
    """Negative-part coefficients and positive-part data as affine functions of (u, v)"""
    lattice = config.lattice
    piece = config.pieces[index]
    support = tuple(sorted(support))
    curves = [DivisorClass(lattice.tracked_curves[i]) for i in support]
    parts = [DivisorClass(piece.base), DivisorClass(piece.slope), config.direction]
    solutions: List[List[Fraction]] = [[], [], []]
    if curves:
        gram = FieldMatrix([[intersect(lattice, a, b) for b in curves] for a in curves])
        solutions = [gram.solve([intersect(lattice, part, c) for c in curves]) for part in parts]
    coefficients = tuple((i, (solutions[0][k], solutions[1][k], solutions[2][k])) for k, i in enumerate(support))
    positive = []
    for slot, part in enumerate(parts):
        vec = part
        for k, c in enumerate(curves):
            vec = vec - c * solutions[slot][k]
        positive.append(vec)
    pc, pu, pv = positive
    sq = lambda a, b: to_sympy(intersect(lattice, a, b))
    p_square = Poly(sq(pc, pc) + 2 * sq(pc, pu) * U + 2 * sq(pc, pv) * V
                    + sq(pu, pu) * U ** 2 + 2 * sq(pu, pv) * U * V + sq(pv, pv) * V ** 2, U, V, domain=QQ)
    p_dot = tuple((intersect(lattice, pc, DivisorClass(c)), intersect(lattice, pu, DivisorClass(c)),
                   intersect(lattice, pv, DivisorClass(c))) for c in lattice.tracked_curves)
    return Regime(support=support, coefficients=coefficients, p_square=p_square, p_dot=p_dot)


def _pointwise(config: FlagSurfaceConfig, index: int, u: Fraction, v: Fraction):
    return zariski_surface(config.lattice, config.divisor_at(index, u, v))


def _region(config: FlagSurfaceConfig, index: int) -> Tuple[List[Point2], List[Affine2]]:
    """{lo <= u <= hi, 0 <= v, P(u)|_S - vC pseudo-effective} as a polygon and its half-planes"""
    lattice = config.lattice
    if lattice.eff_generators is None:
        raise InputError(f"{lattice.name}: missing effective-cone data")
    piece = config.pieces[index]
    direction = config.direction.coeffs
    dot = lambda f, x: sum((a * b for a, b in zip(f, x)), Fraction(0))
    halfplanes: List[Affine2] = [(-piece.lo, Fraction(1), Fraction(0)), (piece.hi, Fraction(-1), Fraction(0)),
                                 (Fraction(0), Fraction(0), Fraction(1))]
    ceiling: Optional[Fraction] = None
    for f in cone_facets(lattice.eff_generators):
        plane = (dot(f, piece.base), dot(f, piece.slope), dot(f, direction))
        halfplanes.append(plane)
        if plane[2] < 0:
            reach = max(_affine2_at(plane, u, Fraction(0)) for u in (piece.lo, piece.hi)) / -plane[2]
            ceiling = reach if ceiling is None else min(ceiling, reach)
    if ceiling is None:
        raise NotPseudoEffectiveError(f"{config.name}: P(u)|_S - vC is pseudo-effective for every v")
    top = max(ceiling, Fraction(0)) + 1
    polygon = [(piece.lo, Fraction(0)), (piece.hi, Fraction(0)), (piece.hi, top), (piece.lo, top)]
    for c, du, dv in halfplanes:
        polygon = clip_polygon(polygon, (du, dv, c))
    return polygon, halfplanes


def _chamber_polygon(region: Sequence[Point2], regime: Regime) -> List[Point2]:
    polygon = list(region)
    for _, (c, du, dv) in regime.constraints():
        polygon = clip_polygon(polygon, (du, dv, c))
        if not polygon:
            break
    return polygon


def _strictly_inside(halfplanes: Sequence[Affine2], u: Fraction, v: Fraction) -> bool:
    return all(_affine2_at(h, u, v) > 0 for h in halfplanes)


def _interior_points(polygon: Sequence[Point2], count: int, rng: random.Random) -> List[Point2]:
    points = [polygon_centroid(polygon)]
    while len(points) < count:
        weights = [Fraction(rng.randint(1, 1000)) for _ in polygon]
        total = sum(weights)
        points.append((sum((w * p[0] for w, p in zip(weights, polygon)), Fraction(0)) / total,
                       sum((w * p[1] for w, p in zip(weights, polygon)), Fraction(0)) / total))
    return points


def _validate(config: FlagSurfaceConfig, chamber: Chamber, points: Sequence[Point2]):
    lattice = config.lattice
    regime = chamber.regime
    for u, v in points:
        result = _pointwise(config, chamber.piece, u, v)
        if tuple(sorted(result.support)) != regime.support:
            raise ChamberValidationError((u, v), f"support {sorted(result.support)} != chamber {list(regime.support)}")
        for i, a in regime.coefficients:
            if result.coefficient(i) != _affine2_at(a, u, v):
                raise ChamberValidationError((u, v), f"coefficient of {lattice.curve_names[i]} differs")
        if intersect(lattice, result.positive, result.positive) != evaluate(regime.p_square, (u, v)):
            raise ChamberValidationError((u, v), "P^2 differs")
        for k, d in enumerate(regime.p_dot):
            if intersect(lattice, result.positive, DivisorClass(lattice.tracked_curves[k])) != _affine2_at(d, u, v):
                raise ChamberValidationError((u, v), f"P.{lattice.curve_names[k]} differs")


def chambered_zariski(config: FlagSurfaceConfig, grid_size: int = 6, validation_points: int = 100,
                      seed: int = 2016) -> ChamberedZariski:
    """Chamber decomposition of the (u, v) domain by support of the negative part

    Grid sampling only seeds the search for supports. Each support gives a
    regime whose walls are exact affine lines; chambers must tile the region
    and agree with pointwise decompositions at interior points.
    """
    rng = random.Random(seed)
    regions: List[Tuple[Point2, ...]] = []
    chambers: List[Chamber] = []
    for index, piece in enumerate(config.pieces):
        if piece.lo == piece.hi:
            regions.append(())
            continue
        region, halfplanes = _region(config, index)
        regions.append(tuple(region))
        region_area = polygon_area(region)
        if region_area == 0:
            continue
        regimes: Dict[Tuple[int, ...], Regime] = {}

        def discover(u: Fraction, v: Fraction) -> bool:
            support = tuple(sorted(_pointwise(config, index, u, v).support))
            if support in regimes:
                return False
            regimes[support] = _regime(config, index, support)
            return True

        width = piece.hi - piece.lo
        for i in range(grid_size):
            u = piece.lo + width * Fraction(2 * i + 1, 2 * grid_size)
            t = pseff_threshold_2d(config, u)
            for j in range(grid_size):
                if t > 0:
                    discover(u, t * Fraction(2 * j + 1, 2 * grid_size))

        for _ in range(MAX_FLOOD_ROUNDS):
            polygons = {s: _chamber_polygon(region, r) for s, r in regimes.items()}
            covered = sum((polygon_area(p) for p in polygons.values()), Fraction(0))
            if covered == region_area:
                break
            if covered > region_area:
                raise ChamberValidationError(polygon_centroid(region), f"chambers overlap: {covered} > {region_area}")
            found = False
            for polygon in polygons.values():
                hull = convex_order(polygon)
                for k in range(len(hull) if len(hull) >= 3 else 0):
                    p, q = hull[k], hull[(k + 1) % len(hull)]
                    mid = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
                    normal = (q[1] - p[1], p[0] - q[0])
                    for exponent in PROBE_EXPONENTS:
                        eps = Fraction(1, 2 ** exponent)
                        probe = (mid[0] + eps * normal[0], mid[1] + eps * normal[1])
                        if _strictly_inside(halfplanes, *probe) and discover(*probe):
                            found = True
                            break
            if not found:
                raise ChamberValidationError(polygon_centroid(region),
                                             f"chambers cover {covered} of {region_area}")
        else:
            raise ChamberValidationError(polygon_centroid(region), "chamber search did not settle")

        kept, dropped = [], []
        for support in sorted(polygons):
            polygon = polygons[support]
            target = kept if polygon_area(polygon) > 0 else dropped
            target.append(Chamber(piece=index, polygon=tuple(convex_order(polygon)), regime=regimes[support]))
        for chamber in dropped:
            for vertex in chamber.polygon:
                if not any(_hull_contains(c.polygon, vertex) for c in kept):
                    raise ChamberValidationError(vertex, "degenerate chamber not covered by its neighbours")
        for chamber in kept:
            _validate(config, chamber, _interior_points(chamber.polygon, validation_points, rng))
        chambers.extend(kept)
        logger.debug(f"{config.name}: piece [{piece.lo}, {piece.hi}] has {len(kept)} chambers")
    logger.info(f"Computed {len(chambers)} chambers for {config.name}")
    return ChamberedZariski(config_name=config.name, regions=tuple(regions), chambers=tuple(chambers))


# =============================================================== integrals

def _first_term(config: FlagSurfaceConfig) -> Fraction:
    """(3/V) * integral of (P(u)|_S)^2 * order(u) du"""
    lattice = config.lattice
    total = Fraction(0)
    for piece in config.pieces:
        if piece.order == ZERO1 or piece.lo == piece.hi:
            continue
        a, b = DivisorClass(piece.base), DivisorClass(piece.slope)
        square = Poly(to_sympy(intersect(lattice, a, a)) + 2 * to_sympy(intersect(lattice, a, b)) * U
                      + to_sympy(intersect(lattice, b, b)) * U ** 2, U, domain=QQ)
        total += integrate_poly(square * _poly_u(piece.order), piece.lo, piece.hi)
    return 3 * total / config.volume


def polygon_integral(cz: ChamberedZariski) -> Fraction:
    """Integral of P(u,v)^2 over the whole domain, chamber by chamber"""
    return sum((integrate_polygon(c.regime.p_square, c.polygon) for c in cz.chambers), Fraction(0))


def curve_integrals(config: FlagSurfaceConfig, cz: ChamberedZariski) -> Tuple[Fraction, Fraction]:
    """The two summands of S(W;C): the ord_C(N(u)|_S) term and the double integral"""
    return _first_term(config), 3 * polygon_integral(cz) / config.volume


def s_w_curve(config: FlagSurfaceConfig, cz: ChamberedZariski) -> Fraction:
    first, double = curve_integrals(config, cz)
    return first + double


@dataclass(frozen=True)
class PointReport:
    name: str
    base: Fraction
    correction: Fraction
    note: str = ""

    @property
    def total(self) -> Fraction:
        return self.base + self.correction


def s_w_point(config: FlagSurfaceConfig, cz: ChamberedZariski, point: PointData) -> PointReport:
    """Base (3/V)∫∫(P.C)^2 plus the local correction F_P at a point of C"""
    lattice = config.lattice
    _check_point(lattice, config.curve, point)
    flag = config.flag_index
    base = Fraction(0)
    correction = Fraction(0)
    for chamber in cz.chambers:
        dot = affine_poly(*chamber.regime.p_dot[flag])
        base += integrate_polygon(dot * dot, chamber.polygon)
        order = Poly(0, U, V, domain=QQ)
        for name, coeff in config.pieces[chamber.piece].negative:
            if name != config.curve and name in point.through:
                order += affine_poly(coeff[0], coeff[1]) * to_sympy(point.multiplicity(name))
        for i, a in chamber.regime.coefficients:
            name = lattice.curve_names[i]
            if name != config.curve and name in point.through:
                order += affine_poly(*a) * to_sympy(point.multiplicity(name))
        if not order.is_zero:
            correction += integrate_polygon(dot * order, chamber.polygon)
    return PointReport(name=point.name, base=3 * base / config.volume,
                       correction=6 * correction / config.volume, note=point.note)


def s_w_exceptional(config: FlagSurfaceConfig, cz: ChamberedZariski) -> Fraction:
    """S(W;G) on the blown-up surface; the flag curve of the config is G"""
    return s_w_curve(config, cz)


def s_w_point_on_exceptional(config: FlagSurfaceConfig, cz: ChamberedZariski, point: PointData) -> PointReport:
    return s_w_point(config, cz, point)


# ---------------------------------------------------- integration by slices

def _slice_end(config: FlagSurfaceConfig, index: int, regime: Regime, u: Fraction,
               v0: Fraction) -> Optional[Tuple[Fraction, Tuple, Affine1]]:
    """Where the regime starting at v0 ends on the slice at u, what ends it, and that wall as v = c + s*u

    None when the regime is not valid at v0 itself.
    """
    if any(_affine2_at(g, u, v0) < 0 for _, g in regime.constraints()):
        return None
    lattice = config.lattice
    piece = config.pieces[index]
    direction = config.direction.coeffs
    dot = lambda f, x: sum((a * b for a, b in zip(f, x)), Fraction(0))
    candidates = []
    for k, f in enumerate(cone_facets(lattice.eff_generators)):
        fv = dot(f, direction)
        if fv < 0:
            line = (dot(f, piece.base) / -fv, dot(f, piece.slope) / -fv)
            candidates.append((_affine_at(line, u), 0, ("top", k), line))
    for ident, (c, du, dv) in regime.constraints():
        if dv < 0:
            line = (c / -dv, du / -dv)
            root = _affine_at(line, u)
            if root > v0:
                candidates.append((root, 1, ident, line))
    end = min(candidates, key=lambda item: (item[0], item[1], item[2]))
    return end[0], end[2], end[3]


def _slice_walk(config: FlagSurfaceConfig, index: int, u: Fraction,
                cache: Dict[Tuple[int, ...], Regime]) -> Tuple[Fraction, Tuple, Tuple[Affine1, ...]]:
    """Exact ∫ P(u,v)^2 dv over [0, t(u)] by walking v with halving probes"""
    top = pseff_threshold_2d(config, u)
    v0 = Fraction(0)
    total = Fraction(0)
    signature = []
    walls = []
    while v0 < top:
        h = (top - v0) / 2
        for _ in range(MAX_HALVINGS):
            probe = v0 + h
            support = tuple(sorted(_pointwise(config, index, u, probe).support))
            if support not in cache:
                cache[support] = _regime(config, index, support)
            regime = cache[support]
            found = _slice_end(config, index, regime, u, v0)
            if found is not None and found[0] >= probe:
                end, ident, line = found
                break
            h /= 2
        else:
            raise ChamberValidationError((u, v0), "no stable regime above this point")
        end = min(end, top)
        inner = Poly(regime.p_square.as_expr().subs(U, to_sympy(u)), V, domain=QQ)
        total += integrate_poly(inner, v0, end, V)
        signature.append((support, ident))
        walls.append(line)
        v0 = end
    return total, tuple(signature), tuple(walls)


def _crossings(walls: Sequence[Affine1], a: Fraction, b: Fraction) -> List[Fraction]:
    found = []
    for (c1, s1), (c2, s2) in zip(walls, walls[1:]):
        if s1 != s2:
            u = (c2 - c1) / (s1 - s2)
            if a < u < b:
                found.append(u)
    return found


def _integrate_u(config: FlagSurfaceConfig, index: int, a: Fraction, b: Fraction, depth: int,
                 cache: Dict[Tuple[int, ...], Regime]) -> Fraction:
    samples = [a + (b - a) * Fraction(k, 6) for k in range(1, 6)]
    walks = [_slice_walk(config, index, u, cache) for u in samples]
    if len({w[1] for w in walks}) == 1:
        nodes = [(to_sympy(u), to_sympy(w[0])) for u, w in zip(samples[:4], walks[:4])]
        cubic = Poly(sympy.interpolate(nodes, U), U, domain=QQ)
        if from_sympy(cubic.eval(to_sympy(samples[4]))) != walks[4][0]:
            raise ChamberValidationError((samples[4], Fraction(0)), f"slice integral not cubic on [{a}, {b}]")
        return integrate_poly(cubic, a, b)
    if depth >= MAX_SPLIT_DEPTH:
        raise ChamberValidationError((a, Fraction(0)), f"slice signature keeps changing on [{a}, {b}]")
    k = next(k for k in range(4) if walks[k][1] != walks[k + 1][1])
    lo, hi = samples[k], samples[k + 1]
    candidates = _crossings(walks[k][2], lo, hi) + _crossings(walks[k + 1][2], lo, hi)
    split = min(candidates) if candidates else (lo + hi) / 2
    return (_integrate_u(config, index, a, split, depth + 1, cache)
            + _integrate_u(config, index, split, b, depth + 1, cache))


def integrate_by_slices(config: FlagSurfaceConfig) -> Fraction:
    """Integral of P(u,v)^2 by exact v-slices and cubic interpolation in u

    Independent of the chamber polygons; must agree with polygon_integral.
    """
    total = Fraction(0)
    for index, piece in enumerate(config.pieces):
        if piece.lo < piece.hi:
            total += _integrate_u(config, index, piece.lo, piece.hi, 0, {})
    return total


# =================================================================== bounds

def _reciprocal_min(terms: Sequence[Tuple[Fraction, Fraction]]) -> Fraction:
    """min of numerator/S over the terms with S > 0"""
    values = [num / s for num, s in terms if s > 0]
    if not values:
        raise InputError("no positive S-value to bound with")
    return min(values)


def flag_bound(s_x: Fraction, s_curve: Fraction, s_point: Fraction) -> Fraction:
    return _reciprocal_min([(Fraction(1), s_x), (Fraction(1), s_curve), (Fraction(1), s_point)])


def plt_bound(s_x: Fraction, log_discrepancy: Fraction, s_exceptional: Fraction,
              points: Sequence[Tuple[Fraction, Fraction]]) -> Fraction:
    """points: (ord_O of the different, S(W;O)) for every point class O on G"""
    terms = [(Fraction(1), s_x), (log_discrepancy, s_exceptional)]
    terms += [(1 - order, s) for order, s in points]
    return _reciprocal_min(terms)


@dataclass
class SubcaseReport:
    name: str
    shape: str
    bound: Fraction
    values: Dict[str, Fraction] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {"name": self.name, "shape": self.shape, "bound": format_rational(self.bound),
                "values": {k: format_rational(v) for k, v in self.values.items()}, "notes": self.notes}


@dataclass
class DeltaReport:
    case: str
    theorem: str
    values: Dict[str, Fraction]
    bound: Fraction
    subcases: List[SubcaseReport] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def conclusive(self) -> bool:
        return self.bound > 1

    def to_json(self) -> Dict[str, Any]:
        return {
            "case": self.case,
            "theorem": self.theorem,
            "bound": format_rational(self.bound),
            "conclusive": self.conclusive,
            "values": {k: format_rational(v) for k, v in self.values.items()},
            "subcases": [s.to_json() for s in self.subcases],
            "notes": self.notes,
        }


@dataclass(frozen=True)
class FlagCase:
    name: str
    model: ThreefoldModel
    flag_divisor: Class2
    config: FlagSurfaceConfig
    blowups: Tuple[Tuple[str, BlowupSpec], ...] = ()
    notes: Tuple[str, ...] = ()

    def blowup_for(self, point: str) -> Optional[BlowupSpec]:
        for name, spec in self.blowups:
            if name == point:
                return spec
        return None


@dataclass(frozen=True)
class QuotientCase:
    """Flag bound through imported local delta estimates of (S, -K_S + tC)"""

    name: str
    model: ThreefoldModel
    flag_divisor: Class2
    fiber: str
    on_e: bool
    bound: str
    degree: str
    parameter: str
    ambient_delta: Fraction
    notes: Tuple[str, ...] = ()


def _ambient_values(model: ThreefoldModel, flag_divisor: Class2) -> Tuple[DivisorPath1D, Dict[str, Fraction]]:
    direction = (-flag_divisor[0], -flag_divisor[1])
    path = threefold_path(model, model.anticanonical, direction)
    s_x = s_threefold(model, path)
    return path, {"tau": path.tau, "A_X(S)": Fraction(1), "S_X(S)": s_x, "beta(S)": 1 - s_x}


def _flag_report(case: FlagCase, grid_size: int, validation_points: int, seed: int) -> DeltaReport:
    config = case.config
    _, values = _ambient_values(case.model, case.flag_divisor)
    s_x = values["S_X(S)"]
    cz = chambered_zariski(config, grid_size, validation_points, seed)
    first, double = curve_integrals(config, cz)
    s_curve = first + double
    values.update({f"S(W;{config.curve}):ord": first, f"S(W;{config.curve}):area": double,
                   f"S(W;{config.curve})": s_curve})
    notes = list(case.notes)
    subcases = []
    for point in config.points:
        report = s_w_point(config, cz, point)
        sub = SubcaseReport(name=point.name, shape="flag", bound=flag_bound(s_x, s_curve, report.total),
                            values={"base": report.base, "F_P": report.correction, "S(W;P)": report.total})
        if point.note:
            sub.notes.append(point.note)
        spec = case.blowup_for(point.name)
        if spec is not None:
            blown, model = blowup_config(config, point, spec)
            bcz = chambered_zariski(blown, grid_size, validation_points, seed)
            g_first, g_double = curve_integrals(blown, bcz)
            s_g = g_first + g_double
            sub.values.update({"S(W;G):ord": g_first, "S(W;G):area": g_double, "S(W;G)": s_g,
                               "A_S(G)": model.log_discrepancy})
            on_g = []
            for o in blown.points:
                o_report = s_w_point(blown, bcz, o)
                order = model.different_order(o.name)
                on_g.append((order, o_report.total))
                sub.values.update({f"{o.name}:base": o_report.base, f"{o.name}:F_O": o_report.correction,
                                   f"{o.name}:S(W;O)": o_report.total})
                if order:
                    sub.values[f"{o.name}:ord_delta"] = order
                if o.note:
                    sub.notes.append(o.note)
            plt = plt_bound(s_x, model.log_discrepancy, s_g, on_g)
            sub.values["flag bound"] = sub.bound
            sub.values["plt bound"] = plt
            if plt > sub.bound:
                sub.shape, sub.bound = "plt", plt
        for note in sub.notes:
            logger.warning(f"{case.name}/{point.name}: {note}")
        subcases.append(sub)
    bound = min(s.bound for s in subcases) if subcases else flag_bound(s_x, s_curve, Fraction(0))
    shapes = sorted({s.shape for s in subcases})
    return DeltaReport(case=case.name, theorem="+".join(shapes) or "flag", values=values, bound=bound,
                       subcases=subcases, notes=notes)


def _polynomial_integrand(expr: Any, where: str) -> Poly:
    numerator, denominator = sympy.fraction(sympy.together(expr))
    quotient, remainder = sympy.div(Poly(numerator, U, domain=QQ), Poly(denominator, U, domain=QQ))
    if not remainder.is_zero:
        raise NonPolynomialIntegrandError(f"{where}: remainder {remainder.as_expr()}")
    return quotient


def quotient_terms(case: QuotientCase) -> Dict[str, Fraction]:
    """The u-integrals bounding S(W;F)/A_S(F) for every prime divisor F over S"""
    path, values = _ambient_values(case.model, case.flag_divisor)
    volume = case.model.volume
    t = sympy.Symbol("t")
    scope = {"t": t, "u": U}
    bound = sympy.sympify(case.bound, locals=scope)
    degree = sympy.sympify(case.degree, locals=scope)
    parameter = sympy.sympify(case.parameter, locals=scope)
    degree_at_zero = from_sympy(degree.subs(t, 0))
    quotient = tail = on_e = Fraction(0)
    for piece in path.pieces:
        if piece.lo == piece.hi:
            continue
        if not piece.has_negative:
            integrand = _polynomial_integrand((degree / bound).subs(t, parameter), case.name)
            quotient += integrate_poly(integrand, piece.lo, piece.hi)
            continue
        if piece.positive[1] != ZERO1:
            raise InputError(f"{case.name}: P(u) must be a multiple of {case.model.labels[0]} where N(u) != 0")
        scale = _poly_u(piece.positive[0])
        tail += integrate_poly(scale ** 3 * to_sympy(degree_at_zero / case.ambient_delta), piece.lo, piece.hi)
        on_e += integrate_poly(scale ** 2 * to_sympy(degree_at_zero) * _poly_u(piece.negative[1]),
                               piece.lo, piece.hi)
    values.update({"quotient": 3 * quotient / volume, "tail": 3 * tail / volume, "on_e": 3 * on_e / volume})
    return values


def quotient_bound(case: QuotientCase) -> Fraction:
    """gamma with S(W;F) <= A_S(F)/gamma for every F over S through the point"""
    terms = quotient_terms(case)
    total = terms["quotient"] + terms["tail"] + (terms["on_e"] if case.on_e else 0)
    return 1 / total


def _quotient_report(case: QuotientCase) -> DeltaReport:
    values = quotient_terms(case)
    total = values["quotient"] + values["tail"] + (values["on_e"] if case.on_e else 0)
    values["S(W;F)/A_S(F)"] = total
    gamma = 1 / total
    values["gamma"] = gamma
    bound = min(1 / values["S_X(S)"], gamma)
    notes = list(case.notes) + ["A_S(F) enters as a formal unit; the bound holds for every prime divisor F over S"]
    return DeltaReport(case=case.name, theorem="quotient", values=values, bound=bound, notes=notes)


def delta_bound(case: Any, grid_size: int = 6, validation_points: int = 100, seed: int = 2016) -> DeltaReport:
    if isinstance(case, QuotientCase):
        report = _quotient_report(case)
    elif isinstance(case, FlagCase):
        report = _flag_report(case, grid_size, validation_points, seed)
    else:
        raise InputError(f"unknown case type {type(case).__name__}")
    logger.info(f"Case {case.name}: delta bound {report.bound} ({report.theorem})")
    return report


# ================================================================ loading

def _point(name: str, data: Dict[str, Any]) -> PointData:
    return PointData(
        name=name,
        through=tuple(data["through"]),
        multiplicities=tuple((k, to_rational(m)) for k, m in data.get("multiplicities", {}).items()),
        formal=bool(data.get("formal", False)),
        note=data.get("note", ""),
    )


def load_case(data: Dict[str, Any], resolve: Callable[[str], Dict[str, Any]]) -> Any:
    """Build a FlagCase or QuotientCase; resolve(file) returns a referenced model document"""
    try:
        kind = data.get("kind", "flag")
        model = load_threefold(resolve(data["threefold"]))
        flag_divisor = _class2(data["flag_divisor"])
        if kind == "quotient":
            bounds = resolve(data["bounds"])
            fiber = data["fiber"]
            if fiber not in bounds["bounds"]:
                raise InputError(f"no imported bound for fiber type {fiber!r}")
            return QuotientCase(
                name=data["name"], model=model, flag_divisor=flag_divisor, fiber=fiber,
                on_e=bool(data["on_e"]), bound=bounds["bounds"][fiber], degree=bounds["degree"],
                parameter=bounds["parameter"], ambient_delta=to_rational(bounds["ambient_delta"]),
                notes=tuple(data.get("notes", [])),
            )
        if kind != "flag":
            raise InputError(f"unknown case kind {kind!r}")
        lattice = load_surface(resolve(data["surface"]))
        direction = (-flag_divisor[0], -flag_divisor[1])
        path = threefold_path(model, model.anticanonical, direction)
        points = []
        blowups = []
        for name, entry in data["points"].items():
            points.append(_point(name, entry))
            if "blowup" in entry:
                b = entry["blowup"]
                weights = tuple(int(w) for w in b.get("weights", [1, 1]))
                blowups.append((name, BlowupSpec(
                    weights=weights,
                    multiplicities=tuple((k, to_rational(m)) for k, m in b.get("multiplicities", {}).items()),
                    orbifold=tuple((k, int(n)) for k, n in b.get("orbifold", {}).items()),
                    points=tuple(_point(o, e) for o, e in b["points"].items()),
                )))
        config = restrict_to_flag(data["name"], model, path, lattice, data["restriction"], data["curve"], points)
        return FlagCase(name=data["name"], model=model, flag_divisor=flag_divisor, config=config,
                        blowups=tuple(blowups), notes=tuple(data.get("notes", [])))
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed case file: missing or invalid field {e}")


def format_report(report: DeltaReport) -> str:
    lines = [f"Case {report.case} ({report.theorem})", "=" * 40]
    for key, value in report.values.items():
        lines.append(f"  {key:<28} {format_rational(value):>12}")
    for sub in report.subcases:
        lines.append(f"  [{sub.name}] {sub.shape} bound {format_rational(sub.bound)}")
        for key, value in sub.values.items():
            lines.append(f"      {key:<26} {format_rational(value):>12}")
    lines.append(f"  delta_P(X) >= {format_rational(report.bound)}"
                 + ("" if report.conclusive else "  (inconclusive)"))
    for note in report.notes:
        lines.append(f"  note: {note}")
    return "\n".join(lines)
