#!/usr/bin/env python3
"""
Fanocheck - Cox Cone
Zariski decomposition from the degrees of Cox-ring generators in a rank-2 class group
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

from exactkernel import IdentityCheckError, InputError, NotEffectiveError, format_rational, to_rational

logger = logging.getLogger(__name__)

ClassVector2 = Tuple[Fraction, Fraction]
ORIGIN: ClassVector2 = (Fraction(0), Fraction(0))


def class_vector(value: Sequence[Any]) -> ClassVector2:
    coords = tuple(to_rational(x) for x in value)
    if len(coords) != 2:
        raise InputError(f"class group of rank {len(coords)} not supported, only rank 2")
    return coords


def cross(a: ClassVector2, b: ClassVector2) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def _dot(a: ClassVector2, b: ClassVector2) -> Fraction:
    return a[0] * b[0] + a[1] * b[1]


def primitive(vector: ClassVector2) -> ClassVector2:
    """Lowest integer terms of a nonzero rational direction"""
    if vector == ORIGIN:
        return ORIGIN
    lcd = vector[0].denominator * vector[1].denominator
    ints = [int(x * lcd) for x in vector]
    g = gcd(abs(ints[0]), abs(ints[1]))
    return (Fraction(ints[0] // g), Fraction(ints[1] // g))


def _same_ray(a: ClassVector2, b: ClassVector2) -> bool:
    return cross(a, b) == 0 and _dot(a, b) > 0


@dataclass(frozen=True)
class Sector:
    """Closed cone between two rays, first to second counterclockwise

    A ray has first == second and the zero cone has both at the origin.
    Spans up to a half-plane are allowed.
    """

    first: ClassVector2
    second: ClassVector2

    def __post_init__(self):
        first, second = primitive(class_vector(self.first)), primitive(class_vector(self.second))
        if (first == ORIGIN) != (second == ORIGIN):
            raise InputError("sector needs two nonzero rays or none")
        if first != ORIGIN:
            turn = cross(first, second)
            if turn < 0:
                raise InputError(f"non-convex sector from {first} to {second}")
            if turn == 0 and _dot(first, second) > 0:
                second = first
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)

    @classmethod
    def zero(cls) -> "Sector":
        return cls(ORIGIN, ORIGIN)

    @property
    def kind(self) -> str:
        if self.first == ORIGIN:
            return "zero"
        if self.first == self.second:
            return "ray"
        return "sector"

    @property
    def rays(self) -> List[ClassVector2]:
        if self.kind == "zero":
            return []
        if self.kind == "ray":
            return [self.first]
        return [self.first, self.second]

    @property
    def pointed(self) -> bool:
        return self.kind != "sector" or cross(self.first, self.second) > 0

    def contains(self, x: Sequence[Any]) -> bool:
        x = class_vector(x)
        if x == ORIGIN:
            return True
        if self.kind == "zero":
            return False
        if self.kind == "ray":
            return _same_ray(self.first, x)
        if cross(self.first, self.second) == 0:
            return cross(self.first, x) >= 0
        return cross(self.first, x) >= 0 and cross(x, self.second) >= 0

    def to_json(self) -> List[List[str]]:
        return [[format_rational(c) for c in ray] for ray in self.rays]


def cone(vectors: Sequence[Sequence[Any]]) -> Sector:
    """Conic hull of a finite set of class vectors; must be pointed"""
    directions: List[ClassVector2] = []
    for v in vectors:
        p = primitive(class_vector(v))
        if p != ORIGIN and p not in directions:
            directions.append(p)
    if not directions:
        return Sector.zero()
    first = next((d for d in directions if all(cross(d, x) >= 0 for x in directions)), None)
    second = next((d for d in directions if all(cross(x, d) >= 0 for x in directions)), None)
    if first is None or second is None or (first != second and cross(first, second) <= 0):
        raise InputError(f"cone over {[list(map(str, d)) for d in directions]} is not pointed")
    return Sector(first, second)


def sector_intersect(a: Sector, b: Sector) -> Sector:
    """Intersection of two convex sectors

    In the plane every extremal ray of the intersection is an extremal ray of
    one of the two inputs, so the candidates are the rays of each sector that
    lie in the other.
    """
    if a == b:
        return a
    candidates = [r for r in a.rays if b.contains(r)] + [r for r in b.rays if a.contains(r)]
    return cone(candidates)


def _generated_contains(generators: Sequence[ClassVector2], x: ClassVector2) -> bool:
    """Membership in cone(g1, g2), where the two generators may be opposite"""
    if x == ORIGIN:
        return True
    gens = [g for g in generators if g != ORIGIN]
    if not gens:
        return False
    if len(gens) == 1 or _same_ray(gens[0], gens[1]):
        return _same_ray(gens[0], x)
    g1, g2 = gens
    det = cross(g1, g2)
    if det == 0:
        return cross(g1, x) == 0
    s = cross(x, g2) / det
    t = cross(g1, x) / det
    return s >= 0 and t >= 0


def _meet(generators: Sequence[ClassVector2], other: Sector) -> Sector:
    """cone(generators) intersected with a pointed sector"""
    gens = [primitive(g) for g in generators if g != ORIGIN]
    candidates = [g for g in gens if other.contains(g)]
    candidates += [r for r in other.rays if _generated_contains(gens, r)]
    return cone(candidates)


def _smallest_shift(wD: ClassVector2, wi: ClassVector2, R: ClassVector2) -> Optional[Fraction]:
    """Smallest x >= 0 with wD = x*wi + y*R for some y >= 0, or None"""
    if R == ORIGIN:
        if cross(wD, wi) != 0:
            return None
        x = _dot(wD, wi) / _dot(wi, wi)
        return x if x >= 0 else None
    det = cross(wi, R)
    if det != 0:
        x = cross(wD, R) / det
        y = cross(wi, wD) / det
        return x if x >= 0 and y >= 0 else None
    if cross(wD, R) != 0:
        return None
    # all three collinear: wD = lam*d, wi = alpha*d, R = rho*d
    d = R
    lam, alpha, rho = (_dot(v, d) / _dot(d, d) for v in (wD, wi, R))
    if lam == 0 or (lam > 0) == (rho > 0):
        return Fraction(0)
    x = lam / alpha
    return x if x >= 0 else None


@dataclass(frozen=True)
class CoxDecomposition:
    positive: ClassVector2
    negative: ClassVector2
    mu: Tuple[Fraction, ...]
    taus: Tuple[Sector, ...] = ()

    def to_json(self) -> Dict[str, Any]:
        return {
            "wP": [format_rational(c) for c in self.positive],
            "wN": [format_rational(c) for c in self.negative],
            "mu": [format_rational(m) for m in self.mu],
        }


def _mu_for(wD: ClassVector2, W: Sequence[ClassVector2], i: int) -> Tuple[Fraction, Sector]:
    wi = W[i]
    others = cone([w for j, w in enumerate(W) if j != i])
    tau = _meet([wD, (-wi[0], -wi[1])], others)
    candidates = [x for R in tau.rays for x in [_smallest_shift(wD, wi, R)] if x is not None]
    if not candidates:
        # degenerate tau: land wD - x*wi on the boundary of the remaining cone instead
        boundary = others.rays or [ORIGIN]
        candidates = [x for R in boundary for x in [_smallest_shift(wD, wi, R)] if x is not None]
    if not candidates:
        raise NotEffectiveError(f"no admissible shift of {list(map(str, wD))} along generator {i + 1}")
    return min(candidates), tau


def zariski_cox(wD: Sequence[Any], W: Sequence[Sequence[Any]]) -> CoxDecomposition:
    """Split wD = wP + sum mu_i w_i from the generator degrees W

    Correctness assumes W lists the degrees of a minimal generating set of
    the Cox ring; duplicated degrees are handled one by one.
    """
    wD = class_vector(wD)
    W = [class_vector(w) for w in W]
    if not W:
        raise InputError("no generator degrees supplied")
    if any(w == ORIGIN for w in W):
        raise InputError("generator degrees must be nonzero")
    effective = cone(W)
    if not effective.contains(wD):
        raise NotEffectiveError(f"class {[str(c) for c in wD]} lies outside cone(W)")

    mu: List[Fraction] = []
    taus: List[Sector] = []
    for i in range(len(W)):
        value, tau = _mu_for(wD, W, i)
        mu.append(value)
        taus.append(tau)
        logger.debug(f"tau_{i + 1} rays {tau.to_json()}, mu_{i + 1} = {value}")

    for i in range(len(W)):
        for j in range(i + 1, len(W)):
            if W[i] == W[j] and mu[i] != mu[j]:
                raise IdentityCheckError(f"duplicate degree {W[i]} got mu {mu[i]} and {mu[j]}")

    wN = (sum((m * w[0] for m, w in zip(mu, W)), Fraction(0)),
          sum((m * w[1] for m, w in zip(mu, W)), Fraction(0)))
    wP = (wD[0] - wN[0], wD[1] - wN[1])
    logger.info(f"Cox decomposition of {[str(c) for c in wD]}: mu = {[str(m) for m in mu]}")
    return CoxDecomposition(positive=wP, negative=wN, mu=tuple(mu), taus=tuple(taus))
