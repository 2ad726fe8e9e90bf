#!/usr/bin/env python3
"""
Fanocheck - Surface Geometry
Intersection lattices, Zariski decompositions and volumes of divisors on surfaces
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import cdd

from exactkernel import (
    FieldMatrix,
    InputError,
    NotEffectiveError,
    NotPseudoEffectiveError,
    format_rational,
    to_rational,
)

logger = logging.getLogger(__name__)

Vector = Tuple[Fraction, ...]


@dataclass(frozen=True)
class DivisorClass:
    coeffs: Vector

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(to_rational(c) for c in self.coeffs))

    def __len__(self):
        return len(self.coeffs)

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        _check_rank(self, other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        _check_rank(self, other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple(-a for a in self.coeffs))

    def __mul__(self, scalar: Any) -> "DivisorClass":
        scalar = to_rational(scalar)
        return DivisorClass(tuple(scalar * a for a in self.coeffs))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_json(self) -> List[str]:
        return [format_rational(c) for c in self.coeffs]


def _check_rank(a: DivisorClass, b: DivisorClass):
    if len(a.coeffs) != len(b.coeffs):
        raise InputError(f"rank mismatch: {len(a.coeffs)} vs {len(b.coeffs)}")


@dataclass(frozen=True)
class SurfaceLattice:
    """Curve-class basis with a symmetric intersection form and the negative-curve data"""

    name: str
    basis_names: Tuple[str, ...]
    gram: Tuple[Vector, ...]
    curve_names: Tuple[str, ...] = ()
    tracked_curves: Tuple[Vector, ...] = ()
    eff_generators: Optional[Tuple[Vector, ...]] = None
    classes: Tuple[Tuple[str, Vector], ...] = ()

    def __post_init__(self):
        rank = len(self.basis_names)
        gram = tuple(tuple(to_rational(x) for x in row) for row in self.gram)
        if len(gram) != rank or any(len(row) != rank for row in gram):
            raise InputError(f"{self.name}: gram matrix must be {rank}x{rank}")
        if any(gram[i][j] != gram[j][i] for i in range(rank) for j in range(rank)):
            raise InputError(f"{self.name}: gram matrix is not symmetric")
        curves = tuple(_vector(c, rank, self.name) for c in self.tracked_curves)
        if len(self.curve_names) != len(curves):
            raise InputError(f"{self.name}: {len(self.curve_names)} curve names for {len(curves)} curves")
        if any(not any(c) for c in curves):
            raise InputError(f"{self.name}: tracked curves must be nonzero classes")
        eff = None
        if self.eff_generators is not None:
            eff = tuple(_vector(g, rank, self.name) for g in self.eff_generators)
        classes = tuple((name, _vector(vec, rank, self.name)) for name, vec in self.classes)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "tracked_curves", curves)
        object.__setattr__(self, "eff_generators", eff)
        object.__setattr__(self, "classes", classes)

    @property
    def rank(self) -> int:
        return len(self.basis_names)

    def curve(self, name: str) -> DivisorClass:
        return DivisorClass(self.tracked_curves[self.curve_index(name)])

    def curve_index(self, name: str) -> int:
        try:
            return self.curve_names.index(name)
        except ValueError:
            raise InputError(f"{self.name}: unknown curve {name!r}")

    def named_class(self, name: str) -> DivisorClass:
        """A named class, a tracked curve or a basis element"""
        for key, vec in self.classes:
            if key == name:
                return DivisorClass(vec)
        if name in self.curve_names:
            return self.curve(name)
        if name in self.basis_names:
            unit = [Fraction(0)] * self.rank
            unit[self.basis_names.index(name)] = Fraction(1)
            return DivisorClass(tuple(unit))
        raise InputError(f"{self.name}: unknown class {name!r}")

    def divisor(self, spec: Union[DivisorClass, Sequence[Any], Dict[str, Any], str]) -> DivisorClass:
        """Build a class from a coefficient list, a {name: coefficient} map or a single name"""
        if isinstance(spec, DivisorClass):
            _check_rank(spec, DivisorClass((0,) * self.rank))
            return spec
        if isinstance(spec, str):
            return self.named_class(spec)
        if isinstance(spec, dict):
            total = DivisorClass((0,) * self.rank)
            for name, coeff in spec.items():
                total = total + self.named_class(name) * coeff
            return total
        return DivisorClass(_vector(spec, self.rank, self.name))

    def describe(self, D: DivisorClass) -> str:
        terms = []
        for name, c in zip(self.basis_names, D.coeffs):
            if c:
                terms.append(f"{c}*{name}")
        return " + ".join(terms) or "0"


def _vector(values: Iterable[Any], rank: int, where: str) -> Vector:
    vec = tuple(to_rational(v) for v in values)
    if len(vec) != rank:
        raise InputError(f"{where}: rank mismatch, expected {rank} coefficients, got {len(vec)}")
    return vec


@dataclass(frozen=True)
class ZariskiResult:
    positive: DivisorClass
    negative: Tuple[Tuple[int, Fraction], ...]
    support: frozenset = field(default_factory=frozenset)

    def coefficient(self, index: int) -> Fraction:
        for i, a in self.negative:
            if i == index:
                return a
        return Fraction(0)

    def negative_class(self, lattice: SurfaceLattice) -> DivisorClass:
        total = DivisorClass((0,) * lattice.rank)
        for i, a in self.negative:
            total = total + DivisorClass(lattice.tracked_curves[i]) * a
        return total

    def to_json(self, lattice: SurfaceLattice) -> Dict[str, Any]:
        return {
            "positive": self.positive.to_json(),
            "negative": {lattice.curve_names[i]: format_rational(a) for i, a in self.negative},
        }


# ------------------------------------------------------------------ products

def intersect(lattice: SurfaceLattice, a: Union[DivisorClass, Sequence[Any]],
              b: Union[DivisorClass, Sequence[Any]]) -> Fraction:
    a, b = lattice.divisor(a), lattice.divisor(b)
    total = Fraction(0)
    for i, x in enumerate(a.coeffs):
        if x:
            row = lattice.gram[i]
            for j, y in enumerate(b.coeffs):
                if y:
                    total += x * row[j] * y
    return total


def is_nef(lattice: SurfaceLattice, D: Union[DivisorClass, Sequence[Any]]) -> bool:
    D = lattice.divisor(D)
    return all(intersect(lattice, D, DivisorClass(C)) >= 0 for C in lattice.tracked_curves)


# ---------------------------------------------------------- effective cone

@lru_cache(maxsize=64)
def cone_facets(generators: Tuple[Vector, ...]) -> Tuple[Vector, ...]:
    """Inward facet normals f (f.x >= 0) of the cone spanned by the generators

    Double description via pycddlib in exact fraction mode; the origin is
    passed as the single vertex so every returned inequality is homogeneous.
    """
    if not generators:
        raise InputError("empty generator list")
    dim = len(generators[0])
    rows = [[1] + [0] * dim] + [[0] + list(g) for g in generators]
    matrix = cdd.Matrix(rows, number_type="fraction")
    matrix.rep_type = cdd.RepType.GENERATOR
    inequalities = cdd.Polyhedron(matrix).get_inequalities()
    facets: List[Vector] = []
    for i in range(inequalities.row_size):
        row = [to_rational(x) for x in inequalities[i]]
        normal = tuple(row[1:])
        if not any(normal):
            continue
        facets.append(normal)
        if i in inequalities.lin_set:
            facets.append(tuple(-x for x in normal))
    logger.debug(f"Effective cone with {len(generators)} generators has {len(facets)} facets")
    return tuple(facets)


def _coordinate_dot(f: Vector, x: Vector) -> Fraction:
    return sum((a * b for a, b in zip(f, x)), Fraction(0))


def is_pseudo_effective(lattice: SurfaceLattice, D: Union[DivisorClass, Sequence[Any]]) -> bool:
    if lattice.eff_generators is None:
        raise InputError(f"{lattice.name}: no effective-cone generators supplied")
    D = lattice.divisor(D)
    return all(_coordinate_dot(f, D.coeffs) >= 0 for f in cone_facets(lattice.eff_generators))


def pseff_threshold(lattice: SurfaceLattice, base: Union[DivisorClass, Sequence[Any]],
                    direction: Union[DivisorClass, Sequence[Any]]) -> Fraction:
    """Largest t >= 0 with base + t*direction pseudo-effective"""
    if lattice.eff_generators is None:
        raise InputError(f"{lattice.name}: missing effective-cone data")
    base, direction = lattice.divisor(base), lattice.divisor(direction)
    if not is_pseudo_effective(lattice, base):
        raise NotEffectiveError(f"{lattice.describe(base)} on {lattice.name}")
    bound: Optional[Fraction] = None
    for f in cone_facets(lattice.eff_generators):
        slope = _coordinate_dot(f, direction.coeffs)
        if slope < 0:
            limit = _coordinate_dot(f, base.coeffs) / -slope
            bound = limit if bound is None else min(bound, limit)
    if bound is None:
        raise NotPseudoEffectiveError(f"direction {lattice.describe(direction)} never leaves the effective cone")
    return bound


# ------------------------------------------------------------------- Zariski

def _negative_definite(gram: Sequence[Sequence[Fraction]]) -> bool:
    for k in range(1, len(gram) + 1):
        minor = FieldMatrix([row[:k] for row in gram[:k]]).det()
        # leading minors of a negative definite form alternate, starting negative
        if minor == 0 or (minor > 0) != (k % 2 == 0):
            return False
    return True


def zariski_surface(lattice: SurfaceLattice, D: Union[DivisorClass, Sequence[Any]],
                    check_effective: bool = True) -> ZariskiResult:
    """Zariski decomposition D = P + sum a_i C_i by the iterate-solve-subtract loop

    The support accumulates across iterations; each round solves
    (D - sum a_i C_i) . C_j = 0 over the whole support.
    """
    D = lattice.divisor(D)
    if check_effective and lattice.eff_generators is not None and not is_pseudo_effective(lattice, D):
        raise NotPseudoEffectiveError(f"{lattice.describe(D)} lies outside the effective cone of {lattice.name}")
    curves = lattice.tracked_curves
    support: List[int] = []
    positive = D
    coefficients: List[Fraction] = []
    for _ in range(len(curves) + 1):
        negatives = [i for i, C in enumerate(curves)
                     if i not in support and intersect(lattice, positive, DivisorClass(C)) < 0]
        if not negatives:
            break
        support = sorted(set(support) | set(negatives))
        gram = [[intersect(lattice, DivisorClass(curves[i]), DivisorClass(curves[j])) for j in support]
                for i in support]
        if not _negative_definite(gram):
            names = [lattice.curve_names[i] for i in support]
            raise NotPseudoEffectiveError(f"support {names} is not negative definite")
        rhs = [intersect(lattice, D, DivisorClass(curves[j])) for j in support]
        coefficients = FieldMatrix(gram).solve(rhs)
        if any(a <= 0 for a in coefficients):
            raise NotPseudoEffectiveError(
                f"nonpositive coefficient in {[format_rational(a) for a in coefficients]}")
        positive = D
        for i, a in zip(support, coefficients):
            positive = positive - DivisorClass(curves[i]) * a
    else:
        raise NotPseudoEffectiveError(f"no termination after {len(curves) + 1} rounds")
    negative = tuple((i, a) for i, a in zip(support, coefficients))
    return ZariskiResult(positive=positive, negative=negative, support=frozenset(support))


def volume(lattice: SurfaceLattice, D: Union[DivisorClass, Sequence[Any]]) -> Fraction:
    """P.P of the Zariski positive part"""
    result = zariski_surface(lattice, D)
    return max(intersect(lattice, result.positive, result.positive), Fraction(0))


# ------------------------------------------- blow-up of P2 in two points

def bl2p2_chamber(a: Any, b1: Any, b2: Any) -> str:
    """Chamber of D = aL - b1*E1 - b2*E2 in the volume decomposition of Bl2P2"""
    a, b1, b2 = to_rational(a), to_rational(b1), to_rational(b2)
    if b1 >= 0 and b2 >= 0 and a - b1 - b2 >= 0:
        return "nef"
    if a - b1 - b2 < 0:
        return "P"
    if b1 < 0 and b2 < 0:
        return "L"
    if b1 < 0:
        return "Q1"
    return "Q2"


def bl2p2_volume_formula(a: Any, b1: Any, b2: Any) -> Fraction:
    """Closed-form volume of aL - b1*E1 - b2*E2 chamber by chamber"""
    a, b1, b2 = to_rational(a), to_rational(b1), to_rational(b2)
    chamber = bl2p2_chamber(a, b1, b2)
    if chamber == "nef":
        return a * a - b1 * b1 - b2 * b2
    if chamber == "P":
        return 2 * a * a - 2 * a * b1 - 2 * a * b2 + 2 * b1 * b2
    if chamber == "L":
        return a * a
    if chamber == "Q1":
        return a * a - b2 * b2
    return a * a - b1 * b1


# ---------------------------------------------------------------- model I/O

def load_surface(data: Dict[str, Any]) -> SurfaceLattice:
    """Build a lattice from a surface model document

    Curves, effective generators and named classes may be coefficient lists
    or {name: coefficient} maps over basis names and earlier curves.
    """
    try:
        name = data["name"]
        basis = tuple(data["basis"])
        if "gram" in data:
            gram = tuple(tuple(to_rational(x) for x in row) for row in data["gram"])
        else:
            diagonal = [to_rational(x) for x in data["diagonal"]]
            gram = tuple(tuple(diagonal[i] if i == j else Fraction(0) for j in range(len(basis)))
                         for i in range(len(basis)))
        skeleton = SurfaceLattice(name=name, basis_names=basis, gram=gram)

        curve_names: List[str] = []
        curve_vectors: List[Vector] = []
        for entry in data.get("curves", []):
            partial = SurfaceLattice(name=name, basis_names=basis, gram=gram,
                                     curve_names=tuple(curve_names), tracked_curves=tuple(curve_vectors))
            curve_names.append(entry["name"])
            curve_vectors.append(partial.divisor(entry["class"]).coeffs)
        with_curves = SurfaceLattice(name=name, basis_names=basis, gram=gram,
                                     curve_names=tuple(curve_names), tracked_curves=tuple(curve_vectors))
        classes = tuple((key, with_curves.divisor(value).coeffs)
                        for key, value in data.get("classes", {}).items())
        eff = None
        if "effective" in data:
            eff = tuple(with_curves.divisor(g).coeffs for g in data["effective"])
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed surface model: missing or invalid field {e}")
    lattice = SurfaceLattice(name=name, basis_names=basis, gram=skeleton.gram,
                             curve_names=tuple(curve_names), tracked_curves=tuple(curve_vectors),
                             eff_generators=eff, classes=classes)
    logger.info(f"Loaded surface {name}: rank {lattice.rank}, {len(curve_names)} tracked curves")
    return lattice
