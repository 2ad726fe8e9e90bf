#!/usr/bin/env python3
"""
Fanocheck - Quartic
Discriminant quartic of the conic bundle cut out by a pencil of quadrics,
fiber types, the exceptional surface and the K-stability certificate
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import QQ, Poly

from exactkernel import (
    ChartError,
    CycloElement,
    DegeneratePencilError,
    FieldMatrix,
    IdentityCheckError,
    InputError,
    evaluate,
    format_rational,
    from_sympy,
    mpoly_det,
    scalar_from_json,
    scalar_to_json,
    to_rational,
    to_sympy,
)

logger = logging.getLogger(__name__)

X = sympy.symbols("x1 x2 x3")
QUADRATIC_MONOMIALS = ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))
LINEAR_MONOMIALS = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
FIBER_TYPES = {3: "smooth", 2: "two_lines", 1: "double_line"}


def _poly(expr: Any, gens: Sequence[sympy.Symbol] = X) -> Poly:
    return Poly(expr, *gens, domain=QQ)


@dataclass(frozen=True)
class PencilData:
    """Q1 = a0*x7 + a1*x4 + a2*x5 + a3*x6 and Q2 = b0*x7^2 + (b1*x4 + b2*x5 + b3*x6)*x7 + x4^2 - x5*x6"""

    alpha: Tuple[Poly, Poly, Poly, Poly]
    beta: Tuple[Poly, Poly, Poly, Poly]
    name: str = "pencil"

    def __post_init__(self):
        if len(self.alpha) != 4 or len(self.beta) != 4:
            raise InputError("a pencil needs alpha0..alpha3 and beta0..beta3")
        for label, forms in (("alpha", self.alpha), ("beta", self.beta)):
            for k, form in enumerate(forms):
                degree = 2 if k == 0 else 1
                if not form.is_zero and (not form.is_homogeneous or form.total_degree() != degree):
                    raise InputError(f"{label}{k} must be a form of degree {degree} or zero, got {form.as_expr()}")


@dataclass(frozen=True)
class DiscriminantCurve:
    delta: Poly
    provenance: str = "closed-form"
    constant: Optional[Fraction] = None
    pivot: Optional[int] = None

    @property
    def degenerate(self) -> bool:
        return self.delta.is_zero

    def to_json(self) -> Dict[str, Any]:
        return {
            "delta": str(self.delta.as_expr()),
            "provenance": self.provenance,
            "constant": format_rational(self.constant) if self.constant is not None else None,
            "pivot": self.pivot,
            "degenerate": self.degenerate,
        }


# ------------------------------------------------------------ building blocks

def _closed_form(a: Sequence[Any], b: Sequence[Any]) -> Any:
    half, quarter = sympy.Rational(1, 2), sympy.Rational(1, 4)
    first = a[0] - a[1] * b[1] * half + a[2] * b[3] + a[3] * b[2]
    second = a[1] ** 2 - a[2] * a[3] * 4
    third = b[0] - b[1] ** 2 * quarter + b[2] * b[3]
    return first ** 2 + second * third


def _displayed(a: Sequence[Any], b: Sequence[Any]) -> List[List[Any]]:
    """The symmetric matrix in (x5, x6, x7) after eliminating x4 with a1 normalized to 1"""
    m11 = a[2] ** 2 * 2
    m12 = a[2] * a[3] * 2 - 1
    m13 = b[2] - a[2] * b[1] + a[0] * a[2] * 2
    m22 = a[3] ** 2 * 2
    m23 = b[3] - a[3] * b[1] + a[0] * a[3] * 2
    m33 = (b[0] + a[0] ** 2 - a[0] * b[1]) * 2
    return [[m11, m12, m13], [m12, m22, m23], [m13, m23, m33]]


def _restricted_hessian(a: Sequence[Any], b: Sequence[Any], pivot: int,
                        gens: Sequence[sympy.Symbol]) -> List[List[Poly]]:
    """Hessian of a_k^2 * Q2 on {Q1 = 0} after eliminating the pivot coordinate x_{3+k}"""
    x4, x5, x6, x7 = sympy.symbols("x4 x5 x6 x7")
    ambient = (x4, x5, x6)
    a = [f.as_expr() if isinstance(f, Poly) else sympy.sympify(f) for f in a]
    b = [f.as_expr() if isinstance(f, Poly) else sympy.sympify(f) for f in b]
    q2 = b[0] * x7 ** 2 + (b[1] * x4 + b[2] * x5 + b[3] * x6) * x7 + x4 ** 2 - x5 * x6
    linear = a[0] * x7 + a[1] * x4 + a[2] * x5 + a[3] * x6
    target = ambient[pivot - 1]
    # q2 is a quadratic form, so a_k^2 * q2(y, -rest/a_k) = q2(a_k*y, -rest)
    rest = linear - a[pivot] * target
    variables = [v for v in ambient if v != target] + [x7]
    substitution = {v: a[pivot] * v for v in variables}
    substitution[target] = -rest
    scaled = sympy.expand(q2.subs(substitution, simultaneous=True))
    hessian = sympy.hessian(scaled, variables)
    return [[_poly(sympy.expand(hessian[i, j]), gens) for j in range(3)] for i in range(3)]


@lru_cache(maxsize=1)
def symbolic_identity() -> Fraction:
    """det(matrix) = c * Delta with fully symbolic coefficients; returns c

    Checked for the displayed matrix (against Delta at a1 = 1) and for the
    restricted Hessian at every pivot (against a_k^4 * Delta).
    """
    coeffs = sympy.symbols("a0 a1 a2 a3 b0 b1 b2 b3")
    a = [_poly(s, coeffs) for s in coeffs[:4]]
    b = [_poly(s, coeffs) for s in coeffs[4:]]
    delta = _closed_form(a, b)

    det = mpoly_det(_displayed(a, b))
    target = _poly(delta.as_expr().subs(coeffs[1], 1), coeffs)
    if target.is_zero or det.is_zero:
        raise IdentityCheckError("degenerate symbolic determinant")
    c = from_sympy(det.LC()) / from_sympy(target.LC())
    if det != target * to_sympy(c):
        raise IdentityCheckError(f"det(quadric_matrix) != {c} * Delta")
    for pivot in (1, 2, 3):
        det_k = mpoly_det(_restricted_hessian(coeffs[:4], coeffs[4:], pivot, coeffs))
        if det_k != a[pivot] ** 4 * delta * to_sympy(c):
            raise IdentityCheckError(f"det of the pivot-{pivot} Hessian != {c} * a{pivot}^4 * Delta")
    logger.info(f"Symbolic discriminant identity holds with c = {c}")
    return c


# ----------------------------------------------------------------- operations

def _pivot(p: PencilData) -> int:
    for k in (1, 2, 3):
        if not p.alpha[k].is_zero:
            return k
    raise ChartError()


def hessian_matrix(p: PencilData, pivot: int) -> List[List[Poly]]:
    if pivot not in (1, 2, 3):
        raise InputError(f"pivot must be 1, 2 or 3, got {pivot}")
    if p.alpha[pivot].is_zero:
        raise ChartError()
    return _restricted_hessian(p.alpha, p.beta, pivot, X)


def quadric_matrix(p: PencilData) -> List[List[Poly]]:
    """The displayed matrix in the chart a1 != 0; other pivots are tried before giving up"""
    if not p.alpha[1].is_zero:
        return _displayed(p.alpha, p.beta)
    pivot = _pivot(p)
    logger.warning(f"{p.name}: alpha1 vanishes identically, using pivot {pivot}")
    return hessian_matrix(p, pivot)


def discriminant(p: PencilData) -> DiscriminantCurve:
    delta = _closed_form(p.alpha, p.beta)
    if not delta.is_zero and (not delta.is_homogeneous or delta.total_degree() != 4):
        raise IdentityCheckError(f"{p.name}: discriminant is not a quartic form")
    c = symbolic_identity()
    pivot = _pivot(p)
    det = mpoly_det(hessian_matrix(p, pivot))
    if det != p.alpha[pivot] ** 4 * delta * to_sympy(c):
        raise IdentityCheckError(f"{p.name}: determinant identity fails")
    if delta.is_zero:
        logger.warning(f"{p.name}: discriminant vanishes identically")
    return DiscriminantCurve(delta=delta, provenance="closed-form, determinant-checked", constant=c, pivot=pivot)


def _point(values: Sequence[Any]) -> Tuple[Any, ...]:
    point = tuple(v if isinstance(v, CycloElement) else to_rational(v) for v in values)
    if len(point) != 3:
        raise InputError(f"points of P2 have three coordinates, got {len(point)}")
    if all(v == 0 for v in point):
        raise InputError("(0 : 0 : 0) is not a point")
    return point


def fiber_type(p: PencilData, point: Sequence[Any]) -> str:
    """smooth, two_lines or double_line by the rank of the conic over the point"""
    point = _point(point)
    pivot = next((k for k in (1, 2, 3) if not p.alpha[k].is_zero and evaluate(p.alpha[k], point) != 0), None)
    if pivot is None:
        raise ChartError()
    matrix = FieldMatrix([[evaluate(entry, point) for entry in row] for row in hessian_matrix(p, pivot)])
    rank = matrix.rank()
    if rank == 0:
        raise DegeneratePencilError(point)
    return FIBER_TYPES[rank]


def singular_at(curve: Any, point: Sequence[Any]) -> bool:
    delta = curve.delta if isinstance(curve, DiscriminantCurve) else curve
    if delta.is_zero:
        raise InputError("singular_at needs a nonzero discriminant")
    point = _point(point)
    if evaluate(delta, point) != 0:
        return False
    return all(evaluate(delta.diff(x), point) == 0 for x in X)


def exceptional_surface_type(p: PencilData) -> str:
    rows = []
    for form in p.alpha[1:]:
        rows.append([from_sympy(form.coeff_monomial(m)) if not form.is_zero else Fraction(0)
                     for m in LINEAR_MONOMIALS])
    rank = FieldMatrix(rows).rank()
    if rank == 0:
        raise InputError("plane contained in both quadrics")
    return "P1xP1" if rank == 3 else "F2"


@dataclass(frozen=True)
class SingularPoint:
    point: Tuple[Any, ...]
    defined_over_k: bool
    g_fixed: bool

    def to_json(self) -> Dict[str, Any]:
        return {"point": [scalar_to_json(v) for v in self.point],
                "defined_over_k": self.defined_over_k, "g_fixed": self.g_fixed}


@dataclass
class KStabilityCertificate:
    verdict: str
    route: str
    constant: Fraction
    points: List[SingularPoint] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {"verdict": self.verdict, "route": self.route, "constant": format_rational(self.constant),
                "singular_points": [s.to_json() for s in self.points]}


def kstability_certificate(curve: DiscriminantCurve, sing_points: Sequence[SingularPoint]) -> KStabilityCertificate:
    """K-stable unless some listed singular point of Delta is both k-rational and G-fixed"""
    for s in sing_points:
        if curve.degenerate or not singular_at(curve, s.point):
            raise InputError(f"invalid audit: {[str(v) for v in s.point]} is not a singular point of Delta")
    points = list(sing_points)
    if not points:
        route = "smooth-discriminant"
    elif not any(s.defined_over_k for s in points):
        route = "no-rational-singular-points"
    elif not any(s.g_fixed for s in points):
        route = "no-fixed-singular-points"
    elif not any(s.defined_over_k and s.g_fixed for s in points):
        route = "no-rational-fixed-singular-points"
    else:
        route = "inconclusive"
    verdict = "inconclusive" if route == "inconclusive" else "K-stable"
    constant = curve.constant if curve.constant is not None else symbolic_identity()
    logger.info(f"K-stability verdict: {verdict} ({route})")
    return KStabilityCertificate(verdict=verdict, route=route, constant=constant, points=points)


# ------------------------------------------------------------------ file I/O

def _form(value: Any, monomials: Sequence[Tuple[int, int, int]], where: str) -> Poly:
    if isinstance(value, str):
        return _poly(sympy.sympify(value, locals=dict(zip(("x1", "x2", "x3"), X))))
    if not isinstance(value, list) or len(value) != len(monomials):
        raise InputError(f"{where}: expected {len(monomials)} coefficients")
    expr = sum((to_sympy(to_rational(c)) * X[0] ** m[0] * X[1] ** m[1] * X[2] ** m[2]
                for c, m in zip(value, monomials)), sympy.Integer(0))
    return _poly(expr)


def load_pencil(data: Dict[str, Any]) -> PencilData:
    """Coefficient lists in the monomial orders x1^2, x1x2, x1x3, x2^2, x2x3, x3^2 and x1, x2, x3"""
    try:
        alpha = tuple(_form(v, QUADRATIC_MONOMIALS if k == 0 else LINEAR_MONOMIALS, f"alpha{k}")
                      for k, v in enumerate(data["alpha"]))
        beta = tuple(_form(v, QUADRATIC_MONOMIALS if k == 0 else LINEAR_MONOMIALS, f"beta{k}")
                     for k, v in enumerate(data["beta"]))
    except (KeyError, TypeError, sympy.SympifyError) as e:
        raise InputError(f"malformed pencil file: {e}")
    return PencilData(alpha=alpha, beta=beta, name=data.get("name", "pencil"))


def load_audit(data: Dict[str, Any]) -> List[SingularPoint]:
    try:
        return [SingularPoint(point=_point([scalar_from_json(v) for v in entry["point"]]),
                              defined_over_k=bool(entry["defined_over_k"]), g_fixed=bool(entry["g_fixed"]))
                for entry in data.get("points", [])]
    except (KeyError, TypeError) as e:
        raise InputError(f"malformed audit file: {e}")
