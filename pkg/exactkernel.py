#!/usr/bin/env python3
"""
Fanocheck - Exact Kernel
Exact rationals, cyclotomic field elements, matrices over fields,
polynomials and piecewise-polynomial integration over rational polygons
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import sympy
from sympy import Poly, QQ, cyclotomic_poly

logger = logging.getLogger(__name__)

# Largest conductor reachable by promoting mixed-conductor operands
MAX_CONDUCTOR = 120

U, V = sympy.symbols("u v")


class MathematicalError(Exception):
    """Well-formed input on which the mathematics fails"""


class IncompatibleFieldsError(MathematicalError):
    def __init__(self, n: int, m: int):
        super().__init__(f"incompatible fields: Q(zeta_{n}) and Q(zeta_{m})")


class NotPseudoEffectiveError(MathematicalError):
    def __init__(self, detail: str = ""):
        message = "not pseudo-effective under supplied curve data"
        super().__init__(f"{message}: {detail}" if detail else message)


class NotEffectiveError(MathematicalError):
    def __init__(self, detail: str = ""):
        super().__init__(f"not effective: {detail}" if detail else "not effective")


class ChamberValidationError(MathematicalError):
    def __init__(self, point: Tuple[Fraction, Fraction], detail: str):
        self.point = point
        super().__init__(
            f"chamber validation failed at (u, v) = ({point[0]}, {point[1]}): {detail}")


class NonPolynomialIntegrandError(MathematicalError):
    def __init__(self, detail: str = ""):
        super().__init__(f"nonpolynomial bound integrand {detail}".strip())


class GroupTooLargeError(MathematicalError):
    def __init__(self, cap: int):
        super().__init__(f"group too large or infinite (cap {cap})")


class ChartError(MathematicalError):
    def __init__(self):
        super().__init__("chart invalid; permute coordinates")


class DegeneratePencilError(MathematicalError):
    def __init__(self, point: Sequence[Any]):
        super().__init__(f"pencil degenerate at point {tuple(str(c) for c in point)}")


class IdentityCheckError(MathematicalError):
    """Raised when an identity that must hold fails; indicates a bug"""


class InputError(ValueError):
    """Malformed or inconsistent input"""


# ---------------------------------------------------------------- rationals

Rational = Fraction


def to_rational(value: Any) -> Fraction:
    """Parse ints, Fractions, "p/q" strings and sympy/gmpy rationals"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"not a rational: {value!r} ({e})")


def format_rational(value: Any) -> str:
    return str(to_rational(value))


def to_sympy(value: Fraction) -> sympy.Rational:
    value = to_rational(value)
    return sympy.Rational(value.numerator, value.denominator)


def from_sympy(value: Any) -> Fraction:
    return Fraction(str(value))


# --------------------------------------------------------- cyclotomic field

@lru_cache(maxsize=None)
def _cyclotomic_modulus(n: int) -> Tuple[Fraction, ...]:
    """Coefficients of the n-th cyclotomic polynomial, constant term first"""
    x = sympy.Symbol("x")
    coeffs = Poly(cyclotomic_poly(n, x), x).all_coeffs()
    return tuple(Fraction(int(c)) for c in reversed(coeffs))


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _reduce(n: int, coeffs: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    modulus = _cyclotomic_modulus(n)
    degree = len(modulus) - 1
    work = [to_rational(c) for c in coeffs]
    for k in range(len(work) - 1, degree - 1, -1):
        lead = work[k]
        if lead:
            shift = k - degree
            for j in range(degree + 1):
                work[shift + j] -= lead * modulus[j]
    work = work[:degree] + [Fraction(0)] * max(0, degree - len(work))
    return tuple(work)


class CycloElement:
    """Element of Q(zeta_n) stored as its residue modulo the n-th cyclotomic polynomial"""

    __slots__ = ("conductor", "coeffs", "_hash")

    def __init__(self, conductor: int, coeffs: Sequence[Any]):
        if conductor < 1:
            raise InputError(f"conductor must be positive, got {conductor}")
        if conductor == 2:
            # Q(zeta_2) = Q with zeta_2 = -1
            value = sum((to_rational(c) * (-1) ** k for k, c in enumerate(coeffs)), Fraction(0))
            conductor, coeffs = 1, [value]
        elif conductor % 4 == 2:
            # Q(zeta_{2m}) = Q(zeta_m) for odd m, with zeta_{2m} = -zeta_m^{(m+1)/2}
            odd = conductor // 2
            step = (odd + 1) // 2
            folded = [Fraction(0)] * odd
            for k, c in enumerate(coeffs):
                c = to_rational(c)
                if c:
                    folded[(k * step) % odd] += c * (-1) ** k
            conductor, coeffs = odd, folded
        object.__setattr__(self, "conductor", conductor)
        object.__setattr__(self, "coeffs", _reduce(conductor, coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("CycloElement is immutable")

    # construction helpers

    @classmethod
    def rational(cls, value: Any) -> "CycloElement":
        return cls(1, [to_rational(value)])

    @classmethod
    def coerce(cls, value: Any) -> "CycloElement":
        if isinstance(value, CycloElement):
            return value
        return cls.rational(value)

    def promote(self, m: int) -> "CycloElement":
        """Embed into Q(zeta_m); requires the conductor to divide m"""
        if m == self.conductor:
            return self
        if m % self.conductor:
            raise IncompatibleFieldsError(self.conductor, m)
        step = m // self.conductor
        spread = [Fraction(0)] * (step * len(self.coeffs) + 1)
        for k, c in enumerate(self.coeffs):
            spread[k * step] = c
        return CycloElement(m, spread)

    def _common(self, other: "CycloElement") -> Tuple["CycloElement", "CycloElement"]:
        if self.conductor == other.conductor:
            return self, other
        if other.is_rational():
            return self, CycloElement(self.conductor, [other.coeffs[0]])
        if self.is_rational():
            return CycloElement(other.conductor, [self.coeffs[0]]), other
        m = _lcm(self.conductor, other.conductor)
        if m > MAX_CONDUCTOR:
            raise IncompatibleFieldsError(self.conductor, other.conductor)
        return self.promote(m), other.promote(m)

    # queries

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise InputError(f"{self} is not rational")
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    # arithmetic

    def __add__(self, other):
        try:
            a, b = self._common(CycloElement.coerce(other))
        except InputError:
            return NotImplemented
        return CycloElement(a.conductor, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.conductor, [-c for c in self.coeffs])

    def __sub__(self, other):
        try:
            other = CycloElement.coerce(other)
        except InputError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return CycloElement.coerce(other) - self

    def __mul__(self, other):
        try:
            a, b = self._common(CycloElement.coerce(other))
        except InputError:
            return NotImplemented
        if b.is_rational():
            return CycloElement(a.conductor, [c * b.coeffs[0] for c in a.coeffs])
        if a.is_rational():
            return CycloElement(b.conductor, [c * a.coeffs[0] for c in b.coeffs])
        product = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs))
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        product[i + j] += x * y
        return CycloElement(a.conductor, product)

    __rmul__ = __mul__

    def inverse(self) -> "CycloElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        if self.is_rational():
            return CycloElement(self.conductor, [1 / self.coeffs[0]])
        n = self.conductor
        size = len(self.coeffs)
        # column j holds self * zeta^j
        columns = [(self * zeta(n, j)).coeffs for j in range(size)]
        matrix = FieldMatrix([[columns[j][i] for j in range(size)] for i in range(size)])
        target = [Fraction(1)] + [Fraction(0)] * (size - 1)
        return CycloElement(n, matrix.solve(target))

    def __truediv__(self, other):
        try:
            other = CycloElement.coerce(other)
        except InputError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CycloElement.coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = CycloElement.rational(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conjugate(self) -> "CycloElement":
        """Complex conjugation zeta -> zeta^-1"""
        n = self.conductor
        total = CycloElement(n, [0])
        for k, c in enumerate(self.coeffs):
            if c:
                total = total + zeta(n, -k) * c
        return total

    def galois(self, k: int) -> "CycloElement":
        """Apply the automorphism zeta -> zeta^k (k coprime to the conductor)"""
        n = self.conductor
        if gcd(k, n) != 1:
            raise InputError(f"{k} is not a unit modulo {n}")
        total = CycloElement(n, [0])
        for j, c in enumerate(self.coeffs):
            if c:
                total = total + zeta(n, j * k) * c
        return total

    # comparison and hashing

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CycloElement):
            return NotImplemented
        try:
            a, b = self._common(other)
        except IncompatibleFieldsError:
            return False
        return a.coeffs == b.coeffs

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def key(self, conductor: Optional[int] = None) -> Tuple[Fraction, ...]:
        """Coefficient tuple in Q(zeta_conductor), for sorting and hashing"""
        target = conductor or self.conductor
        if target % self.conductor:
            raise IncompatibleFieldsError(self.conductor, target)
        step = target // self.conductor
        spread = [Fraction(0)] * (step * len(self.coeffs) + 1)
        for k, c in enumerate(self.coeffs):
            spread[k * step] = c
        return CycloElement(target, spread).coeffs if step > 1 else self.coeffs

    def minimal(self) -> "CycloElement":
        """Same element written over the smallest cyclotomic field containing it"""
        if self.is_rational():
            return CycloElement(1, [self.coeffs[0]])
        n = self.conductor
        for d in sympy.divisors(n):
            if d == 1 or d % 4 == 2:
                continue
            if d == n:
                break
            size = int(sympy.totient(d))
            basis = [zeta(d, j).promote(n).coeffs for j in range(size)]
            augmented = FieldMatrix([[basis[j][i] for j in range(size)] + [c]
                                     for i, c in enumerate(self.coeffs)])
            work, pivots = augmented.rref()
            if size not in pivots:
                return CycloElement(d, [work[r][-1] for r in range(size)])
        return self

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            pass
        if self.is_rational():
            value = hash(self.coeffs[0])
        else:
            # the minimal field is unique, so equal elements share it
            m = self.minimal()
            value = hash((m.conductor, m.coeffs))
        object.__setattr__(self, "_hash", value)
        return value

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"CycloElement({self.conductor}, {[str(c) for c in self.coeffs]})"

    def __str__(self):
        if self.is_rational():
            return str(self.coeffs[0])
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                power = f"z{self.conductor}" + (f"^{k}" if k > 1 else "")
                terms.append(power if c == 1 else f"{c}*{power}")
        return " + ".join(terms)

    # serialization

    def to_json(self) -> Dict[str, Any]:
        return {"conductor": self.conductor, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "CycloElement":
        try:
            return cls(int(data["conductor"]), [to_rational(c) for c in data["coeffs"]])
        except (KeyError, TypeError) as e:
            raise InputError(f"malformed cyclotomic element {data!r}: {e}")


def zeta(n: int, k: int = 1) -> CycloElement:
    """zeta_n^k"""
    k %= n
    return CycloElement(n, [0] * k + [1])


def cyclo_mul(a: Any, b: Any) -> CycloElement:
    return CycloElement.coerce(a) * CycloElement.coerce(b)


def scalar_to_json(value: Any) -> Union[str, Dict[str, Any]]:
    if isinstance(value, CycloElement):
        return format_rational(value.coeffs[0]) if value.is_rational() else value.to_json()
    return format_rational(value)


def scalar_from_json(data: Any) -> Union[Fraction, CycloElement]:
    if isinstance(data, dict):
        return CycloElement.from_json(data)
    return to_rational(data)


def is_zero(value: Any) -> bool:
    return value == 0


# ----------------------------------------------------------------- matrices

def _entry(value: Any) -> Union[Fraction, CycloElement]:
    return value if isinstance(value, CycloElement) else to_rational(value)


class FieldMatrix:
    """Dense immutable matrix over Q or a cyclotomic field"""

    def __init__(self, rows: Sequence[Sequence[Any]]):
        self.rows = tuple(tuple(_entry(x) for x in r) for r in rows)
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise InputError(f"ragged matrix rows: widths {sorted(widths)}")
        self.nrows = len(self.rows)
        self.ncols = widths.pop() if widths else 0

    @classmethod
    def identity(cls, n: int) -> "FieldMatrix":
        return cls([[Fraction(int(i == j)) for j in range(n)] for i in range(n)])

    def __getitem__(self, index: Tuple[int, int]):
        i, j = index
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    def __repr__(self):
        return "FieldMatrix([" + ", ".join(
            "[" + ", ".join(str(x) for x in r) + "]" for r in self.rows) + "])"

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)])

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.ncols != other.nrows:
            raise InputError(f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        cols = other.transpose().rows
        return FieldMatrix([[_dot(r, c) for c in cols] for r in self.rows])

    def scale(self, factor: Any) -> "FieldMatrix":
        return FieldMatrix([[factor * x for x in r] for r in self.rows])

    def stack(self, other: "FieldMatrix") -> "FieldMatrix":
        return FieldMatrix(self.rows + other.rows)

    def apply(self, vector: Sequence[Any]) -> List[Any]:
        return [_dot(r, vector) for r in self.rows]

    def _bareiss(self) -> Tuple[List[List[Any]], int, int]:
        """Fraction-free elimination with first-nonzero pivots: (echelon rows, rank, sign)"""
        work = [list(r) for r in self.rows]
        prev_inverse = 1
        rank = 0
        sign = 1
        for col in range(self.ncols):
            if rank == self.nrows:
                break
            pivot = next((i for i in range(rank, self.nrows) if work[i][col] != 0), None)
            if pivot is None:
                continue
            if pivot != rank:
                work[pivot], work[rank] = work[rank], work[pivot]
                sign = -sign
            lead = work[rank][col]
            for i in range(rank + 1, self.nrows):
                factor = work[i][col]
                for j in range(col + 1, self.ncols):
                    work[i][j] = (lead * work[i][j] - factor * work[rank][j]) * prev_inverse
                work[i][col] = 0
            prev_inverse = Fraction(1) / lead
            rank += 1
        return work, rank, sign

    def rank(self) -> int:
        return self._bareiss()[1]

    def det(self) -> Any:
        if self.nrows != self.ncols:
            raise InputError("determinant of a non-square matrix")
        if self.nrows == 0:
            return Fraction(1)
        work, rank, sign = self._bareiss()
        if rank < self.nrows:
            return Fraction(0)
        return sign * work[-1][-1]

    def rref(self) -> Tuple[List[List[Any]], List[int]]:
        work = [list(r) for r in self.rows]
        pivots: List[int] = []
        row = 0
        for col in range(self.ncols):
            if row == self.nrows:
                break
            pivot = next((i for i in range(row, self.nrows) if work[i][col] != 0), None)
            if pivot is None:
                continue
            work[pivot], work[row] = work[row], work[pivot]
            inverse = Fraction(1) / work[row][col]
            work[row] = [x * inverse for x in work[row]]
            for i in range(self.nrows):
                if i != row and work[i][col] != 0:
                    factor = work[i][col]
                    work[i] = [x - factor * y for x, y in zip(work[i], work[row])]
            pivots.append(col)
            row += 1
        return work, pivots

    def nullspace(self) -> List[List[Any]]:
        """Basis of {x : M x = 0}, one vector per free column"""
        work, pivots = self.rref()
        free = [c for c in range(self.ncols) if c not in pivots]
        basis = []
        for f in free:
            vector: List[Any] = [Fraction(0)] * self.ncols
            vector[f] = Fraction(1)
            for r, p in enumerate(pivots):
                vector[p] = -work[r][f]
            basis.append(vector)
        return basis

    def solve(self, rhs: Sequence[Any]) -> List[Any]:
        """Unique solution of M x = rhs for square invertible M"""
        if self.nrows != self.ncols or len(rhs) != self.nrows:
            raise InputError("solve needs a square system")
        augmented = FieldMatrix([list(r) + [b] for r, b in zip(self.rows, rhs)])
        work, pivots = augmented.rref()
        if pivots != list(range(self.ncols)):
            raise MathematicalError("singular linear system")
        return [work[i][-1] for i in range(self.nrows)]


def _dot(a: Sequence[Any], b: Sequence[Any]) -> Any:
    total: Any = Fraction(0)
    for x, y in zip(a, b):
        if x != 0 and y != 0:
            total = total + x * y
    return total


def matrix_rank(matrix: Union[FieldMatrix, Sequence[Sequence[Any]]]) -> int:
    if not isinstance(matrix, FieldMatrix):
        matrix = FieldMatrix(matrix)
    return matrix.rank()


# -------------------------------------------------------------- polynomials

def mpoly_det(matrix: Sequence[Sequence[Poly]]) -> Poly:
    """Bareiss determinant of a square matrix of sympy Polys over a common ring"""
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise InputError("mpoly_det needs a square matrix")
    if n == 0:
        raise InputError("mpoly_det of an empty matrix")
    work = [list(r) for r in matrix]
    one = work[0][0].one
    prev = one
    sign = 1
    for k in range(n - 1):
        if work[k][k].is_zero:
            swap = next((i for i in range(k + 1, n) if not work[i][k].is_zero), None)
            if swap is None:
                return work[0][0].zero
            work[k], work[swap] = work[swap], work[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                work[i][j] = (work[k][k] * work[i][j] - work[i][k] * work[k][j]).exquo(prev)
        prev = work[k][k]
    result = work[n - 1][n - 1]
    return -result if sign < 0 else result


def integrate_poly(p: Union[Poly, Any], lo: Any, hi: Any, var: Optional[sympy.Symbol] = None) -> Fraction:
    """Exact definite integral of a univariate polynomial over [lo, hi]"""
    lo, hi = to_rational(lo), to_rational(hi)
    if lo > hi:
        raise InputError(f"integration bounds out of order: [{lo}, {hi}]")
    if lo == hi:
        return Fraction(0)
    if not isinstance(p, Poly):
        p = Poly(p, var or U, domain=QQ)
    if p.is_zero:
        return Fraction(0)
    antiderivative = p.integrate()
    return from_sympy(antiderivative.eval(to_sympy(hi)) - antiderivative.eval(to_sympy(lo)))


def evaluate(p: Poly, point: Sequence[Any]) -> Any:
    """Evaluate a Poly at a point of rationals or cyclotomic elements"""
    if len(point) != len(p.gens):
        raise InputError(f"point has {len(point)} coordinates, polynomial has {len(p.gens)} variables")
    total: Any = Fraction(0)
    for monomial, coeff in p.terms():
        term: Any = from_sympy(coeff)
        for value, exponent in zip(point, monomial):
            if exponent:
                term = term * value ** exponent
        total = total + term
    return total


# --------------------------------------------------- rational plane polygons

Point2 = Tuple[Fraction, Fraction]


def _cross(o: Point2, a: Point2, b: Point2) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_order(points: Sequence[Point2]) -> List[Point2]:
    """Counterclockwise hull of the given points (collinear points dropped)"""
    unique = sorted(set((to_rational(x), to_rational(y)) for x, y in points))
    if len(unique) <= 2:
        return unique

    def half(chain):
        hull: List[Point2] = []
        for p in chain:
            while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
                hull.pop()
            hull.append(p)
        return hull

    lower = half(unique)
    upper = half(reversed(unique))
    return lower[:-1] + upper[:-1]


def polygon_area(vertices: Sequence[Point2]) -> Fraction:
    hull = convex_order(vertices)
    if len(hull) < 3:
        return Fraction(0)
    twice = sum((hull[i][0] * hull[(i + 1) % len(hull)][1] - hull[(i + 1) % len(hull)][0] * hull[i][1]
                 for i in range(len(hull))), Fraction(0))
    return abs(twice) / 2


def polygon_centroid(vertices: Sequence[Point2]) -> Point2:
    """Vertex average; an interior point of any non-degenerate convex polygon"""
    hull = convex_order(vertices)
    count = len(hull)
    return (sum((p[0] for p in hull), Fraction(0)) / count,
            sum((p[1] for p in hull), Fraction(0)) / count)


def clip_polygon(vertices: Sequence[Point2], halfplane: Tuple[Any, Any, Any]) -> List[Point2]:
    """Intersect a convex polygon with {a*u + b*v + c >= 0}"""
    a, b, c = (to_rational(x) for x in halfplane)
    hull = convex_order(vertices)
    if not hull:
        return []
    if len(hull) == 1:
        p = hull[0]
        return hull if a * p[0] + b * p[1] + c >= 0 else []
    ring = hull if len(hull) > 2 else [hull[0], hull[1]]
    result: List[Point2] = []
    count = len(ring)
    for i in range(count):
        p, q = ring[i], ring[(i + 1) % count]
        fp = a * p[0] + b * p[1] + c
        fq = a * q[0] + b * q[1] + c
        if fp >= 0:
            result.append(p)
        if (fp > 0 > fq) or (fp < 0 < fq):
            t = fp / (fp - fq)
            result.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return convex_order(result)


def _slab_edges(hull: Sequence[Point2], ua: Fraction, ub: Fraction) -> Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]:
    """Lower and upper boundary of a convex polygon over u in [ua, ub], as (slope, intercept)"""
    mid = (ua + ub) / 2
    lines = []
    for i in range(len(hull)):
        p, q = hull[i], hull[(i + 1) % len(hull)]
        if p[0] == q[0]:
            continue
        lo, hi = min(p[0], q[0]), max(p[0], q[0])
        if lo <= ua and ub <= hi:
            slope = (q[1] - p[1]) / (q[0] - p[0])
            intercept = p[1] - slope * p[0]
            lines.append((slope * mid + intercept, slope, intercept))
    if len(lines) < 2:
        raise MathematicalError(f"degenerate polygon slab [{ua}, {ub}]")
    lines.sort()
    return (lines[0][1], lines[0][2]), (lines[-1][1], lines[-1][2])


def integrate_polygon(p: Union[Poly, Any], vertices: Sequence[Point2]) -> Fraction:
    """Exact integral of a polynomial in (u, v) over a convex rational polygon

    Iterated integration: v first between the affine lower and upper edges of
    each vertical slab, then u over the slab.
    """
    if not isinstance(p, Poly):
        p = Poly(p, U, V, domain=QQ)
    hull = convex_order(vertices)
    if len(hull) < 3 or p.is_zero:
        return Fraction(0)
    inner = p.integrate(V)
    xs = sorted(set(x for x, _ in hull))
    total = Fraction(0)
    expr = inner.as_expr()
    for ua, ub in zip(xs, xs[1:]):
        (ls, li), (us, ui) = _slab_edges(hull, ua, ub)
        upper = expr.subs(V, to_sympy(us) * U + to_sympy(ui))
        lower = expr.subs(V, to_sympy(ls) * U + to_sympy(li))
        total += integrate_poly(Poly(sympy.expand(upper - lower), U, domain=QQ), ua, ub)
    return total


def affine_poly(constant: Any, du: Any = 0, dv: Any = 0) -> Poly:
    """The polynomial constant + du*u + dv*v in (u, v)"""
    return Poly(to_sympy(constant) + to_sympy(du) * U + to_sympy(dv) * V, U, V, domain=QQ)
