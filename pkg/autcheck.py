#!/usr/bin/env python3
"""
Fanocheck - Automorphism Check
Pencil invariance, skew-symmetric classification, signed monomial matrix groups
and verification of the automorphism table rows
"""

import logging
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import lcm
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import sympy
from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.group_constructs import DirectProduct
from sympy.combinatorics.named_groups import AbelianGroup, AlternatingGroup, CyclicGroup, DihedralGroup
from sympy.parsing.sympy_parser import parse_expr

from exactkernel import (
    CycloElement,
    FieldMatrix,
    GroupTooLargeError,
    IdentityCheckError,
    InputError,
    MathematicalError,
    zeta,
)

logger = logging.getLogger(__name__)

DIMENSION = 6
DEFAULT_CLOSURE_CAP = 4096
SINGULAR_Q = (1, 1, 1, 1, 1, 0)
SMOOTH_Q = (1, 1, 1, 1, 1, 1)

ONE = CycloElement.rational(1)


def scalar_sort_key(s: CycloElement) -> Tuple[int, Tuple[Fraction, ...]]:
    """Total order on scalars that does not depend on the field they are written in"""
    m = s.minimal()
    return m.conductor, m.coeffs


# ------------------------------------------------------------------ scalars

def _named_scalar(name: str) -> Optional[CycloElement]:
    if name == "i":
        return zeta(4)
    if name == "sqrt2":
        return zeta(8) + zeta(8, 7)
    if name == "sqrt3":
        return zeta(12) + zeta(12, 11)
    if name == "sqrt5":
        return 1 + 2 * zeta(5) + 2 * zeta(5, 4)
    match = re.fullmatch(r"z(\d+)", name)
    if match:
        return zeta(int(match.group(1)))
    return None


def to_cyclo(expr: Any, constants: Optional[Dict[str, CycloElement]] = None) -> CycloElement:
    """Evaluate a sympy expression built from rationals, i, sqrt2, sqrt3, sqrt5 and zN"""
    constants = constants or {}
    if isinstance(expr, sympy.Rational):
        return CycloElement.rational(Fraction(int(expr.p), int(expr.q)))
    if isinstance(expr, sympy.Symbol):
        if expr.name in constants:
            return constants[expr.name]
        value = _named_scalar(expr.name)
        if value is None:
            raise InputError(f"unknown scalar name {expr.name!r}")
        return value
    if isinstance(expr, sympy.Add):
        total = CycloElement.rational(0)
        for term in expr.args:
            total = total + to_cyclo(term, constants)
        return total
    if isinstance(expr, sympy.Mul):
        product = ONE
        for factor in expr.args:
            product = product * to_cyclo(factor, constants)
        return product
    if isinstance(expr, sympy.Pow) and isinstance(expr.exp, sympy.Integer):
        return to_cyclo(expr.base, constants) ** int(expr.exp)
    raise InputError(f"cannot read {expr} as a cyclotomic scalar")


def _symbol_table(variables: Sequence[str], constants: Optional[Dict[str, Any]]) -> Dict[str, sympy.Symbol]:
    # names like beta and gamma would otherwise parse as sympy functions
    names = list(variables) + list(constants or {}) + ["i", "sqrt2", "sqrt3", "sqrt5"]
    return {name: sympy.Symbol(name) for name in names}


def parse_scalar(text: Any, constants: Optional[Dict[str, CycloElement]] = None) -> CycloElement:
    if isinstance(text, CycloElement):
        return text
    if isinstance(text, (int, Fraction)):
        return CycloElement.rational(text)
    try:
        expr = parse_expr(str(text), local_dict=_symbol_table((), constants))
    except Exception as e:
        raise InputError(f"unreadable scalar {text!r}: {e}")
    return to_cyclo(expr, constants)


def linear_form(text: str, variables: Sequence[str],
                constants: Optional[Dict[str, CycloElement]] = None) -> List[CycloElement]:
    """Coefficient vector of a homogeneous linear form such as 'x0 + i*sqrt2*x3'"""
    symbols = sympy.symbols(list(variables))
    try:
        expr = sympy.expand(parse_expr(str(text), local_dict=_symbol_table(variables, constants)))
    except Exception as e:
        raise InputError(f"unreadable linear form {text!r}: {e}")
    coefficients = [expr.coeff(s, 1) for s in symbols]
    remainder = sympy.expand(expr - sum(c * s for c, s in zip(coefficients, symbols)))
    if remainder != 0 or any(c.free_symbols & set(symbols) for c in coefficients):
        raise InputError(f"{text!r} is not a homogeneous linear form in {list(variables)}")
    return [to_cyclo(c, constants) for c in coefficients]


# ------------------------------------------------------- signed monomials

@dataclass(frozen=True)
class SignedMonomialMatrix:
    """Matrix whose row i is scalars[i] times the unit row vector e_{perm[i]}

    Points of P^5 are row vectors and the matrix acts by x -> x*M.
    """

    perm: Tuple[int, ...]
    scalars: Tuple[CycloElement, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise InputError(f"{self.perm} is not a permutation")
        if len(self.scalars) != len(self.perm):
            raise InputError("one scalar per row required")
        scalars = tuple(CycloElement.coerce(s) for s in self.scalars)
        if any(s.is_zero() for s in scalars):
            raise InputError("signed monomial matrix needs nonzero scalars")
        object.__setattr__(self, "scalars", scalars)

    @classmethod
    def identity(cls, n: int = DIMENSION) -> "SignedMonomialMatrix":
        return cls(tuple(range(n)), (ONE,) * n)

    @classmethod
    def minus_identity(cls, n: int = DIMENSION) -> "SignedMonomialMatrix":
        return cls(tuple(range(n)), (-ONE,) * n)

    @classmethod
    def from_matrix(cls, matrix: FieldMatrix) -> "SignedMonomialMatrix":
        perm, scalars = [], []
        for row in matrix.rows:
            support = [j for j, x in enumerate(row) if x != 0]
            if len(support) != 1:
                raise InputError("not a monomial matrix: each row needs exactly one nonzero entry")
            perm.append(support[0])
            scalars.append(CycloElement.coerce(row[support[0]]))
        return cls(tuple(perm), tuple(scalars))

    @classmethod
    def parse(cls, entries: Any, constants: Optional[Dict[str, CycloElement]] = None) -> "SignedMonomialMatrix":
        """Read the table notation: ["1", "-0", "i*5", "-z5*5"] or "-I" """
        if isinstance(entries, str):
            if entries.strip() == "-I":
                return cls.minus_identity()
            if entries.strip() == "I":
                return cls.identity()
            raise InputError(f"unknown generator {entries!r}")
        perm, scalars = [], []
        for entry in entries:
            text = str(entry).strip()
            negative = text.startswith("-")
            body = text[1:] if negative else text
            if "*" in body:
                scalar_text, index_text = body.rsplit("*", 1)
                scalar = parse_scalar(scalar_text, constants)
            else:
                scalar, index_text = ONE, body
            if not index_text.strip().isdigit():
                raise InputError(f"bad generator entry {entry!r}")
            perm.append(int(index_text))
            scalars.append(-scalar if negative else scalar)
        return cls(tuple(perm), tuple(scalars))

    def __mul__(self, other: "SignedMonomialMatrix") -> "SignedMonomialMatrix":
        perm = tuple(other.perm[p] for p in self.perm)
        scalars = tuple(s * other.scalars[p] for s, p in zip(self.scalars, self.perm))
        return SignedMonomialMatrix(perm, scalars)

    def __neg__(self) -> "SignedMonomialMatrix":
        return SignedMonomialMatrix(self.perm, tuple(-s for s in self.scalars))

    def inverse(self) -> "SignedMonomialMatrix":
        n = len(self.perm)
        perm = [0] * n
        scalars: List[CycloElement] = [ONE] * n
        for i, p in enumerate(self.perm):
            perm[p] = i
            scalars[p] = self.scalars[i].inverse()
        return SignedMonomialMatrix(tuple(perm), tuple(scalars))

    def is_identity(self) -> bool:
        return all(p == i for i, p in enumerate(self.perm)) and all(s == 1 for s in self.scalars)

    def order(self, cap: int = DEFAULT_CLOSURE_CAP) -> int:
        power, k = self, 1
        while not power.is_identity():
            power, k = power * self, k + 1
            if k > cap:
                raise GroupTooLargeError(cap)
        return k

    def to_matrix(self) -> FieldMatrix:
        n = len(self.perm)
        rows = [[CycloElement.rational(0)] * n for _ in range(n)]
        for i, (p, s) in enumerate(zip(self.perm, self.scalars)):
            rows[i][p] = s
        return FieldMatrix(rows)

    def act_on_form(self, coefficients: Sequence[Any]) -> List[CycloElement]:
        """Coefficients of L(x*M) for L(x) = sum c_j x_j"""
        return [s * coefficients[p] for s, p in zip(self.scalars, self.perm)]

    def act_on_diagonal(self, coefficients: Sequence[Any]) -> List[CycloElement]:
        """Coefficients of the diagonal quadric sum c_j x_j^2 pulled back along x -> x*M"""
        return [s * s * coefficients[p] for s, p in zip(self.scalars, self.perm)]

    def canonical(self) -> "SignedMonomialMatrix":
        """Representative of the coset {M, -M}"""
        first = self.scalars[0]
        return self if scalar_sort_key(first) >= scalar_sort_key(-first) else -self

    def notation(self) -> str:
        parts = []
        for s, p in zip(self.scalars, self.perm):
            if s == 1:
                parts.append(str(p))
            elif s == -1:
                parts.append(f"-{p}")
            else:
                parts.append(f"({s})*{p}")
        return "[" + ",".join(parts) + "]"


# ------------------------------------------------------- pencil invariance

def _check_distinct(a: Sequence[Any], singular: bool):
    head = list(a[:5]) if singular else list(a)
    for i in range(len(head)):
        for j in range(i + 1, len(head)):
            if head[i] == head[j]:
                raise InputError(f"distinctness violated: a{i} = a{j}")
    if singular and a[5] == 0:
        raise InputError("distinctness violated: a5 must be nonzero in the singular case")


def pencil_invariant(sigma: Sequence[int], a: Sequence[Any], lam: Any = None) -> bool:
    """Rank test on (ones; a; a permuted by sigma), lam scaling the sixth entry in the singular case"""
    if sorted(sigma) != list(range(DIMENSION)) or len(a) != DIMENSION:
        raise InputError("pencil_invariant needs a permutation of 6 and six coefficients")
    singular = lam is not None
    a = [CycloElement.coerce(x) for x in a]
    _check_distinct(a, singular)
    if singular:
        if sigma[5] != 5:
            raise InputError("the singular case requires sigma(5) = 5")
        lam = CycloElement.coerce(lam)
        first = [ONE] * 5 + [CycloElement.rational(0)]
        third = [a[sigma[i]] for i in range(5)] + [lam * lam * a[5]]
    else:
        first = [ONE] * DIMENSION
        third = [a[sigma[i]] for i in range(DIMENSION)]
    return FieldMatrix([first, a, third]).rank() <= 2


def preserves_pencil(matrix: SignedMonomialMatrix, a: Sequence[Any], q: Sequence[Any]) -> bool:
    """Both Q = sum q_j x_j^2 and Q1 = sum a_j x_j^2 pull back into the pencil they span"""
    a = [CycloElement.coerce(x) for x in a]
    q = [CycloElement.coerce(x) for x in q]
    for image in (matrix.act_on_diagonal(q), matrix.act_on_diagonal(a)):
        if FieldMatrix([q, a, image]).rank() > 2:
            return False
    return True


def skew_classify(b: Sequence[Any]) -> List[Tuple[Tuple[int, ...], CycloElement]]:
    """All permutations nu of five indices with b_nu(i) = c*b_i + r for constants c != 0 and r"""
    b = [CycloElement.coerce(x) for x in b]
    if len(b) != 5:
        raise InputError("skew_classify needs five scalars")
    _check_distinct(b, singular=False)
    found = []
    for nu in permutations(range(5)):
        c = (b[nu[0]] - b[nu[1]]) / (b[0] - b[1])
        r = b[nu[0]] - c * b[0]
        # distinct b forces c != 0
        if all(b[nu[i]] == c * b[i] + r for i in range(5)):
            found.append((tuple(nu), c))
    logger.debug(f"skew classification found {len(found)} permutations")
    return found


def skew_identity_holds(nu: Sequence[int], b: Sequence[Any], c: Any) -> bool:
    """The permuted difference matrix B_{nu(i) nu(j)} equals c*B_{ij}, with B_{ij} = b_i - b_j"""
    b = [CycloElement.coerce(x) for x in b]
    n = len(b)
    difference = FieldMatrix([[b[i] - b[j] for j in range(n)] for i in range(n)])
    P = FieldMatrix([[ONE if j == nu[i] else CycloElement.rational(0) for j in range(n)] for i in range(n)])
    return P @ difference @ P.transpose() == difference.scale(CycloElement.coerce(c))


def root_of_unity_order(c: Any, limit: int = 120) -> Optional[int]:
    c = CycloElement.coerce(c)
    power = c
    for k in range(1, limit + 1):
        if power == 1:
            return k
        power = power * c
    return None


def cycle_lengths(perm: Sequence[int]) -> List[int]:
    seen, lengths = set(), []
    for start in range(len(perm)):
        if start in seen:
            continue
        length, i = 0, start
        while i not in seen:
            seen.add(i)
            i = perm[i]
            length += 1
        lengths.append(length)
    return sorted(lengths, reverse=True)


def singular_scaling_constraint(sigma_cycle_structure: Optional[Sequence[int]], c: Any) -> List[CycloElement]:
    """Admissible lambda with lambda^2 = c for a scaling c of order 1, 2, 4 or 5"""
    n = root_of_unity_order(c)
    if n not in (1, 2, 4, 5):
        raise InputError(f"c = {c} is not a root of unity of order 1, 2, 4 or 5")
    if sigma_cycle_structure is not None:
        longest = max([1] + [k for k in sigma_cycle_structure if k > 1])
        if longest != n:
            raise InputError(f"a permutation with cycles {list(sigma_cycle_structure)} cannot scale by a root of order {n}")
    c = CycloElement.coerce(c)
    return [lam for lam in (zeta(2 * n, k) for k in range(2 * n)) if lam * lam == c]


# ------------------------------------------------------------ group closure

@dataclass(frozen=True)
class FiniteMatrixGroup:
    generators: Tuple[SignedMonomialMatrix, ...]
    elements: frozenset

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, item: SignedMonomialMatrix) -> bool:
        return item in self.elements


def group_closure(gens: Sequence[SignedMonomialMatrix], cap: int = DEFAULT_CLOSURE_CAP) -> FiniteMatrixGroup:
    """Layered breadth-first closure under right multiplication by generators"""
    if cap < 1:
        raise InputError("closure cap must be at least 1")
    gens = tuple(gens)
    n = len(gens[0].perm) if gens else DIMENSION
    identity = SignedMonomialMatrix.identity(n)
    seen = {identity}
    layer = [identity]
    while layer:
        next_layer = []
        for x in layer:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    next_layer.append(y)
                    if len(seen) > cap:
                        raise GroupTooLargeError(cap)
        layer = next_layer
    logger.debug(f"closure of {len(gens)} generators has order {len(seen)}")
    return FiniteMatrixGroup(gens, frozenset(seen))


# ------------------------------------------------------------ fingerprints

@dataclass(frozen=True)
class GroupFingerprint:
    order: int
    abelian: bool
    exponent: int
    histogram: Tuple[Tuple[int, int], ...]
    derived_order: int

    def to_json(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "abelian": self.abelian,
            "exponent": self.exponent,
            "order_histogram": {str(k): v for k, v in self.histogram},
            "derived_order": self.derived_order,
        }


def _closure(seeds: Iterable[Hashable], mul: Callable, identity: Hashable) -> set:
    seeds = list(seeds)
    group = {identity}
    layer = [identity]
    while layer:
        fresh = []
        for x in layer:
            for g in seeds:
                y = mul(x, g)
                if y not in group:
                    group.add(y)
                    fresh.append(y)
        layer = fresh
    return group


def fingerprint(elements: Sequence[Hashable], mul: Callable, identity: Hashable) -> GroupFingerprint:
    """Isomorphism invariants of a small finite group given by its multiplication"""
    elements = list(elements)

    def element_order(x):
        power, k = x, 1
        while power != identity:
            if k >= len(elements):
                raise IdentityCheckError(f"no power of {x} up to {k} reaches the identity")
            power, k = mul(power, x), k + 1
        return k

    orders = [element_order(x) for x in elements]
    histogram: Dict[int, int] = {}
    for k in orders:
        histogram[k] = histogram.get(k, 0) + 1
    inverse = {x: next(y for y in elements if mul(x, y) == identity) for x in elements}
    abelian = all(mul(x, y) == mul(y, x) for x in elements for y in elements)
    commutators = {mul(mul(inverse[x], inverse[y]), mul(x, y)) for x in elements for y in elements}
    derived = _closure(commutators, mul, identity)
    return GroupFingerprint(
        order=len(elements),
        abelian=abelian,
        exponent=lcm(*orders) if orders else 1,
        histogram=tuple(sorted(histogram.items())),
        derived_order=len(derived),
    )


def _permutation_fingerprint(group: PermutationGroup) -> GroupFingerprint:
    return fingerprint(list(group.generate()), lambda p, q: p * q, group.identity)


def _c2_squared_semidirect_c4() -> PermutationGroup:
    # C4 swapping the two factors of C2^2
    return PermutationGroup(Permutation([[0, 1]], size=8), Permutation([[0, 2], [1, 3], [4, 5, 6, 7]]))


@lru_cache(maxsize=1)
def reference_fingerprints() -> Dict[str, GroupFingerprint]:
    presentations = {
        "trivial": PermutationGroup([Permutation([0])]),
        "C2": CyclicGroup(2),
        "C3": CyclicGroup(3),
        "C2^2": AbelianGroup(2, 2),
        "C5": CyclicGroup(5),
        "C6": CyclicGroup(6),
        "C2^3": AbelianGroup(2, 2, 2),
        "D4": DihedralGroup(4),
        "C10": CyclicGroup(10),
        "A4": AlternatingGroup(4),
        "C2^2xC4": AbelianGroup(2, 2, 4),
        "C2^2:C4": _c2_squared_semidirect_c4(),
        "C2xA4": DirectProduct(CyclicGroup(2), AlternatingGroup(4)),
    }
    table = {label: _permutation_fingerprint(g) for label, g in presentations.items()}
    if len(set(table.values())) != len(table):
        raise MathematicalError("reference fingerprints are not pairwise distinct")
    return table


def quotient_by_sign(g: FiniteMatrixGroup) -> List[SignedMonomialMatrix]:
    return sorted({m.canonical() for m in g.elements}, key=lambda m: (m.perm, [scalar_sort_key(s) for s in m.scalars]))


def quotient_fingerprint(g: FiniteMatrixGroup) -> GroupFingerprint:
    n = len(next(iter(g.elements)).perm)
    if SignedMonomialMatrix.minus_identity(n) not in g:
        raise InputError("group does not contain -I")
    cosets = quotient_by_sign(g)
    return fingerprint(cosets, lambda x, y: (x * y).canonical(), SignedMonomialMatrix.identity(n).canonical())


def identify_group(g: FiniteMatrixGroup) -> Tuple[str, GroupFingerprint]:
    """Isomorphism type of g modulo {I, -I}, or 'unknown'"""
    observed = quotient_fingerprint(g)
    for label, reference in reference_fingerprints().items():
        if reference == observed:
            return label, observed
    return "unknown", observed


# ------------------------------------------------------------------ planes

def plane_invariant(g: FiniteMatrixGroup, plane: Sequence[Sequence[Any]]) -> bool:
    """Every generator maps the plane cut out by the three forms to itself"""
    forms = [[CycloElement.coerce(x) for x in row] for row in plane]
    if len(forms) != 3 or FieldMatrix(forms).rank() != 3:
        raise InputError("a plane needs three linearly independent forms")
    for m in g.generators:
        moved = [m.act_on_form(row) for row in forms]
        if FieldMatrix(forms + moved).rank() != 3:
            logger.debug(f"generator {m.notation()} moves the plane")
            return False
    return True


def plane_on_quadric(plane: Sequence[Sequence[Any]], q: Sequence[Any]) -> bool:
    """Whether the diagonal quadric sum q_j x_j^2 vanishes on the plane"""
    basis = FieldMatrix([[CycloElement.coerce(x) for x in row] for row in plane]).nullspace()
    q = [CycloElement.coerce(x) for x in q]
    for u in basis:
        for v in basis:
            value = CycloElement.rational(0)
            for qj, uj, vj in zip(q, u, v):
                value = value + qj * uj * vj
            if value != 0:
                return False
    return True


# -------------------------------------------------------------- table rows

@dataclass
class TableRow:
    label: str
    quadric: str
    permutation: str
    claimed: str
    generators: List[SignedMonomialMatrix]
    plane: List[List[CycloElement]]
    relations: List[List[CycloElement]]
    control: bool = False
    note: str = ""

    @property
    def singular(self) -> bool:
        return self.quadric == "singular"

    @property
    def q(self) -> Tuple[int, ...]:
        return SINGULAR_Q if self.singular else SMOOTH_Q


@dataclass
class RowReport:
    label: str
    claimed: str
    identified: str
    checks: Dict[str, bool]
    fingerprint: Optional[GroupFingerprint] = None
    sample: List[CycloElement] = field(default_factory=list)
    plane_on_quadric: Optional[bool] = None
    control: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def as_expected(self) -> bool:
        """Genuine rows must pass, negative controls must fail"""
        return self.passed != self.control

    def to_json(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "claimed": self.claimed,
            "identified": self.identified,
            "checks": self.checks,
            "passed": self.passed,
            "control": self.control,
            "maximality": "asserted",
            "plane_on_quadric": self.plane_on_quadric,
            "sample": [str(x) for x in self.sample],
            "fingerprint": self.fingerprint.to_json() if self.fingerprint else None,
            "notes": self.notes,
        }


def parse_row(data: Dict[str, Any], quadric: str) -> TableRow:
    try:
        constants: Dict[str, CycloElement] = {}
        for name, text in data.get("constants", {}).items():
            constants[name] = parse_scalar(text, constants)
        variables = [f"x{k}" for k in range(DIMENSION)]
        coefficients = [f"a{k}" for k in range(DIMENSION)]
        return TableRow(
            label=data["label"],
            quadric=quadric,
            permutation=data.get("permutation", "Id"),
            claimed=data["type"],
            generators=[SignedMonomialMatrix.parse(g, constants) for g in data["generators"]],
            plane=[linear_form(text, variables, constants) for text in data["plane"]],
            relations=[linear_form(text, coefficients, constants) for text in data.get("relations", [])],
            control=bool(data.get("control", False)),
            note=data.get("note", ""),
        )
    except KeyError as e:
        raise InputError(f"table row missing field {e}")


def sample_coefficients(row: TableRow, sample_range: int = 3, seed: int = 2016, attempts: int = 5000) -> List[CycloElement]:
    """A coefficient vector a satisfying the row's relations and the distinctness conditions"""
    if row.relations:
        basis = FieldMatrix(row.relations).nullspace()
    else:
        basis = [[Fraction(int(i == j)) for j in range(DIMENSION)] for i in range(DIMENSION)]
    rng = random.Random(seed)
    for _ in range(attempts):
        weights = [rng.randint(-sample_range, sample_range) for _ in basis]
        a = [CycloElement.rational(0)] * DIMENSION
        for w, vector in zip(weights, basis):
            if w:
                a = [x + w * CycloElement.coerce(v) for x, v in zip(a, vector)]
        try:
            _check_distinct(a, row.singular)
        except InputError:
            continue
        return a
    raise InputError(f"no admissible coefficient sample for row {row.label}")


def verify_table_row(row: TableRow, cap: int = DEFAULT_CLOSURE_CAP, sample_range: int = 3) -> RowReport:
    report = RowReport(label=row.label, claimed=row.claimed, identified="unknown", checks={}, control=row.control)
    if row.note:
        report.notes.append(row.note)
        logger.warning(f"Row {row.label}: {row.note}")

    try:
        a = sample_coefficients(row, sample_range)
        report.sample = a
        report.checks["pencil"] = all(preserves_pencil(m, a, row.q) for m in row.generators)
    except Exception as e:
        logger.error(f"Error checking pencil invariance for {row.label}: {e}")
        report.checks["pencil"] = False
        report.notes.append(f"pencil: {e}")

    try:
        group = group_closure(row.generators, cap)
    except Exception as e:
        logger.error(f"Error closing the group of {row.label}: {e}")
        report.checks["plane"] = False
        report.checks["type"] = False
        report.notes.append(f"closure: {e}")
        return report

    try:
        report.checks["plane"] = plane_invariant(group, row.plane)
        report.plane_on_quadric = plane_on_quadric(row.plane, row.q)
    except Exception as e:
        logger.error(f"Error checking plane invariance for {row.label}: {e}")
        report.checks["plane"] = False
        report.notes.append(f"plane: {e}")

    try:
        report.identified, report.fingerprint = identify_group(group)
        report.checks["type"] = report.identified == row.claimed
    except Exception as e:
        logger.error(f"Error identifying the group of {row.label}: {e}")
        report.checks["type"] = False
        report.notes.append(f"type: {e}")

    status = "pass" if report.passed else "FAIL"
    logger.info(f"Row {row.label} ({row.claimed}): {status} {report.checks}")
    return report


def load_table_data(data: Dict[str, Any]) -> List[TableRow]:
    quadric = data.get("quadric", "smooth")
    if quadric not in ("smooth", "singular"):
        raise InputError(f"unknown quadric type {quadric!r}")
    return [parse_row(row, quadric) for row in data.get("rows", [])]
