"""Exact integer polynomial and matrix algebra for order-4 LDS work.

Contains companion matrices, a division-free exact characteristic
polynomial, Kronecker products of matrices and of polynomials, the
standard quartic family ``x^4 - p*x^3 + (q+2r)*x^2 - p*r*x + r^2`` with
its canonical initial conditions, recognition of that coefficient
pattern, and the certified six-pair divisor product bound.

Companion convention: the negated polynomial coefficients sit in the last
row, so ``companion(x^2 - x - 1) == [[0, 1], [1, 1]]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .certified import (
    ComplexBall,
    DEFAULT_PRECISION,
    MAX_PRECISION,
    refine_until_certified,
)
from .seqcore import LinearRecurrence, SequenceWindow, recurrence_terms

MAX_KRON_DEGREE = 64


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial, constant term first."""

    coefficients: Tuple[int, ...]

    def __init__(self, coefficients):
        coeffs = tuple(int(c) for c in coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        if not coeffs:
            coeffs = (0,)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_monic(self) -> bool:
        return self.coefficients[-1] == 1

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __mul__(self, other: "IntPoly") -> "IntPoly":
        a, b = self.coefficients, other.coefficients
        out = [0] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return IntPoly(out)

    def __str__(self) -> str:
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if c == 0:
                continue
            term = f"x^{i}" if i > 1 else ("x" if i == 1 else "")
            if abs(c) != 1 or i == 0:
                term = f"{abs(c)}{'*' if term else ''}{term}"
            parts.append(("- " if c < 0 else "+ ") + term)
        if not parts:
            return "0"
        lead = parts[0].replace("+ ", "").replace("- ", "-")
        return " ".join([lead] + parts[1:])


@dataclass(frozen=True)
class StandardParams:
    """The (p, q, r) triple defining a standard quartic; r must be nonzero."""

    p: int
    q: int
    r: int

    def __post_init__(self):
        if self.r == 0:
            raise ValueError("r must be nonzero for a standard quartic")


@dataclass(frozen=True)
class IntMatrix:
    rows: Tuple[Tuple[int, ...], ...]

    def __init__(self, rows):
        tup = tuple(tuple(int(v) for v in row) for row in rows)
        if not tup or any(len(row) != len(tup) for row in tup):
            raise ValueError("matrix must be square and non-empty")
        object.__setattr__(self, "rows", tup)

    @property
    def dimension(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        n = self.dimension
        if other.dimension != n:
            raise ValueError("dimension mismatch")
        cols = list(zip(*other.rows))
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
                for row in self.rows
            )
        )

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.dimension))

    def add_scalar_diagonal(self, c: int) -> "IntMatrix":
        return IntMatrix(
            tuple(
                tuple(v + c if i == j else v for j, v in enumerate(row))
                for i, row in enumerate(self.rows)
            )
        )


def companion(f: IntPoly) -> IntMatrix:
    """Companion matrix of a monic polynomial, coefficients in the last row."""
    if not f.is_monic:
        raise ValueError("companion matrix needs a monic polynomial")
    d = f.degree
    if d < 1:
        raise ValueError("degree must be at least 1")
    rows = [[0] * d for _ in range(d)]
    for i in range(d - 1):
        rows[i][i + 1] = 1
    for j in range(d):
        rows[d - 1][j] = -f.coefficients[j]
    return IntMatrix(rows)


def char_poly_exact(m: IntMatrix) -> IntPoly:
    """Characteristic polynomial det(xI - M) by the Faddeev-LeVerrier scheme.

    Every division performed is an exact integer division (checked), so the
    result is exact for any integer matrix without passing through
    rationals.
    """
    n = m.dimension
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = IntMatrix.identity(n)
    for k in range(1, n + 1):
        am = m @ mk
        tr = am.trace()
        c, rem = divmod(-tr, k)
        if rem:
            raise ArithmeticError("Faddeev-LeVerrier division was not exact")
        coeffs[n - k] = c
        mk = am.add_scalar_diagonal(c)
    return IntPoly(coeffs)


def kron_matrix(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    na, nb = a.dimension, b.dimension
    rows = []
    for i in range(na):
        for k in range(nb):
            row = []
            for j in range(na):
                aij = a.rows[i][j]
                row.extend(aij * b.rows[k][l] for l in range(nb))
            rows.append(tuple(row))
    return IntMatrix(rows)


def kron_poly(f: IntPoly, g: IntPoly) -> IntPoly:
    """Characteristic polynomial whose roots are all products of roots of f and g."""
    if not (f.is_monic and g.is_monic):
        raise ValueError("kron_poly needs monic polynomials")
    if f.degree * g.degree > MAX_KRON_DEGREE:
        raise ValueError(f"product degree exceeds {MAX_KRON_DEGREE}")
    return char_poly_exact(kron_matrix(companion(f), companion(g)))


def standard_poly(sp: StandardParams) -> IntPoly:
    """The quartic x^4 - p*x^3 + (q+2r)*x^2 - p*r*x + r^2."""
    p, q, r = sp.p, sp.q, sp.r
    return IntPoly((r * r, -p * r, q + 2 * r, -p, 1))


def standard_initial_conditions(sp: StandardParams) -> SequenceWindow:
    p, q, r = sp.p, sp.q, sp.r
    return SequenceWindow(0, (0, 1, p, p * p - q - 3 * r))


def standard_recurrence(sp: StandardParams) -> LinearRecurrence:
    p, q, r = sp.p, sp.q, sp.r
    return LinearRecurrence(
        (p, -(q + 2 * r), p * r, -r * r),
        standard_initial_conditions(sp).terms,
    )


def standard_terms(sp: StandardParams, count: int) -> SequenceWindow:
    return recurrence_terms(standard_recurrence(sp), count)


def poly_from_recurrence(rec: LinearRecurrence) -> IntPoly:
    """Monic characteristic polynomial of a recurrence (see module docstring)."""
    coeffs = [-c for c in reversed(rec.coefficients)]
    coeffs.append(1)
    return IntPoly(coeffs)


def recurrence_from_poly(f: IntPoly, initial_terms) -> LinearRecurrence:
    if not f.is_monic:
        raise ValueError("characteristic polynomial must be monic")
    coeffs = tuple(-c for c in f.coefficients[-2::-1])
    return LinearRecurrence(coeffs, initial_terms)


def _recognize_with_r(f: IntPoly, r: int) -> Optional[StandardParams]:
    c0, c1, c2, c3, _ = f.coefficients
    p = -c3
    if -p * r != c1:
        return None
    return StandardParams(p, c2 - 2 * r, r)


def recognize_standard_all(f: IntPoly) -> Tuple[StandardParams, ...]:
    """Every (p, q, r) whose standard quartic equals f; r > 0 candidate first.

    Both signs of r match exactly when p = 0 and the linear coefficient
    vanishes, in which case the two triples describe different standard
    LDSs sharing one characteristic polynomial.
    """
    if f.degree != 4:
        raise ValueError("recognition works on quartics")
    if not f.is_monic:
        raise ValueError("recognition works on monic quartics")
    c0 = f.coefficients[0]
    if c0 <= 0:
        return ()
    root = math.isqrt(c0)
    if root * root != c0:
        return ()
    found = []
    for r in (root, -root):
        sp = _recognize_with_r(f, r)
        if sp is not None:
            found.append(sp)
    return tuple(found)


def recognize_standard(f: IntPoly) -> Optional[StandardParams]:
    """The standard parameters of f, or None; prefers r > 0 when both signs fit."""
    candidates = recognize_standard_all(f)
    return candidates[0] if candidates else None


def quartic_discriminant(f: IntPoly) -> int:
    """Discriminant of a monic quartic; zero iff the quartic has a repeated root."""
    if f.degree != 4 or not f.is_monic:
        raise ValueError("discriminant formula expects a monic quartic")
    e, d, c, b, _ = f.coefficients
    return (
        256 * e**3
        - 192 * b * d * e**2
        - 128 * c**2 * e**2
        + 144 * c * d**2 * e
        - 27 * d**4
        + 144 * b**2 * c * e**2
        - 6 * b**2 * d**2 * e
        - 80 * b * c**2 * d * e
        + 18 * b * c * d**3
        + 16 * c**4 * e
        - 4 * c**3 * d**2
        - 27 * b**4 * e**2
        + 18 * b**3 * c * d * e
        - 4 * b**3 * d**3
        - 4 * b**2 * c**3 * e
        + b**2 * c**2 * d**2
    )


def standard_quartic_roots(sp: StandardParams, prec: int) -> List[ComplexBall]:
    """Certified enclosures of the four roots of the standard quartic.

    Uses the reciprocal-style substitution y = x + r/x, exact for this
    family: y satisfies y^2 - p*y + q = 0 and each y lifts to a root pair
    of x^2 - y*x + r. Roots come out grouped by lift: [x1, x2, x3, x4]
    with x1*x2 = x3*x4 = r.
    """
    half = Fraction(1, 2)
    p = ComplexBall.from_int(sp.p, prec)
    q = ComplexBall.from_int(sp.q, prec)
    r = ComplexBall.from_int(sp.r, prec)
    disc_y = (p * p - q * 4).sqrt()
    roots: List[ComplexBall] = []
    for sign in (1, -1):
        y = (p + disc_y * sign) * half
        disc_x = (y * y - r * 4).sqrt()
        for sign2 in (1, -1):
            roots.append((y + disc_x * sign2) * half)
    return roots


def pair_product_bound(
    sp: StandardParams,
    n: int,
    precision: int = DEFAULT_PRECISION,
    max_precision: int = MAX_PRECISION,
) -> int:
    """|b_n| where b_n is the six-fold product of (x^n - y^n)/(x - y) over root pairs.

    Each factor is evaluated as the order-2 recurrence U_n(x + y, x*y) in
    certified complex arithmetic, which stays well-defined when a pair of
    roots coincides. Precision is raised adaptively until the enclosure
    pins a unique integer; the sign is discarded (only divisibility by the
    exact sequence matters, and the product's sign oscillates).
    """
    if n < 1:
        raise ValueError("n must be positive")

    def attempt(prec: int) -> int:
        roots = standard_quartic_roots(sp, prec)
        product = ComplexBall.from_int(1, prec)
        for i in range(4):
            for j in range(i + 1, 4):
                h = roots[i] + roots[j]
                k = roots[i] * roots[j]
                u_prev = ComplexBall.from_int(0, prec)
                u = ComplexBall.from_int(1, prec)
                for _ in range(n - 1):
                    u_prev, u = u, h * u - k * u_prev
                product = product * u
        value = _certified_real_integer(product)
        return abs(value)

    return refine_until_certified(attempt, precision, max_precision)


def _certified_real_integer(z: ComplexBall) -> int:
    from .certified import RoundingUndecided

    if not z.im.contains_zero():
        raise ArithmeticError("expected a real value, imaginary part excludes zero")
    value = z.re.unique_integer()
    if value is None:
        raise RoundingUndecided("enclosure does not pin a unique integer")
    return value
