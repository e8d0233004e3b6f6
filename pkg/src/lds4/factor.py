"""Composition and complex factorization of order-4 standard LDSs.

``compose_lucas`` multiplies two order-2 Lucas sequences into the standard
order-4 family. ``factor_standard`` goes the other way, splitting a
standard quartic into two monic quadratics over certified complex numbers
so that the elementwise product of their Lucas sequences reproduces an
integer standard LDS. The two directions are exact inverses up to the
unit-rescaling equivalence tested by ``equivalent_factorizations``.

Branch bookkeeping matters here. For p != 0 there are two factor families
("s_plus"/"s_minus", the two signs in front of the inner square root),
normalized so the first quadratic has constant term 1. For p = 0 there are
two families as well, and the second one ("q_family", with k1*k2 = -r)
does not factor the (0, q, r) sequence itself: it factors the sibling
standard LDS (0, q+4r, -r) that shares the same quartic. Each returned
pair records the parameters of the sequence it actually factors.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .certified import (
    ComplexBall,
    DEFAULT_PRECISION,
    RoundingUndecided,
    dyadic_fraction,
)
from .polyalg import (
    IntPoly,
    StandardParams,
    kron_poly,
    quartic_discriminant,
    standard_poly,
    standard_terms,
)
from .seqcore import LucasParams, SequenceWindow


class DegenerateInputError(ValueError):
    """The quartic violates the non-degeneracy needed by the factorization."""


class RingClass(enum.Enum):
    INTEGERS = "integers"
    GAUSSIAN_INTEGERS = "gaussian_integers"
    OTHER = "other"


@dataclass(frozen=True)
class ComplexQuadratic:
    """Monic quadratic x^2 - h*x + k over certified complex numbers."""

    h: ComplexBall
    k: ComplexBall

    @classmethod
    def from_lucas(cls, params: LucasParams, prec: int = DEFAULT_PRECISION) -> "ComplexQuadratic":
        return cls(ComplexBall.from_int(params.h, prec), ComplexBall.from_int(params.k, prec))

    def lucas_terms(self, count: int) -> List[ComplexBall]:
        """Ball enclosures of U_0..U_{count-1} with U_0 = 0, U_1 = 1."""
        prec = max(self.h.prec, self.k.prec)
        terms = [ComplexBall.from_int(0, prec), ComplexBall.from_int(1, prec)]
        while len(terms) < count:
            terms.append(self.h * terms[-1] - self.k * terms[-2])
        return terms[:count]


@dataclass(frozen=True)
class QuadraticFactorPair:
    """One factorization family: two quadratics plus provenance.

    ``params`` are the standard parameters of the integer sequence this
    pair factors elementwise (see module docstring for the p = 0 sibling
    subtlety); ``family_tag`` names the branch; ``diagnostics`` carries
    non-fatal structural notes such as "repeated-roots".
    """

    first: ComplexQuadratic
    second: ComplexQuadratic
    family_tag: str
    params: StandardParams
    diagnostics: Tuple[str, ...] = field(default=())

    def swapped(self) -> "QuadraticFactorPair":
        return QuadraticFactorPair(
            self.second, self.first, self.family_tag + "-swapped", self.params, self.diagnostics
        )

    def product_lucas_terms(self, count: int) -> List[ComplexBall]:
        b = self.first.lucas_terms(count)
        c = self.second.lucas_terms(count)
        return [x * y for x, y in zip(b, c)]


def compose_lucas(a: LucasParams, b: LucasParams) -> Tuple[StandardParams, SequenceWindow]:
    """Standard parameters and initial terms of the product of two Lucas LDSs."""
    h1, k1, h2, k2 = a.h, a.k, b.h, b.k
    sp = StandardParams(
        p=h1 * h2,
        q=h1 * h1 * k2 + k1 * (h2 * h2 - 4 * k2),
        r=k1 * k2,
    )
    window = SequenceWindow(0, (0, 1, h1 * h2, (h1 * h1 - k1) * (h2 * h2 - k2)))
    return sp, window


def compose_lucas_check(a: LucasParams, b: LucasParams) -> IntPoly:
    """Independent reconstruction of the composed quartic via the Kronecker route."""
    fa = IntPoly((a.k, -a.h, 1))
    fb = IntPoly((b.k, -b.h, 1))
    return kron_poly(fa, fb)


def _guard_degeneracy(sp: StandardParams) -> Tuple[str, ...]:
    """Reject inputs where every factorization collapses; note the rest.

    The hard failures are the quadruple-root quartics (x - c)^4, i.e.
    p^2 = 4q together with p^2 = 16r, and for p = 0 the degenerate q = 0
    and q + 4r = 0 cases. A merely repeated quartic root (the
    Fibonacci-square quartic, or a squared quadratic such as p^2 = 4q
    alone) leaves the branch formulas well-defined and is reported as a
    "repeated-roots" diagnostic instead of an error.
    """
    p, q, r = sp.p, sp.q, sp.r
    if p * p == 4 * q and p * p == 16 * r:
        raise DegenerateInputError(
            f"(p,q,r)=({p},{q},{r}) is a quadruple-root quartic (x - {p}/4)^4"
        )
    if p == 0 and q == 0:
        raise DegenerateInputError("p = 0 with q = 0 is degenerate")
    if p == 0 and q + 4 * r == 0:
        raise DegenerateInputError("p = 0 with q + 4r = 0 is degenerate")
    notes = []
    if quartic_discriminant(standard_poly(sp)) == 0:
        notes.append("repeated-roots")
    return tuple(notes)


def factor_standard(
    sp: StandardParams, precision: int = DEFAULT_PRECISION
) -> List[QuadraticFactorPair]:
    """Both factorization families of a standard quartic over C.

    For p != 0 the first quadratic is normalized to constant term 1 and the
    second carries constant term r; the two entries are the +/- branches.
    For p = 0 the entries are the {x^2+1, x^2-sqrt(q+4r)x+r} family and the
    {x^2+1, x^2-sqrt(q)x-r} sibling family. All square roots take the
    principal branch.
    """
    notes = _guard_degeneracy(sp)
    p, q, r = sp.p, sp.q, sp.r
    prec = precision
    one = ComplexBall.from_int(1, prec)
    r_ball = ComplexBall.from_int(r, prec)
    if p == 0:
        s1 = ComplexBall.from_int(q + 4 * r, prec).sqrt()
        s2 = ComplexBall.from_int(q, prec).sqrt()
        x2_plus_1 = ComplexQuadratic(ComplexBall.from_int(0, prec), one)
        return [
            QuadraticFactorPair(
                x2_plus_1, ComplexQuadratic(s1, r_ball), "q4r_family", sp, notes
            ),
            QuadraticFactorPair(
                x2_plus_1,
                ComplexQuadratic(s2, -r_ball),
                "q_family",
                StandardParams(0, q + 4 * r, -r),
                notes,
            ),
        ]
    sqrt_r = r_ball.sqrt()
    base = ComplexBall.from_int(q + 4 * r, prec)
    shift = sqrt_r * (2 * p)
    big_a = (base + shift).sqrt()
    big_b = (base - shift).sqrt()
    if big_a.is_exact and big_a.contains_zero() or big_b.is_exact and big_b.contains_zero():
        notes = notes + ("coincident-branches",)
    two_sqrt_r = sqrt_r * 2
    pairs = []
    for tag, sign in (("s_plus", 1), ("s_minus", -1)):
        s = (big_a + big_b * sign) / two_sqrt_r
        s_bar = (big_a - big_b * sign) * Fraction(1, 2)
        pairs.append(
            QuadraticFactorPair(
                ComplexQuadratic(s, one),
                ComplexQuadratic(s_bar, r_ball),
                tag,
                sp,
                notes,
            )
        )
    return pairs


def verify_factorization(
    sp: StandardParams,
    pair: QuadraticFactorPair,
    n_max: int = 20,
    tolerance: Fraction = Fraction(1, 2**100),
) -> bool:
    """Check a factor pair against the quartic and the integer sequence.

    True iff (i) the symmetric-function reconstruction of the quartic from
    the pair matches ``standard_poly(sp)`` with certified error below
    ``tolerance`` on every coefficient, and (ii) the elementwise product
    of the pair's Lucas sequences encloses the exact integer LDS of
    ``pair.params`` for n <= n_max at the same tolerance. Raises
    RoundingUndecided when the pair's enclosures are too wide to decide
    (the precision of the pair itself bounds what can be certified here).
    """
    h1, k1 = pair.first.h, pair.first.k
    h2, k2 = pair.second.h, pair.second.k
    target = standard_poly(sp)
    k1k2 = k1 * k2
    recon = [
        (k1k2 * k1k2, target.coefficients[0]),
        (h1 * h2 * k1k2, -target.coefficients[1]),
        (h1 * h1 * k2 + h2 * h2 * k1 - k1k2 * 2, target.coefficients[2]),
        (h1 * h2, -target.coefficients[3]),
    ]
    undecided = False
    checks = [(ball - coeff).abs() for ball, coeff in recon]
    exact = standard_terms(pair.params, n_max + 1).terms
    product = pair.product_lucas_terms(n_max + 1)
    checks.extend((product[n] - exact[n]).abs() for n in range(n_max + 1))
    for diff in checks:
        if dyadic_fraction(diff.lo) > tolerance:
            return False
        if not dyadic_fraction(diff.hi) < tolerance:
            undecided = True
    if undecided:
        raise RoundingUndecided(
            "factor pair enclosures too wide to certify the reconstruction"
        )
    return True


def _lambda_candidates(
    pair_a: QuadraticFactorPair, pair_b: QuadraticFactorPair
) -> List[ComplexBall]:
    """Candidate units from u_n = lambda^(n-1) s_n at the first usable index."""
    u = pair_a.first.lucas_terms(4)
    s = pair_b.first.lucas_terms(4)
    u2, s2 = u[2], s[2]
    if u2.is_nonzero() and s2.is_nonzero():
        return [u2 / s2]
    u2_zero = u2.is_exact and u2.contains_zero()
    s2_zero = s2.is_exact and s2.contains_zero()
    if u2_zero and s2_zero:
        # both second terms vanish; n = 3 determines lambda up to sign
        u3, s3 = u[3], s[3]
        if not (u3.is_nonzero() and s3.is_nonzero()):
            raise RoundingUndecided("no usable index to estimate the rescaling unit")
        root = (u3 / s3).sqrt()
        return [root, -root]
    if (u2_zero and s2.is_nonzero()) or (s2_zero and u2.is_nonzero()):
        return []
    raise RoundingUndecided("cannot certify whether second terms vanish")


def equivalent_factorizations(
    pair_a: QuadraticFactorPair,
    pair_b: QuadraticFactorPair,
    n_max: int = 20,
) -> Optional[ComplexBall]:
    """The unit lambda relating two factorizations, or None.

    Tests u_n = lambda^(n-1) * s_n and v_n = lambda^(1-n) * t_n for
    n <= n_max, where (u, v) are the Lucas sequences of ``pair_a`` and
    (s, t) those of ``pair_b``; lambda is estimated from the first usable
    term and then checked everywhere. None means certified non-equivalence
    for every candidate unit.
    """
    candidates = _lambda_candidates(pair_a, pair_b)
    u = pair_a.first.lucas_terms(n_max + 1)
    v = pair_a.second.lucas_terms(n_max + 1)
    s = pair_b.first.lucas_terms(n_max + 1)
    t = pair_b.second.lucas_terms(n_max + 1)
    for lam in candidates:
        if not lam.is_nonzero():
            raise RoundingUndecided("candidate unit enclosure straddles zero")
        ok = True
        lam_pow = ComplexBall.from_int(1, lam.prec)  # lambda^(n-1) at n = 1
        lam_inv = lam.recip()
        lam_ipow = ComplexBall.from_int(1, lam.prec)
        for n in range(1, n_max + 1):
            if not (u[n] - lam_pow * s[n]).contains_zero():
                ok = False
                break
            if not (v[n] - lam_ipow * t[n]).contains_zero():
                ok = False
                break
            lam_pow = lam_pow * lam
            lam_ipow = lam_ipow * lam_inv
        if ok:
            return lam
    return None


def _gauss_mul(x: Tuple[int, int], y: Tuple[int, int]) -> Tuple[int, int]:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _gauss_add(x: Tuple[int, int], y: Tuple[int, int]) -> Tuple[int, int]:
    return (x[0] + y[0], x[1] + y[1])


def classify_ring(pair: QuadraticFactorPair) -> RingClass:
    """Whether the pair's coefficients form an exact Z or Z[i] factorization.

    The four coefficients are rounded to their nearest Gaussian integers;
    membership is claimed only when every enclosure contains its rounded
    value and exact integer back-substitution reproduces the standard
    quartic coefficient-for-coefficient. "Other" is the fallback verdict
    and is certified whenever some enclosure excludes every Gaussian
    integer.
    """
    balls = [pair.first.h, pair.first.k, pair.second.h, pair.second.k]
    rounded = []
    for ball in balls:
        cand = ball.nearest_gaussian()
        if cand is None or not ball.contains_gaussian(*cand):
            return RingClass.OTHER
        rounded.append(cand)
    h1, k1, h2, k2 = rounded
    sp = pair.params
    k1k2 = _gauss_mul(k1, k2)
    e4 = _gauss_mul(k1k2, k1k2)
    e3 = _gauss_mul(_gauss_mul(h1, h2), k1k2)
    e2 = _gauss_add(
        _gauss_add(_gauss_mul(_gauss_mul(h1, h1), k2), _gauss_mul(_gauss_mul(h2, h2), k1)),
        _gauss_mul((-2, 0), k1k2),
    )
    e1 = _gauss_mul(h1, h2)
    target = standard_poly(sp)
    matches = (
        e4 == (target.coefficients[0], 0)
        and e3 == (-target.coefficients[1], 0)
        and e2 == (target.coefficients[2], 0)
        and e1 == (-target.coefficients[3], 0)
    )
    if not matches:
        return RingClass.OTHER
    if all(b == 0 for _, b in rounded):
        return RingClass.INTEGERS
    return RingClass.GAUSSIAN_INTEGERS


def factor_lucas_roundtrip(
    a: LucasParams,
    b: LucasParams,
    precision: int = DEFAULT_PRECISION,
    n_max: int = 20,
) -> Tuple[StandardParams, QuadraticFactorPair, ComplexBall]:
    """Compose two Lucas LDSs, re-factor, and find the branch equivalent to (a, b).

    Returns the composed parameters, the matching re-factored pair, and the
    certified unit relating it to the original pair. Raises ArithmeticError
    when no branch matches (which would contradict the factorization
    theorem).
    """
    sp, _ = compose_lucas(a, b)
    original = QuadraticFactorPair(
        ComplexQuadratic.from_lucas(a, precision),
        ComplexQuadratic.from_lucas(b, precision),
        "source",
        sp,
    )
    for pair in factor_standard(sp, precision):
        for candidate in (pair, pair.swapped()):
            lam = equivalent_factorizations(candidate, original, n_max)
            if lam is not None:
                return sp, candidate, lam
    raise ArithmeticError(f"no factor branch matches the source pair for {sp}")
