"""Salem standard quartics and certified nearest-integer sequences.

A Salem standard quartic ``x^4 - p*x^3 + (q+2)*x^2 - p*x + 1`` (the r = 1
standard family with -2p-4 < q < 2p-4) has a real root alpha > 1, its
reciprocal in (0, 1), and a conjugate pair on the unit circle. The
integer sequence attached to it can be generated two independent ways:
exactly, through the order-4 recurrence, or analytically, as nearest
integers E(lambda * alpha^n) once the Binet tail is certifiably below
one half. This module computes the roots and Binet coefficients with
certified enclosures, decides the tail-smallness conditions rigorously,
generates E(lambda * alpha^n) with provable rounding, and scans the
(p, q) plane comparing the closed-form feasibility region against the
certified numeric verdicts.

Root computation uses the substitution y = x + 1/x, exact for this
palindromic family: y^2 - p*y + q = 0, then alpha comes from the y > 2
branch and gamma from |y| < 2. All precision parameters are explicit;
adaptive refinement doubles the working precision up to a cap instead of
ever guessing a rounding.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .certified import (
    ComplexBall,
    DEFAULT_PRECISION,
    MAX_PRECISION,
    RealBall,
    RoundingUndecided,
    PrecisionExhausted,
    dyadic_fraction,
    refine_until_certified,
)
from .polyalg import StandardParams, standard_poly, standard_terms
from .seqcore import SequenceWindow

_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class SalemQuartic:
    """A validated Salem standard quartic with certified roots and Binet data.

    ``binet`` holds (lambda, lambda1, lambda2, lambda3), the coefficients
    of alpha^n, alpha^-n, gamma^n, gamma^-n in the Binet expansion of the
    exact integer sequence.
    """

    p: int
    q: int
    alpha: RealBall
    gamma: ComplexBall
    binet: Tuple[ComplexBall, ComplexBall, ComplexBall, ComplexBall]
    precision: int

    @property
    def params(self) -> StandardParams:
        return StandardParams(self.p, self.q, 1)


@dataclass(frozen=True)
class SmallnessVerdict:
    """Certified three-way answers to the Binet-tail smallness conditions.

    ``holds_for_all_n_ge_1`` decides |lambda1/alpha| + |lambda2| + |lambda3|
    < 1/2 (nearest-integer identity at every n >= 1); ``holds_eventually``
    decides |lambda2| + |lambda3| < 1/2. A None entry means the comparison
    stayed undecided at the precision cap; margins are 1/2 minus the
    corresponding certified sums.
    """

    holds_for_all_n_ge_1: Optional[bool]
    holds_eventually: Optional[bool]
    margin: RealBall
    margin_eventually: RealBall
    precision_used: int


def in_salem_strip(p: int, q: int) -> bool:
    """The exact integer inequality -2p-4 < q < 2p-4."""
    return -2 * p - 4 < q < 2 * p - 4


def salem_strip(p: int) -> range:
    """All integers q satisfying the Salem strip inequality for this p."""
    return range(-2 * p - 3, 2 * p - 4)


def is_salem_standard(p: int, q: int, precision: int = DEFAULT_PRECISION) -> bool:
    """Exact strip test plus certified confirmation of the root layout.

    The numeric confirmation (one real root > 1, one in (0, 1), a
    conjugate pair on the unit circle) is mathematically implied by the
    strip inequality; it is still executed as a cross-check and will raise
    rather than disagree silently.
    """
    if not in_salem_strip(p, q):
        return False
    salem_root(p, q, precision)
    return True


def _root_attempt(p: int, q: int, prec: int) -> Tuple[RealBall, ComplexBall]:
    disc = RealBall.from_int(p * p - 4 * q, prec).sqrt()
    y_plus = (disc + p) * _HALF
    y_minus = (-disc + p) * _HALF
    alpha = (y_plus + (y_plus.square() - 4).sqrt()) * _HALF
    gamma_im = (-(y_minus.square()) + 4).sqrt() * _HALF
    gamma = ComplexBall(y_minus * _HALF, gamma_im)
    if not alpha.gt(1):
        raise RoundingUndecided("cannot certify alpha > 1")
    inv = alpha.recip()
    if not (inv.is_positive() and inv.lt(1)):
        raise RoundingUndecided("cannot certify 1/alpha in (0, 1)")
    _certify_residual(p, q, ComplexBall(alpha), prec)
    _certify_residual(p, q, gamma, prec)
    gamma_norm = gamma.abs_squared()
    if not gamma_norm.contains(1):
        raise ArithmeticError("|gamma| enclosure lost the unit circle")
    return alpha, gamma


def _certify_residual(p: int, q: int, z: ComplexBall, prec: int) -> None:
    coeffs = standard_poly(StandardParams(p, q, 1)).coefficients
    acc = ComplexBall.from_int(0, prec)
    for c in reversed(coeffs):
        acc = acc * z + c
    if not acc.contains_zero():
        raise ArithmeticError("root residual enclosure excludes zero")
    bound = Fraction(1, 2 ** (prec // 2))
    if not (dyadic_fraction(acc.abs().hi) < bound):
        raise RoundingUndecided("root residual wider than the certification bound")


def salem_root(
    p: int, q: int, precision: int = DEFAULT_PRECISION
) -> Tuple[RealBall, ComplexBall]:
    """Certified alpha > 1 and unit-circle gamma of the Salem standard quartic.

    Residuals |g(alpha)| and |g(gamma)| are certified below
    2^-(precision/2); the strip inequality is a precondition.
    """
    if not in_salem_strip(p, q):
        raise ValueError(f"(p,q)=({p},{q}) violates the Salem strip inequality")
    return refine_until_certified(lambda pr: _root_attempt(p, q, pr), precision)


def _solve_binet(
    p: int, q: int, prec: int
) -> Tuple[RealBall, ComplexBall, List[ComplexBall]]:
    alpha, gamma = _root_attempt(p, q, prec)
    roots = [ComplexBall(alpha), ComplexBall(alpha.recip()), gamma, gamma.recip()]
    matrix = []
    row = [ComplexBall.from_int(1, prec) for _ in roots]
    matrix.append(list(row))
    for _ in range(3):
        row = [entry * root for entry, root in zip(row, roots)]
        matrix.append(list(row))
    rhs_ints = standard_terms(StandardParams(p, q, 1), 5).terms
    rhs = [ComplexBall.from_int(v, prec) for v in rhs_ints[:4]]

    # Gaussian elimination with certified-nonzero pivots.
    for col in range(4):
        pivot = max(
            range(col, 4), key=lambda i: dyadic_fraction(matrix[i][col].abs().lo)
        )
        if not matrix[pivot][col].is_nonzero():
            raise RoundingUndecided("no certifiably nonzero pivot in Binet system")
        matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
        rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
        for i in range(col + 1, 4):
            factor = matrix[i][col] / matrix[col][col]
            for j in range(col, 4):
                matrix[i][j] = matrix[i][j] - factor * matrix[col][j]
            rhs[i] = rhs[i] - factor * rhs[col]
    coeffs: List[Optional[ComplexBall]] = [None] * 4
    for i in range(3, -1, -1):
        acc = rhs[i]
        for j in range(i + 1, 4):
            acc = acc - matrix[i][j] * coeffs[j]
        coeffs[i] = acc / matrix[i][i]
    solved = [c for c in coeffs if c is not None]

    # Construction check: the expansion must reproduce u_0..u_4 exactly.
    for n, expected in enumerate(rhs_ints):
        total = ComplexBall.from_int(0, prec)
        for lam, root in zip(solved, roots):
            total = total + lam * root.pow_int(n)
        diff = total - expected
        if not diff.contains_zero():
            raise ArithmeticError(f"Binet expansion misses u_{n}")
    return alpha, gamma, solved


def binet_coefficients(
    p: int, q: int, precision: int = DEFAULT_PRECISION
) -> SalemQuartic:
    """Solve the 4x4 system mapping Binet coefficients to u_0..u_3."""
    if not in_salem_strip(p, q):
        raise ValueError(f"(p,q)=({p},{q}) violates the Salem strip inequality")

    def attempt(prec: int) -> SalemQuartic:
        alpha, gamma, solved = _solve_binet(p, q, prec)
        return SalemQuartic(p, q, alpha, gamma, tuple(solved), prec)

    return refine_until_certified(attempt, precision)


def smallness_condition(
    sq: SalemQuartic, max_precision: int = MAX_PRECISION
) -> SmallnessVerdict:
    """Certified verdicts for the Binet-tail smallness conditions.

    Precision is raised (by recomputing the Binet data) until each
    comparison against 1/2 is decided or the cap is reached; undecided
    comparisons are reported as None, never guessed.
    """
    current = sq
    while True:
        lam1, lam2, lam3 = current.binet[1], current.binet[2], current.binet[3]
        tail = lam2.abs() + lam3.abs()
        full = lam1.abs() * current.alpha.recip() + tail
        margin_all = RealBall.from_fraction(_HALF, current.precision) - full
        margin_event = RealBall.from_fraction(_HALF, current.precision) - tail
        holds_all = (
            True if margin_all.is_positive()
            else False if margin_all.is_negative()
            else None
        )
        holds_event = (
            True if margin_event.is_positive()
            else False if margin_event.is_negative()
            else None
        )
        if holds_all is True and holds_event is None:
            holds_event = True  # the tail sum is bounded by the full sum
        if (holds_all is not None and holds_event is not None) or (
            current.precision >= max_precision
        ):
            return SmallnessVerdict(
                holds_for_all_n_ge_1=holds_all,
                holds_eventually=holds_event,
                margin=margin_all,
                margin_eventually=margin_event,
                precision_used=current.precision,
            )
        current = binet_coefficients(
            current.p, current.q, min(2 * current.precision, max_precision)
        )


def nearest_integer(x: RealBall) -> int:
    """The unique nearest integer to a certified real value.

    Raises RoundingUndecided when the enclosure touches a half-integer;
    the caller is expected to raise precision rather than break the tie
    by convention.
    """
    value = x.nearest_integer()
    if value is None:
        raise RoundingUndecided(
            "enclosure does not separate from the nearest half-integer"
        )
    return value


def _sequence_attempt(p: int, q: int, n_max: int, prec: int) -> List[int]:
    _, _, solved = _solve_binet(p, q, prec)
    lam_re = solved[0].re
    alpha, _ = _root_attempt(p, q, prec)
    terms = []
    power = alpha
    for _ in range(1, n_max + 1):
        terms.append(nearest_integer(lam_re * power))
        power = power * alpha
    return terms


def nearest_integer_sequence(
    p: int,
    q: int,
    n_max: int,
    precision: int = DEFAULT_PRECISION,
    max_precision: int = MAX_PRECISION,
) -> SequenceWindow:
    """E(lambda * alpha^n) for n = 1..n_max with certified rounding.

    When the all-n smallness condition holds the window starts at index 1
    and provably equals the exact integer LDS. Otherwise the identity is
    compared against the exact recurrence and the window starts just past
    the last observed mismatch n0 (reported via ``start_index``); a window
    is only returned if some tail matches.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if not in_salem_strip(p, q):
        raise ValueError(f"(p,q)=({p},{q}) violates the Salem strip inequality")
    verdict = smallness_condition(
        binet_coefficients(p, q, precision), max_precision
    )
    terms = refine_until_certified(
        lambda pr: _sequence_attempt(p, q, n_max, pr), precision, max_precision
    )
    if verdict.holds_for_all_n_ge_1 is True:
        return SequenceWindow(1, terms)
    exact = standard_terms(StandardParams(p, q, 1), n_max + 1).terms
    mismatches = [n for n in range(1, n_max + 1) if terms[n - 1] != exact[n]]
    n0 = max(mismatches, default=0)
    if n0 >= n_max:
        raise ValueError(
            f"E(lambda*alpha^n) never settles onto the exact sequence below n={n_max}"
        )
    return SequenceWindow(n0 + 1, terms[n0:])


def t_family_params(t: int) -> Tuple[int, int]:
    """(p, q) of the one-parameter family x^4 - t*x^3 + t*x^2 - t*x + 1."""
    if t < 6:
        raise ValueError("the t-family needs t >= 6")
    return t, t - 2


def t_family_lambda(t: int, precision: int = DEFAULT_PRECISION) -> RealBall:
    """Closed form 1/sqrt((t-4)*t + 8) for the leading Binet coefficient."""
    if t < 6:
        raise ValueError("the t-family needs t >= 6")
    return RealBall.from_int((t - 4) * t + 8, precision).sqrt().recip()


def region_bounds(p: int) -> Tuple[Fraction, Fraction]:
    """Exact rational feasibility bounds (q_low, q_high) for the given p."""
    if p < 2:
        raise ValueError("the feasibility region is stated for p >= 2")
    low = Fraction(-4 - 2 * p)
    if p <= 8:
        high = Fraction(p**4 + 8 * p**3 - 160 * p - 400, 4 * p**2 + 32 * p + 64)
    else:
        high = Fraction(-4 + 2 * p)
    return low, high


def in_region(p: int, q: int) -> bool:
    low, high = region_bounds(p)
    return low < q < high


@dataclass(frozen=True)
class SalemScanCell:
    """One (p, q) cell of the strip scan.

    ``agree`` compares closed-form region membership with the certified
    smallness verdict (None while the verdict is undecided);
    ``empirical_match`` is measured only for cells whose certified verdict
    failed, and records whether E(lambda*alpha^n) still reproduced the
    exact sequence on the tested range.
    """

    p: int
    q: int
    in_region: bool
    verdict: SmallnessVerdict
    agree: Optional[bool]
    empirical_match: Optional[bool]


def _scan_cell(
    p: int, q: int, precision: int, max_precision: int, empirical_n: int
) -> SalemScanCell:
    verdict = smallness_condition(binet_coefficients(p, q, precision), max_precision)
    member = in_region(p, q)
    agree = None
    if verdict.holds_for_all_n_ge_1 is not None:
        agree = member == verdict.holds_for_all_n_ge_1
    empirical = None
    if verdict.holds_for_all_n_ge_1 is False:
        try:
            terms = refine_until_certified(
                lambda pr: _sequence_attempt(p, q, empirical_n, pr),
                precision,
                max_precision,
            )
            exact = standard_terms(StandardParams(p, q, 1), empirical_n + 1).terms
            empirical = all(
                terms[n - 1] == exact[n] for n in range(1, empirical_n + 1)
            )
        except PrecisionExhausted:
            empirical = None
    return SalemScanCell(p, q, member, verdict, agree, empirical)


def enumerate_ldsalem(
    p_max: int,
    precision: int = DEFAULT_PRECISION,
    max_precision: int = MAX_PRECISION,
    empirical_n: int = 40,
    max_workers: Optional[int] = None,
) -> List[SalemScanCell]:
    """Scan every Salem-strip cell with 2 <= p <= p_max.

    Cells are independent; with ``max_workers`` > 1 they are evaluated
    concurrently, and the output order (sorted by (p, q)) is deterministic
    either way. Disagreements between the closed-form region and the
    certified verdict surface as ``agree is False`` entries, never as
    silent corrections.
    """
    if p_max < 2:
        raise ValueError("p_max must be at least 2")
    cells = [(p, q) for p in range(2, p_max + 1) for q in salem_strip(p)]

    def work(cell: Tuple[int, int]) -> SalemScanCell:
        return _scan_cell(cell[0], cell[1], precision, max_precision, empirical_n)

    if max_workers is not None and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(work, cells))
    return [work(cell) for cell in cells]
