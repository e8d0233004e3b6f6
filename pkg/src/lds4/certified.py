"""Certified arbitrary-precision real and complex ball arithmetic.

This is the numeric kernel backing every rounding decision in the package
that must be provable: a value is represented by exact dyadic endpoint
enclosures (one interval per real component), and every operation rounds
outward. An enclosure therefore always contains the exact mathematical
result of the operation chain that produced it, and a zero-width enclosure
is exact. Integer chains stay exact as long as they fit in the working
precision, which is what lets degenerate branch values such as
``q + 4r + 2p*sqrt(r) == 0`` be detected exactly instead of approximately.

Only correctly-rounded mpmath primitives are used (add, sub, mul, div,
sqrt), each with an explicit precision and rounding direction; no ambient
mpmath state is read or written.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Optional, TypeVar, Union

import mpmath
from mpmath import mpf
from mpmath.libmp import from_int, mpf_neg, mpf_pos, mpf_sqrt

DEFAULT_PRECISION = 256
MAX_PRECISION = 16384

# Endpoint bookkeeping (radii, widths) never needs full working precision.
_RADIUS_PREC = 64

_make_mpf = mpmath.mp.make_mpf

_ZERO = mpf(0)
_HALF = mpf("0.5")


class CertificationError(ArithmeticError):
    """A numeric claim could not be certified."""


class RoundingUndecided(CertificationError):
    """The enclosure is too wide to decide the question at this precision."""


class PrecisionExhausted(CertificationError):
    """Raising precision up to the configured cap did not settle the question."""


T = TypeVar("T")


def refine_until_certified(
    compute: Callable[[int], T],
    precision: int = DEFAULT_PRECISION,
    max_precision: int = MAX_PRECISION,
) -> T:
    """Run ``compute(prec)``, doubling ``prec`` while it raises RoundingUndecided.

    This is the standard adaptive-precision driver: computations signal an
    undecidable comparison/rounding by raising :class:`RoundingUndecided`,
    and the driver retries from scratch at doubled precision up to
    ``max_precision`` before giving up with :class:`PrecisionExhausted`.
    """
    if precision < 2:
        raise ValueError("precision must be at least 2 bits")
    prec = precision
    while True:
        try:
            return compute(prec)
        except RoundingUndecided as exc:
            if prec >= max_precision:
                raise PrecisionExhausted(
                    f"undecided at precision cap {max_precision}: {exc}"
                ) from exc
            prec = min(2 * prec, max_precision)


def _round_to(x: mpf, prec: int, mode: str) -> mpf:
    return _make_mpf(mpf_pos(x._mpf_, prec, mode))


def _neg(x: mpf) -> mpf:
    # mpf.__neg__ rounds to the ambient mpmath context; this stays exact.
    return _make_mpf(mpf_neg(x._mpf_))


def _int_to(n: int, prec: int, mode: str) -> mpf:
    return _make_mpf(from_int(n, prec, mode))


def _sqrt_to(x: mpf, prec: int, mode: str) -> mpf:
    return _make_mpf(mpf_sqrt(x._mpf_, prec, mode))


def _exact_add(x: mpf, y: mpf) -> mpf:
    return mpmath.fadd(x, y, exact=True)


def _exact_sub(x: mpf, y: mpf) -> mpf:
    return mpmath.fsub(x, y, exact=True)


def _exact_mul(x: mpf, y: mpf) -> mpf:
    return mpmath.fmul(x, y, exact=True)


def dyadic_fraction(x: mpf) -> Fraction:
    """Exact rational value of a finite mpf."""
    sign, man, exp, _ = x._mpf_
    man = int(man)
    if sign:
        man = -man
    if exp >= 0:
        return Fraction(man * (1 << exp))
    return Fraction(man, 1 << (-exp))


BallOperand = Union["RealBall", int, Fraction]


class RealBall:
    """A real number known to lie in the dyadic interval [lo, hi].

    ``prec`` is the working precision used when this ball combines with
    others (the larger operand precision wins). Endpoints are exact mpf
    values; ``lo == hi`` means the value is known exactly.
    """

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo: mpf, hi: mpf, prec: int = DEFAULT_PRECISION):
        if not (lo <= hi):
            raise ValueError(f"invalid interval endpoints [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self.prec = prec

    # -- construction -------------------------------------------------

    @classmethod
    def from_int(cls, n: int, prec: int = DEFAULT_PRECISION) -> "RealBall":
        return cls(_int_to(n, prec, "f"), _int_to(n, prec, "c"), prec)

    @classmethod
    def from_fraction(cls, value: Fraction, prec: int = DEFAULT_PRECISION) -> "RealBall":
        num = cls.from_int(value.numerator, prec)
        if value.denominator == 1:
            return num
        return num / cls.from_int(value.denominator, prec)

    @classmethod
    def exact_zero(cls, prec: int = DEFAULT_PRECISION) -> "RealBall":
        return cls(_ZERO, _ZERO, prec)

    @classmethod
    def hull(cls, a: "RealBall", b: "RealBall") -> "RealBall":
        return cls(min(a.lo, b.lo), max(a.hi, b.hi), max(a.prec, b.prec))

    def _coerce(self, other: BallOperand) -> "RealBall":
        if isinstance(other, RealBall):
            return other
        if isinstance(other, int):
            return RealBall.from_int(other, self.prec)
        if isinstance(other, Fraction):
            return RealBall.from_fraction(other, self.prec)
        return NotImplemented  # type: ignore[return-value]

    # -- inspection ----------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def mid(self) -> mpf:
        return _round_to(
            _make_mpf(mpmath.libmp.mpf_shift(_exact_add(self.lo, self.hi)._mpf_, -1)),
            self.prec,
            "n",
        )

    @property
    def rad(self) -> mpf:
        """Upper bound on the distance from :attr:`mid` to either endpoint."""
        m = self.mid
        worst = max(_exact_sub(self.hi, m), _exact_sub(m, self.lo))
        return _round_to(worst, _RADIUS_PREC, "u")

    @property
    def width(self) -> mpf:
        return _round_to(_exact_sub(self.hi, self.lo), _RADIUS_PREC, "u")

    def contains(self, value: Union[int, Fraction]) -> bool:
        v = Fraction(value)
        return dyadic_fraction(self.lo) <= v <= dyadic_fraction(self.hi)

    def contains_zero(self) -> bool:
        return self.lo <= _ZERO <= self.hi

    def is_nonzero(self) -> bool:
        """True iff the enclosure certifies the value is not zero."""
        return self.lo > _ZERO or self.hi < _ZERO

    def is_positive(self) -> bool:
        return self.lo > _ZERO

    def is_negative(self) -> bool:
        return self.hi < _ZERO

    def lt(self, other: BallOperand) -> Optional[bool]:
        """Certified strict comparison; None when the enclosures overlap."""
        o = self._coerce(other)
        if self.hi < o.lo:
            return True
        if self.lo > o.hi:
            return False
        if self.is_exact and o.is_exact:
            return False  # equal exact values: not strictly less
        return None

    def gt(self, other: BallOperand) -> Optional[bool]:
        o = self._coerce(other)
        return o.lt(self)

    def unique_integer(self) -> Optional[int]:
        """The single integer inside the enclosure, or None."""
        lo = dyadic_fraction(self.lo)
        hi = dyadic_fraction(self.hi)
        first = math.ceil(lo)
        last = math.floor(hi)
        if first == last:
            return first
        return None

    def nearest_integer(self) -> Optional[int]:
        """The integer n with the whole enclosure inside (n-1/2, n+1/2).

        Returns None when the enclosure touches a half-integer, in which
        case the caller is expected to raise precision; ties are never
        resolved by convention.
        """
        lo = dyadic_fraction(self.lo)
        hi = dyadic_fraction(self.hi)
        n = round((lo + hi) / 2)
        if lo > n - Fraction(1, 2) and hi < n + Fraction(1, 2):
            return n
        return None

    # -- arithmetic ----------------------------------------------------

    def __neg__(self) -> "RealBall":
        return RealBall(_neg(self.hi), _neg(self.lo), self.prec)

    def __add__(self, other: BallOperand) -> "RealBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = max(self.prec, o.prec)
        return RealBall(
            _round_to(_exact_add(self.lo, o.lo), p, "f"),
            _round_to(_exact_add(self.hi, o.hi), p, "c"),
            p,
        )

    __radd__ = __add__

    def __sub__(self, other: BallOperand) -> "RealBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: BallOperand) -> "RealBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: BallOperand) -> "RealBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        p = max(self.prec, o.prec)
        products = (
            _exact_mul(self.lo, o.lo),
            _exact_mul(self.lo, o.hi),
            _exact_mul(self.hi, o.lo),
            _exact_mul(self.hi, o.hi),
        )
        return RealBall(
            _round_to(min(products), p, "f"),
            _round_to(max(products), p, "c"),
            p,
        )

    __rmul__ = __mul__

    def square(self) -> "RealBall":
        """Tighter than self * self when the interval straddles zero."""
        p = self.prec
        lo2 = _exact_mul(self.lo, self.lo)
        hi2 = _exact_mul(self.hi, self.hi)
        if self.lo >= _ZERO:
            lo, hi = lo2, hi2
        elif self.hi <= _ZERO:
            lo, hi = hi2, lo2
        else:
            lo, hi = _ZERO, max(lo2, hi2)
        return RealBall(_round_to(lo, p, "f"), _round_to(hi, p, "c"), p)

    def recip(self) -> "RealBall":
        if self.lo == _ZERO and self.hi == _ZERO:
            raise ZeroDivisionError("reciprocal of exact zero")
        if self.contains_zero():
            raise RoundingUndecided("reciprocal of an interval containing zero")
        p = self.prec
        return RealBall(
            mpmath.fdiv(1, self.hi, prec=p, rounding="f"),
            mpmath.fdiv(1, self.lo, prec=p, rounding="c"),
            p,
        )

    def __truediv__(self, other: BallOperand) -> "RealBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.recip()

    def __rtruediv__(self, other: BallOperand) -> "RealBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.recip()

    def abs(self) -> "RealBall":
        if self.lo >= _ZERO:
            return self
        if self.hi <= _ZERO:
            return -self
        return RealBall(_ZERO, max(_neg(self.lo), self.hi), self.prec)

    def sqrt(self, clamp: bool = False) -> "RealBall":
        """Square root of a certifiably non-negative value.

        With ``clamp=True`` the lower endpoint is clipped at zero first;
        use it only where the exact value is non-negative by construction
        and the negative overhang is pure enclosure slack.
        """
        lo, hi = self.lo, self.hi
        if hi < _ZERO:
            raise ValueError("square root of a certifiably negative value")
        if lo < _ZERO:
            if not clamp:
                raise RoundingUndecided("sqrt of an interval reaching below zero")
            lo = _ZERO
        p = self.prec
        return RealBall(_sqrt_to(lo, p, "f"), _sqrt_to(hi, p, "c"), p)

    def half(self) -> "RealBall":
        shift = mpmath.libmp.mpf_shift
        return RealBall(
            _make_mpf(shift(self.lo._mpf_, -1)),
            _make_mpf(shift(self.hi._mpf_, -1)),
            self.prec,
        )

    def max_abs(self) -> mpf:
        return max(_neg(self.lo), self.hi) if self.lo < _ZERO else self.hi

    def __repr__(self) -> str:
        if self.is_exact:
            return f"RealBall({mpmath.nstr(self.lo, 20)})"
        return (
            f"RealBall({mpmath.nstr(self.mid, 20)} "
            f"+/- {mpmath.nstr(self.rad, 5)})"
        )


ComplexOperand = Union["ComplexBall", RealBall, int, Fraction]


class ComplexBall:
    """A complex number enclosed in an axis-aligned dyadic rectangle.

    The spec-level view is a ball: midpoints plus one rigorous radius
    (:attr:`real_midpoint`, :attr:`imag_midpoint`, :attr:`radius`). The
    rectangle representation additionally keeps "exactly real" values
    exactly real, which the principal square root needs in order to pick
    a branch near the negative real axis.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: RealBall, im: Optional[RealBall] = None):
        if im is None:
            im = RealBall.exact_zero(re.prec)
        self.re = re
        self.im = im

    @classmethod
    def from_int(cls, n: int, prec: int = DEFAULT_PRECISION) -> "ComplexBall":
        return cls(RealBall.from_int(n, prec), RealBall.exact_zero(prec))

    @classmethod
    def from_gaussian(cls, a: int, b: int, prec: int = DEFAULT_PRECISION) -> "ComplexBall":
        return cls(RealBall.from_int(a, prec), RealBall.from_int(b, prec))

    @property
    def prec(self) -> int:
        return max(self.re.prec, self.im.prec)

    @property
    def real_midpoint(self) -> mpf:
        return self.re.mid

    @property
    def imag_midpoint(self) -> mpf:
        return self.im.mid

    @property
    def radius(self) -> mpf:
        """Rigorous bound on |value - (real_midpoint + i*imag_midpoint)|."""
        return _round_to(_exact_add(self.re.rad, self.im.rad), _RADIUS_PREC, "u")

    @property
    def is_exact(self) -> bool:
        return self.re.is_exact and self.im.is_exact

    def _coerce(self, other: ComplexOperand) -> "ComplexBall":
        if isinstance(other, ComplexBall):
            return other
        if isinstance(other, RealBall):
            return ComplexBall(other, RealBall.exact_zero(other.prec))
        if isinstance(other, (int, Fraction)):
            re = RealBall.from_int(other, self.prec) if isinstance(other, int) \
                else RealBall.from_fraction(other, self.prec)
            return ComplexBall(re, RealBall.exact_zero(self.prec))
        return NotImplemented  # type: ignore[return-value]

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def is_nonzero(self) -> bool:
        return self.re.is_nonzero() or self.im.is_nonzero()

    def contains_gaussian(self, a: int, b: int) -> bool:
        return self.re.contains(a) and self.im.contains(b)

    def nearest_gaussian(self) -> Optional[tuple]:
        """Unique Gaussian integer with the rectangle inside its unit cell."""
        a = self.re.nearest_integer()
        if a is None:
            return None
        b = self.im.nearest_integer()
        if b is None:
            return None
        return (a, b)

    def __neg__(self) -> "ComplexBall":
        return ComplexBall(-self.re, -self.im)

    def conj(self) -> "ComplexBall":
        return ComplexBall(self.re, -self.im)

    def __add__(self, other: ComplexOperand) -> "ComplexBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return ComplexBall(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: ComplexOperand) -> "ComplexBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: ComplexOperand) -> "ComplexBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: ComplexOperand) -> "ComplexBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        re = self.re * o.re - self.im * o.im
        im = self.re * o.im + self.im * o.re
        return ComplexBall(re, im)

    __rmul__ = __mul__

    def abs_squared(self) -> RealBall:
        return self.re.square() + self.im.square()

    def abs(self) -> RealBall:
        return self.abs_squared().sqrt(clamp=True)

    def recip(self) -> "ComplexBall":
        d = self.abs_squared()
        if d.lo == _ZERO and d.hi == _ZERO:
            raise ZeroDivisionError("reciprocal of exact complex zero")
        if d.contains_zero():
            raise RoundingUndecided("reciprocal of an enclosure containing zero")
        return ComplexBall(self.re / d, -self.im / d)

    def __truediv__(self, other: ComplexOperand) -> "ComplexBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.recip()

    def __rtruediv__(self, other: ComplexOperand) -> "ComplexBall":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.recip()

    def pow_int(self, n: int) -> "ComplexBall":
        if n < 0:
            return self.pow_int(-n).recip()
        result = ComplexBall.from_int(1, self.prec)
        base = self
        k = n
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sqrt(self) -> "ComplexBall":
        """Principal square root (Re >= 0; +i branch on the negative reals).

        The branch cut along the negative real axis needs care: the result
        must enclose the root of the *true* value, whose side of the cut
        may be unknown. Cases, from tight to loose:

        * exactly-real input: split on the certified sign of the real part;
          an undecided sign yields the hull of both one-sided images;
        * input with certified imaginary sign, or certified Re > 0: the
          half-angle formula in real interval arithmetic;
        * enclosure crossing the cut: a rigorous centered fallback box of
          half-width sqrt(sup |z|).
        """
        re, im = self.re, self.im
        prec = self.prec
        zero = RealBall.exact_zero(prec)
        if im.is_exact and im.lo == _ZERO:
            if re.lo >= _ZERO:
                return ComplexBall(re.sqrt(), zero)
            if re.hi <= _ZERO:
                return ComplexBall(zero, (-re).sqrt())
            pos = RealBall(_ZERO, _sqrt_to(re.hi, prec, "c"), prec)
            neg = RealBall(_ZERO, _sqrt_to(_neg(re.lo), prec, "c"), prec)
            return ComplexBall(pos, neg)
        mag = self.abs()
        re_sqr = ((mag + re).half()).sqrt(clamp=True)
        im_sqr = ((mag - re).half()).sqrt(clamp=True)
        if im.is_positive():
            return ComplexBall(re_sqr, im_sqr)
        if im.is_negative():
            return ComplexBall(re_sqr, -im_sqr)
        if re.is_positive():
            return ComplexBall(re_sqr, RealBall.hull(-im_sqr, im_sqr))
        s = _sqrt_to(mag.hi, prec, "c")
        box = RealBall(_neg(s), s, prec)
        return ComplexBall(RealBall(_ZERO, s, prec), box)

    def __repr__(self) -> str:
        return f"ComplexBall({self.re!r}, {self.im!r})"


# Public alias matching the domain vocabulary used across the package.
CertifiedComplex = ComplexBall
