"""Exact big-integer linear recurrences, Lucas sequences, divisibility checks.

All arithmetic here is arbitrary-size integer arithmetic; this module is the
ground-truth oracle that the certified numeric modules are tested against.

Coefficient convention: a :class:`LinearRecurrence` stores the recurrence
coefficients ``c_1..c_d`` of ``a_n = c_1*a_{n-1} + ... + c_d*a_{n-d}``.
The matching monic characteristic polynomial is
``x^d - c_1*x^{d-1} - ... - c_d``; the bijection between the two forms
lives in :mod:`lds4.polyalg` so that sign errors cannot creep in at call
sites.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Tuple


@dataclass(frozen=True)
class LinearRecurrence:
    """Order-d recurrence with integer coefficients and initial terms."""

    coefficients: Tuple[int, ...]
    initial_terms: Tuple[int, ...]

    def __init__(self, coefficients: Iterable[int], initial_terms: Iterable[int]):
        object.__setattr__(self, "coefficients", tuple(int(c) for c in coefficients))
        object.__setattr__(self, "initial_terms", tuple(int(a) for a in initial_terms))
        if len(self.coefficients) < 1:
            raise ValueError("recurrence order must be at least 1")
        if len(self.coefficients) != len(self.initial_terms):
            raise ValueError(
                "coefficient count must match the number of initial terms"
            )
        if self.coefficients[-1] == 0:
            raise ValueError("trailing coefficient is zero; the order is not genuine")

    @property
    def order(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True)
class LucasParams:
    """Parameters of the Lucas sequence U_n = h*U_{n-1} - k*U_{n-2}, U_0=0, U_1=1."""

    h: int
    k: int

    def __post_init__(self):
        if self.k == 0:
            raise ValueError("k must be nonzero")

    def recurrence(self) -> LinearRecurrence:
        return LinearRecurrence((self.h, -self.k), (0, 1))


@dataclass(frozen=True)
class SequenceWindow:
    """A contiguous run of sequence terms starting at ``start_index``."""

    start_index: int
    terms: Tuple[int, ...]

    def __init__(self, start_index: int, terms: Iterable[int]):
        object.__setattr__(self, "start_index", int(start_index))
        object.__setattr__(self, "terms", tuple(int(t) for t in terms))
        if self.start_index < 0:
            raise ValueError("start_index must be non-negative")
        if not self.terms:
            raise ValueError("a sequence window cannot be empty")

    def __len__(self) -> int:
        return len(self.terms)


def lucas_u(params: LucasParams, n: int) -> int:
    """n-th term of the Lucas sequence for ``params``, computed exactly."""
    if n < 0:
        raise ValueError("n must be non-negative")
    u_prev, u = 0, 1
    if n == 0:
        return 0
    for _ in range(n - 1):
        u_prev, u = u, params.h * u - params.k * u_prev
    return u


def lucas_terms(params: LucasParams, count: int) -> SequenceWindow:
    return recurrence_terms(params.recurrence(), count)


def recurrence_terms(rec: LinearRecurrence, count: int) -> SequenceWindow:
    """First ``count`` terms a_0..a_{count-1}, exactly."""
    if count < 1:
        raise ValueError("count must be positive")
    terms: List[int] = list(rec.initial_terms[:count])
    coeffs = rec.coefficients
    d = rec.order
    while len(terms) < count:
        nxt = sum(c * terms[-i - 1] for i, c in enumerate(coeffs))
        terms.append(nxt)
    return SequenceWindow(0, terms[:count])


def continue_window(rec: LinearRecurrence, window: SequenceWindow, count: int) -> SequenceWindow:
    """Extend a window of at least ``order`` consecutive terms to ``count`` terms.

    The result starts at ``window.start_index``; this is the suffix
    re-evaluation property used to cross-check :func:`recurrence_terms`.
    """
    d = rec.order
    if len(window) < d:
        raise ValueError(f"need at least {d} consecutive terms to continue")
    terms = list(window.terms)
    while len(terms) < count:
        terms.append(sum(c * terms[-i - 1] for i, c in enumerate(rec.coefficients)))
    return SequenceWindow(window.start_index, terms[:count])


def _divides(m_val: int, n_val: int) -> bool:
    # 0 | x holds only for x == 0.
    if m_val == 0:
        return n_val == 0
    return n_val % m_val == 0


def divisibility_check(window: SequenceWindow) -> List[Tuple[int, int]]:
    """All pairs (m, n) with m | n whose terms violate a_m | a_n.

    The window must start at index 0 (index 0 itself is skipped, matching
    the convention a_0 = 0). An empty result means the window is consistent
    with being a divisibility sequence.
    """
    if window.start_index != 0:
        raise ValueError("divisibility_check needs a window starting at index 0")
    terms = window.terms
    violations = []
    for m in range(1, len(terms)):
        for n in range(2 * m, len(terms), m):
            if not _divides(terms[m], terms[n]):
                violations.append((m, n))
    return violations


def product_sequence(a: SequenceWindow, b: SequenceWindow) -> SequenceWindow:
    """Elementwise product of two aligned windows."""
    if a.start_index != b.start_index:
        raise ValueError("windows must start at the same index")
    if len(a) != len(b):
        raise ValueError("windows must have the same length")
    return SequenceWindow(a.start_index, tuple(x * y for x, y in zip(a.terms, b.terms)))
