"""Collatz variants on integers and triadic rationals, and orbit bookkeeping.

``col2_step`` is the accelerated map on positive integers.  ``col3_step`` is
halving on triadic rationals that rounds up in the last base-3 place when an
exact half does not exist, and ``col4_step`` rescales by 3 to keep iterates
in ``[1, 3)``.  Along an orbit ``a_0, a_1, ...`` of ``col2_step`` the rescaled
values ``c = a / 3**q`` with ``q = [log_3 a]`` are tracked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .triadic import (
    TriadicRational,
    ZeroValueError,
    floor_scale,
    ilog3,
    log3_floor,
    pow3,
)

__all__ = [
    "DEFAULT_MAX_STEPS",
    "IdentityViolation",
    "OrbitRecord",
    "Orbit",
    "RescaledIterate",
    "col2_step",
    "col3_step",
    "col3_iterate",
    "col4_step",
    "rescaled_iterates",
    "orbit",
    "iter_orbit",
    "rescale",
    "in_unit_window",
]

DEFAULT_MAX_STEPS = 10**6

ONE = TriadicRational(1)
TWO = TriadicRational(2)
THREE = TriadicRational(3)


class IdentityViolation(AssertionError):
    """An identity that must hold exactly was found broken.

    ``details`` holds the inputs and both sides, already rendered as text.
    """

    def __init__(self, name: str, details: dict[str, str]):
        self.name = name
        self.details = details
        parts = ", ".join(f"{k}={v}" for k, v in details.items())
        super().__init__(f"{name} violated: {parts}")


def col2_step(a: int) -> int:
    if a < 1:
        raise ValueError(f"col2_step needs a >= 1, got {a}")
    if a & 1:
        return (3 * a + 1) >> 1
    return a >> 1


def col3_step(b: TriadicRational) -> TriadicRational:
    m, r = b.numerator, b.denom_exp
    if m == 0:
        raise ZeroValueError("col3_step is undefined at zero")
    if m & 1:
        # (3m+1)/2 is 2 mod 3, so the result is already normalized.
        return TriadicRational._raw((3 * m + 1) >> 1, r + 1)
    # 3 does not divide m when r > 0, hence not m/2 either.
    return TriadicRational._raw(m >> 1, r)


def col3_iterate(b: TriadicRational, n: int) -> TriadicRational:
    if n < 0:
        raise ValueError("iterate count must be nonnegative")
    for _ in range(n):
        b = col3_step(b)
    return b


def in_unit_window(b: TriadicRational) -> bool:
    """Exact test for ``1 <= b < 3``."""
    m, r = b.numerator, b.denom_exp
    p = pow3(r)
    return p <= m < 3 * p


def col4_step(b: TriadicRational) -> TriadicRational:
    m, r = b.numerator, b.denom_exp
    p = pow3(r)
    if not p <= m < 3 * p:
        raise ValueError(f"col4_step needs 1 <= b < 3, got {b}")
    out = col3_step(b)
    if m < 2 * p:
        out = out.scale3(1)
    if not in_unit_window(out):
        raise IdentityViolation("col4 range", {"b": str(b), "col4(b)": str(out)})
    return out


def rescale(b: TriadicRational) -> tuple[int, TriadicRational]:
    """Return ``(k, 3**k * b)`` with ``k = -[log_3 b]``, so the result is in [1, 3)."""
    k = -log3_floor(b)
    return k, b.scale3(k)


@dataclass(frozen=True, slots=True)
class RescaledIterate:
    n: int
    col3_value: TriadicRational
    rescale_exp: int
    col4_value: TriadicRational


def rescaled_iterates(
    b: TriadicRational, n_max: int, *, check: bool = True
) -> list[RescaledIterate]:
    """Iterates ``n = 0..n_max`` of both maps from ``b`` in ``[1, 3)``.

    With ``check`` set, ``Col4^n(b)`` obtained by iterating ``col4_step`` is
    compared against ``3**k * Col3^n(b)`` obtained by iterating ``col3_step``
    and rescaling; a mismatch raises :class:`IdentityViolation`.  Without it
    the ``col4`` column is filled from the rescaled side only.
    """
    if not in_unit_window(b):
        raise ValueError(f"rescaled_iterates needs 1 <= b < 3, got {b}")
    out: list[RescaledIterate] = []
    x3 = b
    x4 = b
    for n in range(n_max + 1):
        if n:
            x3 = col3_step(x3)
        k, scaled = rescale(x3)
        if check:
            if n:
                x4 = col4_step(x4)
            if x4 != scaled:
                raise IdentityViolation(
                    "Col4^n(b) = 3^k Col3^n(b)",
                    {"b": str(b), "n": str(n), "k": str(k),
                     "col4": str(x4), "3^k*col3": str(scaled)},
                )
        out.append(RescaledIterate(n, x3, k, scaled))
    return out


def iter_orbit(a0: int, max_steps: int = DEFAULT_MAX_STEPS) -> Iterator[tuple[int, int, int]]:
    """Yield ``(alpha, a, q)`` along the ``col2_step`` orbit of ``a0``.

    Stops after yielding ``a == 1`` or after ``max_steps`` applications of
    the map, whichever comes first.  ``q`` is tracked incrementally.
    """
    if a0 < 1:
        raise ValueError(f"orbit seed must be >= 1, got {a0}")
    a = a0
    q = ilog3(a)
    lo = pow3(q)
    alpha = 0
    while True:
        yield alpha, a, q
        if a == 1 or alpha >= max_steps:
            return
        if a & 1:
            a = (3 * a + 1) >> 1
        else:
            a >>= 1
        alpha += 1
        while a < lo:
            lo //= 3
            q -= 1
        while a >= 3 * lo:
            lo *= 3
            q += 1


@dataclass(frozen=True, slots=True)
class OrbitRecord:
    alpha: int
    a: int
    q: int
    c: TriadicRational
    window: int | None = None


@dataclass
class Orbit:
    """Result of :func:`orbit`.

    ``reached_one`` is False when the step budget ran out first; that is an
    outcome, not an error.  ``relation_violations`` lists the ``alpha`` at
    which ``c[alpha+1] == col4_step(c[alpha])`` failed, among the steps that
    were checked.
    """

    a0: int
    records: list[OrbitRecord]
    reached_one: bool
    max_steps: int
    relation_checked_from: int
    relation_violations: list[int] = field(default_factory=list)

    @property
    def a_values(self) -> list[int]:
        return [rec.a for rec in self.records]

    def __len__(self) -> int:
        return len(self.records)


def orbit(a0: int, max_steps: int = DEFAULT_MAX_STEPS, p: int | None = None) -> Orbit:
    """Run the ``col2_step`` orbit of ``a0`` with exact ``q`` and ``c`` per step.

    When ``p`` is given each record carries the window ``[3**p * c]``.
    The relation ``c[alpha+1] = col4_step(c[alpha])`` is checked for every
    ``alpha >= 1``, and also at ``alpha = 0`` when 3 does not divide ``a0``.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    records: list[OrbitRecord] = []
    reached = False
    for alpha, a, q in iter_orbit(a0, max_steps):
        c = TriadicRational(a, q) if a % 3 == 0 else TriadicRational._raw(a, q)
        w = floor_scale(c, p) if p is not None else None
        records.append(OrbitRecord(alpha, a, q, c, w))
        if a == 1:
            reached = True
    start = 1 if a0 % 3 == 0 else 0
    bad = [
        rec.alpha
        for rec, nxt in zip(records[start:], records[start + 1:])
        if col4_step(rec.c) != nxt.c
    ]
    return Orbit(a0, records, reached, max_steps, start, bad)
