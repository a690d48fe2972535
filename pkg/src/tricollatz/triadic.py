"""Exact arithmetic on triadic rationals, numbers of the form m / 3**r.

Values are always stored normalized: either ``r == 0`` or ``3`` does not
divide ``m``.  With that convention ``denom_exp`` is the least ``r`` such
that ``3**r * b`` is an integer.  Every comparison and floor in this module
is done on Python integers; no floating point is involved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import NamedTuple

__all__ = [
    "TriadicRational",
    "TernaryWindow",
    "Base3Digits",
    "ZeroValueError",
    "normalize",
    "floor_scale",
    "window",
    "log3_floor",
    "ilog3",
    "digits_base3",
    "phi_member",
    "parse_triadic",
    "pow3",
]

MAX_DENOM_EXP = 2**63 - 1


class ZeroValueError(ValueError):
    """Raised when an operation needs a strictly positive value."""


@lru_cache(maxsize=4096)
def pow3(e: int) -> int:
    return 3**e


def ilog3(m: int) -> int:
    """Largest ``e`` with ``3**e <= m``, for ``m >= 1``."""
    if m < 1:
        raise ZeroValueError("ilog3 needs a positive integer")
    # 6309/10000 < log_3(2), so the guess never overshoots by more than a few.
    e = ((m.bit_length() - 1) * 6309) // 10000
    p = pow3(e)
    while p > m:
        e -= 1
        p //= 3
    while p * 3 <= m:
        e += 1
        p *= 3
    return e


def _normalize_raw(m: int, r: int) -> tuple[int, int]:
    if m == 0:
        return 0, 0
    while r > 0 and m % 3 == 0:
        m //= 3
        r -= 1
    return m, r


@total_ordering
@dataclass(frozen=True, slots=True)
class TriadicRational:
    """The value ``numerator / 3**denom_exp``, kept in normalized form.

    The constructor normalizes, so ``TriadicRational(9, 2) == TriadicRational(1, 0)``
    holds both as values and as representations.
    """

    numerator: int
    denom_exp: int = 0

    def __post_init__(self) -> None:
        m, r = self.numerator, self.denom_exp
        if not isinstance(m, int) or not isinstance(r, int):
            raise TypeError("numerator and denom_exp must be integers")
        if m < 0 or r < 0:
            raise ValueError(f"negative component in {m}/3^{r}")
        if r > MAX_DENOM_EXP:
            raise OverflowError(f"denominator exponent {r} out of range")
        if m == 0 or (r > 0 and m % 3 == 0):
            m, r = _normalize_raw(m, r)
            object.__setattr__(self, "numerator", m)
            object.__setattr__(self, "denom_exp", r)

    @classmethod
    def _raw(cls, m: int, r: int) -> TriadicRational:
        # Caller guarantees (m, r) is already normalized.
        obj = object.__new__(cls)
        object.__setattr__(obj, "numerator", m)
        object.__setattr__(obj, "denom_exp", r)
        return obj

    @classmethod
    def from_fraction(cls, value: Fraction | int) -> TriadicRational:
        value = Fraction(value)
        d = value.denominator
        r = 0
        while d % 3 == 0:
            d //= 3
            r += 1
        if d != 1:
            raise ValueError(f"{value} is not a triadic rational")
        return cls(value.numerator, r)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, pow3(self.denom_exp))

    def is_zero(self) -> bool:
        return self.numerator == 0

    def is_integer(self) -> bool:
        return self.denom_exp == 0

    def scale3(self, k: int) -> TriadicRational:
        """Return ``3**k * self``; ``k`` may be negative."""
        m, r = self.numerator, self.denom_exp
        if m == 0:
            return self
        if k >= 0:
            if k <= r:
                return TriadicRational._raw(m, r - k)
            return TriadicRational._raw(m * pow3(k - r), 0)
        return TriadicRational(m, r - k)

    def _cmp_key(self, other: TriadicRational) -> tuple[int, int]:
        r1, r2 = self.denom_exp, other.denom_exp
        if r1 >= r2:
            return self.numerator, other.numerator * pow3(r1 - r2)
        return self.numerator * pow3(r2 - r1), other.numerator

    def __lt__(self, other: object) -> bool:
        if isinstance(other, int):
            other = TriadicRational(other)
        if not isinstance(other, TriadicRational):
            return NotImplemented
        a, b = self._cmp_key(other)
        return a < b

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.denom_exp == 0 and self.numerator == other
        if not isinstance(other, TriadicRational):
            return NotImplemented
        return self.numerator == other.numerator and self.denom_exp == other.denom_exp

    def __hash__(self) -> int:
        return hash((self.numerator, self.denom_exp))

    def __str__(self) -> str:
        return f"{self.numerator}/3^{self.denom_exp}"

    def __repr__(self) -> str:
        return f"TriadicRational({self.numerator}, {self.denom_exp})"

    def to_base3_string(self) -> str:
        """Digit form such as ``2.1_3`` (that is 7/3)."""
        if self.numerator == 0:
            return "0_3"
        s = _int_to_base3(self.numerator)
        r = self.denom_exp
        if r == 0:
            return s + "_3"
        if len(s) <= r:
            s = "0" * (r - len(s) + 1) + s
        return f"{s[:-r]}.{s[-r:]}_3"

    def to_decimal(self, places: int = 12) -> str:
        """Display-only decimal rendering, truncated to ``places`` digits."""
        scaled = (self.numerator * 10**places) // pow3(self.denom_exp)
        whole, frac = divmod(scaled, 10**places)
        if places == 0:
            return str(whole)
        return f"{whole}.{frac:0{places}d}"


def _int_to_base3(m: int) -> str:
    if m == 0:
        return "0"
    out = []
    while m:
        m, d = divmod(m, 3)
        out.append("012"[d])
    return "".join(reversed(out))


def normalize(m: int, r: int) -> TriadicRational:
    """Canonical form of ``m / 3**r``: strip common factors of 3."""
    return TriadicRational(m, r)


class TernaryWindow(NamedTuple):
    value: int
    scale_exp: int


def floor_scale(b: TriadicRational, k: int) -> int:
    """``[3**k * b]`` by exact integer division."""
    m, r = b.numerator, b.denom_exp
    if k >= r:
        return m * pow3(k - r)
    return m // pow3(r - k)


def window(b: TriadicRational, k: int) -> TernaryWindow:
    return TernaryWindow(floor_scale(b, k), k)


def log3_floor(b: TriadicRational) -> int:
    """``[log_3 b]``, so that ``3**result <= b < 3**(result + 1)``."""
    if b.numerator == 0:
        raise ZeroValueError("log3_floor is undefined at zero")
    return ilog3(b.numerator) - b.denom_exp


@dataclass(frozen=True, slots=True)
class Base3Digits:
    """Base-3 digits, most significant first; ``top`` is the position of
    ``digits[0]`` relative to the radix point (position ``-j`` weighs ``3**-j``).
    """

    digits: tuple[int, ...]
    top: int

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(range(self.top, self.top - len(self.digits), -1))

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.positions, self.digits))

    def to_triadic(self) -> TriadicRational:
        m = 0
        for d in self.digits:
            m = 3 * m + d
        low = self.top - len(self.digits) + 1
        if low >= 0:
            return TriadicRational(m * pow3(low), 0)
        return TriadicRational(m, -low)


def digits_base3(b: TriadicRational) -> Base3Digits:
    if b.numerator == 0:
        raise ZeroValueError("zero has no leading base-3 digit")
    s = _int_to_base3(b.numerator)
    return Base3Digits(tuple(int(c) for c in s), log3_floor(b))


def phi_member(b: TriadicRational, xi: int) -> bool:
    """Membership of ``b`` in the window set for target ``xi``.

    ``b`` belongs when its denominator exponent exceeds ``q0 = [log_3 xi]``
    and ``[3**q0 * b] == xi``.
    """
    if xi < 2:
        raise ValueError(f"xi must be >= 2, got {xi}")
    q0 = ilog3(xi)
    return b.denom_exp > q0 and floor_scale(b, q0) == xi


_FRACTION_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*3\s*\^\s*(\d+))?\s*$")
_DIGITS_RE = re.compile(r"^\s*([012]+)(?:\.([012]*))?_3\s*$")


def parse_triadic(text: str) -> TriadicRational:
    """Parse ``"17/3^3"``, a plain integer ``"26"``, or digit form ``"2.1_3"``."""
    t = text.strip().lower()
    mt = _FRACTION_RE.match(t)
    if mt:
        return TriadicRational(int(mt.group(1)), int(mt.group(2) or 0))
    mt = _DIGITS_RE.match(t)
    if mt:
        whole, frac = mt.group(1), mt.group(2) or ""
        return TriadicRational(int(whole + frac, 3), len(frac))
    raise ValueError(f"cannot parse triadic rational from {text!r}")
