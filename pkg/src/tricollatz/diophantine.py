"""Approximating powers of 3 by powers of 2.

Integer parts of ``k * log2(3)`` are always decided by comparing ``3**k``
with powers of two.  Fractional parts come back as rigorous rational
enclosures from a fixed-point atanh series, widened on demand until a
comparison is decidable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .triadic import TriadicRational, ilog3, pow3

__all__ = [
    "MAX_PRECISION_BITS",
    "PrecisionGuardError",
    "Interval",
    "CaseTag",
    "PairKind",
    "PrefixTarget",
    "ApproxPair",
    "ln_ratio",
    "log2_ratio",
    "log2_3",
    "floor_k_log2_3",
    "frac_part",
    "record_pairs",
    "prefix_target",
    "epsilon_budget",
    "steer_inequality",
    "steering_pairs",
    "prefix_order",
]

MAX_PRECISION_BITS = 10**6


class PrecisionGuardError(RuntimeError):
    """A precision request exceeded the resource guard."""


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x: object) -> bool:
        return self.lo <= Fraction(x) <= self.hi  # type: ignore[arg-type]

    def __add__(self, other: Interval | Fraction | int) -> Interval:
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi)
        return Interval(self.lo + other, self.hi + other)

    def __sub__(self, other: Interval | Fraction | int) -> Interval:
        if isinstance(other, Interval):
            return Interval(self.lo - other.hi, self.hi - other.lo)
        return Interval(self.lo - other, self.hi - other)

    def scale(self, k: int | Fraction) -> Interval:
        if k >= 0:
            return Interval(self.lo * k, self.hi * k)
        return Interval(self.hi * k, self.lo * k)

    def __truediv__(self, other: Interval) -> Interval:
        if other.lo <= 0:
            raise ZeroDivisionError("divisor interval must be positive")
        if self.lo < 0:
            raise ValueError("dividend interval must be nonnegative")
        return Interval(self.lo / other.hi, self.hi / other.lo)

    def below(self, other: Interval) -> bool:
        return self.hi < other.lo

    def __float__(self) -> float:
        return float(self.mid)

    def __str__(self) -> str:
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def _guard(bits: int) -> None:
    if bits > MAX_PRECISION_BITS:
        raise PrecisionGuardError(f"precision of {bits} bits exceeds guard {MAX_PRECISION_BITS}")


def _atanh_fixed(u: int, v: int, w: int) -> tuple[int, int]:
    """Integers ``lo, hi`` with ``lo <= 2**w * atanh(u/v) <= hi``, for ``0 <= 2u <= v``."""
    one = 1 << w
    v2 = v * v
    lo = 0
    num = one * u
    den = v
    j = 0
    while True:
        t = num // (den * (2 * j + 1))
        if t == 0:
            break
        lo += t
        num *= u * u
        den *= v2
        j += 1
    # Each floor loses < 1 unit; with u/v <= 1/2 the tail after a zero term
    # is below (4/3) unit.
    return lo, lo + j + 2


@lru_cache(maxsize=256)
def ln_ratio(num: int, den: int, bits: int) -> Interval:
    """Enclosure of ``ln(num/den)`` for ``1 <= num/den <= 3``, width about ``2**-bits``."""
    if not den <= num <= 3 * den:
        raise ValueError("ln_ratio covers 1 <= num/den <= 3 only")
    _guard(bits)
    w = bits + bits.bit_length() + 8
    # ln x = 2 atanh((x-1)/(x+1)), and (x-1)/(x+1) <= 1/2 on [1, 3].
    lo, hi = _atanh_fixed(num - den, num + den, w)
    scale = Fraction(1, 1 << (w - 1))
    return Interval(lo * scale, hi * scale)


_LN2_CACHE: dict[int, Interval] = {}


def _ln2(bits: int) -> Interval:
    if bits not in _LN2_CACHE:
        _LN2_CACHE[bits] = ln_ratio(2, 1, bits)
    return _LN2_CACHE[bits]


def log2_ratio(num: int, den: int, bits: int) -> Interval:
    """Enclosure of ``log2(num/den)`` for ``1 <= num/den <= 3``."""
    if num == den:
        return Interval(Fraction(0), Fraction(0))
    return ln_ratio(num, den, bits + 4) / _ln2(bits + 4)


@lru_cache(maxsize=64)
def log2_3(precision_bits: int) -> Interval:
    """Rigorous enclosure of log2(3) of width at most ``2**-precision_bits``."""
    if precision_bits < 8:
        raise ValueError("precision_bits must be >= 8")
    _guard(precision_bits)
    bits = precision_bits + 4
    while True:
        enc = log2_ratio(3, 1, bits)
        if enc.width <= Fraction(1, 1 << precision_bits):
            return enc
        bits += 8


def floor_k_log2_3(k: int) -> int:
    """``[k * log2(3)]`` exactly: the ``n`` with ``2**n <= 3**k < 2**(n+1)``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return pow3(k).bit_length() - 1


def frac_part(k: int, width_bits: int = 64) -> tuple[int, Interval]:
    """``(n, frac)`` with ``n = [k log2 3]`` exact and ``frac`` enclosing ``k log2 3 - n``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = floor_k_log2_3(k)
    enc = log2_3(width_bits + k.bit_length() + 1)
    frac = enc.scale(k) - n
    return n, Interval(max(frac.lo, Fraction(0)), min(frac.hi, Fraction(1)))


class PairKind(str, enum.Enum):
    RECORD = "record"
    STEER = "steer"


class CaseTag(str, enum.Enum):
    LOW = "low"    # 1 <= psi0 < 2
    HIGH = "high"  # 2 <= psi0 < 3


@dataclass(frozen=True, slots=True)
class ApproxPair:
    """A pair ``(k, n)`` with the integers that certify it.

    For RECORD pairs ``certificate`` is ``(2**(n-1), 3**k, 2**n)``, strictly
    increasing.  For STEER pairs it is ``(lhs, mid, rhs)`` of the steering
    inequality ``lhs < mid < rhs``.
    """

    k: int
    n: int
    kind: PairKind
    certificate: tuple[int, int, int]
    frac: Interval | None = None

    def verify(self) -> bool:
        lhs, mid, rhs = self.certificate
        return lhs < mid < rhs


def record_pairs(k_max: int, width_bits: int = 64) -> list[ApproxPair]:
    """Pairs at which ``frac(k log2 3)`` sets a new running maximum, ``1 <= k <= k_max``.

    ``n = [k log2 3] + 1``.  Comparisons whose enclosures overlap are redone
    at higher precision; since log2(3) is irrational this terminates.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    out: list[ApproxPair] = []
    best_k = 0
    best: Interval | None = None
    for k in range(1, k_max + 1):
        n, frac = frac_part(k, width_bits)
        if best is not None:
            bits = width_bits
            best_frac = best
            while not (frac.hi < best_frac.lo or best_frac.hi < frac.lo):
                bits *= 2
                _guard(bits)
                _, frac = frac_part(k, bits)
                _, best_frac = frac_part(best_k, bits)
            if frac.hi < best_frac.lo:
                continue
        best_k, best = k, frac
        n1 = n + 1
        out.append(ApproxPair(k, n1, PairKind.RECORD, (1 << (n1 - 1), pow3(k), 1 << n1), frac))
    return out


@dataclass(frozen=True, slots=True)
class PrefixTarget:
    psi: int
    p: int
    psi0: TriadicRational
    case: CaseTag
    tau: Interval


def prefix_target(psi: int, width_bits: int = 64) -> PrefixTarget:
    """Digit count, normalized target, case and the shift ``tau`` for ``psi``.

    ``tau = log2(psi0)`` in the LOW case and ``log2(psi0) + 1 - log2(3)`` in
    the HIGH case; both lie in ``[0, 1)``.
    """
    if psi < 2:
        raise ValueError(f"psi must be >= 2, got {psi}")
    p = ilog3(psi)
    base = pow3(p)
    psi0 = TriadicRational(psi, p)
    if psi < 2 * base:
        case = CaseTag.LOW
        num, den = psi, base
    else:
        case = CaseTag.HIGH
        # log2(psi0) + 1 - log2(3) = log2(2 psi / 3**(p+1))
        num, den = 2 * psi, 3 * base
    # 0 <= tau < 1 is exactly den <= num < 2 den.
    if not den <= num < 2 * den:
        raise ArithmeticError(f"tau for psi={psi} escaped [0, 1)")
    bits = width_bits
    tau = log2_ratio(num, den, bits)
    while tau.hi >= 1:
        bits *= 2
        _guard(bits)
        tau = log2_ratio(num, den, bits)
    return PrefixTarget(psi, p, psi0, case, Interval(max(tau.lo, Fraction(0)), tau.hi))


def epsilon_budget(p: int, width_bits: int = 64) -> Interval:
    """``ln(1 + 3**(-p-2)) / ln 2``, the tolerance on ``3**k / 2**n`` around ``2**tau``."""
    d = pow3(p + 2)
    return log2_ratio(d + 1, d, width_bits)


def steer_inequality(target: PrefixTarget, k: int, n: int) -> tuple[int, int, int]:
    """Integers ``(lhs, mid, rhs)``; the pair steers iff ``lhs < mid < rhs``.

    LOW:  ``(3 psi - 1) 2**n < 3**(k+p+1) < (3 psi + 1) 2**n``
    HIGH: ``(3 psi - 1) 2**(n+1) < 3**(k+p+2) < (3 psi + 1) 2**(n+1)``
    """
    psi, p = target.psi, target.p
    if target.case is CaseTag.LOW:
        two = 1 << n
        mid = pow3(k + p + 1)
    else:
        two = 1 << (n + 1)
        mid = pow3(k + p + 2)
    return (3 * psi - 1) * two, mid, (3 * psi + 1) * two


def steering_pairs(target: PrefixTarget, count: int, k_max: int) -> list[ApproxPair]:
    """The first ``count`` pairs ``(k, n)``, ``k <= k_max``, bringing ``3**(k+p)/2**n`` within 1/3 of ``psi``.

    For each ``k`` the window for ``2**n`` has ratio below 2, so the only
    candidate is the largest ``n`` with ``(3 psi - 1) 2**n < 3**(k+p+1)``
    (shifted by one in the HIGH case); it is then tested exactly.  May
    return fewer than ``count`` pairs.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    psi, p = target.psi, target.p
    low = target.case is CaseTag.LOW
    out: list[ApproxPair] = []
    for k in range(1, k_max + 1):
        mid = pow3(k + p + 1) if low else pow3(k + p + 2)
        # largest e with (3 psi - 1) * 2**e < mid
        e = ((mid - 1) // (3 * psi - 1)).bit_length() - 1
        n = e if low else e - 1
        if n < 1:
            continue
        cert = steer_inequality(target, k, n)
        if cert[0] < cert[1] < cert[2]:
            out.append(ApproxPair(k, n, PairKind.STEER, cert))
            if len(out) >= count:
                break
    return out


def prefix_order(phi: int, theta: int) -> bool:
    """True iff the base-3 digits of ``phi`` are a leading segment of those of ``theta``."""
    if phi < 1 or theta < 1:
        raise ValueError("prefix_order needs positive integers")
    p, q = ilog3(phi), ilog3(theta)
    return p <= q and theta // pow3(q - p) == phi
