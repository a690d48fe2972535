"""Orbit statistics and property harnesses.

The statistics (prefix hits, coverage of ``[1, 3)``, the running minimum
of ``c``) are empirical summaries and carry no pass/fail meaning.  The
harnesses check exact identities and report violations as data.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .maps import (
    DEFAULT_MAX_STEPS,
    col3_step,
    col4_step,
    iter_orbit,
)
from .triadic import TriadicRational, floor_scale, ilog3, log3_floor, pow3
from .diophantine import prefix_target
from .rng import substream

__all__ = [
    "PrefixHitReport",
    "CoverageReport",
    "VerificationReport",
    "prefix_hits",
    "coverage",
    "merge_coverage",
    "sample_unit_window",
    "sample_phi",
    "col4_identity_check",
    "col3_bound_check",
    "window_lemma_check",
    "cor1_check",
    "cor2_check",
    "orbit_relation_check",
    "digit_shift_check",
    "DEFAULT_BUDGET",
    "XI_RANGE",
    "PROPERTIES",
    "run_property",
    "run_all_properties",
    "all_pass",
]


# --------------------------------------------------------------------------
# reports


@dataclass
class VerificationReport:
    name: str
    trials: int = 0
    violations: int = 0
    first_counterexample: dict[str, str] | None = None
    params: dict[str, str] = field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.violations:
            return "fail"
        if self.trials == 0:
            return "no trials"
        return "pass"

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, ok: bool, **details: object) -> None:
        self.trials += 1
        if not ok:
            self.violations += 1
            if self.first_counterexample is None:
                self.first_counterexample = {k: str(v) for k, v in details.items()}

    def to_dict(self) -> dict[str, object]:
        return {
            "property": self.name,
            "trials": self.trials,
            "violations": self.violations,
            "status": self.status,
            "params": dict(self.params),
            "first_counterexample": self.first_counterexample,
        }

    def to_text(self) -> str:
        line = f"{self.name}: {self.status} ({self.violations} violations / {self.trials} trials)"
        if self.first_counterexample:
            cx = ", ".join(f"{k}={v}" for k, v in self.first_counterexample.items())
            line += f" first: {cx}"
        return line


@dataclass
class PrefixHitReport:
    a0: int
    psi: int
    p: int
    hits: list[int]
    total_steps: int
    reached_one: bool
    window_disagreements: list[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.hits)

    def to_dict(self) -> dict[str, object]:
        return {
            "a0": self.a0,
            "psi": self.psi,
            "p": self.p,
            "count": self.count,
            "hits": list(self.hits),
            "total_steps": self.total_steps,
            "reached_one": self.reached_one,
            "window_disagreements": list(self.window_disagreements),
        }


@dataclass
class CoverageReport:
    """Which of ``bin_count`` equal bins of ``[1, 3)`` the values ``c`` (steps >= 1) landed in.

    ``hit_mask`` has bit ``i`` set when bin ``[1 + 2i/B, 1 + 2(i+1)/B)`` was hit.
    """

    bin_count: int
    seed_lo: int
    seed_hi: int
    hit_mask: int = 0
    min_c: TriadicRational | None = None
    samples: int = 0
    unterminated: int = 0

    @property
    def hits(self) -> int:
        return bin(self.hit_mask).count("1")

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.hits, self.bin_count)

    def bitmap(self) -> str:
        return "".join("1" if self.hit_mask >> i & 1 else "0" for i in range(self.bin_count))

    def to_dict(self) -> dict[str, object]:
        return {
            "seed_lo": self.seed_lo,
            "seed_hi": self.seed_hi,
            "bin_count": self.bin_count,
            "bins_hit": self.hits,
            "fraction": str(self.fraction),
            "fraction_decimal": f"{float(self.fraction):.6f}",
            "min_c": None if self.min_c is None else str(self.min_c),
            "samples": self.samples,
            "unterminated": self.unterminated,
            "hit_bins": self.bitmap(),
        }


# --------------------------------------------------------------------------
# statistics


def prefix_hits(a0: int, psi: int, max_steps: int = DEFAULT_MAX_STEPS) -> PrefixHitReport:
    """Steps ``alpha`` whose leading base-3 digits spell ``psi``.

    The window is computed both as ``[3**(p - q) * a]`` and as ``[3**p * c]``;
    steps where the two differ are listed in ``window_disagreements``.
    """
    p = prefix_target(psi).p
    hits: list[int] = []
    bad: list[int] = []
    reached = False
    steps = 0
    for alpha, a, q in iter_orbit(a0, max_steps):
        steps = alpha + 1
        c = TriadicRational(a, q)
        w_c = floor_scale(c, p)
        w_a = a * pow3(p - q) if p >= q else a // pow3(q - p)
        if w_a != w_c:
            bad.append(alpha)
        if w_c == psi:
            hits.append(alpha)
        if a == 1:
            reached = True
    return PrefixHitReport(a0, psi, p, hits, steps, reached, bad)


def coverage(
    seed_lo: int, seed_hi: int, bin_count: int = 200, max_steps: int = DEFAULT_MAX_STEPS
) -> CoverageReport:
    """Bin every ``c`` with step ``alpha >= 1`` over the seeds ``seed_lo..seed_hi``."""
    if seed_lo < 1 or seed_hi < seed_lo:
        raise ValueError("need 1 <= seed_lo <= seed_hi")
    if bin_count < 1:
        raise ValueError("bin_count must be positive")
    mask = 0
    full = (1 << bin_count) - 1
    min_a, min_q = 0, 0  # min c = min_a / 3**min_q, unset while min_a == 0
    samples = 0
    unterminated = 0
    for seed in range(seed_lo, seed_hi + 1):
        last = seed
        for alpha, a, q in iter_orbit(seed, max_steps):
            last = a
            if alpha == 0:
                continue
            samples += 1
            lo = pow3(q)
            if mask != full:
                mask |= 1 << ((bin_count * (a - lo)) // (2 * lo))
            if min_a == 0 or a * pow3(min_q) < min_a * lo:
                min_a, min_q = a, q
        if last != 1:
            unterminated += 1
    min_c = TriadicRational(min_a, min_q) if min_a else None
    return CoverageReport(bin_count, seed_lo, seed_hi, mask, min_c, samples, unterminated)


def merge_coverage(parts: Iterable[CoverageReport]) -> CoverageReport:
    """Combine reports over disjoint seed ranges; the result does not depend on order."""
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to merge")
    bins = {r.bin_count for r in parts}
    if len(bins) != 1:
        raise ValueError("bin counts differ")
    mins = [r.min_c for r in parts if r.min_c is not None]
    return CoverageReport(
        bin_count=bins.pop(),
        seed_lo=min(r.seed_lo for r in parts),
        seed_hi=max(r.seed_hi for r in parts),
        hit_mask=_or_all(r.hit_mask for r in parts),
        min_c=min(mins) if mins else None,
        samples=sum(r.samples for r in parts),
        unterminated=sum(r.unterminated for r in parts),
    )


def _or_all(masks: Iterable[int]) -> int:
    out = 0
    for m in masks:
        out |= m
    return out


# --------------------------------------------------------------------------
# sampling


def sample_unit_window(rng: random.Random, r_max: int = 24) -> TriadicRational:
    """A triadic rational in ``[1, 3)``: uniform exponent, then uniform numerator."""
    r = rng.randint(0, r_max)
    lo = pow3(r)
    return TriadicRational(rng.randrange(lo, 3 * lo), r)


def sample_phi(rng: random.Random, xi: int, d_max: int = 12) -> TriadicRational:
    """An element ``xi / 3**q0 + t / 3**(q0 + d)`` of the window set of ``xi``, ``3`` not dividing ``t``."""
    q0 = ilog3(xi)
    d = rng.randint(1, d_max)
    span = pow3(d)
    while True:
        t = rng.randrange(1, span)
        if t % 3:
            return TriadicRational._raw(xi * span + t, q0 + d)


def _le_pow3_times(e: int, num: int, den: int) -> bool:
    """``3**e <= num / den`` for any integer ``e``."""
    if e >= 0:
        return pow3(e) * den <= num
    return den <= num * pow3(-e)


def _log3_floor_ratio(num: int, den: int) -> int:
    e = ilog3(num) - ilog3(den)
    while not _le_pow3_times(e, num, den):
        e -= 1
    while _le_pow3_times(e + 1, num, den):
        e += 1
    return e


# --------------------------------------------------------------------------
# harnesses


def _b_n_samples(seed: int, trials: int, n_max: int, r_max: int) -> Iterable[tuple[TriadicRational, int]]:
    rng = substream(seed, "col4-col3-samples")
    for _ in range(trials):
        b = sample_unit_window(rng, r_max)
        yield b, rng.randint(0, n_max)


def col4_identity_check(trials: int, seed: int, n_max: int = 64, r_max: int = 24) -> VerificationReport:
    """``Col4^n(b) == 3**k Col3^n(b)`` with ``k = -[log_3 Col3^n(b)]``, two code paths."""
    rep = VerificationReport("col4_identity", params={"n_max": str(n_max), "r_max": str(r_max)})
    for b, n in _b_n_samples(seed, trials, n_max, r_max):
        left = b
        for _ in range(n):
            left = col4_step(left)
        right = b
        for _ in range(n):
            right = col3_step(right)
        k = -log3_floor(right)
        scaled = right.scale3(k)
        rep.record(left == scaled, b=b, n=n, k=k, col4=left, scaled_col3=scaled)
    return rep


def col3_bound_check(trials: int, seed: int, n_max: int = 64, r_max: int = 24) -> VerificationReport:
    """``2**-n b <= Col3^n(b) <= 2**-n b + 3**-q`` with ``q`` the exponent of ``b``."""
    rep = VerificationReport("col3_bound", params={"n_max": str(n_max), "r_max": str(r_max)})
    for b, n in _b_n_samples(seed, trials, n_max, r_max):
        x = b
        for _ in range(n):
            x = col3_step(x)
        m, r = b.numerator, b.denom_exp
        big_m, big_r = x.numerator, x.denom_exp
        # multiply through by 2**n * 3**big_r (big_r >= r)
        base = m * pow3(big_r - r)
        mid = big_m << n
        ok = base <= mid <= base + (pow3(big_r - r) << n)
        rep.record(ok, b=b, n=n, col3=x)
    return rep


def window_lemma_check(xi: int, trials: int, seed: int, d_max: int = 12) -> VerificationReport:
    """Two members of the window set of ``xi`` keep equal windows under ``col3_step``.

    The window at scale ``q0 = [log_3 xi]`` is followed until it equals 1;
    one step later both windows must be 0.  The windows are also compared
    with ``[3**q0 * phi / 2**m]``.
    """
    q0 = ilog3(xi)
    rep = VerificationReport("window_lemma", params={"xi": str(xi), "d_max": str(d_max)})
    rng = substream(seed, f"window-lemma/{xi}")
    for _ in range(trials):
        phi = sample_phi(rng, xi, d_max)
        theta = sample_phi(rng, xi, d_max)
        ok = True
        m = 0
        x, y = phi, theta
        cx: dict[str, object] = {}
        while True:
            m += 1
            x, y = col3_step(x), col3_step(y)
            wx, wy = floor_scale(x, q0), floor_scale(y, q0)
            outer = floor_scale(phi, q0) >> m
            if not wx == wy == outer:
                ok = False
                cx = {"m": m, "window_phi": wx, "window_theta": wy, "outer": outer}
                break
            if wx == 1:
                x, y = col3_step(x), col3_step(y)
                wx, wy = floor_scale(x, q0), floor_scale(y, q0)
                if wx != 0 or wy != 0:
                    ok = False
                    cx = {"m": m + 1, "window_phi": wx, "window_theta": wy}
                break
            if m > xi.bit_length() + 1:
                ok = False
                cx = {"m": m, "reason": "window never reached 1"}
                break
        rep.record(ok, xi=xi, phi=phi, theta=theta, **cx)
    return rep


def cor1_check(xi: int, n_max: int, trials: int, seed: int, d_max: int = 12) -> VerificationReport:
    """For ``b`` in the window set of ``xi``: the two exponent formulas agree and depend on ``n`` only.

    Whenever ``k1 = -[log_3 Col3^n(b)]`` or ``k2 = -[log_3 (b / 2**n)]`` is at
    most ``q0``, require ``k1 == k2``, the same ``k`` for every sampled
    ``b``, and ``Col4^n(b) == 3**k Col3^n(b)``.
    """
    if xi < 2:
        raise ValueError("xi must be >= 2")
    q0 = ilog3(xi)
    rep = VerificationReport("cor1", params={"xi": str(xi), "n_max": str(n_max)})
    rng = substream(seed, f"cor1/{xi}")
    common: dict[int, int] = {}
    for _ in range(trials):
        b = sample_phi(rng, xi, d_max)
        x3 = x4 = b
        ok = True
        cx: dict[str, object] = {}
        for n in range(n_max + 1):
            if n:
                x3, x4 = col3_step(x3), col4_step(x4)
            k1 = -log3_floor(x3)
            k2 = -_log3_floor_ratio(b.numerator, pow3(b.denom_exp) << n)
            if k1 > q0 and k2 > q0:
                continue
            ref = common.setdefault(n, k1)
            if k1 != k2 or k1 != ref or x4 != x3.scale3(k1):
                ok = False
                cx = {"n": n, "k1": k1, "k2": k2, "k_common": ref, "col4": x4}
                break
        rep.record(ok, xi=xi, b=b, **cx)
    return rep


def cor2_check(trials: int, seed: int, n_max: int = 60, r_max: int = 24) -> VerificationReport:
    """Solutions of ``1 <= 3**k b 2**-n < 3``: one ``k`` per ``n``, at most two ``n`` per ``k``."""
    rep = VerificationReport("cor2", params={"n_max": str(n_max), "r_max": str(r_max)})
    rng = substream(seed, "cor2")
    for _ in range(trials):
        b = sample_unit_window(rng, r_max)
        m, r = b.numerator, b.denom_exp
        per_k: dict[int, list[int]] = {}
        ok = True
        cx: dict[str, object] = {}
        for n in range(n_max + 1):
            lo = pow3(r) << n
            ks = [k for k in range(0, n + 2) if lo <= pow3(k) * m < 3 * lo]
            if len(ks) != 1:
                ok = False
                cx = {"n": n, "ks": ks}
                break
            per_k.setdefault(ks[0], []).append(n)
        if ok:
            crowded = {k: ns for k, ns in per_k.items() if len(ns) > 2}
            if crowded:
                ok = False
                k = min(crowded)
                cx = {"k": k, "ns": crowded[k]}
        rep.record(ok, b=b, **cx)
    return rep


def _c_of(a: int, q: int) -> TriadicRational:
    return TriadicRational(a, q) if a % 3 == 0 else TriadicRational._raw(a, q)


def orbit_relation_check(
    seed_lo: int, seed_hi: int, max_steps: int = DEFAULT_MAX_STEPS, *, literal: bool = True
) -> VerificationReport:
    """Check ``c[alpha+1] == col4_step(c[alpha])`` along orbits of ``seed_lo..seed_hi``.

    ``literal=True`` requires the relation at every ``alpha >= 1``, and at
    ``alpha = 0`` when 3 does not divide the seed.  ``literal=False`` instead
    requires that it fails exactly at the steps where ``a`` is an odd
    multiple of 3 (every step is checked, ``alpha = 0`` included).  In both
    modes an orbit that misses 1 within ``max_steps`` counts as a violation.
    One trial is one seed.
    """
    name = "orbit_relation" if literal else "orbit_relation_exact"
    rep = VerificationReport(name, params={"seed_lo": str(seed_lo), "seed_hi": str(seed_hi)})
    for seed in range(seed_lo, seed_hi + 1):
        start = 0 if (not literal or seed % 3) else 1
        ok = True
        cx: dict[str, object] = {}
        prev_c: TriadicRational | None = None
        prev_a = 0
        last = seed
        for alpha, a, q in iter_orbit(seed, max_steps):
            last = a
            c = _c_of(a, q)
            if prev_c is not None and alpha - 1 >= start:
                holds = col4_step(prev_c) == c
                expected = True if literal else not (prev_a % 3 == 0 and prev_a & 1)
                if holds != expected and ok:
                    ok = False
                    cx = {"alpha": alpha - 1, "a": prev_a, "c": prev_c,
                          "col4(c)": col4_step(prev_c), "c_next": c}
            prev_c, prev_a = c, a
        if last != 1 and ok:
            ok = False
            cx = {"reason": f"did not reach 1 within {max_steps} steps"}
        rep.record(ok, seed=seed, **cx)
    return rep


def digit_shift_check(
    seed_lo: int, seed_hi: int, max_steps: int = DEFAULT_MAX_STEPS, *, literal: bool = True
) -> VerificationReport:
    """``numerator(Col3^n(c[s])) == a[s+n]`` along each orbit.

    ``literal=True`` starts at ``s = 1``.  ``literal=False`` starts at the
    first ``s >= 1`` with 3 not dividing ``a[s]``.  Seeds whose orbit has no
    such ``s`` contribute a vacuous trial.
    """
    name = "digit_shift" if literal else "digit_shift_exact"
    rep = VerificationReport(name, params={"seed_lo": str(seed_lo), "seed_hi": str(seed_hi)})
    for seed in range(seed_lo, seed_hi + 1):
        x: TriadicRational | None = None
        ok = True
        cx: dict[str, object] = {}
        for alpha, a, q in iter_orbit(seed, max_steps):
            if alpha == 0:
                continue
            if x is None:
                if not literal and a % 3 == 0:
                    continue
                start = alpha
                x = _c_of(a, q)
            else:
                x = col3_step(x)
            if x.numerator != a:
                ok = False
                cx = {"start": start, "n": alpha - start, "a": a, "col3_iterate": x}
                break
        rep.record(ok, seed=seed, **cx)
    return rep


# --------------------------------------------------------------------------
# aggregate runner

XI_RANGE = range(2, 81)

DEFAULT_BUDGET: dict[str, int] = {
    "col4_identity": 1000,
    "col3_bound": 1000,
    "window_lemma": 1000,   # per xi in XI_RANGE
    "cor1": 50,             # per xi in XI_RANGE
    "cor2": 1000,
    "orbit_relation_exact": 1000,  # seeds 1..N
    "digit_shift_exact": 1000,     # seeds 1..N
}


def _merge_reports(name: str, parts: list[VerificationReport], params: dict[str, str]) -> VerificationReport:
    out = VerificationReport(name, params=params)
    for p in parts:
        out.trials += p.trials
        out.violations += p.violations
        if out.first_counterexample is None and p.first_counterexample is not None:
            out.first_counterexample = p.first_counterexample
    return out


_XI_PARAMS = {"xi": f"{XI_RANGE.start}..{XI_RANGE.stop - 1}"}
COR1_N_MAX = 40

PROPERTIES: dict[str, Callable[[int, int], VerificationReport]] = {
    "col4_identity": lambda seed, t: col4_identity_check(t, seed),
    "col3_bound": lambda seed, t: col3_bound_check(t, seed),
    "window_lemma": lambda seed, t: _merge_reports(
        "window_lemma", [window_lemma_check(xi, t, seed) for xi in XI_RANGE], _XI_PARAMS),
    "cor1": lambda seed, t: _merge_reports(
        "cor1", [cor1_check(xi, COR1_N_MAX, t, seed) for xi in XI_RANGE],
        {**_XI_PARAMS, "n_max": str(COR1_N_MAX)}),
    "cor2": lambda seed, t: cor2_check(t, seed),
    "orbit_relation_exact": lambda seed, t: orbit_relation_check(1, t, literal=False),
    "digit_shift_exact": lambda seed, t: digit_shift_check(1, t, literal=False),
}


def run_property(name: str, seed: int, trials: int) -> VerificationReport:
    if trials <= 0:
        return VerificationReport(name)
    return PROPERTIES[name](seed, trials)


def run_all_properties(seed: int, budget: Mapping[str, int] | None = None) -> list[VerificationReport]:
    """Run every registered harness with seeded substreams, in a fixed order.

    Missing budget entries fall back to :data:`DEFAULT_BUDGET`; a budget of 0
    yields a report with status ``"no trials"``.
    """
    b = dict(DEFAULT_BUDGET)
    if budget:
        b.update(budget)
    return [run_property(name, seed, b[name]) for name in PROPERTIES]


def all_pass(reports: Iterable[VerificationReport]) -> bool:
    return all(r.passed for r in reports)
