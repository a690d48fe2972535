"""CSV and JSON emission.  Exact integers are always written in decimal."""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from typing import IO, Any, Iterable, Sequence

from .analysis import PrefixHitReport, VerificationReport
from .diophantine import ApproxPair, PrefixTarget
from .maps import OrbitRecord

ORBIT_FIELDS = ("alpha", "a", "q", "c_num", "c_denom_exp", "c_decimal(display-only)")
RECORD_FIELDS = ("k", "n", "frac_lo", "frac_hi")
STEER_FIELDS = ("psi", "p", "case", "k", "n", "lhs", "mid", "rhs")
PREFIX_FIELDS = ("a0", "psi", "p", "count", "total_steps", "reached_one", "hits", "window_disagreements")
COVERAGE_FIELDS = (
    "seed_lo", "seed_hi", "bin_count", "bins_hit", "fraction", "fraction_decimal",
    "min_c", "samples", "unterminated", "hit_bins",
)
VERIFY_FIELDS = ("property", "trials", "violations", "status", "params", "first_counterexample")

TRUNCATION_SENTINEL = "# interrupted: output truncated"

FRAC_DIGITS = 24


def dec_floor(x: Fraction, digits: int = FRAC_DIGITS) -> str:
    scaled = (x.numerator * 10**digits) // x.denominator
    return _fixed(scaled, digits)


def dec_ceil(x: Fraction, digits: int = FRAC_DIGITS) -> str:
    scaled = -((-x.numerator * 10**digits) // x.denominator)
    return _fixed(scaled, digits)


def _fixed(scaled: int, digits: int) -> str:
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def orbit_row(rec: OrbitRecord) -> dict[str, Any]:
    return {
        "alpha": rec.alpha,
        "a": rec.a,
        "q": rec.q,
        "c_num": rec.c.numerator,
        "c_denom_exp": rec.c.denom_exp,
        "c_decimal(display-only)": rec.c.to_decimal(12),
    }


def record_row(pair: ApproxPair) -> dict[str, Any]:
    assert pair.frac is not None
    return {"k": pair.k, "n": pair.n, "frac_lo": dec_floor(pair.frac.lo), "frac_hi": dec_ceil(pair.frac.hi)}


def steer_row(target: PrefixTarget, pair: ApproxPair) -> dict[str, Any]:
    lhs, mid, rhs = pair.certificate
    return {
        "psi": target.psi, "p": target.p, "case": target.case.value,
        "k": pair.k, "n": pair.n, "lhs": lhs, "mid": mid, "rhs": rhs,
    }


def prefix_row(rep: PrefixHitReport) -> dict[str, Any]:
    d = rep.to_dict()
    d["hits"] = " ".join(map(str, rep.hits))
    d["window_disagreements"] = " ".join(map(str, rep.window_disagreements))
    d["reached_one"] = str(rep.reached_one).lower()
    return d


def verify_row(rep: VerificationReport) -> dict[str, Any]:
    d = rep.to_dict()
    d["params"] = ";".join(f"{k}={v}" for k, v in rep.params.items())
    cx = rep.first_counterexample
    d["first_counterexample"] = "" if cx is None else ";".join(f"{k}={v}" for k, v in cx.items())
    return d


class Emitter:
    """Writes rows as CSV (streamed) or JSON (a list, written on close)."""

    def __init__(self, out: IO[str], fmt: str, fields: Sequence[str]):
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {fmt!r}")
        self.out = out
        self.fmt = fmt
        self.fields = tuple(fields)
        self._rows: list[dict[str, Any]] = []
        self._writer = None
        if fmt == "csv":
            self._writer = csv.writer(out, lineterminator="\n")
            self._writer.writerow(self.fields)

    def row(self, values: dict[str, Any]) -> None:
        if self._writer is not None:
            self._writer.writerow([_cell(values[f]) for f in self.fields])
        else:
            self._rows.append({f: values[f] for f in self.fields})

    def rows(self, many: Iterable[dict[str, Any]]) -> None:
        for r in many:
            self.row(r)

    def close(self) -> None:
        if self.fmt == "json":
            json.dump(self._rows, self.out, indent=2)
            self.out.write("\n")
        self.out.flush()

    def truncate(self) -> None:
        if self.fmt == "csv":
            self.out.write(TRUNCATION_SENTINEL + "\n")
        self.out.flush()


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=False)
    return str(v)


def dump_json(obj: Any, out: IO[str]) -> None:
    json.dump(obj, out, indent=2)
    out.write("\n")
