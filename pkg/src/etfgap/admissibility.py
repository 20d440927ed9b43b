"""Classify (d, n) against the known necessary conditions for complex ETFs.

Conditions, in report order:

``gerzon``             n <= d^2
``naimark-gerzon``     n <= (n - d)^2, only for n >= d + 2
``singer-zauner-gap``  not (d^2 - d + 1 < n < d^2)
``szollosi-(3,8)``     (d, n) != (3, 8)

A verdict of ``not-excluded`` says no listed condition rules the pair out.
It is not an existence claim unless a witness construction is attached.
"""

import csv
from dataclasses import dataclass
import io

from .errors import InvalidPair, TooLarge
from .finite_field import prime_power_decomposition

CONDITIONS = ("gerzon", "naimark-gerzon", "singer-zauner-gap", "szollosi-(3,8)")
PASS = "pass"
VIOLATED = "violated"
NOT_APPLICABLE = "not-applicable"
EXCLUDED = "excluded"
NOT_EXCLUDED = "not-excluded"

MAX_SCAN_CELLS = 10**7


@dataclass(frozen=True)
class AdmissibilityVerdict:
    d: int
    n: int
    conditions: tuple  # ((name, status), ...) in CONDITIONS order
    overall: str
    witness: str = None
    note: str = None

    def status(self, name):
        return dict(self.conditions)[name]

    @property
    def violated(self):
        return [name for name, status in self.conditions if status == VIOLATED]

    @property
    def excluded(self):
        return self.overall == EXCLUDED

    def to_dict(self):
        return {
            "d": self.d,
            "n": self.n,
            "conditions": dict(self.conditions),
            "overall": self.overall,
            "witness": self.witness,
            "note": self.note,
        }


def _status(ok):
    return PASS if ok else VIOLATED


def _witness(d, n):
    if n == d:
        return "orthobasis"
    if n == d + 1:
        return "simplex"
    if n == d * d - d + 1 and prime_power_decomposition(d - 1) is not None:
        return f"singer({d - 1})"
    return None


def check_pair(d, n):
    if d < 1 or n < d:
        raise InvalidPair(f"need d >= 1 and n >= d, got (d, n) = ({d}, {n})")
    note = None
    if d == 1:
        # every family of unit scalars is equiangular with alpha = 1
        statuses = {name: NOT_APPLICABLE for name in CONDITIONS}
        note = "d = 1: all vectors are parallel, no condition applies"
    else:
        statuses = {
            "gerzon": _status(n <= d * d),
            "naimark-gerzon": _status(n <= (n - d) ** 2) if n >= d + 2 else NOT_APPLICABLE,
            "singer-zauner-gap": _status(not (d * d - d + 1 < n < d * d)),
            "szollosi-(3,8)": _status((d, n) != (3, 8)),
        }
        if n == d:
            note = "n = d: an orthonormal basis has alpha = 0, outside the ETF definition"
    conditions = tuple((name, statuses[name]) for name in CONDITIONS)
    overall = EXCLUDED if VIOLATED in statuses.values() else NOT_EXCLUDED
    witness = _witness(d, n) if overall == NOT_EXCLUDED else None
    return AdmissibilityVerdict(d, n, conditions, overall, witness, note)


def scan_table(d_max, n_max):
    """Verdicts for every 1 <= d <= d_max, d <= n <= n_max, ordered by (d, n)."""
    if d_max < 1 or n_max < 1:
        raise InvalidPair("scan bounds must be positive")
    if d_max * n_max > MAX_SCAN_CELLS:
        raise TooLarge(f"scan of {d_max} x {n_max} exceeds {MAX_SCAN_CELLS} cells")
    return [check_pair(d, n) for d in range(1, d_max + 1) for n in range(d, n_max + 1)]


CSV_HEADER = ("d", "n") + CONDITIONS + ("overall", "witness")


def table_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for v in rows:
        writer.writerow([v.d, v.n, *(s for _, s in v.conditions), v.overall, v.witness or ""])
    return buf.getvalue()
