"""Concrete ETFs: harmonic frames from difference sets, simplices, Naimark complements."""

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
import math

import numpy as np

from . import finite_field as ff
from .errors import DegenerateComplement, NotAnEtf, NotPrimePower, SearchSpaceTooLarge
from .frame import Frame
from .matcore import DEFAULT_REL_TOL, DEFAULT_TOL, orthonormal_kernel_basis
from .verification import verify_frame

MAX_SINGER_Q = 64
MAX_BRUTE_FORCE_SUBSETS = 10**7


@dataclass(frozen=True)
class DifferenceSet:
    v: int
    elements: tuple

    def __post_init__(self):
        elems = tuple(sorted({int(x) % self.v for x in self.elements}))
        if len(elems) != len(self.elements):
            raise ValueError("difference set elements must be distinct residues")
        object.__setattr__(self, "elements", elems)

    @property
    def k(self):
        return len(self.elements)

    @property
    def lambda_ds(self):
        """Replication count implied by the counting identity k(k-1) = lambda (v-1)."""
        if self.v < 2:
            return 0
        return self.k * (self.k - 1) // (self.v - 1)

    def complement(self):
        return DifferenceSet(self.v, tuple(sorted(set(range(self.v)) - set(self.elements))))


def difference_counts(v, elements):
    """How often each nonzero residue mod ``v`` occurs as ``a - b``."""
    counts = Counter((a - b) % v for a in elements for b in elements if a != b)
    return [counts.get(r, 0) for r in range(1, v)]


def is_difference_set(v, elements, lambda_ds=None):
    counts = difference_counts(v, elements)
    if not counts:
        return False
    target = counts[0] if lambda_ds is None else lambda_ds
    return target >= 1 and all(c == target for c in counts)


def canonical_form(v, elements):
    """Smallest sorted translate of ``elements`` that contains 0."""
    elems = sorted(set(elements))
    return min(tuple(sorted((x - t) % v for x in elems)) for t in elems)


def singer_difference_set(q):
    """The (q^2+q+1, q+1, 1) Singer set via the trace-zero hyperplane of GF(q^3).

    ``D = { i mod v : Tr(w^i) = 0 }`` for a primitive ``w``. The relative trace
    is GF(p)-linear, so it is tabulated once on the polynomial basis and then
    applied to each power ``w^i`` as a matrix-vector product mod p.
    """
    pm = ff.prime_power_decomposition(q)
    if pm is None:
        raise NotPrimePower(f"{q} is not a prime power")
    if q > MAX_SINGER_Q:
        raise ValueError(f"Singer construction limited to q <= {MAX_SINGER_Q}")
    p, m = pm
    big = ff.make_field(p, 3 * m)
    dim = big.m
    basis = [big.element([0] * i + [1]) for i in range(dim)]
    trace_cols = [ff.relative_trace(big, q, e).coefficients for e in basis]
    trace_map = np.array(trace_cols, dtype=np.int64).T

    v = q * q + q + 1
    elements = []
    x = big.one
    for i in range(v):
        coeffs = np.array(x.coefficients, dtype=np.int64)
        if not np.any((trace_map @ coeffs) % p):
            elements.append(i)
        x = ff.mul(big, x, big.generator)
    ds = DifferenceSet(v, tuple(elements))
    if ds.k != q + 1 or not is_difference_set(v, ds.elements, 1):
        raise AssertionError(f"Singer construction failed validation for q={q}")
    return ds


def brute_force_difference_sets(v, k, lambda_ds):
    """Every (v, k, lambda) cyclic difference set, up to translation."""
    if math.comb(v, k) > MAX_BRUTE_FORCE_SUBSETS:
        raise SearchSpaceTooLarge(f"C({v}, {k}) exceeds {MAX_BRUTE_FORCE_SUBSETS}")
    if k < 2 or k * (k - 1) != lambda_ds * (v - 1):
        return []
    found = set()
    for rest in combinations(range(1, v), k - 1):
        elems = (0,) + rest
        if is_difference_set(v, elems, lambda_ds):
            found.add(canonical_form(v, elems))
    return [DifferenceSet(v, e) for e in sorted(found)]


def harmonic_etf(ds):
    """Rows indexed by the set elements, columns by Z_v: ``exp(2 pi i d_j t / v) / sqrt(k)``."""
    rows = np.array(ds.elements, dtype=np.float64)[:, None]
    cols = np.arange(ds.v, dtype=np.float64)[None, :]
    phases = np.mod(rows * cols, ds.v) / ds.v
    return Frame(np.exp(2j * np.pi * phases) / math.sqrt(ds.k))


def simplex_etf(d):
    """The d x (d+1) frame left after deleting the all-ones row of the DFT."""
    if d < 1:
        raise ValueError("simplex dimension must be >= 1")
    return harmonic_etf(DifferenceSet(d + 1, tuple(range(1, d + 1))))


def naimark_complement(f, tol=DEFAULT_TOL, rel_tol=DEFAULT_REL_TOL):
    """The (n-d) x n ETF ``Z`` with ``(d/n) X*X + ((n-d)/n) Z*Z = I``."""
    report = verify_frame(f, tol)
    if not report.passed:
        raise NotAnEtf(f"input fails ETF checks: {', '.join(report.failed_checks())}")
    d, n = f.d, f.n
    if n < d + 2:
        raise DegenerateComplement(
            f"n = d + 1 = {n}: the complement is one-dimensional with coherence 1"
        )
    kernel = orthonormal_kernel_basis(f.matrix, rel_tol)
    if kernel.shape[1] != n - d:
        raise NotAnEtf(f"kernel has dimension {kernel.shape[1]}, expected {n - d}")
    return Frame(math.sqrt(n / (n - d)) * kernel.conj().T)
