"""ETF identities and the scalar parameter family of a (d, n) pair."""

from dataclasses import asdict, dataclass
from fractions import Fraction
import math

import numpy as np

from .errors import InvalidPair
from .frame import Frame
from .matcore import DEFAULT_TOL, max_abs


@dataclass(frozen=True)
class EtfParameters:
    """Floating-point values plus the exact rationals they come from.

    ``alpha`` is irrational in general, so only ``alpha**2`` is kept exactly.
    """

    d: int
    n: int
    alpha_squared_q: Fraction
    beta_q: Fraction
    gamma_q: Fraction
    mu_q: Fraction
    lambda_q: Fraction

    @property
    def alpha(self):
        return math.sqrt(self.alpha_squared_q)

    @property
    def beta(self):
        return float(self.beta_q)

    @property
    def gamma(self):
        return float(self.gamma_q)

    @property
    def mu(self):
        return float(self.mu_q)

    @property
    def lam(self):
        return float(self.lambda_q)

    @property
    def in_window(self):
        """True iff 1/2 < lambda < 1, i.e. binom(d+1, 2) < n < d^2."""
        return Fraction(1, 2) < self.lambda_q < 1

    @property
    def bound(self):
        return self.d * self.d - self.d + 1

    def to_dict(self):
        exact = {
            "alpha_squared": _frac(self.alpha_squared_q),
            "beta": _frac(self.beta_q),
            "gamma": _frac(self.gamma_q),
            "mu": _frac(self.mu_q),
            "lambda": _frac(self.lambda_q),
        }
        return {
            "d": self.d,
            "n": self.n,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "mu": self.mu,
            "lambda": self.lam,
            "exact": exact,
            "in_window": self.in_window,
        }


def _frac(q):
    return [q.numerator, q.denominator]


def etf_params(d, n):
    if d < 2 or n <= d:
        raise InvalidPair(f"need 2 <= d < n, got (d, n) = ({d}, {n})")
    alpha_sq = Fraction(n - d, d * (n - 1))
    gamma = alpha_sq / (1 - alpha_sq)
    mu = (gamma + 1) / (2 * gamma)
    lam = Fraction(d - 1, n - 1) * mu
    return EtfParameters(d, n, alpha_sq, Fraction(n, d), gamma, mu, lam)


def welch_bound(d, n):
    if not n > d >= 1:
        raise InvalidPair(f"need n > d >= 1, got (d, n) = ({d}, {n})")
    return math.sqrt((n - d) / (d * (n - 1)))


def _matrix(f):
    return f.matrix if isinstance(f, Frame) else np.asarray(f, dtype=np.complex128)


def check_unit_norm(f, tol=DEFAULT_TOL):
    """Largest deviation of a column norm from 1."""
    x = _matrix(f)
    return float(np.max(np.abs(np.linalg.norm(x, axis=0) - 1.0)))


def check_tight(f, tol=DEFAULT_TOL):
    """``||X X* - (n/d) I||_max``."""
    x = _matrix(f)
    d, n = x.shape
    return max_abs(x @ x.conj().T - (n / d) * np.eye(d))


def _off_diagonal_moduli(x):
    g = np.abs(x.conj().T @ x)
    n = g.shape[0]
    return g[~np.eye(n, dtype=bool)]


def check_equiangular(f, tol=DEFAULT_TOL):
    """Return ``(alpha_observed, spread)`` over the off-diagonal Gram moduli."""
    x = _matrix(f)
    if x.shape[1] < 2:
        raise ValueError("equiangularity needs at least two vectors")
    off = _off_diagonal_moduli(x)
    alpha = float(np.mean(off))
    return alpha, float(np.max(np.abs(off - alpha)))


def coherence(f):
    return float(np.max(_off_diagonal_moduli(_matrix(f))))


@dataclass(frozen=True)
class VerificationReport:
    d: int
    n: int
    tol: float
    unit_norm_residual: float
    tightness_residual: float
    equiangularity_spread: float
    alpha_observed: float
    coherence_observed: float
    welch_bound: float
    unit_norm_passed: bool
    tight_passed: bool
    equiangular_passed: bool

    @property
    def passed(self):
        return self.unit_norm_passed and self.tight_passed and self.equiangular_passed

    def failed_checks(self):
        names = ("unit_norm", "tight", "equiangular")
        flags = (self.unit_norm_passed, self.tight_passed, self.equiangular_passed)
        return [name for name, ok in zip(names, flags) if not ok]

    def to_dict(self):
        out = asdict(self)
        out["passed"] = self.passed
        return out


def verify_frame(f, tol=DEFAULT_TOL):
    """Run all three ETF checks. Orthonormal bases fail: ETFs need alpha > 0."""
    x = _matrix(f)
    d, n = x.shape
    unit = check_unit_norm(x, tol)
    tight = check_tight(x, tol)
    if n >= 2:
        alpha, spread = check_equiangular(x, tol)
        coh = coherence(x)
    else:
        alpha, spread, coh = 0.0, 0.0, 0.0
    welch = welch_bound(d, n) if n > d else 0.0
    equi = n >= 2 and welch > 0.0 and spread <= tol and abs(alpha - welch) <= tol
    return VerificationReport(
        d=d,
        n=n,
        tol=tol,
        unit_norm_residual=unit,
        tightness_residual=tight,
        equiangularity_spread=spread,
        alpha_observed=alpha,
        coherence_observed=coh,
        welch_bound=welch,
        unit_norm_passed=unit <= tol,
        tight_passed=tight <= tol,
        equiangular_passed=bool(equi),
    )


def is_etf(f, tol=DEFAULT_TOL):
    return verify_frame(f, tol).passed
