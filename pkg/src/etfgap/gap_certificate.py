"""Run the Singer-Zauner gap argument as a numerical certificate on a concrete ETF.

Pipeline (each step recorded in :class:`GapCertificateReport`):

0. ETF verification of the input frame and the parameter family for (d, n).
1. Unitary + column phasing into block form; extract the (d-1) x (n-1) frame Y.
2. H = Y*Y and the derived K = |H|^2, R = Re H, P = c H, A = Re P, B = Im P.
3. Flatness identity K + 2 gamma R - gamma J = (gamma + 1) I, with R1 = 0 and
   K1 = ((n-1)/(d-1)) 1.
4. Real/imaginary split of P^2 = P.
5. Pairing of the A-eigenspaces at lambda and 1 - lambda through B, the joint
   eigenpairs (kappa, rho) of K and R on the complement of 1, and
   ker K = ker(R - mu I).
6. Kernel pairing: ker K sits inside the A-eigenspace at lambda and has a
   partner of equal dimension at 1 - lambda, orthogonal to it.
7. Rank chain rank R >= 2 nullity K >= 2((n-1) - (d-1)^2), hence n <= d^2 - d + 1.

Steps 6 and the lower half of step 7 only apply when lambda lies in the
window the argument needs; outside it they are reported ``not-applicable``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import hashlib
from typing import NamedTuple

import numpy as np

from . import __version__
from .errors import (
    EtfError,
    InvariantViolation,
    NotAnEtf,
    PairingViolation,
    PhaseDegeneracy,
    RankChainViolation,
)
from .frame import Frame
from .matcore import (
    DEFAULT_REL_TOL,
    DEFAULT_TOL,
    hermitian_eigen,
    max_abs,
    numerical_rank,
    orthonormal_kernel_basis,
    unitary_mapping_to_e1,
)
from .verification import etf_params, verify_frame

CLUSTER_REL_TOL = 1e-7
BIJECTION_MIN_SV = 1e-8

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"
SKIPPED = "skipped"

STEP_NAMES = (
    "verification",
    "parameters",
    "block_form",
    "gram_objects",
    "flatness",
    "projection_split",
    "eigen_pairing",
    "kernel_pairing",
    "rank_chain",
    "bound",
)


@dataclass(frozen=True, eq=False)
class GramObjects:
    H: np.ndarray
    K: np.ndarray
    R: np.ndarray
    P: np.ndarray
    A: np.ndarray
    B: np.ndarray

    @classmethod
    def from_hermitian(cls, H, d, n):
        """Derive K, R, P, A, B from H without checking anything."""
        H = np.asarray(H, dtype=np.complex128)
        P = ((d - 1) / (n - 1)) * H
        return cls(H=H, K=np.abs(H) ** 2, R=H.real.copy(), P=P, A=P.real.copy(), B=P.imag.copy())

    @property
    def size(self):
        return self.H.shape[0]


class FlatnessResiduals(NamedTuple):
    identity: float
    r_ones: float
    k_ones: float

    @property
    def worst(self):
        return max(self)


class RankChain(NamedTuple):
    rank_K: int
    nullity_K: int
    rank_R: int
    bound: int


@dataclass(frozen=True)
class PairingEntry:
    eigenvalue: float
    dim: int
    partner_eigenvalue: float
    dim_partner: int
    min_singular_value: float
    self_paired: bool

    def to_dict(self):
        return {
            "lambda": self.eigenvalue,
            "dim": self.dim,
            "partner": self.partner_eigenvalue,
            "dim_partner": self.dim_partner,
            "bijection_min_singular_value": self.min_singular_value,
            "self_paired": self.self_paired,
        }


@dataclass(frozen=True)
class EigenPair:
    kappa: float
    rho: float
    multiplicity: int

    def to_dict(self):
        return {"kappa": self.kappa, "rho": self.rho, "multiplicity": self.multiplicity}


@dataclass(frozen=True)
class EigenPairingResult:
    a_spectrum: tuple
    pairing_table: tuple
    eigen_pairs: tuple
    relation_residual: float
    simultaneity_residual: float
    kernel_K_dim: int
    kernel_R_mu_dim: int
    kernel_angle: float
    partner_dim: int
    partner_orthogonality: float


# -- step 1 ------------------------------------------------------------------

def reduce_to_block_form(f, tol=DEFAULT_TOL):
    """Return ``(Y, residual)`` for an ETF ``f``.

    After the reduction the frame is ``[[1, alpha 1^T], [0, sqrt(1 - alpha^2) Y]]``.
    ``residual`` is the worst of: first-row deviation from that shape, column
    norms of Y, ``||Y 1|| / sqrt(n)``, and the tightness of Y.
    """
    report = verify_frame(f, tol)
    if not report.passed:
        raise NotAnEtf(f"input fails ETF checks: {', '.join(report.failed_checks())}")
    x = f.matrix
    d, n = x.shape
    params = etf_params(d, n)
    u = unitary_mapping_to_e1(x[:, 0])
    z = u @ x
    first_row = z[0]
    moduli = np.abs(first_row)
    if np.min(moduli) <= tol:
        j = int(np.argmin(moduli))
        raise PhaseDegeneracy(f"column {j} is orthogonal to column 0; cannot phase it")
    z = z * (np.conj(first_row) / moduli)[None, :]

    alpha = params.alpha
    y = z[1:, 1:] / np.sqrt(1.0 - alpha * alpha)

    shape_res = max(abs(z[0, 0] - 1.0), max_abs(z[1:, 0]), max_abs(z[0, 1:] - alpha))
    unit_res = float(np.max(np.abs(np.linalg.norm(y, axis=0) - 1.0)))
    ones_res = float(np.linalg.norm(y.sum(axis=1))) / np.sqrt(n)
    tight_res = max_abs(y @ y.conj().T - ((n - 1) / (d - 1)) * np.eye(d - 1))
    residual = float(max(shape_res, unit_res, ones_res, tight_res))
    if residual > tol:
        raise InvariantViolation(f"block form postconditions fail (residual {residual:.3e})", residual)
    return y, residual


# -- step 2 ------------------------------------------------------------------

def gram_invariant_residuals(g):
    P = g.P
    return {
        "diag_K": max_abs(np.diag(g.K) - 1.0),
        "diag_R": max_abs(np.diag(g.R) - 1.0),
        "H_hermitian": max_abs(g.H - g.H.conj().T),
        "A_symmetric": max_abs(g.A - g.A.T),
        "B_antisymmetric": max_abs(g.B + g.B.T),
        "P_idempotent": max_abs(P @ P - P),
    }


def build_gram_objects(Y, params, tol=DEFAULT_TOL):
    g = GramObjects.from_hermitian(Y.conj().T @ Y, params.d, params.n)
    residuals = gram_invariant_residuals(g)
    name, worst = max(residuals.items(), key=lambda kv: kv[1])
    if worst > tol:
        raise InvariantViolation(f"Gram invariant {name} fails (residual {worst:.3e})", worst)
    return g


# -- step 3 ------------------------------------------------------------------

def check_flatness_identity(g, params, tol=DEFAULT_TOL):
    m = g.size
    gamma = params.gamma
    ones = np.ones(m)
    lhs = g.K + 2.0 * gamma * g.R - gamma * np.ones((m, m))
    identity = max_abs(lhs - (gamma + 1.0) * np.eye(m))
    r_ones = max_abs(g.R @ ones)
    k_ones = max_abs(g.K @ ones - ((params.n - 1) / (params.d - 1)) * ones)
    return FlatnessResiduals(identity, r_ones, k_ones)


# -- step 4 ------------------------------------------------------------------

def check_projection_split(g, tol=DEFAULT_TOL):
    A, B = g.A, g.B
    res_a = max_abs(A @ A - B @ B - A)
    res_b = max_abs(A @ B + B @ A - B)
    return res_a, res_b


# -- step 5 ------------------------------------------------------------------

def cluster_eigenvalues(values, gap):
    """Group ascending ``values`` into runs whose consecutive gaps are < ``gap``."""
    clusters = []
    for i, val in enumerate(values):
        if clusters and val - values[clusters[-1][-1]] < gap:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return [(float(np.mean(values[idx])), idx) for idx in clusters]


def _find_cluster(clusters, values, target, gap):
    for center, idx in clusters:
        lo, hi = values[idx[0]], values[idx[-1]]
        if lo - gap <= target <= hi + gap:
            return center, idx
    return None


def _min_sv(m):
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[-1])


def pair_projection_eigenspaces(A, B, tol=DEFAULT_TOL, cluster_rel_tol=CLUSTER_REL_TOL):
    """Pair A-eigenspaces at lambda and 1 - lambda through multiplication by B.

    ``A`` and ``B`` are the real and imaginary parts of an idempotent matrix.
    For each eigenvalue cluster strictly inside (0, 1) the partner cluster at
    1 - lambda must have the same dimension and ``V_partner* B V`` must have
    smallest singular value above ``BIJECTION_MIN_SV``. A cluster at 1/2 is its
    own partner. Returns ``(spectrum, table)``; raises PairingViolation.
    """
    eig = hermitian_eigen(A, tol)
    values, vectors = eig.values, eig.vectors
    gap = cluster_rel_tol * max(1.0, max_abs(A))
    clusters = cluster_eigenvalues(values, gap)
    Bc = np.asarray(B, dtype=np.complex128)
    table = []
    for center, idx in clusters:
        if not (tol < center < 1.0 - tol):
            continue
        basis = vectors[:, idx]
        # a cluster straddling 1/2 is its own partner
        self_paired = abs(center - 0.5) <= tol or (
            _find_cluster([(center, idx)], values, 1.0 - center, gap) is not None
        )
        if self_paired:
            partner_center, partner_idx = center, idx
        else:
            hit = _find_cluster(clusters, values, 1.0 - center, gap)
            if hit is None:
                raise PairingViolation(f"eigenvalue {center:.12g} has no partner near {1 - center:.12g}")
            partner_center, partner_idx = hit
        partner = vectors[:, partner_idx]
        sv = _min_sv(partner.conj().T @ Bc @ basis)
        entry = PairingEntry(center, len(idx), partner_center, len(partner_idx), sv, bool(self_paired))
        if entry.dim != entry.dim_partner:
            raise PairingViolation(
                f"dim ker(A - {center:.6g} I) = {entry.dim} but its partner has dim {entry.dim_partner}"
            )
        if sv <= BIJECTION_MIN_SV:
            raise PairingViolation(f"B is singular on ker(A - {center:.6g} I) (sigma_min = {sv:.3e})")
        table.append(entry)
    return tuple(float(x) for x in values), tuple(table)


def _orthonormal_rows_removed(basis, direction):
    """Orthonormal basis of the projection of span(basis) onto direction-perp."""
    u = direction / np.linalg.norm(direction)
    w = basis - np.outer(u, u.conj() @ basis)
    if w.shape[1] == 0:
        return w
    left, s, _ = np.linalg.svd(w, full_matrices=False)
    return left[:, s > 0.5]


def subspace_angle(Q1, Q2):
    """Sine of the largest principal angle; ``inf`` if the dimensions differ."""
    if Q1.shape[1] != Q2.shape[1]:
        return float("inf")
    if Q1.shape[1] == 0:
        return 0.0
    resid = Q1 - Q2 @ (Q2.conj().T @ Q1)
    return float(np.linalg.norm(resid, 2))


def subspace_overlap(Q1, Q2):
    """Cosine of the smallest principal angle (0 means orthogonal)."""
    if Q1.shape[1] == 0 or Q2.shape[1] == 0:
        return 0.0
    return float(np.linalg.norm(Q1.conj().T @ Q2, 2))


def eigen_pairing_report(g, params, tol=DEFAULT_TOL, rel_tol=DEFAULT_REL_TOL):
    spectrum, table = pair_projection_eigenspaces(g.A, g.B, tol)

    m = g.size
    ones = np.ones(m, dtype=np.complex128)
    eig_r = hermitian_eigen(g.R, tol)
    gap = CLUSTER_REL_TOL * max(1.0, max_abs(g.R))
    gamma = params.gamma
    Kc = g.K.astype(np.complex128)
    pairs = []
    relation = 0.0
    simultaneity = 0.0
    for rho, idx in cluster_eigenvalues(eig_r.values, gap):
        w = _orthonormal_rows_removed(eig_r.vectors[:, idx], ones)
        if w.shape[1] == 0:
            continue
        kw = Kc @ w
        kappa = float(np.real(np.trace(w.conj().T @ kw))) / w.shape[1]
        simultaneity = max(simultaneity, max_abs(kw - kappa * w))
        relation = max(relation, abs(kappa + 2.0 * gamma * rho - (gamma + 1.0)))
        pairs.append(EigenPair(kappa, rho, w.shape[1]))

    ker_k = orthonormal_kernel_basis(g.K, rel_tol)
    ker_r_mu = orthonormal_kernel_basis(g.R - params.mu * np.eye(m), rel_tol)
    partner_shift = (params.n - 1) / (params.d - 1) - params.mu
    ker_partner = orthonormal_kernel_basis(g.R - partner_shift * np.eye(m), rel_tol)
    return EigenPairingResult(
        a_spectrum=spectrum,
        pairing_table=table,
        eigen_pairs=tuple(pairs),
        relation_residual=float(relation),
        simultaneity_residual=float(simultaneity),
        kernel_K_dim=ker_k.shape[1],
        kernel_R_mu_dim=ker_r_mu.shape[1],
        kernel_angle=subspace_angle(ker_k, ker_r_mu),
        partner_dim=ker_partner.shape[1],
        partner_orthogonality=subspace_overlap(ker_k, ker_partner),
    )


def kernel_pairing_applicable(params):
    lam = params.lambda_q
    return 0 < lam < 1 and lam != Fraction(1, 2)


# -- step 7 ------------------------------------------------------------------

def rank_chain(g, params, rel_tol=DEFAULT_REL_TOL):
    d, n = params.d, params.n
    rank_k = numerical_rank(g.K, rel_tol)
    rank_r = numerical_rank(g.R, rel_tol)
    nullity_k = (n - 1) - rank_k
    bound = params.bound
    if rank_k > (d - 1) ** 2:
        raise RankChainViolation(f"rank K = {rank_k} exceeds (d-1)^2 = {(d - 1) ** 2}")
    if rank_r > 2 * (d - 1):
        raise RankChainViolation(f"rank R = {rank_r} exceeds 2(d-1) = {2 * (d - 1)}")
    if params.in_window:
        if rank_r < 2 * nullity_k:
            raise RankChainViolation(f"rank R = {rank_r} < 2 nullity K = {2 * nullity_k}")
        if n > bound:
            raise RankChainViolation(f"chain holds but n = {n} exceeds d^2 - d + 1 = {bound}")
    return RankChain(rank_k, nullity_k, rank_r, bound)


# -- orchestration -----------------------------------------------------------

def matrix_sha256(matrix):
    m = np.ascontiguousarray(np.asarray(matrix, dtype="<c16"))
    h = hashlib.sha256()
    h.update(f"{m.shape[0]}x{m.shape[1]}:".encode())
    h.update(m.tobytes())
    return h.hexdigest()


@dataclass
class GapCertificateReport:
    d: int
    n: int
    tol: float
    rel_tol: float
    input_sha256: str
    params: object = None
    verification: object = None
    steps: dict = field(default_factory=lambda: {name: SKIPPED for name in STEP_NAMES})
    failed_step: str = None
    error: str = None
    residuals: dict = field(default_factory=dict)
    a_spectrum: tuple = ()
    eigen_pairs: tuple = ()
    pairing_table: tuple = ()
    kernels: dict = field(default_factory=dict)
    rank_K: int = None
    nullity_K: int = None
    rank_R: int = None
    bound_concluded: int = None
    bound_applicable: bool = False

    @property
    def passed(self):
        return self.failed_step is None and all(
            s in (PASS, NOT_APPLICABLE) for s in self.steps.values()
        )

    @property
    def lambda_in_window(self):
        return bool(self.params is not None and self.params.in_window)

    @property
    def rank_R_minus_twice_nullity(self):
        """Slack of rank R >= 2 nullity K; 0 means the chain is tight."""
        if self.rank_R is None:
            return None
        return self.rank_R - 2 * self.nullity_K

    def fail(self, step, message):
        self.steps[step] = FAIL
        if self.failed_step is None:
            self.failed_step = step
            self.error = message

    def to_dict(self):
        return {
            "tool": {"name": "etfgap", "version": __version__},
            "input": {"d": self.d, "n": self.n, "sha256": self.input_sha256},
            "tolerances": {
                "tol": self.tol,
                "rel_tol": self.rel_tol,
                "cluster_rel_tol": CLUSTER_REL_TOL,
                "bijection_min_singular_value": BIJECTION_MIN_SV,
            },
            "params": self.params.to_dict() if self.params is not None else None,
            "verification": self.verification.to_dict() if self.verification is not None else None,
            "steps": dict(self.steps),
            "failed_step": self.failed_step,
            "error": self.error,
            "residuals": dict(self.residuals),
            "a_spectrum": list(self.a_spectrum),
            "eigen_pairs": [p.to_dict() for p in self.eigen_pairs],
            "pairing_table": [e.to_dict() for e in self.pairing_table],
            "kernels": dict(self.kernels),
            "ranks": {"rank_K": self.rank_K, "nullity_K": self.nullity_K, "rank_R": self.rank_R},
            "bound": {
                "value": self.bound_concluded,
                "applicable": self.bound_applicable,
                "attained": self.bound_applicable and self.bound_concluded == self.n,
                "chain_slack": self.rank_R_minus_twice_nullity,
            },
            "regime": {
                "lambda_in_window": self.lambda_in_window,
                "kernel_pairing_applicable": bool(
                    self.params is not None and kernel_pairing_applicable(self.params)
                ),
            },
            "passed": self.passed,
        }


def certify(f, tol=DEFAULT_TOL, rel_tol=DEFAULT_REL_TOL):
    """Run every step, stopping at the first hard failure."""
    if not isinstance(f, Frame):
        f = Frame(f)
    rep = GapCertificateReport(d=f.d, n=f.n, tol=tol, rel_tol=rel_tol, input_sha256=matrix_sha256(f.matrix))

    rep.verification = verify_frame(f, tol)
    if not rep.verification.passed:
        rep.fail("verification", "not an ETF: " + ", ".join(rep.verification.failed_checks()))
        return rep
    rep.steps["verification"] = PASS

    try:
        params = etf_params(f.d, f.n)
    except EtfError as exc:
        rep.fail("parameters", str(exc))
        return rep
    rep.params = params
    rep.steps["parameters"] = PASS

    try:
        y, block_res = reduce_to_block_form(f, tol)
    except EtfError as exc:
        rep.residuals["block_form"] = getattr(exc, "residual", None)
        rep.fail("block_form", str(exc))
        return rep
    rep.residuals["block_form"] = block_res
    rep.steps["block_form"] = PASS

    g = GramObjects.from_hermitian(y.conj().T @ y, params.d, params.n)
    gram_res = gram_invariant_residuals(g)
    rep.residuals["gram_objects"] = gram_res
    if max(gram_res.values()) > tol:
        rep.fail("gram_objects", f"Gram invariants fail (worst {max(gram_res.values()):.3e})")
        return rep
    rep.steps["gram_objects"] = PASS

    flat = check_flatness_identity(g, params, tol)
    rep.residuals["flatness"] = flat._asdict()
    if flat.worst > tol:
        rep.fail("flatness", f"flatness identity residual {flat.worst:.3e}")
        return rep
    rep.steps["flatness"] = PASS

    res_a, res_b = check_projection_split(g, tol)
    rep.residuals["projection_split"] = {"A": res_a, "B": res_b}
    if max(res_a, res_b) > tol:
        rep.fail("projection_split", f"projection split residuals {res_a:.3e}, {res_b:.3e}")
        return rep
    rep.steps["projection_split"] = PASS

    try:
        pr = eigen_pairing_report(g, params, tol, rel_tol)
    except EtfError as exc:
        rep.fail("eigen_pairing", str(exc))
        return rep
    rep.a_spectrum = pr.a_spectrum
    rep.pairing_table = pr.pairing_table
    rep.eigen_pairs = pr.eigen_pairs
    rep.residuals["eigen_relation"] = pr.relation_residual
    rep.residuals["simultaneity"] = pr.simultaneity_residual
    rep.residuals["kernel_angle"] = pr.kernel_angle
    rep.kernels = {
        "dim_ker_K": pr.kernel_K_dim,
        "dim_ker_R_minus_mu": pr.kernel_R_mu_dim,
        "dim_ker_R_minus_partner": pr.partner_dim,
        "partner_overlap": pr.partner_orthogonality,
    }
    eigen_worst = max(pr.relation_residual, pr.simultaneity_residual, pr.kernel_angle)
    if eigen_worst > tol:
        rep.fail("eigen_pairing", f"eigen relation / kernel residual {eigen_worst:.3e}")
        return rep
    rep.steps["eigen_pairing"] = PASS

    if kernel_pairing_applicable(params):
        entry = _entry_near(pr.pairing_table, params.lam)
        dim_lam = entry.dim if entry is not None else 0
        dim_partner = entry.dim_partner if entry is not None else 0
        rep.kernels["dim_ker_A_minus_lambda"] = dim_lam
        rep.kernels["dim_ker_A_minus_one_minus_lambda"] = dim_partner
        ok = (
            pr.kernel_K_dim == dim_lam == dim_partner == pr.partner_dim
            and pr.partner_orthogonality <= tol
        )
        if not ok:
            rep.fail(
                "kernel_pairing",
                f"ker K (dim {pr.kernel_K_dim}) vs A-eigenspaces at lambda (dim {dim_lam}) "
                f"and 1 - lambda (dim {dim_partner}); overlap {pr.partner_orthogonality:.3e}",
            )
            return rep
        rep.steps["kernel_pairing"] = PASS
    else:
        rep.steps["kernel_pairing"] = NOT_APPLICABLE

    try:
        chain = rank_chain(g, params, rel_tol)
    except RankChainViolation as exc:
        rep.fail("rank_chain", str(exc))
        return rep
    rep.rank_K, rep.nullity_K, rep.rank_R = chain.rank_K, chain.nullity_K, chain.rank_R
    rep.steps["rank_chain"] = PASS
    rep.bound_concluded = chain.bound
    rep.bound_applicable = params.in_window
    rep.steps["bound"] = PASS if params.in_window else NOT_APPLICABLE
    return rep


def _entry_near(table, lam):
    for entry in table:
        if abs(entry.eigenvalue - lam) <= CLUSTER_REL_TOL:
            return entry
    return None
