"""Dense complex linear algebra kernels.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128`` (real
inputs are promoted). The three delicate kernels are

* :func:`hermitian_eigen` -- cyclic complex Jacobi, deterministic;
* :func:`numerical_rank` / :func:`orthonormal_kernel_basis` -- SVD with a
  relative singular value threshold;
* :func:`unitary_mapping_to_e1` -- a phased Householder reflector.
"""

from typing import NamedTuple

import numpy as np

from .errors import NoConvergence, NotHermitian, ZeroVector

DEFAULT_TOL = 1e-10
DEFAULT_REL_TOL = 1e-9

JACOBI_OFF_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


class EigenDecomposition(NamedTuple):
    values: np.ndarray  # ascending, real
    vectors: np.ndarray  # columns are eigenvectors


def as_complex_matrix(a):
    """Coerce ``a`` to a finite 2-D complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def max_abs(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def normalize_phases(vectors, eps=1e-12):
    """Rotate each column so its first non-negligible entry is real positive."""
    out = np.array(vectors, dtype=np.complex128, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        scale = np.max(np.abs(col)) if col.size else 0.0
        if scale == 0.0:
            continue
        idx = int(np.argmax(np.abs(col) > eps * scale))
        z = col[idx]
        out[:, j] = col * (np.conj(z) / abs(z))
    return out


def _off_frobenius(m):
    off = m - np.diag(np.diag(m))
    return float(np.linalg.norm(off))


def hermitian_eigen(M, tol=DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps run over the strict upper triangle in row order. Each rotation
    first phases the pivot to be real and then applies the classical real
    symmetric rotation, so the whole step is one 2x2 unitary. Iteration stops
    when the off-diagonal Frobenius mass drops to ``1e-14 * ||M||_F``, or when
    a full sweep finds nothing left to rotate.

    Eigenvalues come back ascending; each eigenvector is phase-normalized so
    its first non-negligible component is real positive.
    """
    m = as_complex_matrix(M)
    n, c = m.shape
    if n != c:
        raise NotHermitian(f"matrix is {n}x{c}, not square")
    scale = max_abs(m)
    asym = max_abs(m - m.conj().T)
    if asym > tol * max(scale, np.finfo(float).tiny):
        raise NotHermitian(f"||M - M*||_max = {asym:.3e} exceeds {tol:.1e}*||M||_max")

    a = 0.5 * (m + m.conj().T)
    v = np.eye(n, dtype=np.complex128)
    fro = float(np.linalg.norm(a))
    target = JACOBI_OFF_TOL * fro
    tiny = np.finfo(float).eps * 1e-3 * fro

    converged = n == 1 or fro == 0.0
    sweep = 0
    while not converged and sweep < JACOBI_MAX_SWEEPS:
        sweep += 1
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= tiny:
                    a[p, q] = a[q, p] = 0.0
                    continue
                rotated = True
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                cs = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * cs
                g = np.array(
                    [[cs, sn], [-sn * np.conj(phase), cs * np.conj(phase)]],
                    dtype=np.complex128,
                )
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ g
                a[p, q] = a[q, p] = 0.0
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
        if _off_frobenius(a) <= target or not rotated:
            converged = True
    if not converged:
        raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")

    values = np.real(np.diag(a)).copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = normalize_phases(v[:, order])
    return EigenDecomposition(values, vectors)


def singular_values(M):
    return np.linalg.svd(as_complex_matrix(M), compute_uv=False)


def numerical_rank(M, rel_tol=DEFAULT_REL_TOL):
    """Number of singular values strictly above ``rel_tol * sigma_max``."""
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must lie in (0, 1)")
    s = singular_values(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def orthonormal_kernel_basis(M, rel_tol=DEFAULT_REL_TOL):
    """Orthonormal basis (as columns) of the numerical kernel of ``M``."""
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must lie in (0, 1)")
    m = as_complex_matrix(M)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    rank = 0 if s[0] == 0.0 else int(np.count_nonzero(s > rel_tol * s[0]))
    return normalize_phases(vh[rank:].conj().T)


def unitary_mapping_to_e1(v):
    """Unitary ``U`` with ``U @ v == ||v|| e1``.

    A vector that is already a multiple of ``e1`` gets a diagonal phase fix
    (so ``e1`` maps to the identity); anything else gets a Householder
    reflector multiplied by a scalar phase.
    """
    x = np.asarray(v, dtype=np.complex128).ravel()
    norm = float(np.linalg.norm(x))
    if x.size == 0 or norm == 0.0 or not np.isfinite(norm):
        raise ZeroVector("cannot map a zero vector to e1")
    x = x / norm
    n = x.size
    head = x[0]
    phase = head / abs(head) if abs(head) > 0.0 else 1.0 + 0.0j
    if n == 1 or np.linalg.norm(x[1:]) == 0.0:
        u = np.eye(n, dtype=np.complex128)
        u[0, 0] = np.conj(phase)
        return u
    w = x.copy()
    w[0] += phase
    w /= np.linalg.norm(w)
    householder = np.eye(n, dtype=np.complex128) - 2.0 * np.outer(w, w.conj())
    return -np.conj(phase) * householder
