"""SVD-derived norms, subgradients, polar factors, and structural decompositions.

All matrices are plain 2-D float64 numpy arrays. Every function validates
finiteness on entry and is pure: nothing here mutates its arguments.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, NonConvergenceError, SingularSystemError

DEFAULT_RANK_TOL = 1e-9


def as_matrix(x):
    """Coerce to a finite 2-D float array, raising ValueError otherwise."""
    a = np.asarray(x, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if a.size == 0:
        raise ValueError("empty matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD truncated at the numeric rank.

    ``u`` is m-by-k with orthonormal columns, ``sigma`` nonincreasing and
    positive, ``v`` n-by-k with orthonormal columns. ``k`` is the numeric
    rank: the number of singular values above ``rank_tol`` times the largest.
    For the zero matrix all three parts are empty (k = 0).
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    rank_tol: float

    @property
    def rank(self):
        return len(self.sigma)

    def reconstruct(self):
        return (self.u * self.sigma) @ self.v.T


def svd(x, rank_tol=DEFAULT_RANK_TOL):
    """Thin SVD of ``x`` keeping singular values above ``rank_tol * sigma_1``."""
    a = as_matrix(x)
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD failed to converge: {exc}") from exc
    if s.size == 0 or s[0] <= 0.0:
        k = 0
    else:
        k = int(np.count_nonzero(s > rank_tol * s[0]))
    return SvdFactors(u=u[:, :k].copy(), sigma=s[:k].copy(), v=vt[:k].T.copy(),
                      rank_tol=rank_tol)


def frobenius_norm(x):
    """Entrywise 2-norm, computed without any factorization."""
    return float(np.linalg.norm(as_matrix(x), "fro"))


def singular_values(x):
    a = as_matrix(x)
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD failed to converge: {exc}") from exc


def nuclear_norm(x):
    """Sum of singular values."""
    return float(np.sum(singular_values(x)))


def operator_norm(x):
    """Largest singular value (0 for the zero matrix)."""
    s = singular_values(x)
    return float(s[0]) if s.size else 0.0


def numeric_rank(x, rank_tol=DEFAULT_RANK_TOL):
    return svd(x, rank_tol).rank


def truncated_approx(x, k):
    """Best rank-``k`` approximation (largest-``k`` singular triplets kept)."""
    a = as_matrix(x)
    if not 0 <= k <= min(a.shape):
        raise ValueError(f"k={k} out of range [0, {min(a.shape)}]")
    if k == 0:
        return np.zeros_like(a)
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD failed to converge: {exc}") from exc
    return (u[:, :k] * s[:k]) @ vt[:k]


def nuclear_subgradient(x, rank_tol=DEFAULT_RANK_TOL):
    """Minimum-Frobenius-norm subgradient of the nuclear norm at ``x``.

    Returns U V' from the thin SVD restricted to singular values above
    tolerance. At full-rank points this is the gradient; at rank-deficient
    points it is the element of the subdifferential with zero orthogonal part.
    """
    f = svd(x, rank_tol)
    if f.rank == 0:
        return np.zeros_like(as_matrix(x))
    return f.u @ f.v.T


def polar_factor_halley(x, max_iter=50, tol=1e-10, rank_tol=DEFAULT_RANK_TOL):
    """Orthonormal polar factor via the cubically convergent rational iteration.

    The input is pre-scaled by its operator norm so the singular values start
    in (0, 1]. Requires full column rank; accepts rectangular m >= n input.
    """
    a = as_matrix(x)
    m, n = a.shape
    if m < n:
        raise ValueError("polar factor requires m >= n (tall or square input)")
    s = singular_values(a)
    if s[0] <= 0.0 or s[-1] <= rank_tol * s[0]:
        raise SingularSystemError(
            "input is rank deficient; polar factor is not unique")
    z = a / s[0]
    eye = np.eye(n)
    for _ in range(max_iter):
        g = z.T @ z
        resid = float(np.linalg.norm(g - eye, "fro"))
        if resid <= tol:
            return z
        z = z @ np.linalg.solve((3.0 * g + eye).T, (g + 3.0 * eye).T).T
    resid = float(np.linalg.norm(z.T @ z - eye, "fro"))
    if resid <= tol:
        return z
    raise NonConvergenceError(
        f"polar iteration did not reach tol={tol} in {max_iter} iterations "
        f"(last residual {resid:.3e})", residual=resid)


@dataclass(frozen=True)
class RankPartition:
    """Split B = B1 + B2 with rank(B1) <= 2 rank(A) and B2 orthogonal to A.

    Orthogonality means A B2' = 0, A' B2 = 0, and <B1, B2> = 0.
    """

    b1: np.ndarray
    b2: np.ndarray


def rank_partition(a, b, rank_tol=DEFAULT_RANK_TOL):
    """Decompose ``b`` against ``a`` via the 2x2 block split in a's full SVD basis."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD failed to converge: {exc}") from exc
    if s.size == 0 or s[0] <= 0.0:
        r = 0
    else:
        r = int(np.count_nonzero(s > rank_tol * s[0]))
    bhat = u.T @ b @ vt.T
    top = bhat.copy()
    top[r:, r:] = 0.0
    bottom = np.zeros_like(bhat)
    bottom[r:, r:] = bhat[r:, r:]
    return RankPartition(b1=u @ top @ vt, b2=u @ bottom @ vt)


def additive_nuclear_check(a, b, tol=1e-9):
    """Whether ``a`` and ``b`` have orthogonal row and column spaces.

    When true, the nuclear norm is additive: ||a + b||_* = ||a||_* + ||b||_*.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    scale = max(1.0, frobenius_norm(a) * frobenius_norm(b))
    return (np.linalg.norm(a @ b.T, "fro") <= tol * scale
            and np.linalg.norm(a.T @ b, "fro") <= tol * scale)
