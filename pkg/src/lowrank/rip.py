"""Empirical restricted-isometry diagnostics.

Exact restricted-isometry constants require maximizing over all rank-r
matrices, which is intractable; everything here produces certified *lower*
bounds on delta_r by sampling (and optionally locally refining) rank-r
candidates X = G H'.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .measurement import operator_norm_estimate


@dataclass
class RipEstimate:
    r: int
    delta_lower: float
    trials: int
    worst_case: np.ndarray  # unit Frobenius norm, rank <= r
    refined: bool


def _distortion(op, x):
    """|| A(X) || / ||X||_F - 1 in absolute value, for nonzero X."""
    return abs(float(np.linalg.norm(op.apply(x)))
               / float(np.linalg.norm(x, "fro")) - 1.0)


def _refine(op, g, h, steps=200):
    """Alternating gradient ascent on (||A(GH')|| / ||GH'||_F - 1)^2."""
    def score(g, h):
        x = g @ h.T
        fr = float(np.linalg.norm(x, "fro"))
        t = float(np.linalg.norm(op.apply(x)))
        return (t / fr - 1.0) ** 2

    f = score(g, h)
    step = 1.0
    for _ in range(steps):
        x = g @ h.T
        fr = float(np.linalg.norm(x, "fro"))
        ax = op.apply(x)
        t = float(np.linalg.norm(ax))
        ratio = t / fr
        if t == 0.0:
            break
        # d/dX of (t/fr - 1)^2
        gx = 2.0 * (ratio - 1.0) * (op.adjoint(ax) / (t * fr)
                                    - ratio * x / (fr * fr))
        gg = gx @ h
        gh = gx.T @ g
        # backtracking ascent step
        improved = False
        for _ in range(30):
            gn = g + step * gg
            hn = h + step * gh
            fn = score(gn, hn)
            if fn > f:
                g, h, f = gn, hn, fn
                step *= 2.0
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return g, h


def estimate_delta_lower(op, r, trials=500, seed=0, refine=False):
    """Monte-Carlo lower bound on the rank-r restricted isometry constant.

    Samples rank-r matrices as products of Gaussian factors, records the
    worst relative distortion of A, and optionally climbs locally from the
    worst sample. The result is always a lower bound on delta_r, never the
    constant itself.
    """
    if not 1 <= r <= min(op.m, op.n):
        raise ValueError(f"r={r} out of range [1, {min(op.m, op.n)}]")
    rng = np.random.default_rng(seed)
    best = -1.0
    best_gh = None
    for _ in range(trials):
        g = rng.normal(size=(op.m, r))
        h = rng.normal(size=(op.n, r))
        d = _distortion(op, g @ h.T)
        if d > best:
            best = d
            best_gh = (g, h)
    if refine and best_gh is not None:
        g, h = _refine(op, *best_gh)
        d = _distortion(op, g @ h.T)
        if d > best:
            best = d
            best_gh = (g, h)
    x = best_gh[0] @ best_gh[1].T
    x = x / float(np.linalg.norm(x, "fro"))
    return RipEstimate(r=r, delta_lower=best, trials=trials,
                       worst_case=x, refined=refine)


def monotonicity_check(op, r_max, trials=200, seed=0):
    """Lower bounds for r = 1..r_max, nondecreasing by nested construction.

    Rank-r samples remain valid rank-(r+1) candidates, so each estimate is
    the running maximum over all samples of rank up to r.
    """
    if not 1 <= r_max <= min(op.m, op.n):
        raise ValueError(f"r_max={r_max} out of range")
    rng = np.random.default_rng(seed)
    out = []
    running = -1.0
    for r in range(1, r_max + 1):
        for _ in range(trials):
            g = rng.normal(size=(op.m, r))
            h = rng.normal(size=(op.n, r))
            running = max(running, _distortion(op, g @ h.T))
        out.append(running)
    return np.array(out)


def subspace_distance(p1, p2, proj_tol=1e-8):
    """Operator norm of the difference of two orthogonal projections.

    Equals the sine of the largest principal angle between the subspaces;
    lies in [0, 1] for projections of equal rank.
    """
    p1 = linalg.as_matrix(p1)
    p2 = linalg.as_matrix(p2)
    for name, p in (("first", p1), ("second", p2)):
        if p.shape[0] != p.shape[1]:
            raise ValueError(f"{name} input is not square")
        if (np.linalg.norm(p - p.T, "fro") > proj_tol
                or np.linalg.norm(p @ p - p, "fro") > proj_tol):
            raise ValueError(f"{name} input is not an orthogonal projection")
    return linalg.operator_norm(p1 - p2)


def _basis_projection(basis):
    """Orthogonal projection (in vec space) onto span of the basis matrices."""
    mats = [linalg.as_matrix(b) for b in basis]
    shape = mats[0].shape
    if any(b.shape != shape for b in mats):
        raise ValueError("basis matrices must share one shape")
    stack = np.column_stack([b.reshape(-1, order="F") for b in mats])
    q, _ = np.linalg.qr(stack)
    return q @ q.T


def perturbation_bound_check(op, u1_basis, u2_basis, delta, samples=200, seed=0,
                             slack=1e-6):
    """Verify the perturbed-subspace distortion bound on sampled matrices.

    Given that every unit-Frobenius matrix in span(u1_basis) has distortion at
    most ``delta``, matrices in span(u2_basis) must have distortion at most
    delta + (1 + ||A||) * rho, where rho is the projection distance between
    the two subspaces. Returns (ok, worst_sample).
    """
    p1 = _basis_projection(u1_basis)
    p2 = _basis_projection(u2_basis)
    if p1.shape != p2.shape:
        raise ValueError("bases live in different matrix spaces")
    rho = subspace_distance(p1, p2)
    a_norm = operator_norm_estimate(op, iters=200, seed=seed)
    bound = delta + (1.0 + a_norm) * rho + slack
    rng = np.random.default_rng(seed)
    mats = [linalg.as_matrix(b) for b in u2_basis]
    worst = None
    worst_d = -1.0
    for _ in range(samples):
        coeffs = rng.normal(size=len(mats))
        x = sum(c * b for c, b in zip(coeffs, mats))
        fr = float(np.linalg.norm(x, "fro"))
        if fr == 0.0:
            continue
        x = x / fr
        d = _distortion(op, x)
        if d > worst_d:
            worst_d = d
            worst = x
        if d > bound:
            return False, x
    return True, worst
