"""Nuclear-norm minimizers and optimality certification.

Two routes to min ||X||_* s.t. A(X) = b: a projected subgradient method that
stays feasible at every iterate, and a low-rank method of multipliers working
on the factorization X = L R'. Both return a SolveResult; the multiplier
method additionally yields a dual vector usable as an optimality certificate.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from . import linalg
from .errors import InfeasibleError, SingularSystemError
from .measurement import MeasurementOp

_GRAM_DIRECT_LIMIT = 4000


@dataclass
class SubgradientConfig:
    max_iters: int = 5000
    step0: float = 1.0
    feas_tol: float = 1e-8
    obj_tol: float = 1e-8
    window: int = 50

    def step(self, k):
        # diminishing with infinite travel: s_k -> 0, sum s_k = inf
        return self.step0 / k


@dataclass
class AlmConfig:
    factor_rank: int = None  # default picked from the problem size
    sigma0: float = 1.0
    sigma_growth: float = 10.0
    max_outer: int = 40
    inner_grad_tol: float = 1e-7
    feas_tol: float = 1e-9
    inner_max_iters: int = 3000

    def __post_init__(self):
        if self.sigma_growth <= 1.0:
            raise ValueError("sigma_growth must exceed 1")


def default_factor_rank(m, n, p):
    """Smallest admissible factor rank ceil(p / (m + n)) plus slack, capped."""
    return min(min(m, n), math.ceil(p / (m + n)) + 2)


@dataclass
class Certificate:
    z: np.ndarray
    dual_opnorm: float


@dataclass
class SolveResult:
    x: np.ndarray
    objective: float
    feas_residual: float
    iterations: int
    status: str  # converged | max_iters | stalled
    certificate: Certificate = None
    factors: tuple = None


def _gram_solve(op, rhs):
    """Solve (A A*) w = rhs, caching the factorization on the operator."""
    if op.variant == "sampling":
        # distinct sample positions make A A* the identity
        return rhs.copy()
    cache = getattr(op, "_gram_cache", None)
    if cache is None:
        if op.variant == "dense":
            gram = op.matrix @ op.matrix.T
        else:
            gram = (op.us @ op.us.T) * (op.vs @ op.vs.T)
        if op.p <= _GRAM_DIRECT_LIMIT:
            try:
                cache = ("chol", scipy.linalg.cho_factor(gram))
            except scipy.linalg.LinAlgError:
                # dependent measurement rows: fall back to the pseudoinverse,
                # which still yields the correct projection for consistent b
                # (inconsistency is caught by the residual check downstream)
                cache = ("pinv", np.linalg.pinv(gram))
        else:
            cache = ("cg", scipy.sparse.linalg.aslinearoperator(gram))
        op._gram_cache = cache
    kind, payload = cache
    if kind == "chol":
        return scipy.linalg.cho_solve(payload, rhs)
    if kind == "pinv":
        return payload @ rhs
    w, info = scipy.sparse.linalg.cg(payload, rhs, rtol=1e-12, maxiter=10 * op.p)
    if info != 0:
        raise SingularSystemError(
            f"conjugate gradients on A A* did not converge (info={info})")
    return w


def _spans_matrix_space(op):
    """Whether range(A*) is all of R^{m x n}, i.e. A has rank m n."""
    mn = op.m * op.n
    if op.p < mn:
        return False
    if op.variant == "sampling":
        # sample positions are distinct, so p = m n means every entry is seen
        return op.p == mn
    if op.variant == "dense":
        return np.linalg.matrix_rank(op.matrix) == mn
    gram = (op.us @ op.us.T) * (op.vs @ op.vs.T)
    return np.linalg.matrix_rank(gram) == mn


def _solve_determined(op, b, feas_tol):
    """Direct solution when A(X) = b pins down X completely.

    With rank(A) = m n the feasible set is a single matrix, so the nuclear
    norm minimizer is the affine projection of any point. The dual vector z
    solving A*(z) = U V' is an exact optimality certificate because A* is
    onto. Returns None when b is inconsistent at the given tolerance.
    """
    try:
        x = project_affine(op, np.zeros((op.m, op.n)), b,
                           feas_tol=max(feas_tol, 1e-8))
    except InfeasibleError:
        return None
    g = linalg.nuclear_subgradient(x)
    z = _gram_solve(op, op.apply(g))
    dual_opnorm = linalg.operator_norm(op.adjoint(z))
    z = z / max(1.0, dual_opnorm)
    f = linalg.svd(x)
    root = np.sqrt(f.sigma)
    return SolveResult(
        x=x,
        objective=linalg.nuclear_norm(x),
        feas_residual=float(np.linalg.norm(op.apply(x) - b)),
        iterations=0,
        status="converged",
        certificate=Certificate(z=z, dual_opnorm=min(dual_opnorm, 1.0)
                                if dual_opnorm > 0 else 0.0),
        factors=(f.u * root, f.v * root),
    )


def project_affine(op, x, b, feas_tol=1e-8):
    """Frobenius-nearest matrix to ``x`` satisfying A(Z) = b."""
    x = linalg.as_matrix(x)
    b = np.asarray(b, dtype=float)
    r = op.apply(x) - b
    z = x - op.adjoint(_gram_solve(op, r))
    resid = float(np.linalg.norm(op.apply(z) - b))
    if resid > feas_tol * max(1.0, float(np.linalg.norm(b))):
        raise InfeasibleError(
            f"projection left residual {resid:.3e}; system A(X) = b appears "
            "inconsistent at this tolerance")
    return z


def solve_subgradient(op, b, cfg=None):
    """Projected subgradient descent on the nuclear norm over A(X) = b.

    Every iterate is feasible; the best-objective iterate seen is returned,
    since individual subgradient steps need not decrease the objective.
    Converged status means the best objective stopped improving by more than
    ``obj_tol`` over a trailing window of iterations.
    """
    cfg = cfg or SubgradientConfig()
    b = np.asarray(b, dtype=float)
    x = project_affine(op, np.zeros((op.m, op.n)), b, cfg.feas_tol)
    best_x = x
    best_obj = linalg.nuclear_norm(x)
    window_best = best_obj
    status = "max_iters"
    k = 0
    for k in range(1, cfg.max_iters + 1):
        g = linalg.nuclear_subgradient(x)
        x = project_affine(op, x - cfg.step(k) * g, b, cfg.feas_tol)
        obj = linalg.nuclear_norm(x)
        if obj < best_obj:
            best_obj = obj
            best_x = x
        if k % cfg.window == 0:
            if window_best - best_obj < cfg.obj_tol:
                status = "converged"
                break
            window_best = best_obj
    feas = float(np.linalg.norm(op.apply(best_x) - b))
    return SolveResult(x=best_x, objective=best_obj, feas_residual=feas,
                       iterations=k, status=status)


def _alm_value(op, b, l, r, y, sigma):
    c = op.apply(l @ r.T) - b
    return (0.5 * (np.sum(l * l) + np.sum(r * r)) - y @ c
            + 0.5 * sigma * (c @ c))


def alm_gradients(op, b, l, r, y, sigma):
    """Partial gradients of the augmented Lagrangian in the factors.

    With yhat = y - sigma * (A(LR') - b):  grad_L = L - A*(yhat) R and
    grad_R = R - A*(yhat)' L.
    """
    c = op.apply(l @ r.T) - b
    g = op.adjoint(y - sigma * c)
    return l - g @ r, r - g.T @ l


def _minimize_inner(op, b, l, r, y, sigma, cfg, grad_tol=None):
    """Gradient descent with Armijo backtracking on the augmented Lagrangian.

    The trial step is the spectral (Barzilai-Borwein) quotient from the last
    accepted step, halved under a nonmonotone Armijo test; this keeps plain
    gradient steps usable even when the penalty makes the problem stiff.
    Returns (L, R, status) where status is "ok", "tol" (gradient tolerance
    met), or "stalled" (NaN encountered).
    """
    if grad_tol is None:
        grad_tol = cfg.inner_grad_tol
    t = 1.0 / (1.0 + sigma)
    f = _alm_value(op, b, l, r, y, sigma)
    recent = [f]
    gl, gr = alm_gradients(op, b, l, r, y, sigma)
    status = "ok"
    for _ in range(cfg.inner_max_iters):
        gnorm2 = float(np.sum(gl * gl) + np.sum(gr * gr))
        if math.sqrt(gnorm2) <= grad_tol * max(
                1.0, math.sqrt(float(np.sum(l * l) + np.sum(r * r)))):
            status = "tol"
            break
        fref = max(recent)
        accepted = False
        while t >= 1e-18:
            ln = l - t * gl
            rn = r - t * gr
            fn = _alm_value(op, b, ln, rn, y, sigma)
            if not np.isfinite(fn):
                return l, r, "stalled"
            if fn <= fref - 1e-4 * t * gnorm2:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            # no representable decrease left: converged to precision
            break
        gln, grn = alm_gradients(op, b, ln, rn, y, sigma)
        # spectral step: <s, s> / <s, dg> with s = -t * g, dg = g_new - g
        sdg = float(np.sum((gln - gl) * gl) + np.sum((grn - gr) * gr))
        if sdg < 0.0:  # positive curvature along the step
            t = max(min(t * gnorm2 / (-sdg), 1e6), 1e-18)
        else:
            t *= 2.0
        l, r, f = ln, rn, fn
        gl, gr = gln, grn
        recent.append(f)
        if len(recent) > 10:
            recent.pop(0)
    return l, r, status


def solve_alm(op, b, cfg=None, seed=0):
    """Low-rank method of multipliers for nuclear-norm minimization.

    Minimizes (||L||_F^2 + ||R||_F^2) / 2 subject to A(L R') = b via an
    augmented Lagrangian: the inner problem is solved in the factors, then the
    multipliers are updated with y <- y - sigma (A(LR') - b) and the penalty
    grows whenever feasibility fails to shrink by a factor of 4.
    """
    cfg = cfg or AlmConfig()
    b = np.asarray(b, dtype=float)
    if op.p >= op.m * op.n and op.p <= _GRAM_DIRECT_LIMIT \
            and _spans_matrix_space(op):
        direct = _solve_determined(op, b, cfg.feas_tol)
        if direct is not None:
            return direct
    rd = cfg.factor_rank or default_factor_rank(op.m, op.n, op.p)
    if rd < 1 or rd > min(op.m, op.n):
        raise ValueError(f"factor_rank {rd} out of range [1, {min(op.m, op.n)}]")
    rng = np.random.default_rng(seed)
    l = rng.normal(size=(op.m, rd)) / np.sqrt(rd)
    r = rng.normal(size=(op.n, rd)) / np.sqrt(rd)
    y = np.zeros(op.p)
    sigma = cfg.sigma0
    bscale = max(1.0, float(np.linalg.norm(b)))
    prev_res = math.inf
    status = "max_iters"
    outer = 0
    stagnant = 0
    for outer in range(1, cfg.max_outer + 1):
        # inexact inner solves: the subproblem only needs accuracy
        # commensurate with the current constraint violation, tightening as
        # the multipliers converge
        gtol = max(cfg.inner_grad_tol,
                   min(1e-2, 0.1 * prev_res / bscale))
        l, r, inner_status = _minimize_inner(op, b, l, r, y, sigma, cfg,
                                             grad_tol=gtol)
        c = op.apply(l @ r.T) - b
        res = float(np.linalg.norm(c))
        y = y - sigma * c
        if inner_status == "stalled":
            status = "stalled"
            break
        if res <= cfg.feas_tol * bscale:
            status = "converged"
            break
        # feasibility no longer improving: at the numerical floor, stop early
        stagnant = stagnant + 1 if res > 0.9 * prev_res else 0
        if stagnant >= 4:
            break
        # grow the penalty only on insufficient feasibility progress, and only
        # when the inner problem was solved to tolerance at the current sigma
        if res > 0.25 * prev_res and inner_status == "tol":
            sigma *= cfg.sigma_growth
        prev_res = res
    x = l @ r.T
    dual_opnorm = linalg.operator_norm(op.adjoint(y))
    z = y / max(1.0, dual_opnorm)
    return SolveResult(
        x=x,
        objective=linalg.nuclear_norm(x),
        feas_residual=float(np.linalg.norm(op.apply(x) - b)),
        iterations=outer,
        status=status,
        certificate=Certificate(z=z, dual_opnorm=min(dual_opnorm, 1.0)
                                if dual_opnorm > 0 else 0.0),
        factors=(l, r),
    )


def optimality_violations(op, x, b, z, tol=1e-6, rank_tol=linalg.DEFAULT_RANK_TOL):
    """Reasons why (x, z) fails the subdifferential optimality conditions.

    Checks feasibility of x and that G = A*(z) lies in the subdifferential of
    the nuclear norm at x: G must act as the identity between the singular
    subspaces of x, vanish on the cross terms, and be a contraction on the
    orthogonal complement. Empty list means certified optimal.
    """
    x = linalg.as_matrix(x)
    b = np.asarray(b, dtype=float)
    z = np.asarray(z, dtype=float)
    reasons = []
    feas = float(np.linalg.norm(op.apply(x) - b))
    if feas > tol * max(1.0, float(np.linalg.norm(b))):
        reasons.append(f"infeasible: ||A(x) - b|| = {feas:.3e}")
    f = linalg.svd(x, rank_tol)
    g = op.adjoint(z)
    u, v = f.u, f.v
    core = u.T @ g @ v - np.eye(f.rank)
    if np.linalg.norm(core, "fro") > tol:
        reasons.append("G does not act as identity on the singular subspaces")
    gv = g @ v - u @ (u.T @ g @ v)
    ug = u.T @ g - (u.T @ g @ v) @ v.T
    if np.linalg.norm(gv, "fro") > tol or np.linalg.norm(ug, "fro") > tol:
        reasons.append("G has nonzero cross terms against the singular subspaces")
    comp = g - u @ (u.T @ g) - (g @ v) @ v.T + u @ (u.T @ g @ v) @ v.T
    if linalg.operator_norm(comp) > 1.0 + tol:
        reasons.append("orthogonal part of G is not a contraction")
    return reasons


def check_optimality(op, x, b, z, tol=1e-6):
    """True when z certifies x as a minimum-nuclear-norm solution of A(X) = b."""
    return not optimality_violations(op, x, b, z, tol)


def dual_value(b, z):
    """b' z: a lower bound on every feasible ||X||_* when ||A*(z)|| <= 1."""
    b = np.asarray(b, dtype=float)
    z = np.asarray(z, dtype=float)
    if b.shape != z.shape:
        raise ValueError(f"length mismatch: {b.shape} vs {z.shape}")
    return float(b @ z)
