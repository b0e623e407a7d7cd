"""Linear measurement maps A: R^{m x n} -> R^p and their random ensembles.

vec() is column-stacking: entry (i, j) of X sits at vec index j*m + i. The
adjoint of every variant is exact with respect to this convention.

All randomness flows through numpy's PCG64 generator seeded explicitly, so
equal specs produce bit-identical operators on every platform.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix

ENSEMBLE_KINDS = ("gaussian", "bernoulli", "sparse_ternary", "projection",
                  "factored_gaussian", "completion")


def vec(x):
    """Column-stacked vector of a matrix."""
    return np.asarray(x, dtype=float).reshape(-1, order="F")


def unvec(y, m, n):
    return np.asarray(y, dtype=float).reshape((m, n), order="F")


@dataclass
class MeasurementOp:
    """A linear map from m-by-n matrices to R^p.

    Exactly one payload is set, selecting the variant:
      dense    -- ``matrix`` is p x (m*n), applied to vec(X)
      factored -- ``us`` (p x m) and ``vs`` (p x n); component i is u_i' X v_i
      sampling -- ``indices`` is p x 2 distinct (row, col) pairs; component i
                  extracts X[row_i, col_i]
    """

    m: int
    n: int
    p: int
    matrix: np.ndarray = None
    us: np.ndarray = None
    vs: np.ndarray = None
    indices: np.ndarray = None

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.p < 1:
            raise ValueError("m, n, p must be positive")
        kinds = [self.matrix is not None,
                 self.us is not None and self.vs is not None,
                 self.indices is not None]
        if sum(kinds) != 1:
            raise ValueError("exactly one of matrix / (us, vs) / indices "
                             "must be provided")
        if self.matrix is not None:
            self.matrix = as_matrix(self.matrix)
            if self.matrix.shape != (self.p, self.m * self.n):
                raise ValueError(
                    f"dense payload must be {self.p} x {self.m * self.n}, "
                    f"got {self.matrix.shape}")
        elif self.indices is not None:
            idx = np.asarray(self.indices, dtype=np.intp)
            if idx.shape != (self.p, 2):
                raise ValueError(f"indices must be {self.p} x 2")
            if (idx[:, 0].min() < 0 or idx[:, 0].max() >= self.m
                    or idx[:, 1].min() < 0 or idx[:, 1].max() >= self.n):
                raise ValueError("sampling indices out of bounds")
            if len({(int(i), int(j)) for i, j in idx}) != self.p:
                raise ValueError("sampling indices must be distinct")
            self.indices = idx
        else:
            self.us = as_matrix(self.us)
            self.vs = as_matrix(self.vs)
            if self.us.shape != (self.p, self.m) or self.vs.shape != (self.p, self.n):
                raise ValueError("factored payload shapes must be "
                                 f"({self.p},{self.m}) and ({self.p},{self.n})")

    @property
    def variant(self):
        if self.matrix is not None:
            return "dense"
        if self.indices is not None:
            return "sampling"
        return "factored"

    def apply(self, x):
        """A(X) as a length-p vector."""
        x = as_matrix(x)
        if x.shape != (self.m, self.n):
            raise ValueError(f"expected {self.m} x {self.n} input, got {x.shape}")
        if self.matrix is not None:
            return self.matrix @ vec(x)
        if self.indices is not None:
            return x[self.indices[:, 0], self.indices[:, 1]].copy()
        return np.einsum("pi,ij,pj->p", self.us, x, self.vs)

    def adjoint(self, y):
        """A*(y) as an m-by-n matrix; <A(X), y> = <X, A*(y)> for all X."""
        y = np.asarray(y, dtype=float)
        if y.shape != (self.p,):
            raise ValueError(f"expected length-{self.p} vector, got shape {y.shape}")
        if self.matrix is not None:
            return unvec(self.matrix.T @ y, self.m, self.n)
        if self.indices is not None:
            out = np.zeros((self.m, self.n))
            out[self.indices[:, 0], self.indices[:, 1]] = y
            return out
        return np.einsum("p,pi,pj->ij", y, self.us, self.vs)

    def scaled(self, c):
        """The operator X -> c * A(X)."""
        if self.matrix is not None:
            return MeasurementOp(self.m, self.n, self.p, matrix=c * self.matrix)
        if self.indices is not None:
            # sampling has no scalar slot; fall back to a dense representation
            dense = np.zeros((self.p, self.m * self.n))
            cols = self.indices[:, 1] * self.m + self.indices[:, 0]
            dense[np.arange(self.p), cols] = c
            return MeasurementOp(self.m, self.n, self.p, matrix=dense)
        return MeasurementOp(self.m, self.n, self.p, us=c * self.us,
                             vs=self.vs.copy())


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for drawing a random MeasurementOp."""

    kind: str
    m: int
    n: int
    p: int
    seed: int

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; "
                             f"choose from {ENSEMBLE_KINDS}")
        if self.m < 1 or self.n < 1 or self.p < 1:
            raise ValueError("m, n, p must be positive")
        if self.kind == "completion" and self.p > self.m * self.n:
            raise ValueError(f"completion needs p <= m*n = {self.m * self.n}")


def sample(spec):
    """Draw the operator described by ``spec`` (deterministic in the seed).

    Entry distributions: gaussian N(0, 1/p); bernoulli +-sqrt(1/p) equiprobable;
    sparse ternary +-sqrt(3/p) with probability 1/6 each, zero otherwise;
    projection is a row-orthonormalized Gaussian scaled by sqrt(mn/p); factored
    measurements are u_i' X v_i with standard Gaussian u_i, v_i scaled so the
    map is isometric in expectation; completion picks p distinct entries
    uniformly without replacement.
    """
    rng = np.random.default_rng(spec.seed)
    m, n, p = spec.m, spec.n, spec.p
    d = m * n
    if spec.kind == "gaussian":
        a = rng.normal(0.0, 1.0 / np.sqrt(p), size=(p, d))
        return MeasurementOp(m, n, p, matrix=a)
    if spec.kind == "bernoulli":
        a = (2.0 * rng.integers(0, 2, size=(p, d)) - 1.0) / np.sqrt(p)
        return MeasurementOp(m, n, p, matrix=a)
    if spec.kind == "sparse_ternary":
        u = rng.random(size=(p, d))
        a = np.sqrt(3.0 / p) * ((u < 1.0 / 6.0).astype(float)
                                - (u > 5.0 / 6.0).astype(float))
        return MeasurementOp(m, n, p, matrix=a)
    if spec.kind == "projection":
        if p > d:
            raise ValueError(f"projection needs p <= m*n = {d}")
        g = rng.normal(size=(d, p))
        q, _ = np.linalg.qr(g)
        return MeasurementOp(m, n, p, matrix=np.sqrt(d / p) * q.T)
    if spec.kind == "factored_gaussian":
        us = rng.normal(size=(p, m)) / np.sqrt(p)
        vs = rng.normal(size=(p, n))
        return MeasurementOp(m, n, p, us=us, vs=vs)
    # completion
    flat = rng.choice(d, size=p, replace=False)
    idx = np.column_stack([flat % m, flat // m])
    return MeasurementOp(m, n, p, indices=idx)


def identity_vec_op(m, n):
    """The p = m*n operator whose apply is exactly vec()."""
    return MeasurementOp(m, n, m * n, matrix=np.eye(m * n))


def operator_norm_estimate(op, iters=100, seed=0):
    """Power iteration on A* A; returns an estimate of ||A|| from below."""
    if iters < 1:
        raise ValueError("iters must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(op.m, op.n))
    x /= np.linalg.norm(x, "fro")
    lam = 0.0
    for _ in range(iters):
        y = op.adjoint(op.apply(x))
        norm = np.linalg.norm(y, "fro")
        if norm == 0.0:
            return 0.0
        lam = norm
        x = y / norm
    return float(np.sqrt(lam))


def hankel_indices(size):
    """Representative (i, j) for each antidiagonal s = i + j of a size x size matrix."""
    return [(min(s, size - 1), s - min(s, size - 1)) for s in range(2 * size - 1)]


def hankel_matrix(h):
    """hank(h): entry (i, j) is h[i + j]; h has odd length 2N + 1."""
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.size % 2 == 0:
        raise ValueError("impulse response must be a vector of odd length 2N+1")
    size = (h.size + 1) // 2
    i, j = np.indices((size, size))
    return h[i + j]


def hankel_problem(impulse_samples, input_matrix):
    """Affine constraints pinning a Hankel-structured matrix to I/O data.

    The decision variable is the (N+1) x (N+1) matrix X = hank(h). The
    returned dense operator stacks two row groups: structure rows forcing
    X[i, j] = X[k, l] whenever i + j = k + l (zero right-hand side), and one
    row per input signal expressing the observed output sum(a_i(N-t) h(t))
    through the first row of X (right-hand side y_i). Any X feasible for the
    returned system is a valid Hankel matrix consistent with the data.
    """
    h = np.asarray(impulse_samples, dtype=float)
    a = as_matrix(input_matrix)
    size = a.shape[1]  # N + 1
    if h.ndim != 1 or h.size < size:
        raise ValueError(f"need at least {size} impulse samples, got {h.size}")
    d = size * size

    def col(i, j):
        return j * size + i

    rows = []
    rhs = []
    for s in range(2 * size - 1):
        cells = [(i, s - i) for i in range(max(0, s - size + 1),
                                           min(s, size - 1) + 1)]
        ref = cells[0]
        for cell in cells[1:]:
            row = np.zeros(d)
            row[col(*ref)] = 1.0
            row[col(*cell)] = -1.0
            rows.append(row)
            rhs.append(0.0)
    y = a @ h[:size]
    for i in range(a.shape[0]):
        row = np.zeros(d)
        for j in range(size):
            row[col(0, j)] = a[i, j]
        rows.append(row)
        rhs.append(y[i])
    op = MeasurementOp(size, size, len(rows), matrix=np.array(rows))
    return op, np.array(rhs)
