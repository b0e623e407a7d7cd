"""Recovery experiments: phase-transition grids, image recovery, Hankel demo.

Per-trial seeds are derived from (base_seed, n, p, r, trial) through numpy's
SeedSequence, so any record can be reproduced bit-for-bit from the seed stored
in its CSV row.
"""

import csv
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .measurement import EnsembleSpec, hankel_matrix, hankel_problem, sample
from .solvers import (
    AlmConfig,
    SubgradientConfig,
    default_factor_rank,
    solve_alm,
    solve_subgradient,
)

CSV_HEADER = ["n", "p", "r", "trial", "seed", "rel_error", "success",
              "status", "wall_time_s"]


def derive_seed(base_seed, n, p, r, trial):
    """Stable 64-bit per-trial seed."""
    ss = np.random.SeedSequence([int(base_seed), int(n), int(p), int(r),
                                 int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def admissible_ranks(n, p):
    """Ranks r with r(2n - r) <= p: beyond this the system is underdetermined
    even restricted to rank-r matrices."""
    return [r for r in range(1, n + 1) if r * (2 * n - r) <= p]


@dataclass
class PhaseGridSpec:
    n: int
    p_values: list
    trials_per_cell: int = 10
    ensemble: str = "gaussian"
    solver: str = "alm"
    base_seed: int = 0
    success_tol: float = 1e-3

    def __post_init__(self):
        if self.solver not in ("alm", "subgradient"):
            raise ValueError(f"unknown solver {self.solver!r}")
        for p in self.p_values:
            if not 1 <= p <= self.n * self.n:
                raise ValueError(f"p={p} outside [1, n^2={self.n ** 2}]")


@dataclass
class TrialRecord:
    n: int
    p: int
    r: int
    trial: int
    seed: int
    rel_error: float
    success: bool
    status: str
    wall_time_s: float

    def key(self):
        return (self.n, self.p, self.r, self.trial)


@dataclass
class PhaseGridResult:
    records: list = field(default_factory=list)

    @property
    def rates(self):
        totals = {}
        hits = {}
        for rec in self.records:
            cell = (rec.p, rec.r)
            totals[cell] = totals.get(cell, 0) + 1
            hits[cell] = hits.get(cell, 0) + int(rec.success)
        return {cell: hits[cell] / totals[cell] for cell in totals}


def _solve(op, b, solver, seed, min_rank=0, feas_tol=1e-9):
    if solver == "alm":
        # the factor rank must cover the rank we hope to recover
        rd = min(min(op.m, op.n),
                 max(default_factor_rank(op.m, op.n, op.p), min_rank + 2))
        cfg = AlmConfig(factor_rank=rd, feas_tol=feas_tol)
        return solve_alm(op, b, cfg, seed=seed)
    return solve_subgradient(op, b, SubgradientConfig())


def run_trial(n, p, r, seed, ensemble="gaussian", solver="alm",
              success_tol=1e-3, trial=0):
    """One recovery experiment: plant a rank-r matrix, measure, solve, score."""
    if r * (2 * n - r) > p:
        raise ValueError(
            f"infeasible cell: r(2n - r) = {r * (2 * n - r)} exceeds p = {p}")
    child = np.random.SeedSequence(seed).spawn(3)
    rng = np.random.default_rng(child[0])
    y0 = rng.normal(size=(n, r)) @ rng.normal(size=(n, r)).T
    op = sample(EnsembleSpec(ensemble, n, n, p,
                             int(child[1].generate_state(1)[0])))
    b = op.apply(y0)
    t0 = time.perf_counter()
    # solving far past the success threshold is wasted work; keep a margin
    # of 1e-4 between feasibility and the classification tolerance
    result = _solve(op, b, solver, int(child[2].generate_state(1)[0]),
                    min_rank=r, feas_tol=max(1e-10, success_tol * 1e-4))
    wall = time.perf_counter() - t0
    rel = float(np.linalg.norm(result.x - y0, "fro")
                / np.linalg.norm(y0, "fro"))
    return TrialRecord(n=n, p=p, r=r, trial=trial, seed=seed, rel_error=rel,
                       success=rel < success_tol, status=result.status,
                       wall_time_s=wall)


def write_records(path, records):
    """Write records in canonical (n, p, r, trial) order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in sorted(records, key=TrialRecord.key):
            writer.writerow([rec.n, rec.p, rec.r, rec.trial, rec.seed,
                             repr(float(rec.rel_error)), int(rec.success),
                             rec.status, repr(float(rec.wall_time_s))])


def read_records(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        if header != CSV_HEADER:
            missing = [c for c in CSV_HEADER if c not in header]
            raise ValueError(f"{path}: bad CSV header, missing {missing}")
        out = []
        for row in reader:
            out.append(TrialRecord(
                n=int(row[0]), p=int(row[1]), r=int(row[2]), trial=int(row[3]),
                seed=int(row[4]), rel_error=float(row[5]),
                success=bool(int(row[6])), status=row[7],
                wall_time_s=float(row[8])))
        return out


def run_phase_grid(spec, csv_path=None, jobs=1):
    """Sweep every admissible (p, r) cell of the grid.

    When ``csv_path`` exists, records already present are kept and their cells
    skipped, making interrupted runs resumable; the final file is rewritten in
    canonical order either way.
    """
    done = {}
    if csv_path and os.path.exists(csv_path):
        for rec in read_records(csv_path):
            done[rec.key()] = rec
    todo = []
    for p in spec.p_values:
        for r in admissible_ranks(spec.n, p):
            for trial in range(spec.trials_per_cell):
                key = (spec.n, p, r, trial)
                if key not in done:
                    todo.append(key)

    def work(key):
        n, p, r, trial = key
        seed = derive_seed(spec.base_seed, n, p, r, trial)
        return run_trial(n, p, r, seed, ensemble=spec.ensemble,
                         solver=spec.solver, success_tol=spec.success_tol,
                         trial=trial)

    records = dict(done)
    if jobs > 1 and todo:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for rec in pool.map(_grid_worker,
                                [(spec, key) for key in todo]):
                records[rec.key()] = rec
                if csv_path:
                    write_records(csv_path, records.values())
    else:
        for key in todo:
            rec = work(key)
            records[rec.key()] = rec
            if csv_path:
                write_records(csv_path, records.values())
    result = PhaseGridResult(records=sorted(records.values(),
                                            key=TrialRecord.key))
    if csv_path:
        write_records(csv_path, result.records)
    return result


def _grid_worker(args):
    spec, key = args
    n, p, r, trial = key
    seed = derive_seed(spec.base_seed, n, p, r, trial)
    return run_trial(n, p, r, seed, ensemble=spec.ensemble, solver=spec.solver,
                     success_tol=spec.success_tol, trial=trial)


# ---------------------------------------------------------------------------
# image recovery

_LOGO_ROWS = 46
_LOGO_COLS = 81


def logo_fixture():
    """Synthetic 46 x 81 rank-5 matrix with 3 distinct values and 5 distinct rows.

    Stands in for a logo-like image: wide blocks of background, midtone, and
    foreground values arranged so exactly five linearly independent row
    patterns appear.
    """
    cols = _LOGO_COLS
    patterns = np.zeros((5, cols))
    patterns[0, :] = 1.0
    patterns[1, :40] = 1.0
    patterns[2, :] = 1.0
    patterns[2, 27:54] = 0.5
    patterns[3, :] = 0.5
    patterns[3, 9:27] = 1.0
    patterns[3, 54:72] = 1.0
    patterns[4, 20:40] = 0.5
    patterns[4, 40:] = 1.0
    assignment = [0] * 6 + [1] * 10 + [2] * 10 + [3] * 10 + [4] * 10
    img = patterns[assignment, :]
    assert img.shape == (_LOGO_ROWS, _LOGO_COLS)
    return img


def run_image_recovery(image, p_values, ensemble="gaussian", solver="alm",
                       seed=0):
    """Recover a fixed image from p random measurements for each p."""
    image = linalg.as_matrix(image)
    m, n = image.shape
    out = []
    for i, p in enumerate(p_values):
        op = sample(EnsembleSpec(ensemble, m, n, p,
                                 derive_seed(seed, m, p, 0, i)))
        b = op.apply(image)
        result = _solve(op, b, solver, derive_seed(seed, m, p, 1, i),
                        feas_tol=1e-8)
        rel = float(np.linalg.norm(result.x - image, "fro")
                    / np.linalg.norm(image, "fro"))
        out.append((p, rel))
    return out


# ---------------------------------------------------------------------------
# Hankel realization demo

def random_impulse_response(order, length, seed):
    """Impulse response of a random stable LTI system with ``order`` distinct
    real poles, sampled at t = 0..length-1."""
    rng = np.random.default_rng(seed)
    poles = rng.uniform(0.3, 0.9, size=order) * rng.choice([-1.0, 1.0],
                                                           size=order)
    # distinct poles keep the minimal realization at full order
    while len(np.unique(np.round(poles, 6))) < order:
        poles = rng.uniform(0.3, 0.9, size=order) * rng.choice([-1.0, 1.0],
                                                               size=order)
    coeffs = rng.normal(size=order)
    coeffs /= np.linalg.norm(coeffs)
    t = np.arange(length)
    return (coeffs[None, :] * poles[None, :] ** t[:, None]).sum(axis=1)


def run_hankel_demo(order, big_n, p, seed=0, solver="alm"):
    """Minimum-order realization from p random input/output experiments.

    Generates a stable order-``order`` impulse response of length 2*big_n + 1,
    drives it with p Gaussian input signals observed at time big_n, and
    recovers the Hankel matrix by nuclear-norm minimization.
    """
    if order > big_n:
        raise ValueError("order must not exceed the horizon N")
    h = random_impulse_response(order, 2 * big_n + 1, seed)
    rng = np.random.default_rng(derive_seed(seed, order, big_n, p, 1))
    inputs = rng.normal(size=(p, big_n + 1))
    op, b = hankel_problem(h, inputs)
    result = _solve(op, b, solver, derive_seed(seed, order, big_n, p, 2))
    x = result.x
    size = big_n + 1
    # average each antidiagonal to read the recovered impulse response
    h_rec = np.zeros(2 * big_n + 1)
    counts = np.zeros(2 * big_n + 1)
    for i in range(size):
        for j in range(size):
            h_rec[i + j] += x[i, j]
            counts[i + j] += 1
    h_rec /= counts
    rel = float(np.linalg.norm(h_rec - h) / np.linalg.norm(h))
    return {
        "order": order,
        "N": big_n,
        "p": p,
        "true_hankel_rank": linalg.numeric_rank(hankel_matrix(h), 1e-6),
        "recovered_rank": linalg.numeric_rank(x, 1e-4),
        "impulse_rel_error": rel,
        "nuclear_norm": result.objective,
        "feas_residual": result.feas_residual,
        "status": result.status,
    }


# ---------------------------------------------------------------------------
# matrix file formats

def read_matrix_text(path):
    """Plain-text matrix: first line ``rows cols``, then row-major reals."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError(f"{path}: expected 'rows cols' header")
    rows, cols = int(tokens[0]), int(tokens[1])
    data = np.array([float(t) for t in tokens[2:]])
    if data.size != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} entries, "
                         f"got {data.size}")
    return data.reshape((rows, cols))


def write_matrix_text(path, x):
    x = linalg.as_matrix(x)
    with open(path, "w") as fh:
        fh.write(f"{x.shape[0]} {x.shape[1]}\n")
        for row in x:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def read_pgm(path):
    """8-bit PGM (P2 or P5), grayscale mapped to [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise ValueError(f"{path}: not a P2/P5 PGM file")
    # strip comments, then parse width/height/maxval
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    width, height, maxval = fields
    if magic == b"P5":
        pos += 1
        pixels = np.frombuffer(data[pos:pos + width * height], dtype=np.uint8)
    else:
        pixels = np.array([int(t) for t in data[pos:].split()],
                          dtype=np.uint16)
    if pixels.size != width * height:
        raise ValueError(f"{path}: truncated pixel data")
    return pixels.reshape((height, width)).astype(float) / maxval


def load_image(path):
    """Dispatch on extension: .pgm binary/ascii PGM, anything else text matrix."""
    if str(path).lower().endswith(".pgm"):
        return read_pgm(path)
    return read_matrix_text(path)
