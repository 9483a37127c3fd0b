"""Finite stochastic-matrix algebra: stationary solve, TV distance,
ergodicity checks, Dobrushin coefficient, reversible spectral analysis."""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidMatrixError,
    NoConvergenceError,
    NonErgodicError,
    NotReversibleError,
    ZeroGapError,
)

ROW_SUM_TOL = 1e-12
ROW_SUM_REPAIR = 1e-9


def _as_readonly(a):
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StochasticMatrix:
    rows: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1] or rows.shape[0] < 1:
            raise InvalidMatrixError(f"need a square matrix, got shape {rows.shape}")
        if np.any(rows < -ROW_SUM_TOL) or np.any(rows > 1 + ROW_SUM_TOL):
            raise InvalidMatrixError("entries outside [0, 1]")
        sums = rows.sum(axis=1)
        err = np.abs(sums - 1.0).max()
        if err > ROW_SUM_TOL:
            if err > ROW_SUM_REPAIR:
                raise InvalidMatrixError(f"row sums off by {err:.3e} (> {ROW_SUM_REPAIR})")
            rows = rows / sums[:, None]
        rows = np.clip(rows, 0.0, 1.0)
        object.__setattr__(self, "rows", _as_readonly(rows))
        if self.labels is not None:
            if len(self.labels) != rows.shape[0]:
                raise InvalidMatrixError("label count does not match size")
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def size(self):
        return self.rows.shape[0]


@dataclass(frozen=True)
class ProbabilityVector:
    entries: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.entries, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise InvalidMatrixError("probability vector must be 1-d and nonempty")
        if np.any(v < -ROW_SUM_TOL):
            raise InvalidMatrixError("negative probability entry")
        s = v.sum()
        if abs(s - 1.0) > ROW_SUM_TOL:
            if abs(s - 1.0) > ROW_SUM_REPAIR:
                raise InvalidMatrixError(f"mass {s} is not 1")
            v = v / s
        v = np.clip(v, 0.0, None)
        object.__setattr__(self, "entries", _as_readonly(v))

    @property
    def size(self):
        return self.entries.size


@dataclass(frozen=True)
class SpectralSummary:
    gamma_star: float
    t_rel: float
    eigenvalues: np.ndarray = field(repr=False)


def point_mass(i, size):
    v = np.zeros(size)
    v[i] = 1.0
    return ProbabilityVector(v)


def tv_distance(mu, nu):
    """Total variation distance, half the l1 distance."""
    a = mu.entries if isinstance(mu, ProbabilityVector) else np.asarray(mu, dtype=float)
    b = nu.entries if isinstance(nu, ProbabilityVector) else np.asarray(nu, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes {a.shape} vs {b.shape}")
    return 0.5 * float(np.abs(a - b).sum())


def _strongly_connected(adj):
    n = adj.shape[0]

    def reach(mat):
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v in np.nonzero(mat[u])[0]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return seen

    return bool(reach(adj).all() and reach(adj.T).all())


def _period(adj):
    # BFS levels from state 0; gcd of (level[u] + 1 - level[v]) over edges
    n = adj.shape[0]
    level = np.full(n, -1)
    level[0] = 0
    queue = [0]
    while queue:
        u = queue.pop(0)
        for v in np.nonzero(adj[u])[0]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    us, vs = np.nonzero(adj)
    for u, v in zip(us, vs):
        g = math.gcd(g, int(level[u] + 1 - level[v]))
    return abs(g)


def is_ergodic(P):
    """Returns (ok, diagnosis) for a StochasticMatrix."""
    adj = P.rows > 0
    if P.size == 1:
        return True, "ergodic"
    if not _strongly_connected(adj):
        return False, "reducible: transition graph is not strongly connected"
    p = _period(adj)
    if p != 1:
        return False, f"periodic with period {p}"
    return True, "ergodic"


def require_ergodic(P):
    ok, diag = is_ergodic(P)
    if not ok:
        raise NonErgodicError(diag)


def stationary_distribution(P, check=True):
    """Solves pi P = pi.

    Direct dense solve of (P^T - I) with the normalization row substituted;
    falls back to power iteration when the system is ill-conditioned.
    """
    if check:
        require_ergodic(P)
    n = P.size
    A = P.rows.T - np.eye(n)
    A[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    pi = None
    if np.linalg.cond(A) <= 1e12:
        try:
            pi = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            pi = None
    if pi is None or np.any(pi < -1e-9):
        pi = _power_iteration(P.rows)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    if np.abs(pi @ P.rows - pi).sum() > 1e-10:
        raise NoConvergenceError("stationary solve residual above 1e-10")
    return ProbabilityVector(pi)


def _power_iteration(rows, max_iter=200000, tol=1e-15):
    n = rows.shape[0]
    pi = np.full(n, 1.0 / n)
    # damp slightly to be safe near periodicity
    for _ in range(max_iter):
        nxt = 0.5 * (pi + pi @ rows)
        if np.abs(nxt - pi).sum() < tol:
            return nxt
        pi = nxt
    return pi


def dobrushin_coefficient(P):
    """Maximal TV distance between any two rows of P."""
    rows = P.rows
    worst = 0.0
    for x in range(P.size - 1):
        d = 0.5 * np.abs(rows[x + 1:] - rows[x]).sum(axis=1).max()
        if d > worst:
            worst = float(d)
    return worst


def reversibility_residual(P, pi):
    F = pi.entries[:, None] * P.rows
    return float(np.abs(F - F.T).max())


def spectral_summary(P, pi):
    """Eigenvalues of D^{1/2} P D^{-1/2} for a pi-reversible P."""
    res = reversibility_residual(P, pi)
    if res > 1e-10:
        raise NotReversibleError(res)
    d = np.sqrt(pi.entries)
    S = (d[:, None] * P.rows) / d[None, :]
    S = 0.5 * (S + S.T)
    vals = np.linalg.eigvalsh(S)[::-1]
    # drop the eigenvalue closest to 1 once, gap from the rest
    idx = int(np.argmin(np.abs(vals - 1.0)))
    rest = np.delete(vals, idx)
    gamma = 1.0 - (float(np.abs(rest).max()) if rest.size else 0.0)
    if gamma <= 1e-12:
        raise ZeroGapError(SpectralSummary(gamma, math.inf, _as_readonly(vals)))
    return SpectralSummary(gamma, 1.0 / gamma, _as_readonly(vals))


def lp_quasi_norm(v, q):
    """(sum |v_i|^q)^(1/q) for q > 0, support size for q = 0."""
    v = np.abs(np.asarray(v, dtype=float))
    if q < 0:
        raise ValueError("q must be >= 0")
    if q == 0:
        return float(np.count_nonzero(v))
    return float((v ** q).sum() ** (1.0 / q))
