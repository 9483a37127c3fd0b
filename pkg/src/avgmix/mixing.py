"""Exact mixing quantities: beta(t), d(t), mixing times, skipped-pair
distributions, entropic terms, the spectral upper bound and the
uniform-ergodicity envelope."""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .chain import (
    ProbabilityVector,
    StochasticMatrix,
    SpectralSummary,
    lp_quasi_norm,
    require_ergodic,
)
from .errors import InvalidRangeError, UnboundedError

CONVERGED_FLOOR = 1e-13

INF = float("inf")


@dataclass(frozen=True)
class BetaProfile:
    values: np.ndarray
    t_max: int
    converged: bool

    def threshold(self, xi):
        """Smallest t >= 1 with beta(t) <= xi, or None."""
        for t in range(1, self.t_max + 1):
            if self.values[t] <= xi:
                return t
        return None


@dataclass(frozen=True)
class PairMatrix:
    s: int
    entries: np.ndarray


@dataclass(frozen=True)
class MixingReport:
    xi: float
    t_mix: float  # integer, or math.inf if not reached by the cap
    t_sharp: float
    beta_profile: BetaProfile = field(repr=False)


def _n_threads():
    try:
        return max(1, int(os.environ.get("MIX_THREADS", "1")))
    except ValueError:
        return 1


def _tv_to_pi(rows_t, pi):
    # rows_t[x] = e_x P^t ; returns per-row TV distances, one value per x
    return 0.5 * np.abs(rows_t - pi[None, :]).sum(axis=1)


def _profiles(P, pi, t_max, threads=None):
    """beta(t) and d(t) for t = 0..t_max by simultaneous row propagation."""
    n = P.size
    pvec = pi.entries
    rows = np.eye(n)
    beta = np.empty(t_max + 1)
    d = np.empty(t_max + 1)
    nthr = _n_threads() if threads is None else threads

    def record(t, cur):
        if nthr > 1 and n >= 64:
            # split the row block; deterministic ordered reduction
            chunks = np.array_split(np.arange(n), nthr)
            with ThreadPoolExecutor(max_workers=nthr) as ex:
                parts = list(ex.map(lambda ix: _tv_to_pi(cur[ix], pvec), chunks))
            tv = np.concatenate(parts)
        else:
            tv = _tv_to_pi(cur, pvec)
        beta[t] = float(pvec @ tv)
        d[t] = float(tv.max())

    record(0, rows)
    for t in range(1, t_max + 1):
        rows = rows @ P.rows
        record(t, rows)
    beta = np.clip(beta, 0.0, 1.0)
    beta[beta < CONVERGED_FLOOR] = 0.0
    return beta, d


def exact_beta(P, pi, t_max):
    """Average distance to stationarity beta(t) = sum_x pi(x) TV(e_x P^t, pi).

    Args:
        P: ergodic StochasticMatrix
        pi: its stationary distribution
        t_max: horizon (inclusive)
    """
    require_ergodic(P)
    if t_max < 0:
        raise InvalidRangeError("t_max must be >= 0")
    beta, _ = _profiles(P, pi, t_max)
    return BetaProfile(beta, t_max, bool(beta[t_max] < CONVERGED_FLOOR))


def exact_worst_distance(P, pi, t_max):
    """Worst-case distance d(t) = max_x TV(e_x P^t, pi), t = 0..t_max."""
    require_ergodic(P)
    _, d = _profiles(P, pi, t_max)
    return d


def mixing_times(P, pi, xi, t_cap):
    """First times t >= 1 at which d(t), resp. beta(t), drop to xi."""
    require_ergodic(P)
    if not 0.0 < xi < 1.0:
        raise InvalidRangeError(f"xi must lie in (0,1), got {xi}")
    beta, d = _profiles(P, pi, t_cap)
    t_sharp = next((t for t in range(1, t_cap + 1) if beta[t] <= xi), INF)
    t_mix = next((t for t in range(1, t_cap + 1) if d[t] <= xi), INF)
    prof = BetaProfile(beta, t_cap, bool(beta[t_cap] < CONVERGED_FLOOR))
    return MixingReport(xi, t_mix, t_sharp, prof)


def pair_matrix(P, pi, s):
    """Q^(s)(x,x') = pi(x) P^s(x,x')."""
    if s < 0:
        raise InvalidRangeError("s must be >= 0")
    Ps = np.linalg.matrix_power(P.rows, s)
    return PairMatrix(s, pi.entries[:, None] * Ps)


def entropic_term(Q, p):
    """J_p^(s): the (1-1/p)/2 quasi-norm of Q^(s) raised to 1-1/p.

    With r = (1-1/p)/2 this equals (sum_{x,x'} Q^r)^2; p=1 returns 1 by
    the zero-exponent convention, p=inf returns (sum sqrt(Q))^2.
    """
    if p != INF and p < 1:
        raise InvalidRangeError(f"p must be >= 1 or inf, got {p}")
    if p == 1:
        return 1.0
    r = 0.5 if p == INF else (1.0 - 1.0 / p) / 2.0
    return float((Q.entries ** r).sum() ** 2)


def entropic_sup(P, pi, xi, p, t_cap=100000):
    """J_{p,xi}: sup of J_p^(s) over s = 1..t_sharp(xi)."""
    report = mixing_times(P, pi, xi, t_cap)
    if not math.isfinite(report.t_sharp):
        raise UnboundedError(f"average mixing threshold not reached by t={t_cap}")
    best = 0.0
    Ps = np.eye(P.size)
    for s in range(1, int(report.t_sharp) + 1):
        Ps = Ps @ P.rows
        best = max(best, entropic_term(PairMatrix(s, pi.entries[:, None] * Ps), p))
    return best


def spectral_avg_mixing_bound(summary: SpectralSummary, pi, xi):
    """Relaxation-time upper bound t_rel * log(||pi||_{1/2} / (2 xi))."""
    half_norm = lp_quasi_norm(pi.entries, 0.5)
    if not math.isfinite(summary.t_rel):
        return INF
    return summary.t_rel * math.log(half_norm / (2.0 * xi))


def uniform_beta_envelope(t_mix, s):
    """Exponential envelope 2 * 2^(-s/t_mix) valid for uniformly ergodic chains."""
    if t_mix < 1:
        raise InvalidRangeError("t_mix must be >= 1")
    return 2.0 * math.exp(-math.log(2.0) * s / t_mix)


def nonstationary_beta(P, mu0, s, horizon):
    """sup over t <= horizon of sum_x mu^(t)(x) TV(e_x P^s, mu^(s+t)).

    Reduces to the stationary beta(s) when mu0 is the stationary law.
    """
    if horizon < 1:
        raise InvalidRangeError("horizon must be >= 1")
    if s < 0:
        raise InvalidRangeError("s must be >= 0")
    Ps = np.linalg.matrix_power(P.rows, s)
    mu_t = mu0.entries.copy()
    mu_st = mu_t @ Ps
    best = 0.0
    for _ in range(horizon + 1):
        tv = 0.5 * np.abs(Ps - mu_st[None, :]).sum(axis=1)
        best = max(best, float(mu_t @ tv))
        mu_t = mu_t @ P.rows
        mu_st = mu_st @ P.rows
    return best
