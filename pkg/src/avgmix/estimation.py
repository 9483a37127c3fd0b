"""Single-trajectory estimation: simulation, skipped-pair counts, the
plug-in estimator of beta(s), the average-mixing-time estimate with its
confidence interval, and Monte Carlo validation harnesses."""

import hashlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

from .chain import ProbabilityVector, StochasticMatrix, stationary_distribution
from .errors import InvalidBandError, InvalidRangeError, SkipTooLargeError
from .kernels import run_chunk
from .mixing import exact_beta, mixing_times

CHUNK = 1 << 20  # fixed draw size keeps streams identical across run shapes


@dataclass(frozen=True)
class Trajectory:
    states: np.ndarray
    seed: int
    start_mode: str
    chain_id: str
    pi_residual: float = 0.0

    @property
    def n(self):
        return self.states.size


@dataclass(frozen=True)
class SkippedCounts:
    s: int
    m: int
    visit: np.ndarray
    pair: np.ndarray


@dataclass(frozen=True)
class EstimationResult:
    beta_hat: float
    s: int
    n: int
    m: int


def _chain_id(P):
    return hashlib.sha256(P.rows.tobytes()).hexdigest()[:16]


def _replica_rng(seed, replica):
    return Generator(Philox(key=np.array([seed, replica], dtype=np.uint64)))


def _cumulative_rows(P):
    cum = np.cumsum(P.rows, axis=1)
    cum[:, -1] = 1.0
    return np.ascontiguousarray(cum)


def sample_trajectory(P, start, n, seed, replica=0):
    """Simulate n steps of the chain.

    start: "stationary", ("point", x), or a ProbabilityVector. Deterministic
    for a fixed (seed, replica) pair across kernel backends and thread counts.
    """
    if n < 2:
        raise InvalidRangeError("need n >= 2")
    pi_residual = 0.0
    if start == "stationary":
        pi = stationary_distribution(P)
        start_vec = pi.entries
        pi_residual = float(np.abs(pi.entries @ P.rows - pi.entries).sum())
        mode = "stationary"
    elif isinstance(start, tuple) and start[0] == "point":
        start_vec = np.zeros(P.size)
        start_vec[start[1]] = 1.0
        mode = f"point:{start[1]}"
    elif isinstance(start, ProbabilityVector):
        start_vec = start.entries
        mode = "custom"
    else:
        raise InvalidRangeError(f"bad start mode {start!r}")
    gen = _replica_rng(seed, replica)
    cum = _cumulative_rows(P)
    states = np.empty(n, dtype=np.int32)
    start_cum = np.cumsum(start_vec)
    start_cum[-1] = 1.0
    x = int(np.searchsorted(start_cum, gen.random(), side="right"))
    x = min(x, P.size - 1)
    states[0] = x
    pos = 1
    while pos < n:
        u = gen.random(CHUNK)
        m = min(CHUNK, n - pos)
        x = run_chunk(cum, x, u[:m], states[pos:pos + m])
        pos += m
    return Trajectory(states, seed, mode, _chain_id(P), pi_residual)


def _n_states(traj):
    return int(traj.states.max()) + 1


def skipped_counts(traj, s, n_states=None):
    """Visit and pair counts of the s-skipped trajectory.

    Pairs are (X_{1+s(t-1)}, X_{1+st}) for t = 1..floor((n-1)/s); visits
    count the first coordinates.
    """
    n = traj.n
    if s < 1:
        raise InvalidRangeError("s must be >= 1")
    if s >= n:
        raise SkipTooLargeError(f"skip {s} >= trajectory length {n}")
    k = n_states if n_states is not None else _n_states(traj)
    m = (n - 1) // s
    first = traj.states[0:(m - 1) * s + 1:s].astype(np.int64)
    second = traj.states[s:m * s + 1:s].astype(np.int64)
    pair = np.bincount(first * k + second, minlength=k * k).reshape(k, k)
    visit = np.bincount(first, minlength=k)
    return SkippedCounts(s, m, visit, pair)


def beta_hat(counts: SkippedCounts):
    """Plug-in estimator: half the l1 gap between the empirical pair law
    and the product of its first-coordinate marginals."""
    m = counts.m
    outer = counts.visit[:, None] * counts.visit[None, :] / m
    val = float(np.abs(counts.pair - outer).sum() / (2.0 * m))
    return EstimationResult(min(1.0, val), counts.s, -1, m)


def beta_hat_at(traj, s, n_states=None):
    """beta-hat(s), with the convention that it is 0 for s >= n."""
    if s >= traj.n:
        return EstimationResult(0.0, s, traj.n, 0)
    res = beta_hat(skipped_counts(traj, s, n_states))
    return EstimationResult(res.beta_hat, s, traj.n, res.m)


def avg_mixing_time_hat(traj, xi, n_states=None):
    """Smallest s with beta-hat(s) <= xi; the s >= n convention guarantees
    termination at s <= n (a return value of n signals non-convergence)."""
    if not 0.0 < xi < 1.0:
        raise InvalidRangeError("xi must lie in (0,1)")
    k = n_states if n_states is not None else _n_states(traj)
    for s in range(1, traj.n):
        if beta_hat_at(traj, s, k).beta_hat <= xi:
            return s
    return traj.n


def confidence_interval(traj, xi, eps, n_states=None):
    """Interval [t-hat(xi/(1+eps)), t-hat(xi/(1-eps))] for the average
    mixing time."""
    if not 0.0 < eps < 1.0:
        raise InvalidRangeError("eps must lie in (0,1)")
    if xi / (1.0 - eps) >= 1.0:
        raise InvalidBandError("xi/(1-eps) must stay below 1")
    # the threshold search is nonincreasing in its threshold, so the larger
    # threshold xi/(1-eps) yields the lower endpoint
    lower = avg_mixing_time_hat(traj, xi / (1.0 - eps), n_states)
    upper = avg_mixing_time_hat(traj, xi / (1.0 + eps), n_states)
    return {"lower": lower, "upper": upper, "warning": upper >= traj.n}


def _thread_count():
    try:
        return max(1, int(os.environ.get("MIX_THREADS", "1")))
    except ValueError:
        return 1


def _map_replicas(fn, replicas):
    nthr = _thread_count()
    if nthr > 1:
        with ThreadPoolExecutor(max_workers=nthr) as ex:
            return list(ex.map(fn, range(replicas)))
    return [fn(r) for r in range(replicas)]


def mad_experiment(P, s, n_grid, replicas, seed, p_values=(2.0,)):
    """Empirical mean absolute deviation of beta-hat(s) against the exact
    beta(s), with the closed-form deviation bound per requested p."""
    from .bounds import bp_direct_sum, mad_bound_general

    if replicas < 50:
        raise InvalidRangeError("need at least 50 replicas")
    pi = stationary_distribution(P)
    n_max = max(n_grid)
    # profile long enough for the direct B_p sums; it converges quickly
    horizon = s * ((n_max - 1) // s)
    profile = exact_beta(P, pi, min(horizon, _profile_horizon(P, pi)))
    beta_true = profile.values[s] if s <= profile.t_max else 0.0
    rows = []
    for n in sorted(n_grid):
        if s >= n:
            rows.append({"n": n, "s": s, "mad": beta_true, "beta_exact": beta_true})
            continue

        def one(r, n=n):
            traj = sample_trajectory(P, "stationary", n, seed, r)
            return abs(beta_hat_at(traj, s, P.size).beta_hat - beta_true)

        devs = _map_replicas(one, replicas)
        row = {"n": n, "s": s, "mad": float(np.mean(devs)), "beta_exact": beta_true}
        m = (n - 1) // s
        for p in p_values:
            from .mixing import entropic_term, pair_matrix

            jp = entropic_term(pair_matrix(P, pi, s), p)
            bp = bp_direct_sum(profile.values, p, s, m)
            row[f"bound_p={p}"] = mad_bound_general(bp, jp, s, n)
        rows.append(row)
    return rows


def _profile_horizon(P, pi, cap=100000):
    # first horizon at which the profile has converged
    t = 64
    while t < cap:
        prof = exact_beta(P, pi, t)
        if prof.converged:
            return t
        t *= 2
    return cap


def coverage_experiment(P, xi, eps, delta, n, replicas, seed):
    """Fraction of replicas whose mixing-time estimate lands in the exact
    window [t_sharp(xi(1+eps)), t_sharp(xi(1-eps))]."""
    pi = stationary_distribution(P)
    t_cap = 100000
    lo = mixing_times(P, pi, xi * (1.0 + eps), t_cap).t_sharp
    hi = mixing_times(P, pi, xi * (1.0 - eps), t_cap).t_sharp
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise InvalidRangeError("window endpoints not reached under the cap")

    def one(r):
        traj = sample_trajectory(P, "stationary", n, seed, r)
        return avg_mixing_time_hat(traj, xi, P.size)

    estimates = _map_replicas(one, replicas)
    hits = sum(1 for e in estimates if lo <= e <= hi)
    return {
        "coverage": hits / replicas,
        "window": [int(lo), int(hi)],
        "estimates": estimates,
        "delta": delta,
        "n": n,
    }
