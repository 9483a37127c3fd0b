"""Closed-form bound and sample-size evaluators: deviation sample sizes for
additive functionals, partial-sum envelopes B_p, MAD/PAC expressions for the
beta estimator, mixing-time sample sizes, entropic-term certificates, the
non-stationary multiplier, and the visit-count variance bound."""

import math
from dataclasses import dataclass

import numpy as np

from .chain import ProbabilityVector
from .errors import (
    HypothesisViolatedError,
    InvalidBandError,
    InvalidRangeError,
    NotAbsolutelyContinuousError,
)
from .special import lambert_w0, riemann_zeta, upper_incomplete_gamma  # noqa: F401

INF = float("inf")

C_UERG = 3.0 * math.sqrt(2.0)

DEFAULT_P_GRID = (1.25, 1.5, 2.0, 3.0, 4.0, 8.0, INF)


# ---------------------------------------------------------------------------
# rate models


@dataclass(frozen=True)
class RateModel:
    kind: str  # "exponential" | "subexponential" | "polynomial"
    beta0: float
    beta1: float
    b: float = 1.0

    def __post_init__(self):
        if self.kind not in ("exponential", "subexponential", "polynomial"):
            raise InvalidRangeError(f"unknown rate kind {self.kind!r}")
        if self.beta0 < 1.0:
            raise InvalidRangeError("beta0 must be >= 1")
        if self.beta1 <= 0.0:
            raise InvalidRangeError("beta1 must be > 0")
        if self.kind in ("exponential", "subexponential") and not 0.0 < self.b <= 1.0:
            raise InvalidRangeError("b must lie in (0,1]")
        if self.kind == "polynomial" and self.b <= 0.0:
            raise InvalidRangeError("b must be > 0")

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "polynomial":
            with np.errstate(divide="ignore"):
                return np.where(t == 0, self.beta0, self.beta1 * t ** (-self.b))
        return self.beta0 * np.exp(-self.beta1 * t ** self.b)


def fit_exponential_envelope(values):
    """(beta0, beta1) with values[t] <= beta0 * exp(-beta1 * t) for all t."""
    values = np.asarray(values, dtype=float)
    beta0 = max(1.0, float(values[0]))
    beta1 = INF
    for t in range(1, len(values)):
        if values[t] > 0:
            beta1 = min(beta1, math.log(beta0 / values[t]) / t)
    if not math.isfinite(beta1) or beta1 <= 0:
        raise InvalidRangeError("profile admits no exponential envelope")
    return beta0, beta1


# ---------------------------------------------------------------------------
# deviation sample sizes for additive functionals


def deviation_sample_size(model, eps, delta, t_sharp_fn, c_n=8.0, c_xi=16.0):
    """Trajectory length guaranteeing P(|mean of a bounded centered f| > eps)
    <= delta, by rate class. Constants are the proof-explicit defaults and
    can be overridden."""
    if not 0.0 < eps < 1.0 or not 0.0 < delta < 1.0:
        raise InvalidRangeError("eps and delta must lie in (0,1)")
    log_term = math.log(4.0 / delta)
    if model.kind == "polynomial":
        return math.ceil(
            (c_n / eps ** 2 * log_term) ** ((model.b + 1.0) / model.b)
            * (2.0 * model.beta1 / delta) ** (1.0 / model.b)
        )
    xi = delta * eps ** 2 / (c_xi * log_term)
    t_sharp = t_sharp_fn(xi)
    return math.ceil((c_n / eps ** 2) * log_term * 2.0 ** (1.0 / model.b) * t_sharp)


# ---------------------------------------------------------------------------
# B_p partial sums and their closed-form envelopes


def bp_direct_sum(beta_values, p, s, m):
    """Directly summed B_p^(s) = sum_{t < m} beta(s t)^(1/p); profile values
    beyond the stored horizon count as 0."""
    if p == INF:
        # beta^0 = 1 termwise while beta > 0
        vals = np.asarray(beta_values, dtype=float)
        ts = np.arange(m) * s
        ts = ts[ts < len(vals)]
        return float(np.count_nonzero(vals[ts] > 0))
    total = 0.0
    for t in range(m):
        idx = s * t
        if idx >= len(beta_values):
            break
        total += beta_values[idx] ** (1.0 / p)
    return total


def bp_bound(model, p, s, n=None):
    """Closed-form upper bound on B_p^(s) under the given decay model.

    The polynomial clause needs b/p > 1.  (n is accepted for signature
    parity with the finite sum; the closed forms do not depend on it.)
    """
    if p != INF and p < 1:
        raise InvalidRangeError("p must be >= 1 or inf")
    if s < 1:
        raise InvalidRangeError("s must be >= 1")
    pinv = 0.0 if p == INF else 1.0 / p
    if model.kind == "exponential":
        if pinv == 0.0:
            raise HypothesisViolatedError("p = inf gives a divergent sum")
        return model.beta0 ** pinv / (1.0 - math.exp(-model.beta1 * s / p))
    if model.kind == "subexponential":
        if pinv == 0.0:
            raise HypothesisViolatedError("p = inf gives a divergent sum")
        a = model.beta1 / p
        gamma_term = upper_incomplete_gamma(1.0 / model.b, s ** model.b * a)
        return (
            1.0
            + math.exp(-a * s ** model.b)
            + gamma_term / (model.b * s * a ** (1.0 / model.b))
        )
    # polynomial
    if pinv == 0.0 or model.b * pinv <= 1.0:
        raise HypothesisViolatedError("polynomial clause needs b/p > 1")
    return model.beta0 ** pinv + riemann_zeta(model.b / p) * model.beta1 ** pinv / s ** (model.b / p)


# ---------------------------------------------------------------------------
# MAD / PAC expressions for the beta estimator


def mad_bound_general(bp, jp, s, n):
    """3 sqrt((1/2 + B_p) J_p / floor((n-1)/s))."""
    if n <= s:
        raise InvalidRangeError("need n > s")
    m = (n - 1) // s
    return 3.0 * math.sqrt((0.5 + bp) * jp / m)


def pac_sample_size_general(eps, delta, p, s, bp, jp, t_sharp_fn,
                            c_erg=64.0, c_xi=128.0):
    """Trajectory length for |beta-hat(s) - beta(s)| <= eps w.p. 1 - delta
    on an ergodic chain; proof-explicit default constants, overridable."""
    if not 0.0 < eps < 1.0 or not 0.0 < delta < 1.0:
        raise InvalidRangeError("eps and delta must lie in (0,1)")
    log_term = math.log(1.0 / delta)
    xi = eps ** 2 * delta / (c_xi * log_term)
    branch = max((s / eps ** 2) * bp * jp, float(t_sharp_fn(xi)))
    return 1 + math.ceil(c_erg * (log_term / eps ** 2) * branch)


def mad_and_pac_uniform(eps, delta, s, t_mix, j_inf, n):
    """MAD bound and PAC sample size for uniformly ergodic chains."""
    if s < 1:
        raise InvalidRangeError("s must be >= 1")
    if not math.isfinite(t_mix):
        raise InvalidRangeError("t_mix must be finite")
    mad = C_UERG * math.sqrt((t_mix + 2.0 * s) / (n - 1.0) * j_inf)
    pac_n = 1 + math.ceil(
        (4.0 * (t_mix + 2.0 * s) / eps ** 2)
        * max(C_UERG ** 2 * j_inf, 576.0 * math.log(2.0 / delta))
    )
    return {"mad_bound": mad, "pac_n": pac_n}


# ---------------------------------------------------------------------------
# sample sizes for estimating the average mixing time


def atmix_sample_size(mode, xi, eps, delta, params, c_erg=64.0):
    """Trajectory length at which the mixing-time estimate lands in the
    [t_sharp(xi(1+eps)), t_sharp(xi(1-eps))] window w.p. 1 - delta.

    modes: "ergodic" (params: t_sharp_fn, bp_of_p, jp_of_p, p_grid),
    "uniform" (params: t_mix, j_inf), "finite" (params: t_mix, size).
    """
    if not 0.0 < eps < 1.0 or not 0.0 < delta < 1.0:
        raise InvalidRangeError("eps and delta must lie in (0,1)")
    if xi * (1.0 - eps) <= 0.0:
        raise InvalidBandError("xi(1-eps) must be positive")
    if mode == "ergodic":
        t_sharp_fn = params["t_sharp_fn"]
        bp_of_p = params["bp_of_p"]
        jp_of_p = params["jp_of_p"]
        grid = params.get("p_grid", DEFAULT_P_GRID)
        log_term = math.log(1.0 / delta)
        xi_ed = eps ** 2 * delta / (c_erg * log_term)
        t_sharp_ed = t_sharp_fn(xi_ed)
        t_sharp_xi = t_sharp_fn(xi)
        best = INF
        for p in grid:  # smallest p wins ties
            try:
                val = bp_of_p(p) * jp_of_p(p)
            except HypothesisViolatedError:
                continue
            if val < best - 1e-15:
                best = val
        if not math.isfinite(best):
            raise InvalidRangeError("no p in the grid admits finite B_p J_p")
        return 1 + math.ceil(
            c_erg ** 2
            * t_sharp_ed
            / (xi ** 4 * eps ** 4)
            * best
            * math.log(4.0 * t_sharp_xi / delta)
        )
    if mode in ("uniform", "finite"):
        t_mix = params["t_mix"]
        if mode == "uniform":
            j_term = C_UERG ** 2 * params["j_inf"]
        else:
            j_term = C_UERG ** 2 * params["size"] ** 2
        levels = 1 + math.ceil(math.log2(1.0 / (xi * (1.0 - eps))))
        log_levels = max(1, math.ceil(math.log2(1.0 / xi)))
        return 1 + math.ceil(
            4.0
            * t_mix
            * levels
            / (xi ** 2 * eps ** 2)
            * max(j_term, 576.0 * math.log(4.0 * t_mix * log_levels / delta))
        )
    raise InvalidRangeError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# entropic-term certificates


@dataclass(frozen=True)
class VGeometric:
    V: np.ndarray
    M: float
    theta: float


@dataclass(frozen=True)
class Dominating:
    C: float
    nu: ProbabilityVector


@dataclass(frozen=True)
class WeakVGeometric:
    V: np.ndarray
    D: np.ndarray
    b: float


@dataclass(frozen=True)
class PolynomialGrowth:
    G: float
    q: float


def _r_exponent(p):
    if p != INF and p <= 1:
        raise InvalidRangeError("p must be > 1 or inf")
    return 0.5 if p == INF else (1.0 - 1.0 / p) / 2.0


def _rsum(v, r):
    return float((np.asarray(v, dtype=float) ** r).sum())


def jps_bound(cert, pi, p, s=1, t_sharp_xi=None):
    """Upper bound on the entropic term J_p^(s) from an ergodicity
    certificate; the polynomial-growth form bounds the sup over
    s <= t_sharp_xi instead of a single s."""
    r = _r_exponent(p)
    pvec = pi.entries
    pi_r = _rsum(pvec, r)
    if isinstance(cert, (WeakVGeometric, VGeometric)):
        if isinstance(cert, VGeometric):
            D = cert.M * cert.theta * np.asarray(cert.V, dtype=float)
            b = 0.0
            V = np.asarray(cert.V, dtype=float)
        else:
            V = np.asarray(cert.V, dtype=float)
            D = np.asarray(cert.D, dtype=float)
            b = cert.b
        drift = b * (s - 1)
        sqrt_j = pi_r ** 2 + _rsum(1.0 / V, r) * (
            _rsum(pvec * D, r) + pi_r * (drift ** r if drift > 0 else 0.0)
        )
        return sqrt_j ** 2
    if isinstance(cert, Dominating):
        return cert.C ** (2.0 * r) * _rsum(cert.nu.entries, r) ** 2 * pi_r ** 2
    if isinstance(cert, PolynomialGrowth):
        if t_sharp_xi is None:
            raise InvalidRangeError("polynomial growth needs t_sharp_xi")
        one_plus = 1.0 if p == INF else 1.0 + 1.0 / p
        return cert.G ** one_plus * float(t_sharp_xi) ** (cert.q * one_plus) * pi_r ** 2
    raise InvalidRangeError(f"unknown certificate {type(cert).__name__}")


def weak_vgeo_check(P, pi, V, D, b):
    """Entrywise verification of the drift certificate:
    sup_x' V(x')(P(x,x') - pi(x')) <= D(x) and (PD)(x) <= D(x) + b."""
    V = np.asarray(V, dtype=float)
    D = np.asarray(D, dtype=float)
    diff = P.rows - pi.entries[None, :]
    dom = (V[None, :] * diff).max(axis=1)
    dom_residual = float((dom - D).max())
    drift_residual = float((P.rows @ D - D - b).max())
    ok = dom_residual <= 1e-10 and drift_residual <= 1e-10
    return ok, {"domination_residual": dom_residual, "drift_residual": drift_residual}


# ---------------------------------------------------------------------------
# non-stationary starts and visit counts


def nonstationary_multiplier(mu, pi, q):
    """Weighted q-norm of the density d mu / d pi; enters the deviation
    transfer P_mu <= multiplier * P_pi^(1/r) via Holder."""
    if q <= 1:
        raise InvalidRangeError("q must be > 1")
    m = mu.entries
    p = pi.entries
    if np.any((p == 0) & (m > 0)):
        raise NotAbsolutelyContinuousError("mu puts mass where pi does not")
    ratio = np.divide(m, p, out=np.zeros_like(m), where=p > 0)
    return float((p @ ratio ** q) ** (1.0 / q))


def variance_bound_visits(pi_x, p, n, bp):
    """4 (n-1) pi(x)^(1-1/p) B_p, a variance bound on the visit count."""
    if p < 1:
        raise InvalidRangeError("p must be >= 1")
    pinv = 0.0 if p == INF else 1.0 / p
    return 4.0 * (n - 1.0) * pi_x ** (1.0 - pinv) * bp
