"""Example chain constructors and their closed-form analytics: the two-point
family, birth--death chains, the Chebyshev-type random walk, and the
heavy-tailed star family with its truncations and beta sandwich bounds."""

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import ProbabilityVector, StochasticMatrix, stationary_distribution
from .errors import (
    BudgetExhaustedError,
    InvalidLambdaError,
    InvalidRangeError,
    InvalidSequenceError,
    NotInSError,
    NotInTError,
    SummabilityFailureError,
    TailTooHeavyError,
    TruncationTooCoarseError,
    WrongNuShapeError,
)
from .mixing import mixing_times
from .special import _BERNOULLI


# ---------------------------------------------------------------------------
# closed-form sequences over integer indices (used for mu, nu and their tails)


def _power_tail(a, K):
    """sum_{x > K} x^(-a) for a > 1, Euler--Maclaurin from a safe offset."""
    if a <= 1.0:
        raise SummabilityFailureError(f"power-tail exponent {a} <= 1")
    N = max(K + 1, 16)
    total = 0.0
    for x in range(K + 1, N):
        total += x ** (-a)
    total += N ** (1.0 - a) / (a - 1.0)
    total += 0.5 * N ** (-a)
    factor = N ** (-a - 1.0) * a
    fact = 2.0
    for j, b2j in enumerate(_BERNOULLI, start=1):
        total += b2j / fact * factor
        factor *= (a + 2 * j - 1) * (a + 2 * j) / (N * N)
        fact *= (2 * j + 1) * (2 * j + 2)
    return total


class Sequence:
    """A real sequence over integers x >= first."""

    first = 2

    def value(self, x):
        raise NotImplementedError

    def values(self, xs):
        return np.array([self.value(int(x)) for x in np.asarray(xs)])

    def power_form(self):
        """(x0, coeff, exponent) if value(x) = coeff * x**-exponent for x >= x0."""
        return None


@dataclass(frozen=True)
class PowerSequence(Sequence):
    coeff: float
    exponent: float
    first: int = 2

    def value(self, x):
        return self.coeff * float(x) ** (-self.exponent)

    def values(self, xs):
        return self.coeff * np.asarray(xs, dtype=float) ** (-self.exponent)

    def power_form(self):
        return (self.first, self.coeff, self.exponent)


@dataclass(frozen=True)
class CappedPowerSequence(Sequence):
    """min(cap, coeff * x**-exponent); e.g. nu_x = min(1/2, 1/x^a)."""

    cap: float
    coeff: float
    exponent: float
    first: int = 2

    def value(self, x):
        return min(self.cap, self.coeff * float(x) ** (-self.exponent))

    def values(self, xs):
        xs = np.asarray(xs, dtype=float)
        return np.minimum(self.cap, self.coeff * xs ** (-self.exponent))

    def power_form(self):
        x0 = self.first
        while self.coeff * float(x0) ** (-self.exponent) > self.cap:
            x0 += 1
        return (x0, self.coeff, self.exponent)


@dataclass(frozen=True)
class GeometricSequence(Sequence):
    coeff: float
    ratio: float
    first: int = 2

    def value(self, x):
        return self.coeff * self.ratio ** x

    def values(self, xs):
        return self.coeff * self.ratio ** np.asarray(xs, dtype=float)


@dataclass(frozen=True)
class TableSequence(Sequence):
    table: tuple
    first: int = 2

    def value(self, x):
        i = x - self.first
        if 0 <= i < len(self.table):
            return float(self.table[i])
        return 0.0


def sequence_tail(terms, K):
    """sum_{x > K} of prod_i seq_i(x)**pw_i.

    terms: list of (Sequence, power) pairs.  Power-law factors are summed
    analytically; everything else by block summation until the terms vanish.
    """
    forms = [s.power_form() for s, _ in terms]
    if all(f is not None for f in forms):
        expo = sum(f[2] * pw for f, (_, pw) in zip(forms, terms))
        coeff = 1.0
        for f, (_, pw) in zip(forms, terms):
            coeff *= f[1] ** pw
        x0 = max([K + 1] + [f[0] for f in forms])
        head = 0.0
        if x0 > K + 1:
            xs = np.arange(K + 1, x0)
            vals = np.ones(len(xs))
            for s, pw in terms:
                vals = vals * s.values(xs) ** pw
            head = float(vals.sum())
        return head + coeff * _power_tail(expo, x0 - 1)
    # numeric fallback: fine for geometrically decaying or finite sequences
    total = 0.0
    x = K + 1
    block = 256
    while x <= K + (1 << 26):
        xs = np.arange(x, x + block)
        vals = np.ones(block)
        for s, pw in terms:
            vals = vals * s.values(xs) ** pw
        part = float(vals.sum())
        if not math.isfinite(part):
            raise SummabilityFailureError("series term overflow")
        total += part
        if part <= 1e-17 * total + 1e-300:
            return total
        x += block
        block = min(2 * block, 1 << 20)
    raise SummabilityFailureError("series did not converge numerically")


def sequence_sum(terms):
    """Full series from the common first index."""
    first = max(s.first for s, _ in terms)
    return sequence_tail(terms, first - 1)


def normalized(seq):
    """Rescale a summable sequence so it sums to 1 over x >= first."""
    total = sequence_sum([(seq, 1.0)])
    if isinstance(seq, PowerSequence):
        return PowerSequence(seq.coeff / total, seq.exponent, seq.first)
    if isinstance(seq, GeometricSequence):
        return GeometricSequence(seq.coeff / total, seq.ratio, seq.first)
    if isinstance(seq, TableSequence):
        return TableSequence(tuple(v / total for v in seq.table), seq.first)
    raise InvalidSequenceError(f"cannot rescale {type(seq).__name__}")


# ---------------------------------------------------------------------------
# two-point family


@dataclass(frozen=True)
class TwoPointChain:
    p: float
    q: float

    def __post_init__(self):
        if not (0.0 < self.p < 1.0 and 0.0 < self.q < 1.0):
            raise InvalidRangeError("two-point parameters must lie in (0,1)")

    def matrix(self):
        p, q = self.p, self.q
        return StochasticMatrix(np.array([[1 - p, p], [q, 1 - q]]))


def two_point_closed_forms(c: TwoPointChain, t):
    """Closed-form average (d_sharp) and worst-case (d) distances at time t."""
    p, q = c.p, c.q
    s = p + q
    rho = abs(1.0 - s) ** t
    return {
        "d_sharp": 2.0 * p * q / s ** 2 * rho,
        "d": max(p, q) / s * rho,
        "pi": ProbabilityVector(np.array([q, p]) / s),
    }


def gap_search(xi, M, budget=60):
    """Find a two-point (p, q) whose worst-case/average mixing-time ratio
    exceeds M at proximity xi; verified exactly on the 2x2 matrix."""
    if M < 1:
        raise InvalidRangeError("M must be >= 1")
    if not 0.0 < xi < 1.0:
        raise InvalidRangeError("xi must lie in (0,1)")
    q = min(0.4, math.log(1.0 / xi) / (2.0 * M))
    eta = min(0.5, xi / 2.0)
    for _ in range(budget):
        p = eta * q
        chain = TwoPointChain(p, q)
        t_cap = max(16, int(8.0 * math.log(1.0 / xi) / (p + q)) + 2)
        pi = ProbabilityVector(np.array([q, p]) / (p + q))
        rep = mixing_times(chain.matrix(), pi, xi, t_cap)
        if (
            math.isfinite(rep.t_mix)
            and rep.t_mix > M * rep.t_sharp
        ):
            return {
                "p": p,
                "q": q,
                "ratio": rep.t_mix / rep.t_sharp,
                "t_mix": int(rep.t_mix),
                "t_sharp": int(rep.t_sharp),
            }
        q *= 0.5
    raise BudgetExhaustedError(f"no two-point pair beat ratio {M} in {budget} tries")


# ---------------------------------------------------------------------------
# birth--death chains


@dataclass(frozen=True)
class BirthDeathSpec:
    u: np.ndarray  # down-move probabilities, u[0] corresponds to state 1
    v: np.ndarray  # stay probabilities
    w: np.ndarray  # up-move probabilities
    K: int
    boundary: str = "reflect"


def build_birth_death(spec: BirthDeathSpec):
    """Tridiagonal row-stochastic matrix on K states with a repaired last row.

    Returns the matrix plus the mass folded back at the boundary.
    """
    K = spec.K
    if K < 2:
        raise InvalidSequenceError("need K >= 2")
    u = np.asarray(spec.u, dtype=float)[:K].copy()
    v = np.asarray(spec.v, dtype=float)[:K].copy()
    w = np.asarray(spec.w, dtype=float)[:K].copy()
    if len(u) < K or len(v) < K or len(w) < K:
        raise InvalidSequenceError("sequences shorter than the truncation")
    if u[0] != 0.0:
        raise InvalidSequenceError("u(1) must be 0")
    if np.any(u < 0) or np.any(v < 0) or np.any(w < 0):
        raise InvalidSequenceError("negative band entry")
    if np.abs(u + v + w - 1.0).max() > 1e-9:
        raise InvalidSequenceError("band rows do not sum to 1")
    repaired = float(w[K - 1])
    if spec.boundary in ("reflect", "absorb-to-self"):
        v[K - 1] += w[K - 1]
        w[K - 1] = 0.0
    else:
        raise InvalidSequenceError(f"unknown boundary tag {spec.boundary!r}")
    P = np.zeros((K, K))
    idx = np.arange(K)
    P[idx, idx] = v
    P[idx[:-1], idx[:-1] + 1] = w[:-1]
    P[idx[1:], idx[1:] - 1] = u[1:]
    return {"P": StochasticMatrix(P), "repaired_mass": repaired, "boundary": spec.boundary}


def birth_death_geometric_rate(u, v, w):
    """Reference geometric rate max(v + 2 sqrt(uw), w/(w+v)) for constant bands."""
    return max(v + 2.0 * math.sqrt(u * w), w / (w + v))


# ---------------------------------------------------------------------------
# Chebyshev-type random walk


@dataclass(frozen=True)
class ChebyshevSpec:
    theta: float
    lam: float
    K: int

    def __post_init__(self):
        if self.theta <= 0:
            raise InvalidRangeError("theta must be > 0")
        th = self.theta
        if self.lam < 2.0 * th ** 2 / ((1.0 + th) * (1.0 + 3.0 * th)) - 1e-15:
            raise InvalidLambdaError(
                f"lambda {self.lam} below validity threshold for theta={th}"
            )
        if self.K < 3:
            raise InvalidRangeError("need K >= 3")


def chebyshev_band(spec: ChebyshevSpec):
    th, lam, K = spec.theta, spec.lam, spec.K
    n = np.arange(1, K + 1, dtype=float)
    u = (1.0 / (2.0 * (1.0 + lam))) * (1.0 + (2 * n - 1) * th) / (1.0 + (2 * n - 3) * th)
    w = (1.0 / (2.0 * (1.0 + lam))) * (1.0 + (2 * n - 3) * th) / (1.0 + (2 * n - 1) * th)
    u[0] = 0.0
    w[0] = 1.0 / ((1.0 + lam) * (th + 1.0))
    v = 1.0 - u - w
    return u, v, w


def chebyshev_pi_weight(theta, n):
    n = np.asarray(n, dtype=float)
    return 2.0 * (1.0 + theta) * theta / ((1.0 + (2 * n - 1) * theta) * (1.0 + (2 * n - 3) * theta))


def chebyshev_chain(spec: ChebyshevSpec):
    """Build the truncated walk; the displayed stationary weight telescopes to
    total (1+theta)/(1-theta) when theta < 1, so it is renormalized here."""
    u, v, w = chebyshev_band(spec)
    built = build_birth_death(BirthDeathSpec(u, v, w, spec.K))
    weights = chebyshev_pi_weight(spec.theta, np.arange(1, spec.K + 1))
    th = spec.theta
    tail_mass = (1.0 + th) / (1.0 + (2 * spec.K - 1) * th)
    return {
        "P": built["P"],
        "pi_formula": weights / weights.sum(),
        "tail_mass": float(tail_mass),
    }


# ---------------------------------------------------------------------------
# the star-shaped heavy-tailed family and its truncations


@dataclass(frozen=True)
class PTSpec:
    q: float
    mu: Sequence
    nu: Sequence
    K: int
    in_T: bool = field(default=None)
    in_S: bool = field(default=None)

    def __post_init__(self):
        if self.K < 2:
            raise InvalidRangeError("need K >= 2")
        xs = np.arange(2, self.K + 1)
        mu_vals = self.mu.values(xs)
        nu_vals = self.nu.values(xs)
        in_t = self.q > 0.0 and np.all(mu_vals > 0) and np.all(nu_vals > 0)
        if in_t:
            try:
                sequence_sum([(self.mu, 1.0), (self.nu, -1.0)])
            except SummabilityFailureError:
                in_t = False
        in_s = (
            in_t
            and self.q <= 0.25
            and np.all(nu_vals <= 0.5)
            and np.all(np.diff(nu_vals) <= 1e-15)
        )
        object.__setattr__(self, "in_T", bool(in_t))
        object.__setattr__(self, "in_S", bool(in_s))


def _pt_normalizer(spec):
    # Z = 1 + q * sum_{y>=2} mu_y / nu_y
    return 1.0 + spec.q * sequence_sum([(spec.mu, 1.0), (spec.nu, -1.0)])


def pt_stationary_value(spec, x):
    """pi_T(x) from the closed form on the full (untruncated) state space."""
    Z = _pt_normalizer(spec)
    if x == 1:
        return 1.0 / Z
    return spec.q * spec.mu.value(x) / (spec.nu.value(x) * Z)


def pt_chain(spec: PTSpec):
    """Truncated transition matrix on states 1..K plus the closed-form
    stationary law restricted to the truncation."""
    if not spec.in_T:
        raise NotInTError("triple fails the positivity/summability conditions")
    K = spec.K
    xs = np.arange(2, K + 1)
    mu_vals = spec.mu.values(xs)
    nu_vals = spec.nu.values(xs)
    mu_tail = sequence_tail([(spec.mu, 1.0)], K)
    mu_total = mu_vals.sum() + mu_tail
    if abs(mu_total - 1.0) > 1e-9:
        raise NotInTError(f"mu sums to {mu_total}, expected 1")
    P = np.zeros((K, K))
    # lost outward mass folds back onto state 1 so the row stays stochastic
    P[0, 0] = 1.0 - spec.q + spec.q * mu_tail
    P[0, 1:] = spec.q * mu_vals
    P[1:, 0] = nu_vals
    idx = np.arange(1, K)
    P[idx, idx] = 1.0 - nu_vals
    Z = _pt_normalizer(spec)
    weights = np.empty(K)
    weights[0] = 1.0 / Z
    weights[1:] = spec.q * mu_vals / (nu_vals * Z)
    tail_mass = spec.q * sequence_tail([(spec.mu, 1.0), (spec.nu, -1.0)], K) / Z
    if tail_mass > 0.1:
        raise TruncationTooCoarseError(f"stationary tail mass {tail_mass:.3g} > 0.1")
    return {
        "P_TK": StochasticMatrix(P),
        "pi_T": ProbabilityVector(weights / weights.sum()),
        "tail_mass": float(tail_mass),
    }


def pt_beta_upper(spec: PTSpec, t, K_inner):
    """2(1-nu_K)^t + 7 * stationary tail + 2 t q * mu tail, tails at K_inner."""
    if not spec.in_S:
        raise NotInSError("triple is not in the restricted class")
    if t < 0:
        raise InvalidRangeError("t must be >= 0")
    Z = _pt_normalizer(spec)
    pi_tail = spec.q * sequence_tail([(spec.mu, 1.0), (spec.nu, -1.0)], K_inner) / Z
    if pi_tail > 0.5:
        raise TailTooHeavyError(f"stationary tail {pi_tail:.3g} > 1/2 at K={K_inner}")
    mu_tail = sequence_tail([(spec.mu, 1.0)], K_inner)
    nu_K = spec.nu.value(K_inner)
    return 2.0 * (1.0 - nu_K) ** t + 7.0 * pi_tail + 2.0 * t * spec.q * mu_tail


def pt_beta_upper_best(spec, t, grid=None):
    """Minimize the upper bound over a log-spaced K_inner grid (ties: smallest)."""
    if grid is None:
        grid = sorted({max(2, int(round(g))) for g in np.geomspace(2, max(4, 50 * (t + 1)), 40)})
    best = math.inf
    for k in grid:
        try:
            val = pt_beta_upper(spec, t, k)
        except TailTooHeavyError:
            continue
        if val < best - 1e-15:
            best = val
    return best


def pt_beta_lower(spec: PTSpec, t, a):
    """Lower bound (pi(x_t)/2)(1/4 - pi(x_t)) with x_t = ceil(t^(1/a)),
    valid when nu_x = min(1/2, 1/x^a)."""
    if not spec.in_S:
        raise NotInSError("triple is not in the restricted class")
    if t < 2:
        raise InvalidRangeError("t must be >= 2")
    xs = np.arange(2, spec.K + 1)
    expected = np.minimum(0.5, xs.astype(float) ** (-a))
    if np.abs(spec.nu.values(xs) - expected).max() > 1e-12:
        raise WrongNuShapeError("nu does not match min(1/2, 1/x^a)")
    x_t = max(2, math.ceil(t ** (1.0 / a)))
    pi_val = pt_stationary_value(spec, x_t)
    return (pi_val / 2.0) * (0.25 - pi_val)


def pt_weak_vgeo_certificate(spec: PTSpec, p):
    """Drift certificate V(1)=D(1)=1, V(k)=D(k)=1/sqrt(mu_k), b = q sum sqrt(mu).

    summability carries the value of sum mu^((1-1/p)/4) / nu^((1-1/p)/2),
    whose finiteness the certificate requires.
    """
    if p <= 1:
        raise InvalidRangeError("p must be > 1")
    r = (1.0 - 1.0 / p) / 2.0
    summability = sequence_sum([(spec.mu, r / 2.0), (spec.nu, -r)])
    xs = np.arange(2, spec.K + 1)
    mu_vals = spec.mu.values(xs)
    V = np.empty(spec.K)
    V[0] = 1.0
    V[1:] = 1.0 / np.sqrt(mu_vals)
    b = spec.q * sequence_sum([(spec.mu, 0.5)])
    return {"V": V, "D": V.copy(), "b": float(b), "summability": float(summability)}


# ---------------------------------------------------------------------------
# JSON family specs


def _sequence_from_json(obj):
    kind = obj.get("kind")
    first = int(obj.get("first", 2))
    if kind == "power":
        seq = PowerSequence(float(obj["coeff"]), float(obj["exponent"]), first)
    elif kind == "capped_power":
        seq = CappedPowerSequence(
            float(obj["cap"]), float(obj["coeff"]), float(obj["exponent"]), first
        )
    elif kind == "geometric":
        seq = GeometricSequence(float(obj["coeff"]), float(obj["ratio"]), first)
    elif kind == "table":
        seq = TableSequence(tuple(float(v) for v in obj["values"]), first)
    else:
        raise InvalidSequenceError(f"unknown sequence kind {kind!r}")
    if obj.get("normalize"):
        seq = normalized(seq)
    return seq


def build_family(obj):
    """Build a chain from a JSON-style spec:
    {"family": ..., "params": {...}, "truncation": K}."""
    family = obj.get("family")
    params = obj.get("params", {})
    if family == "two_point":
        chain = TwoPointChain(float(params["p"]), float(params["q"]))
        P = chain.matrix()
        return {"P": P, "pi": stationary_distribution(P), "family": family}
    if family == "birth_death":
        spec = BirthDeathSpec(
            np.asarray(params["u"], dtype=float),
            np.asarray(params["v"], dtype=float),
            np.asarray(params["w"], dtype=float),
            int(obj["truncation"]),
            params.get("boundary", "reflect"),
        )
        built = build_birth_death(spec)
        P = built["P"]
        return {"P": P, "pi": stationary_distribution(P), "family": family,
                "repaired_mass": built["repaired_mass"]}
    if family == "chebyshev":
        spec = ChebyshevSpec(float(params["theta"]), float(params["lambda"]),
                             int(obj["truncation"]))
        built = chebyshev_chain(spec)
        P = built["P"]
        return {"P": P, "pi": stationary_distribution(P), "family": family,
                "tail_mass": built["tail_mass"]}
    if family == "pt":
        spec = PTSpec(
            float(params["q"]),
            _sequence_from_json(params["mu"]),
            _sequence_from_json(params["nu"]),
            int(obj["truncation"]),
        )
        built = pt_chain(spec)
        P = built["P_TK"]
        return {"P": P, "pi": stationary_distribution(P), "family": family,
                "pi_formula": built["pi_T"], "tail_mass": built["tail_mass"],
                "spec": spec}
    raise InvalidSequenceError(f"unknown family {family!r}")
