import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avgmix.chain import (
    ProbabilityVector,
    StochasticMatrix,
    dobrushin_coefficient,
    is_ergodic,
    lp_quasi_norm,
    reversibility_residual,
    spectral_summary,
    stationary_distribution,
    tv_distance,
)
from avgmix.errors import (
    DimensionMismatchError,
    InvalidMatrixError,
    NonErgodicError,
    NotReversibleError,
    ZeroGapError,
)

from oracles import (
    jacobi_eigenvalues,
    random_ergodic_chain,
    random_reversible_chain,
    stationary_by_power_iteration,
)


def test_matrix_validation():
    with pytest.raises(InvalidMatrixError):
        StochasticMatrix(np.array([[0.5, 0.6], [0.5, 0.5]]))
    with pytest.raises(InvalidMatrixError):
        StochasticMatrix(np.array([[1.2, -0.2], [0.5, 0.5]]))
    # tiny row-sum error is repaired
    P = StochasticMatrix(np.array([[0.5, 0.5 + 3e-10], [0.3, 0.7]]))
    assert abs(P.rows.sum(axis=1) - 1.0).max() < 1e-14
    assert not P.rows.flags.writeable


def test_probability_vector_validation():
    with pytest.raises(InvalidMatrixError):
        ProbabilityVector(np.array([0.5, 0.6]))
    v = ProbabilityVector(np.array([0.25, 0.75]))
    assert v.size == 2


def test_tv_distance_basics():
    a = np.array([1.0, 0.0])
    b = np.array([0.0, 1.0])
    assert tv_distance(a, b) == 1.0
    assert tv_distance(a, a) == 0.0
    with pytest.raises(DimensionMismatchError):
        tv_distance(a, np.array([1.0, 0.0, 0.0]))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(2, 8))
def test_tv_metric_properties(seed, size):
    rng = np.random.default_rng(seed)
    a, b, c = rng.dirichlet(np.ones(size), size=3)
    dab, dbc, dac = tv_distance(a, b), tv_distance(b, c), tv_distance(a, c)
    assert 0.0 <= dab <= 1.0
    assert abs(dab - tv_distance(b, a)) < 1e-15
    assert dac <= dab + dbc + 1e-12


def test_is_ergodic_diagnoses():
    ok, diag = is_ergodic(StochasticMatrix(np.array([[1.0, 0.0], [0.0, 1.0]])))
    assert not ok and "reducible" in diag
    ok, diag = is_ergodic(StochasticMatrix(np.array([[0.0, 1.0], [1.0, 0.0]])))
    assert not ok and "period 2" in diag
    ok, _ = is_ergodic(StochasticMatrix(np.array([[0.5, 0.5], [0.5, 0.5]])))
    assert ok


def test_stationary_matches_power_iteration_oracle():
    rng = np.random.default_rng(11)
    for size in range(2, 11):
        P = random_ergodic_chain(rng, size)
        pi = stationary_distribution(P)
        oracle = stationary_by_power_iteration(P)
        assert np.abs(pi.entries - oracle).sum() < 1e-10


def test_stationary_rejects_nonergodic():
    with pytest.raises(NonErgodicError):
        stationary_distribution(StochasticMatrix(np.eye(3)))


def test_dobrushin_values_and_contraction():
    P = StochasticMatrix(np.array([[0.9, 0.1], [0.4, 0.6]]))
    assert abs(dobrushin_coefficient(P) - 0.5) < 1e-14
    rng = np.random.default_rng(5)
    for _ in range(20):
        A = random_ergodic_chain(rng, 5)
        B = random_ergodic_chain(rng, 5)
        AB = StochasticMatrix(A.rows @ B.rows)
        # sub-multiplicativity of the contraction coefficient
        assert dobrushin_coefficient(AB) <= (
            dobrushin_coefficient(A) * dobrushin_coefficient(B) + 1e-12
        )


def test_spectral_summary_matches_jacobi_oracle():
    rng = np.random.default_rng(3)
    for _ in range(10):
        P, pi = random_reversible_chain(rng, 6)
        assert reversibility_residual(P, pi) < 1e-12
        summary = spectral_summary(P, pi)
        d = np.sqrt(pi.entries)
        S = 0.5 * ((d[:, None] * P.rows) / d[None, :] + ((d[:, None] * P.rows) / d[None, :]).T)
        oracle = jacobi_eigenvalues(S)
        assert np.abs(np.sort(summary.eigenvalues) - np.sort(oracle)).max() < 1e-10
        assert summary.t_rel == pytest.approx(1.0 / summary.gamma_star)


def test_spectral_summary_rejects_nonreversible():
    P = StochasticMatrix(np.array([[0.1, 0.8, 0.1],
                                   [0.1, 0.1, 0.8],
                                   [0.8, 0.1, 0.1]]))
    pi = stationary_distribution(P)
    with pytest.raises(NotReversibleError):
        spectral_summary(P, pi)


def test_spectral_summary_zero_gap():
    # period-2 symmetric chain: eigenvalue -1 -> zero absolute gap
    P = StochasticMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    pi = ProbabilityVector(np.array([0.5, 0.5]))
    with pytest.raises(ZeroGapError) as exc:
        spectral_summary(P, pi)
    assert exc.value.summary.gamma_star <= 1e-12


def test_lp_quasi_norm():
    v = np.array([0.5, 0.5, 0.0])
    assert lp_quasi_norm(v, 0) == 2.0
    assert lp_quasi_norm(v, 2) == pytest.approx(math.sqrt(0.5))
    assert lp_quasi_norm(v, 0.5) == pytest.approx((2 * math.sqrt(0.5)) ** 2)
    with pytest.raises(ValueError):
        lp_quasi_norm(v, -1)
