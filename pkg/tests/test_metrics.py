import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmix import sampling
from qmix.config import PreconditionError, ValidationError
from qmix.linalg import ket_bra, trace_of_square
from qmix.metrics import (
    distortion,
    distortion_terms,
    flat_distance_sq,
    naive_fidelity,
    operators_equal,
    pure_distance_sq,
    pure_fidelity,
)
from qmix.source import Ensemble, average_purity, pure_state

H = 2**-0.5
ZERO = np.array([1, 0])
ONE = np.array([0, 1])
PLUS = np.array([H, H])
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_pure_fidelity_examples():
    e = Ensemble.from_states([0.4, 0.6], [ZERO, PLUS])
    assert pure_fidelity(e, list(e.signals)) == pytest.approx(1.0, abs=1e-12)
    assert pure_fidelity(e, [ket_bra(ONE), ket_bra(np.array([H, -H]))]) == pytest.approx(0.0, abs=1e-12)
    single = Ensemble.from_states([1.0], [ZERO])
    assert pure_fidelity(single, [np.eye(2) / 2]) == pytest.approx(0.5)


def test_pure_fidelity_rejects_mixed():
    e = Ensemble([1.0], (np.eye(2) / 2,))
    with pytest.raises(PreconditionError, match="mixed"):
        pure_fidelity(e, [np.eye(2) / 2])


def test_naive_fidelity_examples(rng):
    e = sampling.random_ensemble(3, 3, rng)
    assert naive_fidelity(e, list(e.signals)) == pytest.approx(average_purity(e), abs=1e-12)
    e = Ensemble([1.0], (np.eye(2) / 2,))
    assert naive_fidelity(e, [np.eye(2) / 2]) == pytest.approx(0.5, abs=1e-12)
    top = np.diag([0.5, 0.5, 0, 0]).astype(complex)
    bottom = np.diag([0, 0, 0.5, 0.5]).astype(complex)
    assert naive_fidelity(Ensemble([1.0], (top,)), [bottom]) == 0


def test_pure_distance_examples():
    assert pure_distance_sq(PLUS, 1j * PLUS) == pytest.approx(0.0, abs=1e-15)
    assert pure_distance_sq(ZERO, ONE) == 4
    # |<0|+>|^2 = 1/2
    assert pure_distance_sq(ZERO, PLUS) == pytest.approx(4 * (1 - 0.5), abs=1e-15)
    with pytest.raises(ValidationError, match="dimension"):
        pure_distance_sq(ZERO, [1, 0, 0])


def test_flat_distance_examples(rng):
    rho = sampling.random_density(3, rng)
    assert flat_distance_sq(rho, rho) == 0
    assert flat_distance_sq(ket_bra(ZERO), ket_bra(ONE)) == pytest.approx(4)
    assert flat_distance_sq(ket_bra(ZERO), ket_bra(PLUS)) == pytest.approx(2, abs=1e-15)
    with pytest.raises(ValidationError):
        flat_distance_sq(np.eye(2), np.eye(3))


def test_distortion_examples():
    e = Ensemble.from_states([0.3, 0.7], [ZERO, PLUS])
    assert distortion(e, list(e.signals)) == 0
    flipped = [ket_bra(ONE), ket_bra(np.array([H, -H]))]
    assert distortion(e, flipped) == pytest.approx(2.0, abs=1e-12)


def test_distortion_reconstruction_map_forms():
    e = Ensemble.from_states([0.5, 0.5], [ZERO, ONE])
    ws = {0: ket_bra(ZERO), 1: np.eye(2) / 2}
    assert distortion(e, ws) == pytest.approx(0.5 * 0.5)
    with pytest.raises(ValidationError, match="signal 1"):
        distortion(e, {0: ket_bra(ZERO)})
    with pytest.raises(ValidationError, match="trace"):
        distortion(e, [ket_bra(ZERO), np.eye(2)])
    with pytest.raises(ValidationError, match="shape"):
        distortion(e, [ket_bra(ZERO), np.eye(3) / 3])


def test_operators_equal():
    assert operators_equal(np.eye(2) / 2, np.eye(2) / 2 + 1e-6 * np.diag([1, -1]))
    assert not operators_equal(np.eye(2) / 2, np.diag([0.6, 0.4]))


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(2, 8))
def test_flat_metric_restricts_to_fubini_study(seed, n):
    rng = np.random.default_rng(seed)
    psi, phi = sampling.random_state(n, rng), sampling.random_state(n, rng)
    assert abs(flat_distance_sq(ket_bra(psi), ket_bra(phi)) - pure_distance_sq(psi, phi)) < 1e-10


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(2, 6), st.integers(1, 4))
def test_distortion_range_and_expansion(seed, n, m):
    rng = np.random.default_rng(seed)
    e = sampling.random_ensemble(n, m, rng)
    ws = [sampling.random_density(n, rng, int(rng.integers(1, n + 1))) for _ in range(m)]
    d = distortion(e, ws)
    assert -1e-12 <= d <= 2 + 1e-12
    assert d == pytest.approx(distortion_terms(e, ws), abs=1e-10)
    assert naive_fidelity(e, list(e.signals)) == pytest.approx(average_purity(e), abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(2, 6), st.integers(2, 5))
def test_trace_square_convexity(seed, n, k):
    rng = np.random.default_rng(seed)
    q = sampling.random_distribution(k, rng)
    xs = [sampling.random_density(n, rng) - sampling.random_density(n, rng) for _ in range(k)]
    lhs = trace_of_square(sum(qi * x for qi, x in zip(q, xs)))
    rhs = sum(qi * trace_of_square(x) for qi, x in zip(q, xs))
    assert lhs <= rhs + 1e-10


def test_distortion_zero_iff_identical(rng):
    e = sampling.random_ensemble(3, 2, rng)
    ws = list(e.signals)
    assert distortion(e, ws) < 1e-12
    ws[1] = pure_state([1, 0, 0])
    assert distortion(e, ws) > 1e-3
