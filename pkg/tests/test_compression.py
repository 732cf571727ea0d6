import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmix import sampling
from qmix.compression import (
    CompressionCode,
    apply_code,
    apply_code_spectral,
    code_report,
    dimension_for_rate,
    encode_ensemble,
    lemma2_floor,
    select_typical_subspace,
)
from qmix.config import Caps, ResourceLimitError, ValidationError
from qmix.linalg import ket_bra, trace_of_square
from qmix.metrics import distortion
from qmix.source import Ensemble, average_purity, ensemble_density, pure_state, signal_spectrum
from tests.oracles import eig2x2

H = 2**-0.5
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def zero_plus():
    return Ensemble.from_states([0.5, 0.5], [[1, 0], [H, H]])


def test_full_dimension_code_is_identity(rng):
    rho = sampling.random_density(4, rng)
    c = select_typical_subspace(rho, 4)
    np.testing.assert_allclose(c.projector, np.eye(4), atol=1e-12)
    pi = sampling.random_density(4, rng, 2)
    np.testing.assert_allclose(apply_code(c, pi), pi, atol=1e-12)


def test_diagonal_typical_subspace():
    e = Ensemble([0.9, 0.1], (pure_state([1, 0]), pure_state([0, 1])))
    c = select_typical_subspace(ensemble_density(e), 1)
    np.testing.assert_allclose(c.basis[:, 0], [1, 0], atol=1e-15)
    assert code_report(c, e).xi == pytest.approx(0.1, abs=1e-15)


def test_zero_plus_typical_subspace(zero_plus):
    c = select_typical_subspace(ensemble_density(zero_plus), 1)
    # eigenvector of [[.75,.25],[.25,.25]] for the larger eigenvalue
    np.testing.assert_allclose(c.basis[:, 0], [math.cos(math.pi / 8), math.sin(math.pi / 8)], atol=1e-12)
    rep = code_report(c, zero_plus)
    assert rep.xi == pytest.approx(eig2x2(0.75, 0.25, 0.25)[1], abs=1e-12)


def test_zero_plus_distortion_matches_beta_expansion(zero_plus):
    c = select_typical_subspace(ensemble_density(zero_plus), 1)
    v = (math.cos(math.pi / 8), math.sin(math.pi / 8))
    beta_sq = [1 - v[0] ** 2, 1 - ((v[0] + v[1]) * H) ** 2]
    expected = 2 * (0.5 * beta_sq[0] + 0.5 * beta_sq[1])
    assert expected == pytest.approx(1 - H, abs=1e-15)
    rep = code_report(c, zero_plus)
    assert rep.distortion == pytest.approx(expected, abs=1e-12)
    assert rep.lemma1_holds()
    assert rep.lemma2_holds()


def test_orthogonal_pure_signal_goes_to_fiducial():
    c = CompressionCode(np.array([[1, 0], [0, 1], [0, 0]], dtype=complex))
    w = apply_code(c, pure_state([0, 0, 1]))
    np.testing.assert_allclose(w, ket_bra(np.array([1, 0, 0])), atol=1e-15)


def test_select_rejects_bad_d(rng):
    rho = sampling.random_density(3, rng)
    with pytest.raises(ValidationError):
        select_typical_subspace(rho, 0)
    with pytest.raises(ValidationError):
        select_typical_subspace(rho, 4)


def test_code_validation():
    with pytest.raises(ValidationError, match="orthonormal"):
        CompressionCode(np.array([[1, 1], [0, 1]], dtype=complex))
    with pytest.raises(ValidationError, match="code subspace"):
        CompressionCode(np.array([[1], [0]], dtype=complex), fiducial=np.array([0, 1]))
    c = CompressionCode(np.array([[1], [0]], dtype=complex))
    with pytest.raises(ValidationError, match="does not match"):
        apply_code(c, np.eye(3) / 3)


def test_code_invariants(rng):
    c = sampling.random_code(5, 3, rng)
    p = c.projector
    assert np.linalg.norm(p @ p - p) < 1e-9
    assert abs(np.trace(p).real - 3) < 1e-9
    assert np.linalg.norm(p @ c.fiducial - c.fiducial) < 1e-9


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 6))
def test_channel_properties(seed, n):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, n + 1))
    c = sampling.random_code(n, d, rng)
    pis = [sampling.random_density(n, rng, int(rng.integers(1, n + 1))) for _ in range(3)]
    w = apply_code(c, pis[0])
    # certified density supported on the code
    assert abs(np.trace(w).real - 1) < 1e-12
    assert np.linalg.eigvalsh(w).min() > -1e-12
    out = np.eye(n) - c.projector
    assert trace_of_square(out @ w @ out) < 1e-9
    # idempotent
    assert trace_of_square(apply_code(c, w) - w) < 1e-9
    # linear
    q = sampling.random_distribution(3, rng)
    mixed = sum(qi * p for qi, p in zip(q, pis))
    lin = sum(qi * apply_code(c, p) for qi, p in zip(q, pis))
    assert np.max(np.abs(apply_code(c, mixed) - lin)) < 1e-10
    # eigenstate-by-eigenstate evaluation in block coordinates
    assert np.max(np.abs(apply_code_spectral(c, pis[0]) - w)) < 1e-10


def test_channel_independent_of_basis_inside_code(rng):
    c = sampling.random_code(5, 3, rng)
    rotated = CompressionCode(c.basis @ sampling.random_unitary(3, rng), fiducial=c.fiducial)
    pi = sampling.random_density(5, rng, 2)
    np.testing.assert_allclose(apply_code(c, pi), apply_code(rotated, pi), atol=1e-12)
    np.testing.assert_allclose(apply_code_spectral(rotated, pi), apply_code(c, pi), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(2, 6), st.integers(1, 4))
def test_lemma1_and_pure_refinement(seed, n, m):
    rng = np.random.default_rng(seed)
    e = sampling.random_ensemble(n, m, rng)
    rho = ensemble_density(e)
    probs, sigs = [], []
    for p, s in e:
        spec = signal_spectrum(s)
        for k, q in enumerate(spec.weights):
            probs.append(p * q)
            sigs.append(ket_bra(spec.states[:, k]))
    probs = np.array(probs)
    refined = Ensemble(probs / probs.sum(), tuple(sigs))
    for d in range(1, n + 1):
        c = select_typical_subspace(rho, d)
        rep = code_report(c, e)
        assert rep.distortion <= 2 * rep.xi + 1e-9
        assert rep.xi == pytest.approx(1 - rep.eta, abs=1e-9)
        refined_d = distortion(refined, encode_ensemble(c, refined))
        assert rep.distortion <= refined_d + 1e-10
        # pure signals saturate the projection-channel bound
        assert refined_d == pytest.approx(2 * rep.xi, abs=1e-9)


def test_lemma2_floor_examples(rng):
    e = sampling.random_ensemble(3, 2, rng)
    assert lemma2_floor(e, 3) == pytest.approx(average_purity(e) - 2, abs=1e-12)
    basis = np.eye(4)
    pure = Ensemble.from_states([0.3, 0.3, 0.2, 0.2], list(basis))
    assert lemma2_floor(pure, 1) == pytest.approx(0.4, abs=1e-12)
    with pytest.raises(ValidationError):
        lemma2_floor(pure, 5)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(2, 4), st.integers(1, 4))
def test_lemma2_against_random_codes(seed, n, m):
    rng = np.random.default_rng(seed)
    e = sampling.random_ensemble(n, m, rng)
    for d in range(1, n + 1):
        floor = lemma2_floor(e, d)
        for _ in range(20):
            c = sampling.random_code(n, d, rng)
            assert distortion(e, encode_ensemble(c, e)) >= floor - 1e-9
            ws = [sampling.random_supported_density(c.basis, rng) for _ in range(m)]
            assert distortion(e, ws) >= floor - 1e-9


def test_dimension_for_rate_examples():
    assert dimension_for_rate(8, 0.8, 2) == 84
    assert dimension_for_rate(5, 1.0, 2) == 32
    assert dimension_for_rate(5, 3.7, 2) == 32
    assert dimension_for_rate(6, 0.0, 3) == 1
    assert dimension_for_rate(3, 1.0, 4) == 8  # exact power of two
    assert dimension_for_rate(10, 0.3, 2) == 8


def test_dimension_for_rate_errors():
    with pytest.raises(ValidationError):
        dimension_for_rate(0, 0.5, 2)
    with pytest.raises(ValidationError):
        dimension_for_rate(3, -0.1, 2)
    with pytest.raises(ResourceLimitError):
        dimension_for_rate(30, 1.0, 2, Caps(max_dim=2**20))
