"""Seeded random states, ensembles and codes for property checks."""

from __future__ import annotations

import numpy as np

from .compression import CompressionCode
from .source import Ensemble


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return 0.5 * (a + a.conj().T)


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_distribution(m: int, rng: np.random.Generator) -> np.ndarray:
    p = rng.dirichlet(np.ones(m))
    return p / p.sum()


def random_ensemble(
    n: int, m: int, rng: np.random.Generator, *, mixed: bool = True
) -> Ensemble:
    """``m`` random signals in dimension ``n``; ranks are random when ``mixed``."""
    sigs = []
    for _ in range(m):
        rank = int(rng.integers(1, n + 1)) if mixed else 1
        sigs.append(random_density(n, rng, rank))
    return Ensemble(random_distribution(m, rng), tuple(sigs))


def random_code(n: int, d: int, rng: np.random.Generator) -> CompressionCode:
    """Random ``d``-dimensional subspace with a random fiducial state inside it."""
    basis = random_unitary(n, rng)[:, :d]
    f = basis @ random_state(d, rng)
    return CompressionCode(basis, f / np.linalg.norm(f))


def random_supported_density(basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random density operator supported on the span of ``basis`` columns."""
    d = basis.shape[1]
    return basis @ random_density(d, rng) @ basis.conj().T


def random_orthogonal_support_ensemble(n: int, m: int, rng: np.random.Generator) -> Ensemble:
    """Signals living on mutually orthogonal subspaces of a random basis (``m <= n``)."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    u = random_unitary(n, rng)
    cuts = np.sort(rng.choice(np.arange(1, n), size=m - 1, replace=False)) if m > 1 else []
    groups = np.split(np.arange(n), cuts)
    sigs = []
    for g in groups:
        b = u[:, g]
        rank = int(rng.integers(1, len(g) + 1))
        sigs.append(b @ random_density(len(g), rng, rank) @ b.conj().T)
    return Ensemble(random_distribution(m, rng), tuple(sigs))
