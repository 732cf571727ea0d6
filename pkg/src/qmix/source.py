"""Quantum sources: ensembles of mixed signal states and their block versions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .config import (
    DEFAULT_CAPS,
    DEFAULT_TOLERANCES,
    Caps,
    ResourceLimitError,
    Tolerances,
    ValidationError,
)
from .linalg import (
    as_state,
    hermitian_eigendecomposition,
    ket_bra,
    tensor_power,
    tensor_product_all,
    trace_of_square,
    validate_density,
)


def pure_state(psi, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Density operator ``|psi><psi|`` of a unit vector."""
    return ket_bra(as_state(psi, tol))


def validate_distribution(p, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError("probability list must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(p)):
        raise ValidationError("probability list contains non-finite values")
    if np.any(p < 0):
        k = int(np.argmin(p))
        raise ValidationError(f"probability {k} is negative: {p[k]!r}")
    total = float(p.sum())
    if abs(total - 1.0) > tol.probability:
        raise ValidationError(f"probabilities sum to {total!r}, expected 1")
    return p


@dataclass(frozen=True)
class Ensemble:
    """Probability-weighted list of signal density operators.

    Construction validates every signal and the distribution; the stored
    arrays are read-only.
    """

    probabilities: np.ndarray
    signals: tuple[np.ndarray, ...]
    label: str | None = None
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False, compare=False)

    def __post_init__(self):
        p = validate_distribution(self.probabilities, self.tol).copy()
        if len(self.signals) != p.size:
            raise ValidationError(
                f"{p.size} probabilities given for {len(self.signals)} signals"
            )
        certified = []
        dim = None
        for k, s in enumerate(self.signals):
            try:
                rho = validate_density(s, self.tol)
            except ValidationError as exc:
                raise ValidationError(f"signal {k}: {exc}") from None
            if dim is None:
                dim = rho.shape[0]
            elif rho.shape[0] != dim:
                raise ValidationError(
                    f"signal {k} has dimension {rho.shape[0]}, expected {dim}"
                )
            certified.append(rho)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "signals", tuple(certified))

    @classmethod
    def from_states(cls, probabilities, states, label=None) -> "Ensemble":
        """Ensemble of pure signals given as state vectors."""
        return cls(probabilities, tuple(pure_state(v) for v in states), label)

    @classmethod
    def _certified(cls, probabilities, signals, label=None, tol=DEFAULT_TOLERANCES) -> "Ensemble":
        # Skips validation; callers guarantee certified inputs.
        obj = object.__new__(cls)
        p = np.array(probabilities, dtype=float)
        p.setflags(write=False)
        for s in signals:
            s.setflags(write=False)
        object.__setattr__(obj, "probabilities", p)
        object.__setattr__(obj, "signals", tuple(signals))
        object.__setattr__(obj, "label", label)
        object.__setattr__(obj, "tol", tol)
        return obj

    @property
    def dim(self) -> int:
        return self.signals[0].shape[0]

    def __len__(self) -> int:
        return len(self.signals)

    def __iter__(self) -> Iterator[tuple[float, np.ndarray]]:
        return zip(self.probabilities.tolist(), self.signals)

    def is_pure(self) -> bool:
        return all(
            abs(hermitian_eigendecomposition(s, self.tol).eigenvalues[0] - 1.0) <= self.tol.pure
            for s in self.signals
        )


@dataclass(frozen=True)
class SignalSpectrum:
    """Eigen-weights and eigenstates of one signal, zero weights dropped."""

    weights: np.ndarray
    states: np.ndarray  # columns

    def __len__(self) -> int:
        return len(self.weights)


def ensemble_density(e: Ensemble) -> np.ndarray:
    """``rho = sum_a p_a Pi_a``."""
    rho = sum(p * s for p, s in e)
    return validate_density(rho, e.tol)


def shannon_entropy(p, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Shannon entropy in bits; zero-probability outcomes contribute nothing."""
    p = validate_distribution(p, tol)
    nz = p[p > 0]
    return float(max(0.0, -np.sum(nz * np.log2(nz))))


def entropy_of_spectrum(lam, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    lam = np.clip(np.asarray(lam, dtype=float), 0.0, 1.0)
    lam = lam[lam >= tol.entropy_cutoff]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def von_neumann_entropy(rho, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """``S(rho) = -Tr rho log2 rho`` in bits."""
    return entropy_of_spectrum(hermitian_eigendecomposition(rho, tol).eigenvalues, tol)


def average_purity(e: Ensemble) -> float:
    """``sum_a p_a Tr(Pi_a^2)``."""
    return float(sum(p * trace_of_square(s) for p, s in e))


def signal_spectrum(pi, tol: Tolerances = DEFAULT_TOLERANCES) -> SignalSpectrum:
    eig = hermitian_eigendecomposition(pi, tol)
    keep = eig.eigenvalues > tol.spectrum_cutoff
    w = eig.eigenvalues[keep].copy()
    v = eig.eigenvectors[:, keep].copy()
    w.setflags(write=False)
    v.setflags(write=False)
    return SignalSpectrum(w, v)


@dataclass(frozen=True)
class BlockEnsemble:
    """The ``K``-blocked version of a source.

    Signals are strings of base-signal indices. Block operators are only
    built on request, so iterating over a large block never holds more than
    one of them.
    """

    base: Ensemble
    K: int
    caps: Caps = field(default=DEFAULT_CAPS, repr=False, compare=False)

    def __post_init__(self):
        if self.K < 1:
            raise ValidationError(f"block length must be >= 1, got {self.K}")
        m = len(self.base)
        if m**self.K > self.caps.max_strings:
            raise ResourceLimitError(
                f"block ensemble has m**K = {m}**{self.K} = {m**self.K} signal strings, "
                f"cap is {self.caps.max_strings}"
            )

    @property
    def dim(self) -> int:
        return self.base.dim**self.K

    def __len__(self) -> int:
        return len(self.base) ** self.K

    def strings(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(range(len(self.base)), repeat=self.K)

    def string_array(self) -> np.ndarray:
        """All strings as an ``(m**K, K)`` integer array, lexicographic order."""
        m = len(self.base)
        idx = np.indices((m,) * self.K).reshape(self.K, -1).T
        return idx

    def probability(self, string: Sequence[int]) -> float:
        return math.prod(self.base.probabilities[s] for s in string)

    def probabilities(self) -> np.ndarray:
        p = self.base.probabilities
        out = p
        for _ in range(self.K - 1):
            out = np.multiply.outer(out, p).ravel()
        return out

    def signal(self, string: Sequence[int]) -> np.ndarray:
        return tensor_product_all([self.base.signals[s] for s in string], self.caps)

    def __iter__(self) -> Iterator[tuple[float, np.ndarray]]:
        for string in self.strings():
            yield self.probability(string), self.signal(string)

    def density(self) -> np.ndarray:
        """``rho^(tensor K)``."""
        return tensor_power(ensemble_density(self.base), self.K, self.caps)

    def average_purity(self) -> float:
        # purity is multiplicative over tensor factors
        return average_purity(self.base) ** self.K

    def materialize(self) -> Ensemble:
        """Dense :class:`Ensemble` of all ``m**K`` block signals."""
        if self.dim > self.caps.max_dense_dim:
            raise ResourceLimitError(
                f"block dimension {self.dim} exceeds dense cap {self.caps.max_dense_dim}"
            )
        # tensor products of certified density operators are certified
        probs, sigs = zip(*self)
        return Ensemble._certified(probs, sigs, tol=self.base.tol)


def block_ensemble(e: Ensemble, K: int, caps: Caps = DEFAULT_CAPS) -> BlockEnsemble:
    return BlockEnsemble(e, K, caps)
