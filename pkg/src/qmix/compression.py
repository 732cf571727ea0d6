"""Typical-subspace coding: subspace selection, the projection channel, bounds.

A code is a ``d``-dimensional subspace with projector ``P`` and a fiducial
unit vector inside it. The channel keeps the part of a signal inside the
subspace and replaces the discarded weight by the fiducial state::

    W = P Pi P + (1 - Tr(Pi P)) |0><0|
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import (
    DEFAULT_CAPS,
    DEFAULT_TOLERANCES,
    Caps,
    ResourceLimitError,
    Tolerances,
    ValidationError,
)
from .linalg import hermitian_eigendecomposition, ket_bra, projector
from .metrics import distortion
from .source import Ensemble, average_purity, ensemble_density, signal_spectrum


@dataclass(frozen=True)
class CompressionCode:
    """A code subspace given by orthonormal basis columns and a fiducial state."""

    basis: np.ndarray
    fiducial: np.ndarray | None = None
    tol: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False, compare=False)
    projector: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        b = np.array(self.basis, dtype=np.complex128)
        if b.ndim == 1:
            b = b[:, None]
        n, d = b.shape
        if not 1 <= d <= n:
            raise ValidationError(f"code dimension {d} out of range [1, {n}]")
        gram = b.conj().T @ b
        err = float(np.max(np.abs(gram - np.eye(d))))
        if err > self.tol.reconstruction:
            raise ValidationError(f"code basis is not orthonormal (Gram defect {err:.3e})")
        f = b[:, 0].copy() if self.fiducial is None else np.array(self.fiducial, dtype=np.complex128)
        if f.shape != (n,):
            raise ValidationError(f"fiducial has shape {f.shape}, expected ({n},)")
        if abs(np.linalg.norm(f) - 1.0) > self.tol.unit_norm:
            raise ValidationError("fiducial state is not normalised")
        p = projector(b)
        if np.linalg.norm(p @ f - f) > self.tol.reconstruction:
            raise ValidationError("fiducial state does not lie in the code subspace")
        for arr in (b, f, p):
            arr.setflags(write=False)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "fiducial", f)
        object.__setattr__(self, "projector", p)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def d(self) -> int:
        return self.basis.shape[1]


def select_typical_subspace(rho, d: int, tol: Tolerances = DEFAULT_TOLERANCES) -> CompressionCode:
    """Code spanned by the eigenvectors of the ``d`` largest eigenvalues of ``rho``.

    The fiducial is the first basis vector. Ties at the boundary are broken
    by the eigensolver's deterministic ordering.
    """
    eig = hermitian_eigendecomposition(rho, tol)
    n = len(eig)
    if not 1 <= d <= n:
        raise ValidationError(f"code dimension {d} out of range [1, {n}]")
    return CompressionCode(eig.eigenvectors[:, :d], tol=tol)


def apply_code(c: CompressionCode, pi) -> np.ndarray:
    """Encode and decode one signal through the code's projection channel."""
    pi = np.asarray(pi, dtype=np.complex128)
    if pi.shape != (c.dim, c.dim):
        raise ValidationError(f"signal shape {pi.shape} does not match code dimension {c.dim}")
    p = c.projector
    kept = p @ pi @ p
    lost = max(0.0, 1.0 - float(np.trace(kept).real))
    w = kept + lost * ket_bra(c.fiducial)
    w = 0.5 * (w + w.conj().T)
    w.setflags(write=False)
    return w


def _completed_basis(c: CompressionCode) -> np.ndarray:
    """Code basis followed by an orthonormal basis of its complement."""
    n, d = c.basis.shape
    if d == n:
        return c.basis
    comp = hermitian_eigendecomposition(np.eye(n) - c.projector, c.tol).eigenvectors[:, : n - d]
    return np.hstack([c.basis, comp])


def apply_code_spectral(c: CompressionCode, pi) -> np.ndarray:
    """The channel evaluated eigenstate by eigenstate in block coordinates.

    Each eigenstate ``|a_i>`` of the signal is written in the basis
    ``(b_1..b_d, b_{d+1}..b_n)``; its upper-left ``d x d`` block ``M`` is
    kept and ``1 - Tr M`` of fiducial weight added, then the results are
    mixed with the eigen-weights. Independent route to :func:`apply_code`.
    """
    spec = signal_spectrum(pi, c.tol)
    full = _completed_basis(c)
    d = c.d
    f = full.conj().T @ c.fiducial
    out = np.zeros((c.dim, c.dim), dtype=np.complex128)
    for q, k in zip(spec.weights, range(len(spec))):
        coords = full.conj().T @ spec.states[:, k]
        block = np.zeros_like(out)
        block[:d, :d] = np.outer(coords[:d], coords[:d].conj())
        w_i = block + (1.0 - float(np.trace(block).real)) * np.outer(f, f.conj())
        out += q * w_i
    return full @ out @ full.conj().T


def encode_ensemble(c: CompressionCode, e: Ensemble) -> list[np.ndarray]:
    return [apply_code(c, s) for s in e.signals]


def top_mass(rho, d: int, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Sum of the ``d`` largest eigenvalues of ``rho``."""
    lam = hermitian_eigendecomposition(rho, tol).eigenvalues
    if not 1 <= d <= len(lam):
        raise ValidationError(f"code dimension {d} out of range [1, {len(lam)}]")
    return float(math.fsum(lam[:d].tolist()))


@dataclass(frozen=True)
class CodeReport:
    d: int
    xi: float
    eta: float
    distortion: float
    avg_purity: float

    @property
    def lemma1_bound(self) -> float:
        return 2.0 * self.xi

    @property
    def lemma2_floor(self) -> float:
        return self.avg_purity - 2.0 * self.eta

    def lemma1_holds(self, slack: float = DEFAULT_TOLERANCES.bound_slack) -> bool:
        return self.distortion <= self.lemma1_bound + slack

    def lemma2_holds(self, slack: float = DEFAULT_TOLERANCES.bound_slack) -> bool:
        return self.distortion >= self.lemma2_floor - slack


def code_report(c: CompressionCode, e: Ensemble) -> CodeReport:
    """Distortion of ``c`` on ``e`` together with the typical-mass quantities.

    ``xi`` is the weight of the ensemble state outside the code subspace and
    ``eta`` the largest weight any ``d``-dimensional subspace can hold.
    """
    if c.dim != e.dim:
        raise ValidationError(f"code dimension {c.dim} does not match ensemble dimension {e.dim}")
    rho = ensemble_density(e)
    xi = 1.0 - float(np.vdot(rho, c.projector).real)
    eta = top_mass(rho, c.d, e.tol)
    d_val = distortion(e, encode_ensemble(c, e))
    return CodeReport(c.d, xi, eta, d_val, average_purity(e))


def lemma2_floor(e: Ensemble, d: int) -> float:
    """Lower bound on the distortion of any code supported on ``d`` dimensions."""
    return average_purity(e) - 2.0 * top_mass(ensemble_density(e), d, e.tol)


def dimension_for_rate(K: int, rate: float, n: int, caps: Caps = DEFAULT_CAPS) -> int:
    """Code dimension available at ``rate`` qubits per signal for blocks of ``K``.

    ``floor(2**(K*rate))`` clamped to ``[1, n**K]``. A ``1e-9`` guard keeps
    exact powers of two (e.g. ``K*rate == 3``) from rounding down.
    """
    if K < 1:
        raise ValidationError(f"block length must be >= 1, got {K}")
    if rate < 0 or not math.isfinite(rate):
        raise ValidationError(f"rate must be a finite nonnegative number, got {rate!r}")
    full_log = K * math.log2(n)
    if K * rate >= full_log:
        d = n**K
    else:
        d = max(1, math.floor(2.0 ** (K * rate) + 1e-9))
        d = min(d, n**K)
    if d > caps.max_dim:
        raise ResourceLimitError(
            f"code dimension {d} for K={K}, rate={rate} exceeds enumeration cap {caps.max_dim}"
        )
    return d
