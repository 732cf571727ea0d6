"""Fidelities, the Fubini-Study and flat metrics, and the coding distortion.

A reconstruction map is anything indexable by signal position that yields
the reconstructed density operator ``W_a``: a list, a tuple, or a dict
keyed by signal index.
"""

from __future__ import annotations

from typing import Mapping, Sequence, Union

import numpy as np

from .config import DEFAULT_TOLERANCES, PreconditionError, Tolerances, ValidationError
from .linalg import as_state, hermitian_eigendecomposition, trace_of_square
from .source import Ensemble

ReconstructionMap = Union[Sequence[np.ndarray], Mapping[int, np.ndarray]]


def _reconstructions(e: Ensemble, r: ReconstructionMap) -> list[np.ndarray]:
    out = []
    for a in range(len(e)):
        try:
            w = r[a]
        except (KeyError, IndexError):
            raise ValidationError(f"reconstruction map has no entry for signal {a}") from None
        w = np.asarray(w, dtype=np.complex128)
        if w.shape != (e.dim, e.dim):
            raise ValidationError(
                f"reconstruction {a} has shape {w.shape}, expected {(e.dim, e.dim)}"
            )
        tr = float(np.trace(w).real)
        if abs(tr - 1.0) > e.tol.trace:
            raise ValidationError(f"reconstruction {a} has trace {tr!r}, expected 1")
        out.append(w)
    return out


def pure_fidelity(e: Ensemble, r: ReconstructionMap) -> float:
    """Average probability that ``W_i`` passes the yes/no test for ``|a_i>``.

    Defined only for ensembles of pure signals; a mixed signal raises
    :class:`PreconditionError` (use :func:`naive_fidelity` for mixed states).
    """
    ws = _reconstructions(e, r)
    total = 0.0
    for a, ((p, s), w) in enumerate(zip(e, ws)):
        eig = hermitian_eigendecomposition(s, e.tol)
        if abs(eig.eigenvalues[0] - 1.0) > e.tol.pure:
            raise PreconditionError(
                f"signal {a} is mixed (largest eigenvalue {eig.eigenvalues[0]:.12g}); "
                "pure_fidelity needs pure signals"
            )
        psi = eig.vector(0)
        total += p * float(np.vdot(psi, w @ psi).real)
    return total


def naive_fidelity(e: Ensemble, r: ReconstructionMap) -> float:
    """``sum_a p_a Tr(Pi_a W_a)``; equals the average purity for perfect reconstruction."""
    ws = _reconstructions(e, r)
    return float(sum(p * np.vdot(s, w).real for (p, s), w in zip(e, ws)))


def pure_distance_sq(psi, phi, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Fubini-Study squared distance ``4 (1 - |<psi|phi>|^2)``."""
    psi = as_state(psi, tol)
    phi = as_state(phi, tol)
    if psi.shape != phi.shape:
        raise ValidationError(f"dimension mismatch: {psi.size} vs {phi.size}")
    overlap = abs(np.vdot(psi, phi)) ** 2
    return float(4.0 * (1.0 - min(overlap, 1.0)))


def flat_distance_sq(rho, sigma) -> float:
    """Flat squared distance ``2 Tr((rho - sigma)^2)``."""
    rho = np.asarray(rho, dtype=np.complex128)
    sigma = np.asarray(sigma, dtype=np.complex128)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    return 2.0 * trace_of_square(rho - sigma)


def operators_equal(a, b, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Equality in the ``Tr((A - B)^2)`` seminorm."""
    return trace_of_square(np.asarray(a) - np.asarray(b)) <= tol.operator_equality


def distortion(e: Ensemble, r: ReconstructionMap) -> float:
    """``D = sum_a p_a Tr((Pi_a - W_a)^2)``, between 0 and 2."""
    ws = _reconstructions(e, r)
    return float(sum(p * trace_of_square(s - w) for (p, s), w in zip(e, ws)))


def distortion_terms(e: Ensemble, r: ReconstructionMap) -> float:
    """Distortion via ``Tr Pi^2 + Tr W^2 - 2 Tr(Pi W)``; cross-check for :func:`distortion`."""
    ws = _reconstructions(e, r)
    return float(
        sum(
            p * (trace_of_square(s) + trace_of_square(w) - 2.0 * np.vdot(s, w).real)
            for (p, s), w in zip(e, ws)
        )
    )
