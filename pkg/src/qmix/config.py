"""Numerical tolerances, resource caps and the package exception types."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Every numerical threshold used by the package, in one place."""

    hermitian: float = 1e-10          # |H_ij - conj(H_ji)| per component
    trace: float = 1e-10              # |Tr rho - 1|
    negativity: float = 1e-10         # smallest admissible eigenvalue is -negativity
    unit_norm: float = 1e-10          # | ||psi||^2 - 1 |
    probability: float = 1e-10        # |sum p - 1|
    jacobi_offdiag: float = 1e-12     # off-diagonal Frobenius mass at convergence
    degenerate_gap: float = 1e-9      # eigenvalues closer than this form one cluster
    reconstruction: float = 1e-9      # ||V L V^+ - H||_F
    operator_equality: float = 1e-9   # Tr((A - B)^2) seminorm
    spectrum_cutoff: float = 1e-12    # weights below are dropped from signal spectra
    entropy_cutoff: float = 1e-15     # 0 log 0 == 0 below this
    support_rank: float = 1e-10       # eigenvalue counted in the support above this
    orthogonality: float = 1e-9       # Tr(P_a P_b) below this means orthogonal supports
    pure: float = 1e-9                # max eigenvalue within this of 1 means pure
    bound_slack: float = 1e-9         # slack on distortion bound and floor checks


@dataclass(frozen=True)
class Caps:
    """Resource limits. Exceeding one raises :class:`ResourceLimitError`."""

    max_dim: int = 2**20              # tensor-product dimension
    max_strings: int = 2**20          # block signal strings m**K
    max_dense_dim: int = 4096         # n**K for dense block computations
    max_combinations: int = 2**20     # distinct eigenvalue products popped best-first
    max_jacobi_sweeps: int = 100


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_CAPS = Caps()


class QmixError(Exception):
    """Base class for all package errors."""


class ValidationError(QmixError, ValueError):
    """Input does not satisfy a structural or numerical invariant."""


class PreconditionError(QmixError, ValueError):
    """Input is valid but outside the domain of the requested operation."""


class ResourceLimitError(QmixError):
    """A configured resource cap would be exceeded."""
