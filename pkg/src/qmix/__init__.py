"""Typical-subspace and hybrid coding of mixed-state quantum sources."""

from .blocks import (
    BlockCode,
    SweepCell,
    block_code,
    block_sweep,
    block_typical_mass,
    typical_block_tuples,
)
from .compression import (
    CodeReport,
    CompressionCode,
    apply_code,
    apply_code_spectral,
    code_report,
    dimension_for_rate,
    lemma2_floor,
    select_typical_subspace,
)
from .config import (
    DEFAULT_CAPS,
    DEFAULT_TOLERANCES,
    Caps,
    PreconditionError,
    QmixError,
    ResourceLimitError,
    Tolerances,
    ValidationError,
)
from .hybrid import HybridReport, SupportProfile, are_orthogonal_supports, hybrid_simulate, support_profile
from .linalg import (
    EigenDecomposition,
    hermitian_eigendecomposition,
    tensor_power,
    tensor_product,
    trace_of_square,
    validate_density,
)
from .metrics import distortion, flat_distance_sq, naive_fidelity, pure_distance_sq, pure_fidelity
from .source import (
    BlockEnsemble,
    Ensemble,
    SignalSpectrum,
    average_purity,
    block_ensemble,
    ensemble_density,
    pure_state,
    shannon_entropy,
    signal_spectrum,
    von_neumann_entropy,
)

__version__ = "0.1.0"
