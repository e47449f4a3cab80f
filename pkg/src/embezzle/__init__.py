"""Universal embezzling states and the communication-free embezzlement protocol."""

from .protocol import (
    BoundReport,
    bound_report,
    build_embezzler,
    delta_upper_bound,
    eta,
    fannes_min_delta,
    fidelity_lower_bound,
    harmonic_number,
    min_qubit_pairs,
    min_rank_for,
    omega_top_k,
    protocol_delta,
    protocol_fidelity,
    sum_omega_sq,
)
from .schmidt import (
    first_violation,
    is_trumped,
    majorizes,
    maximally_entangled,
    overlap_fidelity,
    reduced_trace_distance,
    schmidt_decompose,
    sorted_outer,
    spectrum,
    tensor_spectrum_full,
    von_neumann_entropy,
)
from .validation import (
    BoundUndefinedError,
    NormalizationError,
    SizeGuardError,
    check_amplitude_matrix,
    check_probability_vector,
    check_schmidt_vector,
)

__version__ = "0.1.0"


def __getattr__(name):
    # sklearn is only imported when the estimator is asked for
    if name == "EmbezzlementTransformer":
        from .estimator import EmbezzlementTransformer

        return EmbezzlementTransformer
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
