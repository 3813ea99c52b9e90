"""syndromestat: statistical-mechanics models of stabilizer-code decoding.

Compile any stabilizer code with Pauli noise and noisy check readout into
its spacetime spin model (stabilizer expansion) and the dual disordered
error-configuration model, then compute order-n coherent information,
syndrome-defect divergences, KL divergence, and maximum-likelihood decoding
statistics -- exactly on small instances by enumeration, against a dense
density-matrix oracle, and at threshold scale by Monte Carlo.
"""

__version__ = "1.0.0"

from .codes import (
    BUILTIN_CODES,
    CodeSpec,
    build_repetition,
    build_toric,
    build_xzzx,
    code_from_dict,
    code_to_dict,
    compute_logicals,
    compute_redundancies,
    load_code,
    redundancy_dimension,
    validate_code,
)
from .errorconfig import (
    ErrorConfig,
    SyndromeRecord,
    config_probability,
    fourier_duality_check,
    ml_statistics,
    record_distribution,
    reference_config,
    sector_of,
    syndrome_of,
    z_prime,
)
from .exact import (
    DiagnosticsResult,
    SizeError,
    coherent_information,
    kl_divergence,
    log_trace_moment,
    multiflavor_log_z,
    partition_function,
    relative_entropy,
)
from .gf2 import PauliWord, pauli_from_letters, product_phase, product_word
from .ising2d import critical_p_closed_form, critical_p_transfer_matrix
from .mc import (
    MCConfig,
    MCObservables,
    binder_scan,
    boundary_correlator,
    run_chain,
)
from .model import (
    SpacetimeModel,
    build_single_flavor,
    connected_components,
    insert_defect,
    symmetry_generators,
)
from .noise import Couplings, NoiseParams, couplings_from_rates
from .oracle import build_density_matrix, density_matrix_oracle, trace_moment

__all__ = [name for name in dir() if not name.startswith("_")]
