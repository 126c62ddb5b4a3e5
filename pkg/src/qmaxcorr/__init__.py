"""Quantum maximal correlation of bipartite states."""

from .channels import (
    BinaryMeasurement,
    QuantumChannel,
    apply_local,
    depolarizing,
    measure_binary,
    random_channel,
    validate_channel,
)
from .classical import (
    JointDistribution,
    binary_mu_exact,
    classical_maximal_correlation,
    is_decomposable,
    joint_distribution,
    lemma_lower_bound,
)
from .errors import DegenerateOptimizer, MaxCorrError
from .harness import oracle_mu, run_dpi_suite, run_extreme_suite, run_oracle_suite, run_tensorization_suite
from .maxcorr import (
    common_data_witness,
    extract_optimizers,
    maximal_correlation,
    mu_k,
    pure_state_mu,
    schmidt_spectrum,
    tilde_operator,
)
from .states import (
    BipartiteState,
    embed_classical,
    isotropic_state,
    mutual_information,
    partial_trace,
    product_state,
    pure_state,
    random_bipartite,
    tensor_states,
    validate_density,
)

__version__ = "0.1.0"
