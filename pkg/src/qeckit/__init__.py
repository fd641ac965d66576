"""qeckit: verify, synthesize and quantify quantum error correction at desk scale.

Checks whether a code subspace corrects a Kraus noise family, constructs
the recovery superoperator when it does, and computes pure-state and
entangled-state fidelities, bounds, and iterated-memory trajectories by
exact dense linear algebra (registers up to 8 qubits).
"""

__version__ = "0.1.0"

from .channels import (
    CHANNEL_KINDS,
    ChannelSpec,
    OperatorEnsemble,
    apply_channel,
    build_channel,
    compose,
    e_error_family,
    strength,
    tensor_power,
    tensor_product,
    validate_superoperator,
)
from .codes import (
    KLReport,
    QuantumCode,
    ReducedDMReport,
    builtin_code,
    kl_check,
    naive_counting_bound,
    qubit_lower_bound,
    random_code,
    reduced_dm_check,
    repetition_phase_code,
)
from .config import DEFAULT_FIDELITY, DEFAULT_TOL, FidelityConfig, ToleranceConfig
from .errors import (
    CapacityError,
    NotAStateError,
    NotCorrectableError,
    NotSuperoperatorError,
    QecError,
)
from .fidelity import (
    BOUND_SLACK,
    BoundCheckReport,
    EntangledFidelityReport,
    FidelityReport,
    binomial_fidelity_bound,
    code_error,
    entangled_bound_check,
    entangled_fidelity,
    min_fidelity,
    pure_fidelity,
)
from .linalg import (
    DIM_CAP,
    DensityMatrix,
    PureState,
    QubitSubset,
    kron,
    kron_all,
    orthonormalize,
    partial_trace,
    unitary_extension,
    von_neumann_entropy,
)
from .memory import (
    MemoryComparison,
    MemoryRun,
    ScalingFit,
    bound_trajectory,
    compare_coded_uncoded,
    comparison_csv,
    identity_recovery,
    run_memory,
    scaling_exponent_fit,
    trajectory_csv,
)
from .recovery import (
    EntropyReport,
    RecoveryOperator,
    SyndromeDecomposition,
    VerificationReport,
    entangled_state_test,
    entropy_test,
    syndrome_decomposition,
    synthesize_recovery,
    verify_recovery,
)

__all__ = [
    "__version__",
    "CHANNEL_KINDS",
    "DIM_CAP",
    "BOUND_SLACK",
    "DEFAULT_FIDELITY",
    "DEFAULT_TOL",
    "ToleranceConfig",
    "FidelityConfig",
    "PureState",
    "DensityMatrix",
    "QubitSubset",
    "kron",
    "kron_all",
    "partial_trace",
    "orthonormalize",
    "unitary_extension",
    "von_neumann_entropy",
    "OperatorEnsemble",
    "ChannelSpec",
    "build_channel",
    "validate_superoperator",
    "apply_channel",
    "tensor_product",
    "tensor_power",
    "e_error_family",
    "strength",
    "compose",
    "QuantumCode",
    "KLReport",
    "ReducedDMReport",
    "kl_check",
    "reduced_dm_check",
    "qubit_lower_bound",
    "naive_counting_bound",
    "builtin_code",
    "repetition_phase_code",
    "random_code",
    "RecoveryOperator",
    "SyndromeDecomposition",
    "VerificationReport",
    "EntropyReport",
    "synthesize_recovery",
    "verify_recovery",
    "entangled_state_test",
    "syndrome_decomposition",
    "entropy_test",
    "FidelityReport",
    "EntangledFidelityReport",
    "BoundCheckReport",
    "pure_fidelity",
    "min_fidelity",
    "code_error",
    "entangled_fidelity",
    "entangled_bound_check",
    "binomial_fidelity_bound",
    "MemoryRun",
    "MemoryComparison",
    "ScalingFit",
    "run_memory",
    "compare_coded_uncoded",
    "bound_trajectory",
    "identity_recovery",
    "scaling_exponent_fit",
    "trajectory_csv",
    "comparison_csv",
    "QecError",
    "CapacityError",
    "NotAStateError",
    "NotSuperoperatorError",
    "NotCorrectableError",
]
