"""Joint alignment and classification of band-limited signals.

A solver library and command line for recovering, from noisy circularly
shifted copies of several unknown prototype signals, both the class of every
copy and its rotation, via a semidefinite relaxation over the product of the
rotation group and the cyclic label group.  Includes the pure clustering
special case (a cut SDP on weighted graphs), shift-invariant signature
baselines, and a reproducible noise-sweep benchmark.
"""

from .baseline import (
    Signature,
    SignatureKind,
    autocorrelation_signature,
    baseline_cluster,
    bispectrum_signature,
)
from .bench import (
    BenchmarkConfig,
    derive_seed,
    preset_config,
    run_benchmark,
    sign_test_pvalue,
    solve_dataset,
    summarize,
)
from .harmonics import (
    Bandwidth,
    CyclicElement,
    ProductElement,
    RotationAngle,
    dft_cyclic,
    fejer_weights,
    idft_cyclic,
    irrep_cyclic,
    irrep_product,
    irrep_so2,
)
from .penalty import (
    PenaltyCoefficients,
    ProductCoefficients,
    build_coefficient_matrices,
    pairwise_penalty,
    penalty_fourier,
    product_coefficients,
)
from .rounding import (
    SolveReport,
    align_from_R,
    alignment_error,
    classification_error,
    cluster_from_C,
    kmeans,
)
from .sdp_core import (
    NugSdpProblem,
    NugSdpSolution,
    NugSdpVariables,
    NumericalError,
    SolverConfig,
    certify_physical,
    maxkcut_sdp,
    nonnegativity_rows,
    partition_retained_weight,
    project_psd,
    reduced_objective,
    redundancy_audit,
    retained_weight_bound,
    solve,
)
from .signals import (
    Dataset,
    DatasetFormatError,
    Signal,
    add_noise,
    generate_dataset,
    random_prototype,
    read_dataset,
    shift,
    synthesize,
    write_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "Bandwidth",
    "BenchmarkConfig",
    "CyclicElement",
    "Dataset",
    "DatasetFormatError",
    "NugSdpProblem",
    "NugSdpSolution",
    "NugSdpVariables",
    "NumericalError",
    "PenaltyCoefficients",
    "ProductCoefficients",
    "ProductElement",
    "RotationAngle",
    "Signal",
    "Signature",
    "SignatureKind",
    "SolveReport",
    "SolverConfig",
    "add_noise",
    "align_from_R",
    "alignment_error",
    "autocorrelation_signature",
    "baseline_cluster",
    "bispectrum_signature",
    "build_coefficient_matrices",
    "certify_physical",
    "classification_error",
    "cluster_from_C",
    "derive_seed",
    "dft_cyclic",
    "fejer_weights",
    "generate_dataset",
    "idft_cyclic",
    "irrep_cyclic",
    "irrep_product",
    "irrep_so2",
    "kmeans",
    "maxkcut_sdp",
    "nonnegativity_rows",
    "pairwise_penalty",
    "partition_retained_weight",
    "penalty_fourier",
    "preset_config",
    "product_coefficients",
    "project_psd",
    "random_prototype",
    "read_dataset",
    "reduced_objective",
    "redundancy_audit",
    "retained_weight_bound",
    "run_benchmark",
    "shift",
    "sign_test_pvalue",
    "solve",
    "solve_dataset",
    "summarize",
    "synthesize",
    "write_dataset",
]
