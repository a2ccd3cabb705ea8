"""Kernel two-sample testing with exact and linear-time MMD estimators.

The squared maximum mean discrepancy between two labeled sample groups
can be computed exactly in quadratic time, or approximated in linear time
by sampling frequencies from the kernel's spectral measure, either i.i.d.
or through a structured Walsh-Hadamard (Fastfood) projection.  A
permutation-bootstrap layer turns any estimator into a two-sample test.
"""

from .circular import (
    CircularSample,
    DiscrepancyResult,
    circular_discrepancy,
    ensemble_discrepancy,
    wrap,
)
from .dataset import (
    BlobSpec,
    SampleSet,
    load_csv,
    save_csv,
    synth_blobs,
    synth_hypercube,
    synth_ring,
    two_sample,
)
from .errors import FastmmdError, NumericalContractError, ValidationError
from .estimators import EstimatorConfig, compute_estimate
from .exact import (
    MmdEstimate,
    mmd_biased_exact,
    mmd_btest,
    mmd_linear,
    mmd_unbiased_exact,
    unbiased_from_embedding_norms,
)
from .fastfood import (
    FastfoodBlock,
    FastfoodStack,
    build_stack,
    fastfood_project,
    fastmmd_fastfood,
    fwht,
    materialize_bank,
    project_rows,
)
from .fourier import (
    SinusoidAccumulator,
    amplitude_phase,
    fastmmd_features,
    fastmmd_fourier,
    feature_matrix,
    per_frequency_amplitudes,
)
from .hypothesis import (
    SweepResult,
    TestResult,
    Type2Cell,
    bandwidth_sweep,
    bootstrap_null,
    geometric_grid,
    two_sample_test,
    type2_experiment,
)
from .kernel import (
    FrequencyBank,
    ShiftInvariantKernel,
    evaluate,
    gaussian,
    gram,
    laplacian,
    sample_spectral,
    spectral_second_moment,
)

__version__ = "0.1.0"
