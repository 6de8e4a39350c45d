"""Estimate eigenvalue and singular value spectra from sampled submatrices."""

from .core import (
    DEFAULT_TOL,
    DimensionMismatchError,
    SolverFailureError,
    Spectrum,
    SymMatrix,
    linf_spectrum_error,
    spectral_norm,
    sym_eigvals,
    wasserstein1,
    weyl_gap,
)
from .estimate import (
    EstimateReport,
    align_estimates,
    estimate_entrywise_pipeline,
    estimate_nnz,
    estimate_norm,
    estimate_psd,
    estimate_singular,
    estimate_singular_report,
    estimate_uniform,
    median_boost,
    recommended_sample_size,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    FitError,
    ResultRow,
    build_matrix,
    derive_seed,
    load_config,
    parse_config_text,
    read_csv,
    run_experiment,
    slope_fit,
    write_csv,
)
from .matrices import (
    EdgeListParseError,
    MatrixMarketFormatError,
    PointCloud,
    block_matrix,
    erdos_renyi,
    identity_matrix,
    load_edge_list,
    load_matrix_market,
    power_law_graph,
    save_matrix_market,
    synthetic_point_cloud,
    tanh_similarity,
    tensor_hard_instance,
    thin_plate_spline,
    tridiagonal_ones,
)
from .sampling import (
    RowColSample,
    SampledSubmatrix,
    SampleSet,
    entrywise_sparsify,
    nnz_submatrix,
    norm_submatrix,
    rowcol_submatrix,
    uniform_submatrix,
    zero_out_by_norm,
    zero_out_by_sparsity,
)
from .store import NoMassError, SparseSymStore, StoreConstructionError

__version__ = "0.1.0"
