"""Universal nonclassicality witnesses for single-mode light.

Fock-space states, nonclassicality filters, the disc-filter witness and its
phase-space (filtered P function) counterpart.
"""

__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    ConfigError,
    DimensionError,
    DomainError,
    NclassError,
    NumericalNegativityError,
    RangeError,
    SymmetryError,
    TruncationError,
)
from .filters import (
    FilterFamily,
    GridConfig,
    witness_filter_family,
    autocorrelate,
    disc_family,
    disc_kernel,
    filter_from_witness,
    gaussian_witness,
    kernel_family,
    quartic_kernel,
    reference_family,
    scale_width,
    verify_filter_conditions,
    witness_from_family,
)
from .fock import (
    DensityMatrix,
    PhotonStatistics,
    apply_loss,
    char_function,
    displace_state,
    displacement_matrix,
    make_coherent,
    make_fock,
    make_spats,
    make_thermal,
    make_vacuum,
    mix,
    photon_statistics,
    wigner,
    wigner_grid,
)
from .nfp import NfpGrid, nfp_grid, nfp_point, nfp_values
from .quadrature import QuadConfig
from .special import j1, j1_zero, lens_area
from .witness import (
    ExpectationReport,
    WitnessSpec,
    expectation,
    first_order_char_test,
    mandel_q,
    min_quadrature_variance,
    quadrature_variance,
    scan_width,
    witness_coherent_closed_form,
    witness_diag,
    witness_trace,
)
