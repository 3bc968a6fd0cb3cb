"""Fidelity checks and non-Gaussianity measures for linear covariance
propagation through nonlinear maps."""

__version__ = "0.1.0"

from .cr3bp import (
    CR3BPParams,
    NRHOReference,
    VariationalState,
    jacobi_constant,
    nrho_reference,
    propagate_states,
    propagate_variations,
    vector_field,
)
from .errors import FactorizationError, IntegrationError
from .metrics import (
    DirectionalExtreme,
    FidelityReport,
    McrResult,
    SolverOptions,
    esmd,
    esmdole_quadratic,
    esmdole_samples,
    max_directional_moment,
    mcr,
    sadl,
    smdm,
    wussadl,
    wussolc,
    wussos,
)
from .moments import (
    GaussianBelief,
    MomentSet,
    StandardizedMoments,
    WhiteningFactors,
    directional_standardized_moment,
    excess_kurtosis,
    gaussian_central_moment,
    marginal_standardized_moment,
    sample_moments,
    standardized_moments,
    whitening_factors,
)
from .monte_carlo import SampleCloud, propagate_samples, sample_gaussian
from .study import StudyConfig, StudyResult, default_config, load_config, run_study, save_config
from .teig import EigenPair, default_shift, max_zeig, sshopm
from .tensor_ops import (
    MixedTensor3,
    SymTensor,
    contract_full,
    contract_vec,
    dematricize,
    identity4,
    matricize,
    mode_transform,
    symmetrize,
)
from .transforms import (
    QuadraticMap,
    SigmaPointSet,
    StatLinearization,
    Taylor2Moments,
    UnscentedResult,
    linear_propagate,
    scaled_ut,
    sigma_points,
    statistical_linearization,
    taylor2_moments,
    ut_moments,
)
