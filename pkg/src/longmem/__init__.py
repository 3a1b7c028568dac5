"""Local Whittle wavelet estimation of the memory parameter of long-memory series."""

from .wavelets import (
    Pyramid,
    ShannonReference,
    WaveletSpec,
    direct_coeff,
    dwt,
    make_wavelet,
    max_scale,
    num_coeffs,
    psi_hat,
)
from .estimator import (
    EstimateResult,
    ScaleRange,
    confidence_interval,
    contrast,
    estimate,
    mean_scale,
    score,
    select_scales,
)
from .asymptotics import (
    INF,
    VarianceTable,
    I_u,
    K,
    V,
    dinf,
    eta_kappa,
    shannon_V,
    variance_table,
)
from .synthesis import (
    ProcessModel,
    autocovariance,
    scaling_diagnostic,
    simulate,
    spectral_density,
)
from .baselines import BaselineResult, gph, logscale_regression, lwf, periodogram

__version__ = "0.1.0"
