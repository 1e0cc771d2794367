"""Binary Gaussian LDA by eigendecomposition, least squares and randomized Kaczmarz."""

from .bounds import BoundInputs, bound_inputs, corollary_bound, estimate_spectral_norm_sq, \
    horizon_and_rate, prescribe, theorem1_bound
from .dataset import ArrayRowProvider, LabeledDataset, NpyRowProvider, class_statistics, \
    leverage_scores, load_csv, recode, train_test_split
from .errors import NumericalError, SketchLdaError, ValidationError
from .experiment import ExperimentConfig, ResultTable, emit, run_replicates
from .lda_gaussian import classify_gaussian, fit_gaussian, predict_gaussian
from .lda_ls import LinearClassifier, classify_linear, fit_ls, optimal_intercept
from .lda_rk import RkConfig, build_sampler, extract_direction, rk_step, run_rk, sampler_for
from .metrics import accuracy_report, angle_degrees, pca2

__version__ = "0.1.0"
