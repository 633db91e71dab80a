"""Differentially private change-point detection.

Offline detection selects the noisy argmax of suffix log-likelihood ratios;
online detection streams windowed CUSUM maxima through a noisy threshold
test and localizes the change inside the first alarmed window.  Closed-form
accuracy and threshold formulas plus a Monte Carlo harness round out the
package; see the CLI (``privcpd --help``) for the command-line surface.
"""

from .bounds import (
    AccuracyBound,
    BoundKind,
    ThresholdRange,
    alpha_mle_bounded,
    alpha_mle_relaxed,
    alpha_private_bounded,
    alpha_private_relaxed,
    evaluate_bound,
    online_alpha,
    online_threshold_range,
)
from .errors import (
    InfiniteSensitivityError,
    InsufficientDataError,
    InvalidInputError,
    InvalidObservationError,
    InvalidParameterError,
    NotReadyError,
    NumericError,
    PrivcpdError,
)
from .hypotheses import BernoulliPair, GaussianPair, HypothesisPair, Regime, bisect_a_delta
from .mechanisms import (
    LaplaceScale,
    PrivacyParams,
    above_noisy_threshold,
    abovethresh_alpha,
    report_noisy_max,
    sample_laplace,
)
from .offline import DetectionResult, NoiseMode, detect_offline, llr_profile, mle, noise_bound
from .online import (
    CusumWindow,
    OnlineConfig,
    OnlineResult,
    cusum_step,
    cusum_trace,
    detect_online,
)
from .simulation import (
    AccuracyCurve,
    OfflineScenario,
    OnlineScenario,
    empirical_threshold_range,
    generate_stream,
    nearest_rank_quantile,
    run_offline,
    run_online,
    write_offline_csv,
    write_online_csv,
)

__version__ = "0.1.0"
