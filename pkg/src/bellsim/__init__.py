"""Desk-scale simulator of a single-pair CHSH Bell test via sequential
weak measurements: polarization algebra, Gaussian pointer optics, the
exact branch evolution, Monte Carlo coincidence events, per-pair Bell
estimates and maximum-likelihood tomography.
"""
from .polarization import (
    AngleSet,
    DEFAULT_ANGLES,
    TSIRELSON,
    chsh_s,
    concurrence,
    correlation_strong,
    fidelity,
    negativity,
    purity,
    singlet,
    werner,
)
from .pointer import PixelGrid, bin_overlap, overlap_kappa, pixel_to_position
from .weak import (
    MeasurementSettings,
    MomentSet,
    branch_expansion,
    chsh_from_moments,
    correlation_from_moments,
    exact_moments,
    joint_pixel_pmf,
    output_polarization_state,
    visibility,
    weak_moments_first_order,
)
from .coincidence import (
    CoincidenceEvent,
    PairEstimate,
    RunSummary,
    accumulate_tensor,
    aggregate,
    expected_pair_s,
    inject_accidentals,
    pair_s_values,
    sample_events,
    single_pair_s,
)
from .tomography import (
    CountRecord,
    ProjSetting,
    metric_report,
    reconstruct_mle,
    simulate_counts,
    tomography_settings,
)
from .config import ExperimentConfig, config_hash, load_config, parse_config
from .cli import calibrate_g_over_sigma

__version__ = "0.1.0"
