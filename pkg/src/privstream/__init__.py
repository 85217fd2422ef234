"""Spatial-privacy-aware proactive tile streaming for 360° video.

Tile requests are padded with camouflage tiles up to a spatial degree of
privacy; the proactive window is divided in closed form between observing
head motion and rendering plus sending, and the privacy-aware QoE is scored
on head-movement traces.
"""

from .durations import (
    DurationPlan,
    InfeasiblePlanError,
    StreamConfig,
    brute_force_durations,
    optimize_durations,
)
from .geometry import FovSpec, Gaze, TileGrid, fov_tiles, tile_center, top_n_by_dwell
from .link import (
    ComputeModel,
    LinkBudget,
    RadioModel,
    TileMediaSpec,
    computing_rate,
    ensemble_rate,
    resources_rate,
    tile_bits,
    zf_power_share,
)
from .predictors import (
    DooReport,
    FedConfig,
    LinearArModel,
    PredictorConfig,
    average_doo,
    federated_average,
    predict_linear,
    predict_no_motion,
    train_local,
)
from .privacy import (
    PrivacyConfig,
    PrivacyRequest,
    mask_rect_dilation,
    mask_uniform_random,
    n_privacy_tiles,
    sdop_of,
)
from .qoe import QoeReport, QoeSummary, cc_capability, evaluate_trace, evaluate_traces, segment_qoe
from .tileset import TileSet
from .traces import Trace, TraceSet, load_csv, split, synth_trace

__version__ = "0.1.0"
