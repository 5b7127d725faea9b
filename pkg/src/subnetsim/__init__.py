"""System-level simulator for interference prediction in dense subnetworks."""

from .channel import (
    ChannelConfig,
    FadingProcess,
    LinkChannel,
    init_link,
    link_gain,
    los_probability,
    pathloss_los_db,
    pathloss_nlos_db,
    step_fading,
    step_los_state,
    step_shadowing,
)
from .config import ConfigError, RunConfig, config_to_ini, emit_defaults, parse_config
from .cqi import CqiConfig, ReportQueue, dequantize_cqi, esm_compress, quantize_cqi
from .interference import (
    NoiseConfig,
    TrafficConfig,
    aggregate_interference,
    sample_traffic,
    thermal_noise_power,
    true_sinr,
)
from .link_adaptation import (
    LaConfig,
    McsEntry,
    McsTable,
    achieved_bler,
    adjusted_sinr_db,
    bler_normal_approx,
    build_mcs_table,
    load_mcs_table,
    save_mcs_table,
    select_mcs,
)
from .metrics import ecdf, rae, summarize_frame
from .predictor import (
    DssmConfig,
    EkfState,
    PredictorKind,
    bessel_j0,
    correlation_factor,
    ekf_predict,
    ekf_update,
    genie_sinr,
    kalman_update,
    ma_predict,
    make_ekf_state,
)
from .runner import calibrate_anchors, run_drop, run_simulation, summarize_directory
from .scenario import (
    PlacementInfeasible,
    ScenarioConfig,
    ScenarioState,
    SubnetPose,
    init_deployment,
    step_mobility,
)

__version__ = "0.1.0"
