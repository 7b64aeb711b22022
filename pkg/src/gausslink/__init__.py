"""Gaussian-channel models of microwave-optical transducer networks.

Models doubly-parametric transducers as two-mode Gaussian channels,
builds the fourteen two-transducer network topologies that distribute
microwave-microwave entanglement over an optical link, and computes
logarithmic negativities and entanglement thresholds of the resulting
states.  Convention: hbar = 1, vacuum quadrature variance 1/2.
"""

from .core import (
    BalancedForm,
    CovMat2,
    OneModeChannel,
    SqueezeParam,
    TwoModeChannel,
    apply_one_mode,
    apply_two_mode,
    balanced_physicality_check,
    log_negativity,
    loss_channel,
    make_tms,
    min_sympl_eig_pt,
    physicality_check,
    squeeze_db_to_r,
    squeeze_r_to_db,
)
from .network import (
    ALL_TOPOLOGIES,
    ASYMMETRIC_SWAP_TOPOLOGIES,
    DOWN_TOPOLOGIES,
    SYMMETRIC_SWAP_TOPOLOGIES,
    SYMMETRIC_TOPOLOGIES,
    NetworkConfig,
    Topology,
    default_loss_split,
    downconvert_mm,
    loss_slot_count,
    mm_log_negativity,
    mm_state,
    swap,
)
from .presets import brubaker2022_caps
from .sources import MoKind, mo_state, mo_state_via_composition
from .thresholds import (
    ThresholdResult,
    analytic_threshold,
    max_stable_ca,
    numeric_threshold,
    optimize_cooperativities,
    optimize_loss_split,
)
from .transducer import (
    DEFAULT_RATES,
    DeviceCaps,
    DptParams,
    InvalidOperatingModeError,
    PhysicalRates,
    SingularOperatingPointError,
    UnstableOperatingPointError,
    conversion_channel,
    dpt_two_mode_channel,
    fold_external_loss,
    stability_ok,
)

__version__ = "0.1.0"
