"""Coverage probability and ergodic rate of an RIS-assisted single-antenna link
under short-term and long-term phase-shift designs."""

from .analytics import (
    CascadedMoments,
    GammaApprox,
    cascaded_moments,
    coverage_probability,
    ergodic_rate,
    gamma_params,
    gamma_params_generic,
    gamma_params_long_term,
    gamma_params_short_term,
)
from .channel import ChannelRealization, Geometry, LinkStatistics, derive_link_statistics
from .config import ScenarioConfig, parse_config
from .phase_design import PhaseProfile, SnrContext

__version__ = "0.1.0"
