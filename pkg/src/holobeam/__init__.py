"""Joint digital / holographic / passive beamformer optimization for an
RHS-RIS aided multi-user MISO downlink, with a seeded Monte-Carlo harness."""

__version__ = "0.1.0"

from .config import SystemConfig, load_config, paper_default, write_config
from .channel import (
    ChannelSet,
    array_response,
    assemble_h_tot,
    generate_channels,
    path_loss_db,
    perturb_csi,
)
from .rhs import RhsGeometry, assemble_m_v, build_geometry, coupling_matrix, holographic_pattern
from .digital_bf import DigitalBeamformer, solve_p1, water_fill, zf_beamformer
from .holo_bf import FractionalProblem, box_qp_max, build_fractional, dinkelbach_solve, solve_p2
from .ris_opt import RisLink, build_ris_link, objective, retract, solve_p3
from .am_driver import AmResult, BeamformerState, am_optimize, run_baseline, sum_rate
from .harness import CostModel, SweepRecord, aggregate, hardware_cost, run_sweep

__all__ = [
    "SystemConfig",
    "load_config",
    "paper_default",
    "write_config",
    "ChannelSet",
    "array_response",
    "assemble_h_tot",
    "generate_channels",
    "path_loss_db",
    "perturb_csi",
    "RhsGeometry",
    "assemble_m_v",
    "build_geometry",
    "coupling_matrix",
    "holographic_pattern",
    "DigitalBeamformer",
    "solve_p1",
    "water_fill",
    "zf_beamformer",
    "FractionalProblem",
    "box_qp_max",
    "build_fractional",
    "dinkelbach_solve",
    "solve_p2",
    "RisLink",
    "build_ris_link",
    "objective",
    "retract",
    "solve_p3",
    "AmResult",
    "BeamformerState",
    "am_optimize",
    "run_baseline",
    "sum_rate",
    "CostModel",
    "SweepRecord",
    "aggregate",
    "hardware_cost",
    "run_sweep",
    "__version__",
]
