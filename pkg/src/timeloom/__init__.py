"""timeloom: compile N x N unitaries into hybrid spatiotemporal
interferometer programs, lower them to time-bin schedules, verify them by
replay, and compare photon-loss budgets."""

from .core import (
    BeamSplitter,
    GateOp,
    MatrixFormatError,
    NotUnitaryError,
    PhaseShifter,
    SpecialUnitaryMatrix,
    Swap,
    Tolerance,
    UnitaryMatrix,
    frob_distance,
    gates_matrix,
    haar_random_su,
    nulling_params,
    read_matrix,
    tmn_matrix,
    write_matrix,
)
from .cosine_sine import (
    CsFactorization,
    CsPlan,
    complement_angles,
    cs_decompose,
    cs_plan_from_json,
    cs_plan_to_json,
    csd,
    reconstruct_cs,
)
from .elimination import (
    CountReport,
    EliminationPlan,
    ResidualBlock,
    UniversalBlock,
    element_counts_elimination,
    eliminate,
    elimination_plan_from_json,
    elimination_plan_to_json,
    reconstruct_elimination,
    rotate_block_rows,
    synthesize_residual_wtilde,
)
from .loss import (
    HybridLossParams,
    LossReport,
    TemporalLossParams,
    eta_hybrid,
    eta_temporal,
    loss_ratio,
    sweep_fig4,
)
from .schedule import (
    LogicalModeMap,
    TimedSchedule,
    device_inventory,
    schedule_cs,
    schedule_elimination,
    schedule_from_json,
    schedule_to_json,
)
from .simulate import ScheduleReplayError, simulate_timebins

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
