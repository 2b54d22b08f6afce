# src/schemas.py
from typing import Annotated, List, Literal, Optional, Tuple, Union
from pydantic import BaseModel, Field, field_validator, model_validator

from .config import get_settings
from .constants import SCENARIO_FORMAT_VERSION, REPORT_FORMAT_VERSION
from .models import GameState, Verdict, TerminationKind

FROZEN = {"frozen": True, "extra": "forbid"}

# --- Model constants ---

class GameParams(BaseModel):
    mu: float = Field(..., gt=0, allow_inf_nan=False, description="Service capacity of the defender.")
    nu: float = Field(..., ge=0, allow_inf_nan=False, description="Bound on the attack replenishment rate.")
    alpha_max: float = Field(..., ge=0, allow_inf_nan=False, description="Bound on the arrival rate.")
    k: float = Field(..., ge=0, allow_inf_nan=False, description="Coupling of attack power into the queue.")
    q1_max: float = Field(..., gt=0, allow_inf_nan=False, description="Queue capacity.")

    model_config = FROZEN

    @property
    def epsilon(self) -> float:
        """Control surplus mu - nu - alpha_max."""
        return self.mu - self.nu - self.alpha_max

class InitialState(BaseModel):
    q1: float = Field(..., ge=0, allow_inf_nan=False)
    q2: float = Field(..., ge=0, allow_inf_nan=False)

    model_config = FROZEN

    def to_state(self, t: float = 0.0) -> GameState:
        return GameState(t=t, q1=self.q1, q2=self.q2)

# --- Strategy specs (addressable by name from scenario files) ---

Breakpoints = List[Tuple[float, float]]

def _check_breakpoints(points: Breakpoints) -> Breakpoints:
    if not points:
        raise ValueError("at least one breakpoint is required")
    times = [p[0] for p in points]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("breakpoint times must be strictly increasing")
    if any(p[1] < 0 for p in points):
        raise ValueError("breakpoint values must be nonnegative")
    return points

class DefenderSpec(BaseModel):
    kind: Literal["theorem_switching", "non_idling", "zero"] = "theorem_switching"

    model_config = FROZEN

class ConstantMaxAttackerSpec(BaseModel):
    kind: Literal["constant_max"] = "constant_max"
    model_config = FROZEN

class ZeroAttackerSpec(BaseModel):
    kind: Literal["zero"] = "zero"
    model_config = FROZEN

class PulseAttackerSpec(BaseModel):
    kind: Literal["pulse"] = "pulse"
    period: float = Field(..., gt=0, allow_inf_nan=False)
    duty: float = Field(..., ge=0, le=1, description="Fraction of each period spent at full power.")
    model_config = FROZEN

class SeededRandomAttackerSpec(BaseModel):
    kind: Literal["seeded_random"] = "seeded_random"
    seed: int = Field(0, ge=0)
    hold: float = Field(0.1, gt=0, allow_inf_nan=False, description="Time each random level is held.")
    model_config = FROZEN

class PiecewiseTraceAttackerSpec(BaseModel):
    kind: Literal["piecewise_trace"] = "piecewise_trace"
    breakpoints: Breakpoints = Field(..., description="(t, v) pairs; v is held until the next breakpoint.")
    model_config = FROZEN

    @field_validator("breakpoints")
    @classmethod
    def validate_breakpoints(cls, value: Breakpoints) -> Breakpoints:
        return _check_breakpoints(value)

AttackerSpec = Annotated[
    Union[
        ConstantMaxAttackerSpec,
        ZeroAttackerSpec,
        PulseAttackerSpec,
        SeededRandomAttackerSpec,
        PiecewiseTraceAttackerSpec,
    ],
    Field(discriminator="kind"),
]

class ConstantArrivalSpec(BaseModel):
    kind: Literal["constant"] = "constant"
    level: Optional[float] = Field(None, ge=0, allow_inf_nan=False, description="Defaults to alpha_max.")
    model_config = FROZEN

class SinusoidArrivalSpec(BaseModel):
    kind: Literal["sinusoid_clipped"] = "sinusoid_clipped"
    mean: float = Field(..., allow_inf_nan=False)
    amplitude: float = Field(..., ge=0, allow_inf_nan=False)
    period: float = Field(..., gt=0, allow_inf_nan=False)
    model_config = FROZEN

class PiecewiseLinearArrivalSpec(BaseModel):
    kind: Literal["piecewise_linear_trace"] = "piecewise_linear_trace"
    breakpoints: Breakpoints
    model_config = FROZEN

    @field_validator("breakpoints")
    @classmethod
    def validate_breakpoints(cls, value: Breakpoints) -> Breakpoints:
        return _check_breakpoints(value)

ArrivalSpec = Annotated[
    Union[ConstantArrivalSpec, SinusoidArrivalSpec, PiecewiseLinearArrivalSpec],
    Field(discriminator="kind"),
]

# --- Scenario sections ---

class SimulationSettings(BaseModel):
    dt: float = Field(default_factory=lambda: get_settings().DEFAULT_DT, gt=0, allow_inf_nan=False)
    t_max: float = Field(default_factory=lambda: get_settings().DEFAULT_T_MAX, gt=0, allow_inf_nan=False)
    tol: float = Field(default_factory=lambda: get_settings().DEFAULT_TOL, gt=0, allow_inf_nan=False)
    model_config = FROZEN

class SolverSettings(BaseModel):
    n_dirs: int = Field(default_factory=lambda: get_settings().DIRECTION_GRID_SIZE, ge=8)
    n_quad: int = Field(default_factory=lambda: get_settings().QUADRATURE_POINTS, ge=2)
    tol_T: float = Field(default_factory=lambda: get_settings().CAPTURE_TOL_T, gt=0, allow_inf_nan=False)
    horizon: Optional[float] = Field(None, gt=0, description="Defaults to CAPTURE_HORIZON_FACTOR * tol_T.")
    model_config = FROZEN

SlotAlignment = Literal["boundary", "midpoint"]

class StochasticParams(BaseModel):
    arrival_mean: float = Field(..., ge=0, allow_inf_nan=False, description="Mean arrivals per unit time.")
    service_rate: float = Field(..., gt=0, allow_inf_nan=False, description="Service rate per unit time.")
    slot_dt: float = Field(1.0, gt=0, allow_inf_nan=False)
    n_runs: int = Field(1000, ge=1)
    seed: int = Field(0, ge=0)
    q0: int = Field(0, ge=0, description="Initial queue length in packets.")
    horizon_slots: int = Field(100, ge=1)
    policy: Literal["non_idling"] = "non_idling"
    alignment: SlotAlignment = Field("boundary", description="Compare with the fluid at slot boundaries or slot midpoints.")
    model_config = FROZEN

class OutputSettings(BaseModel):
    dir: str = Field(default_factory=lambda: get_settings().OUTPUT_DIR)
    basename: str = Field("run", min_length=1)
    svg: bool = False
    model_config = FROZEN

class Scenario(BaseModel):
    version: Literal[1] = SCENARIO_FORMAT_VERSION
    name: str = "scenario"
    params: GameParams
    q0: InitialState
    defender: DefenderSpec = Field(default_factory=DefenderSpec)
    attacker: AttackerSpec = Field(default_factory=ConstantMaxAttackerSpec)
    arrival: ArrivalSpec = Field(default_factory=ConstantArrivalSpec)
    simulation: SimulationSettings = Field(default_factory=SimulationSettings)
    solver: SolverSettings = Field(default_factory=SolverSettings)
    stochastic: Optional[StochasticParams] = None
    output: OutputSettings = Field(default_factory=OutputSettings)

    model_config = FROZEN

    @model_validator(mode="after")
    def check_initial_state(self) -> "Scenario":
        if self.q0.q1 > self.params.q1_max:
            raise ValueError("q0.q1 exceeds params.q1_max")
        return self

# --- Reports ---

class CheckReport(BaseModel):
    epsilon: float
    condition1: bool
    condition2: Optional[bool] = None
    t2_star: Optional[float] = None
    q1_peak_bound: Optional[float] = None
    t1_bound: Optional[float] = None
    queue_growth: Optional[float] = None
    classic_draining_time: Optional[float] = None

    @property
    def both_hold(self) -> bool:
        return bool(self.condition1 and self.condition2)

class TheoremReport(BaseModel):
    version: int = REPORT_FORMAT_VERSION
    condition1_ok: bool
    condition2_ok: bool
    epsilon: float
    t2_observed: Optional[float] = None
    t2_star: Optional[float] = None
    q1_peak_observed: float
    q1_peak_bound: Optional[float] = None
    t1_observed: Optional[float] = None
    t1_bound: Optional[float] = None
    admissibility_ok: bool
    q1_max_respected: bool
    termination: TerminationKind
    dt: float
    tol: float
    verdict: Verdict
    notes: List[str] = Field(default_factory=list)

class CaptureTimeResult(BaseModel):
    capture_time: Optional[float] = None
    monotone: bool = True
    n_dirs: int
    n_quad: int
    tol_T: float
    horizon: float
    evaluations: int = 0

class CompareSummary(BaseModel):
    version: int = REPORT_FORMAT_VERSION
    n_runs: int
    horizon_slots: int
    alignment: SlotAlignment = "boundary"
    bounded_mean_estimate: float
    variance_slope: float
    variance_intercept: float
    variance_r2: float
    fit_points: int
    max_abs_z: float
