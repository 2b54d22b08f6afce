# src/models.py
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np
import pandas as pd

from .constants import TRAJECTORY_COLUMNS

class TerminationKind(str, Enum):
    DRAINED = "DRAINED"
    OVERFLOW = "OVERFLOW"
    HORIZON_REACHED = "HORIZON_REACHED"

class DefenderKind(str, Enum):
    THEOREM_SWITCHING = "theorem_switching"
    NON_IDLING = "non_idling"
    ZERO = "zero"
    CUSTOM = "custom"

class DefenderPhase(str, Enum):
    BEFORE_T2 = "BEFORE_T2" # drive the attack level q2 to zero
    AFTER_T2 = "AFTER_T2"   # hold q2 at zero, drain q1

class AttackerKind(str, Enum):
    CONSTANT_MAX = "constant_max"
    ZERO = "zero"
    PULSE = "pulse"
    SEEDED_RANDOM = "seeded_random"
    PIECEWISE_TRACE = "piecewise_trace"

class ArrivalKind(str, Enum):
    CONSTANT = "constant"
    SINUSOID_CLIPPED = "sinusoid_clipped"
    PIECEWISE_LINEAR_TRACE = "piecewise_linear_trace"

class Verdict(str, Enum):
    VERIFIED = "VERIFIED"
    FAILED = "FAILED"
    CONDITION_VIOLATED_DEMONSTRATED = "CONDITION_VIOLATED_DEMONSTRATED"
    CONDITIONS_NOT_MET = "CONDITIONS_NOT_MET"
    NOT_APPLICABLE = "NOT_APPLICABLE"

# --- Per-step values of the game ---
# Admissibility is checked by the simulator, not here.

@dataclass(frozen=True, slots=True)
class GameState:
    t: float
    q1: float
    q2: float

@dataclass(frozen=True, slots=True)
class ControlInput:
    u1: float
    u2: float

@dataclass(frozen=True, slots=True)
class AttackInput:
    v: float

@dataclass(frozen=True, slots=True)
class ArrivalSample:
    alpha: float

@dataclass(frozen=True, slots=True)
class Sample:
    state: GameState
    control: ControlInput
    attack: AttackInput
    arrival: ArrivalSample

    @property
    def t(self) -> float:
        return self.state.t

@dataclass(frozen=True)
class Termination:
    kind: TerminationKind
    t: Optional[float] = None
    q1: Optional[float] = None

    @classmethod
    def drained(cls, t_final: float) -> "Termination":
        return cls(TerminationKind.DRAINED, t=t_final)

    @classmethod
    def overflow(cls, t: float, q1: float) -> "Termination":
        return cls(TerminationKind.OVERFLOW, t=t, q1=q1)

    @classmethod
    def horizon_reached(cls, t: float) -> "Termination":
        return cls(TerminationKind.HORIZON_REACHED, t=t)

@dataclass
class Trajectory:
    """Sampled play of the game together with how it ended."""
    samples: List[Sample]
    termination: Termination
    dt: float
    defender_kind: DefenderKind

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.state.t for s in self.samples])

    @property
    def q1(self) -> np.ndarray:
        return np.array([s.state.q1 for s in self.samples])

    @property
    def q2(self) -> np.ndarray:
        return np.array([s.state.q2 for s in self.samples])

    @property
    def final_state(self) -> GameState:
        return self.samples[-1].state

    def to_frame(self) -> pd.DataFrame:
        rows = [
            (s.state.t, s.state.q1, s.state.q2, s.control.u1, s.control.u2, s.attack.v, s.arrival.alpha)
            for s in self.samples
        ]
        return pd.DataFrame(rows, columns=TRAJECTORY_COLUMNS)

# --- Fluid network and stochastic records ---

@dataclass
class FluidTrajectory:
    times: np.ndarray       # shape (n,)
    q: np.ndarray           # shape (n, N)
    z: np.ndarray           # shape (n, N_u), cumulative allocation
    drain_time: Optional[float] = None
    bound_exceeded_at: Optional[float] = None

@dataclass
class SamplePath:
    """One replication of the slotted queue: Q and Z at slot boundaries."""
    queue: np.ndarray       # int, shape (horizon + 1,)
    allocation: np.ndarray  # float, cumulative busy time, shape (horizon + 1,)
    slot_dt: float
    seed: int

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.queue.shape[0]) * self.slot_dt

@dataclass
class DisturbanceStats:
    times: np.ndarray
    mean_queue: np.ndarray
    se_queue: np.ndarray
    fluid: np.ndarray
    mean_n: np.ndarray
    var_n: np.ndarray
    n_runs: int
    bounded_mean_estimate: float = 0.0
    variance_slope: float = 0.0
    variance_intercept: float = 0.0
    variance_r2: float = 0.0
    fit_points: int = 0
    max_abs_z: float = 0.0 # largest |mean Q - fluid| / se before the fluid drains

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "t": self.times,
            "mean_q": self.mean_queue,
            "se_q": self.se_queue,
            "fluid_q": self.fluid,
            "mean_n": self.mean_n,
            "var_n": self.var_n,
        })
