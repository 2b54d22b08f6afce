import copy
import logging
from abc import ABC, abstractmethod
from typing import Callable, Optional

import numpy as np

from ..constants import ErrorMessages
from ..exceptions import InvalidParameterError, StrategyUnavailableError
from ..models import (
    ArrivalKind,
    ArrivalSample,
    AttackerKind,
    AttackInput,
    ControlInput,
    DefenderKind,
    DefenderPhase,
    GameState,
)
from ..schemas import (
    ArrivalSpec,
    AttackerSpec,
    ConstantArrivalSpec,
    DefenderSpec,
    GameParams,
    PiecewiseLinearArrivalSpec,
    PiecewiseTraceAttackerSpec,
    PulseAttackerSpec,
    SeededRandomAttackerSpec,
    SinusoidArrivalSpec,
)

logger = logging.getLogger(__name__)

class _RunLocal:
    """Strategies carry per-run state; simulations work on forks."""

    def reset(self):
        pass

    def fork(self):
        clone = copy.copy(self)
        clone.reset()
        return clone

# --- Defender ---

def theorem_defender(
    t: float,
    state: GameState,
    v_obs: AttackInput,
    a_obs: ArrivalSample,
    params: GameParams,
    tol: float = 0.0,
    phase: Optional[DefenderPhase] = None,
) -> ControlInput:
    """
    Two-phase counter-strategy that proves the game can be finished.

    Before q2 is driven to zero the defender serves exactly the arrivals and
    spends the rest on counteraction: (alpha, mu - alpha). Afterwards it
    matches the attacker and serves with the remainder: (mu - v, v). Both
    branches spend exactly mu. Without an explicit `phase` it is read off q2.
    """
    if params.epsilon <= 0:
        raise StrategyUnavailableError(ErrorMessages.CONDITION1_VIOLATED)
    if phase is None:
        phase = DefenderPhase.BEFORE_T2 if state.q2 > tol else DefenderPhase.AFTER_T2
    if phase is DefenderPhase.BEFORE_T2:
        return ControlInput(u1=a_obs.alpha, u2=params.mu - a_obs.alpha)
    return ControlInput(u1=params.mu - v_obs.v, u2=v_obs.v)

def non_idling(state: GameState, params: GameParams) -> ControlInput:
    """Serve at full capacity whenever the queue is nonempty."""
    if state.q1 > 0:
        return ControlInput(u1=params.mu, u2=0.0)
    return ControlInput(u1=0.0, u2=0.0)

class DefenderStrategy(_RunLocal, ABC):
    kind: DefenderKind

    @abstractmethod
    def control(
        self, t: float, state: GameState, v_obs: AttackInput, a_obs: ArrivalSample, params: GameParams
    ) -> ControlInput:
        ...

class TheoremDefender(DefenderStrategy):
    kind = DefenderKind.THEOREM_SWITCHING

    def __init__(self, tol: float):
        self.tol = tol
        self.reset()

    def reset(self):
        self.phase = DefenderPhase.BEFORE_T2
        self.switch_time: Optional[float] = None

    def control(self, t, state, v_obs, a_obs, params):
        # The switch is one-way
        if self.phase is DefenderPhase.BEFORE_T2 and state.q2 <= self.tol:
            self.phase = DefenderPhase.AFTER_T2
            self.switch_time = t
            logger.debug(f"Defender switched to {self.phase.value} at t={t:.6g} (q1={state.q1:.6g})")
        return theorem_defender(t, state, v_obs, a_obs, params, tol=self.tol, phase=self.phase)

class NonIdlingDefender(DefenderStrategy):
    kind = DefenderKind.NON_IDLING

    def control(self, t, state, v_obs, a_obs, params):
        return non_idling(state, params)

class ZeroDefender(DefenderStrategy):
    kind = DefenderKind.ZERO

    def control(self, t, state, v_obs, a_obs, params):
        return ControlInput(u1=0.0, u2=0.0)

ControlFunction = Callable[[float, GameState, AttackInput, ArrivalSample, GameParams], ControlInput]

class CustomDefender(DefenderStrategy):
    """Wraps a user function; admissibility is checked by the simulator."""
    kind = DefenderKind.CUSTOM

    def __init__(self, fn: ControlFunction):
        self.fn = fn

    def control(self, t, state, v_obs, a_obs, params):
        return self.fn(t, state, v_obs, a_obs, params)

# --- Attacker ---

class AttackerStrategy(_RunLocal, ABC):
    kind: AttackerKind

    @abstractmethod
    def rate(self, t: float, state: GameState, params: GameParams) -> float:
        ...

    def emit(self, t: float, state: GameState, params: GameParams) -> AttackInput:
        return AttackInput(v=min(max(self.rate(t, state, params), 0.0), params.nu))

class ConstantMaxAttacker(AttackerStrategy):
    kind = AttackerKind.CONSTANT_MAX

    def rate(self, t, state, params):
        return params.nu

class ZeroAttacker(AttackerStrategy):
    kind = AttackerKind.ZERO

    def rate(self, t, state, params):
        return 0.0

class PulseAttacker(AttackerStrategy):
    kind = AttackerKind.PULSE

    def __init__(self, period: float, duty: float):
        self.period = period
        self.duty = duty

    def rate(self, t, state, params):
        return params.nu if (t % self.period) < self.duty * self.period else 0.0

class SeededRandomAttacker(AttackerStrategy):
    """
    Holds a uniform random level in [0, nu] for `hold` time units.
    The level at time t depends only on (seed, floor(t / hold)).
    """
    kind = AttackerKind.SEEDED_RANDOM

    def __init__(self, seed: int, hold: float = 0.1):
        self.seed = seed
        self.hold = hold
        self.reset()

    def reset(self):
        self._cached_index: Optional[int] = None
        self._cached_draw = 0.0

    def rate(self, t, state, params):
        index = int(t // self.hold)
        if index != self._cached_index:
            self._cached_draw = float(np.random.default_rng([self.seed, index]).random())
            self._cached_index = index
        return params.nu * self._cached_draw

class PiecewiseTraceAttacker(AttackerStrategy):
    """Replays a recorded attack: each value is held until the next breakpoint."""
    kind = AttackerKind.PIECEWISE_TRACE

    def __init__(self, breakpoints):
        points = np.asarray(breakpoints, dtype=float)
        self.times = points[:, 0]
        self.values = points[:, 1]

    def rate(self, t, state, params):
        index = max(int(np.searchsorted(self.times, t, side="right")) - 1, 0)
        return float(self.values[index])

def attacker_emit(strategy: AttackerStrategy, t: float, state: GameState, params: GameParams) -> AttackInput:
    return strategy.emit(t, state, params)

# --- Arrivals ---

class ArrivalProfile(_RunLocal, ABC):
    kind: ArrivalKind

    @abstractmethod
    def rate(self, t: float, params: GameParams) -> float:
        ...

    def emit(self, t: float, params: GameParams) -> ArrivalSample:
        return ArrivalSample(alpha=min(max(self.rate(t, params), 0.0), params.alpha_max))

class ConstantArrival(ArrivalProfile):
    kind = ArrivalKind.CONSTANT

    def __init__(self, level: Optional[float] = None):
        self.level = level

    def rate(self, t, params):
        return params.alpha_max if self.level is None else self.level

class SinusoidArrival(ArrivalProfile):
    kind = ArrivalKind.SINUSOID_CLIPPED

    def __init__(self, mean: float, amplitude: float, period: float):
        self.mean = mean
        self.amplitude = amplitude
        self.period = period

    def rate(self, t, params):
        return self.mean + self.amplitude * float(np.sin(2.0 * np.pi * t / self.period))

class PiecewiseLinearArrival(ArrivalProfile):
    kind = ArrivalKind.PIECEWISE_LINEAR_TRACE

    def __init__(self, breakpoints):
        points = np.asarray(breakpoints, dtype=float)
        self.times = points[:, 0]
        self.values = points[:, 1]

    def rate(self, t, params):
        return float(np.interp(t, self.times, self.values))

def arrival_emit(profile: ArrivalProfile, t: float, params: GameParams) -> ArrivalSample:
    return profile.emit(t, params)

# --- Construction from scenario specs ---

def build_defender(spec: DefenderSpec, tol: float) -> DefenderStrategy:
    if spec.kind == DefenderKind.THEOREM_SWITCHING:
        return TheoremDefender(tol=tol)
    if spec.kind == DefenderKind.NON_IDLING:
        return NonIdlingDefender()
    return ZeroDefender()

def build_attacker(spec: AttackerSpec) -> AttackerStrategy:
    if isinstance(spec, PulseAttackerSpec):
        return PulseAttacker(period=spec.period, duty=spec.duty)
    if isinstance(spec, SeededRandomAttackerSpec):
        return SeededRandomAttacker(seed=spec.seed, hold=spec.hold)
    if isinstance(spec, PiecewiseTraceAttackerSpec):
        return PiecewiseTraceAttacker(spec.breakpoints)
    if spec.kind == AttackerKind.ZERO:
        return ZeroAttacker()
    return ConstantMaxAttacker()

def build_arrival(spec: ArrivalSpec) -> ArrivalProfile:
    if isinstance(spec, SinusoidArrivalSpec):
        return SinusoidArrival(mean=spec.mean, amplitude=spec.amplitude, period=spec.period)
    if isinstance(spec, PiecewiseLinearArrivalSpec):
        return PiecewiseLinearArrival(spec.breakpoints)
    if isinstance(spec, ConstantArrivalSpec):
        return ConstantArrival(level=spec.level)
    raise InvalidParameterError(f"Unknown arrival profile: {spec.kind}")
