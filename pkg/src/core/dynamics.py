import logging
from typing import Optional

from ..constants import ErrorMessages
from ..exceptions import InvalidParameterError
from ..models import (
    ArrivalSample,
    AttackInput,
    ControlInput,
    GameState,
    Sample,
    Termination,
    Trajectory,
)
from ..schemas import GameParams, Scenario
from ..utils.validation_utils import ValidationUtils, require_finite
from .strategies import ArrivalProfile, AttackerStrategy, DefenderStrategy

logger = logging.getLogger(__name__)

def _quadratic_min(x0: float, rate: float, slope: float, h: float) -> float:
    """Minimum over [0, h] of x0 + rate*tau + slope*tau^2/2."""
    lowest = min(x0, x0 + rate * h + 0.5 * slope * h * h)
    if slope > 0:
        tau = -rate / slope
        if 0.0 < tau < h:
            lowest = min(lowest, x0 + rate * tau + 0.5 * slope * tau * tau)
    return lowest

def _reflect(x0: float, rate: float, slope: float, h: float) -> float:
    """
    Propagates a nonnegative level with derivative rate + slope*tau for h time
    units, reflected at zero (a level at 0 with negative derivative stays at 0).
    """
    x_end = x0 + rate * h + 0.5 * slope * h * h
    return max(x_end - min(0.0, _quadratic_min(x0, rate, slope, h)), 0.0)

def step_game(
    state: GameState,
    u: ControlInput,
    v: AttackInput,
    a: ArrivalSample,
    dt: float,
    params: GameParams,
) -> GameState:
    """
    Advances q1' = alpha + k*q2 - u1, q2' = v - u2 by dt with inputs held
    constant. The step is exact: q2 is piecewise linear, q1 piecewise quadratic.
    """
    require_finite(state.t, state.q1, state.q2, u.u1, u.u2, v.v, a.alpha, dt)
    if dt <= 0:
        raise InvalidParameterError(ErrorMessages.NON_POSITIVE_DT)

    k = params.k
    drift2 = v.v - u.u2
    drift1 = a.alpha - u.u1

    if drift2 >= 0 or state.q2 + drift2 * dt >= 0:
        q2 = max(state.q2 + drift2 * dt, 0.0)
        q1 = _reflect(state.q1, drift1 + k * state.q2, k * drift2, dt)
    else:
        # q2 reaches zero inside the step and stays there
        tau = state.q2 / -drift2
        q1_mid = _reflect(state.q1, drift1 + k * state.q2, k * drift2, tau)
        q1 = _reflect(q1_mid, drift1, 0.0, dt - tau)
        q2 = 0.0

    return GameState(t=state.t + dt, q1=q1, q2=q2)

def crossing_time(t0: Optional[float], y0: Optional[float], t1: float, y1: float, level: float) -> float:
    """Linear interpolation of the time y crosses `level` between two samples."""
    if t0 is None or y0 is None or y0 == y1:
        return t1
    frac = (y0 - level) / (y0 - y1)
    return t0 + min(max(frac, 0.0), 1.0) * (t1 - t0)

def simulate_game(
    scenario: Scenario,
    defender: DefenderStrategy,
    attacker: AttackerStrategy,
    arrival: ArrivalProfile,
) -> Trajectory:
    """
    Plays the game from scenario.q0 with sample-and-hold strategies.

    At each sample the attacker moves first, then the defender observes
    (t, q, v(t), alpha(t)). Stops on Drained (q1, q2 <= tol), Overflow
    (q1 > q1_max + tol) or at t_max.
    """
    params = scenario.params
    dt = scenario.simulation.dt
    t_max = scenario.simulation.t_max
    tol = scenario.simulation.tol

    # Strategy state (phase latch, random cache) belongs to this run only
    defender = defender.fork()
    attacker = attacker.fork()
    arrival = arrival.fork()
    validator = ValidationUtils(params)
    overflow_level = params.q1_max + tol

    state = scenario.q0.to_state()
    samples: list[Sample] = []
    prev_t: Optional[float] = None
    prev_level: Optional[float] = None
    prev_q1: Optional[float] = None
    step = 0

    while True:
        t = state.t
        attack = attacker.emit(t, state, params)
        validator.check_attack(attack, t)
        arrival_sample = arrival.emit(t, params)
        validator.check_arrival(arrival_sample, t)
        control = defender.control(t, state, attack, arrival_sample, params)
        validator.check_control(control, t)
        samples.append(Sample(state, control, attack, arrival_sample))

        level = max(state.q1, state.q2)
        if level <= tol:
            termination = Termination.drained(crossing_time(prev_t, prev_level, t, level, tol))
            break
        if state.q1 > overflow_level:
            termination = Termination.overflow(
                crossing_time(prev_t, prev_q1, t, state.q1, overflow_level), state.q1
            )
            break
        if t >= t_max:
            termination = Termination.horizon_reached(t)
            break

        prev_t, prev_level, prev_q1 = t, level, state.q1
        step += 1
        t_next = min(step * dt, t_max)
        advanced = step_game(state, control, attack, arrival_sample, t_next - t, params)
        state = GameState(t=t_next, q1=advanced.q1, q2=advanced.q2)

    logger.info(
        f"Simulation finished after {len(samples)} samples: {termination.kind.value}"
        f" at t={termination.t:.6g} (defender={defender.kind.value})"
    )
    return Trajectory(samples=samples, termination=termination, dt=dt, defender_kind=defender.kind)
