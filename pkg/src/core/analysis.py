import logging
from typing import List, Optional

import numpy as np

from ..constants import ErrorMessages, Tolerances
from ..exceptions import NotStabilizableError, UndefinedConditionError
from ..models import DefenderKind, TerminationKind, Trajectory, Verdict
from ..schemas import CheckReport, GameParams, TheoremReport
from ..utils.validation_utils import ValidationUtils
from .dynamics import crossing_time
from .pontryagin import PhasePoint, condition1, condition2

logger = logging.getLogger(__name__)

def epsilon(params: GameParams) -> float:
    return params.epsilon

def _positive_epsilon(params: GameParams) -> float:
    eps = params.epsilon
    if eps <= 0:
        raise UndefinedConditionError(ErrorMessages.UNDEFINED_FOR_EPSILON)
    return eps

def t2_star(q0: PhasePoint, params: GameParams) -> float:
    """Latest time the switching strategy needs to bring q2 to zero."""
    return q0.q2 / _positive_epsilon(params)

def queue_growth(q0: PhasePoint, params: GameParams) -> float:
    """Worst-case growth of q1 while the attack level is being driven down."""
    return params.k / 2.0 * q0.q2 ** 2 / _positive_epsilon(params)

def q1_peak_bound(q0: PhasePoint, params: GameParams) -> float:
    return q0.q1 + queue_growth(q0, params)

def t1_bound(q0: PhasePoint, params: GameParams) -> float:
    eps = _positive_epsilon(params)
    ratio = q0.q2 / eps
    return q0.q1 / eps + ratio + params.k / 2.0 * ratio ** 2

def classic_draining_time(q1_0: float, params: GameParams) -> float:
    """Minimal draining time q1(0) / (mu - alpha_max) of the uncontested fluid queue."""
    if params.mu <= params.alpha_max:
        raise NotStabilizableError(ErrorMessages.NOT_STABILIZABLE)
    return q1_0 / (params.mu - params.alpha_max)

def check_conditions(params: GameParams, q0: PhasePoint) -> CheckReport:
    c1 = condition1(params)
    report = CheckReport(epsilon=params.epsilon, condition1=c1)
    if c1:
        report = report.model_copy(update={
            "condition2": condition2(params, q0),
            "t2_star": t2_star(q0, params),
            "q1_peak_bound": q1_peak_bound(q0, params),
            "t1_bound": t1_bound(q0, params),
            "queue_growth": queue_growth(q0, params),
        })
    if params.mu > params.alpha_max:
        report = report.model_copy(update={"classic_draining_time": classic_draining_time(q0.q1, params)})
    return report

def _first_hitting_time(times: np.ndarray, values: np.ndarray, level: float) -> Optional[float]:
    hits = np.flatnonzero(values <= level)
    if hits.size == 0:
        return None
    i = int(hits[0])
    if i == 0:
        return float(times[0])
    return crossing_time(float(times[i - 1]), float(values[i - 1]), float(times[i]), float(values[i]), level)

def verify_theorem(traj: Trajectory, q0: PhasePoint, params: GameParams, tol: float) -> TheoremReport:
    """
    Replays the proof obligations of the switching strategy against a
    simulated trajectory: T2 <= T2*, peak q1 within bound and capacity,
    drained by the T1 bound, admissible controls throughout.
    """
    times, q1, q2 = traj.times, traj.q1, traj.q2
    validator = ValidationUtils(params)
    c1 = condition1(params)
    c2 = condition2(params, q0) if c1 else False
    peak = float(q1.max())
    admissible = all(
        validator.control_violation(s.control) is None and validator.attack_violation(s.attack) is None
        for s in traj.samples
    )
    drained = traj.termination.kind is TerminationKind.DRAINED
    notes: List[str] = []

    report = TheoremReport(
        condition1_ok=c1,
        condition2_ok=c2,
        epsilon=params.epsilon,
        t2_observed=_first_hitting_time(times, q2, tol),
        q1_peak_observed=peak,
        t1_observed=traj.termination.t if drained else None,
        admissibility_ok=admissible,
        q1_max_respected=peak <= params.q1_max + tol,
        termination=traj.termination.kind,
        dt=traj.dt,
        tol=tol,
        verdict=Verdict.NOT_APPLICABLE,
    )

    if traj.defender_kind is not DefenderKind.THEOREM_SWITCHING:
        notes.append(f"trajectory played by the {traj.defender_kind.value} defender")
        return report.model_copy(update={"notes": notes})
    if not c1:
        notes.append("condition 1 fails: the switching strategy is unavailable")
        return report.model_copy(update={"verdict": Verdict.CONDITIONS_NOT_MET, "notes": notes})

    bounds = {
        "t2_star": t2_star(q0, params),
        "q1_peak_bound": q1_peak_bound(q0, params),
        "t1_bound": t1_bound(q0, params),
    }
    time_slack = 2.0 * traj.dt + Tolerances.TIME_ABSOLUTE

    if report.t2_observed is None or report.t2_observed > bounds["t2_star"] + time_slack:
        notes.append(f"T2 observed {report.t2_observed} exceeds T2* = {bounds['t2_star']:.6g}")
    if peak > min(bounds["q1_peak_bound"], params.q1_max) + tol:
        notes.append(f"peak q1 {peak:.6g} exceeds min(bound, q1_max) = {min(bounds['q1_peak_bound'], params.q1_max):.6g}")
    if not drained:
        notes.append(f"game not drained: {traj.termination.kind.value}")
    elif report.t1_observed > bounds["t1_bound"] + time_slack:
        notes.append(f"T1 observed {report.t1_observed:.6g} exceeds bound {bounds['t1_bound']:.6g}")
    if not admissible:
        notes.append("inadmissible control in trajectory")
    if not report.q1_max_respected:
        notes.append("phase constraint q1 <= q1_max violated")

    if c2:
        verdict = Verdict.FAILED if notes else Verdict.VERIFIED
    elif traj.termination.kind is TerminationKind.OVERFLOW:
        verdict = Verdict.CONDITION_VIOLATED_DEMONSTRATED
        notes.append("condition 2 fails and the queue overflowed")
    else:
        verdict = Verdict.CONDITIONS_NOT_MET
        notes.append("condition 2 fails; bounds are not guaranteed")

    logger.info(f"Theorem verification verdict: {verdict.value}")
    return report.model_copy(update={**bounds, "verdict": verdict, "notes": notes})
