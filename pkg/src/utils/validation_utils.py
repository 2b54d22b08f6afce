# src/utils/validation_utils.py
import math

from ..constants import ErrorMessages, Players, Tolerances
from ..exceptions import InvalidParameterError, StrategyFaultError
from ..models import ArrivalSample, AttackInput, ControlInput
from ..schemas import GameParams

def require_finite(*values: float):
    if not all(math.isfinite(v) for v in values):
        raise InvalidParameterError(ErrorMessages.NON_FINITE_INPUT)

def require_positive(name: str, value: float):
    if not math.isfinite(value) or value <= 0:
        raise InvalidParameterError(f"{name} must be positive and finite (got {value})")

class ValidationUtils:
    """Admissibility checks for what the players emit during a run."""

    def __init__(self, params: GameParams):
        self.params = params
        self.slack = Tolerances.ADMISSIBILITY * max(1.0, params.mu)

    def control_violation(self, u: ControlInput) -> str | None:
        if not (math.isfinite(u.u1) and math.isfinite(u.u2)):
            return "non-finite control"
        if u.u1 < -self.slack or u.u2 < -self.slack:
            return f"negative allocation u=({u.u1:.6g}, {u.u2:.6g})"
        if u.u1 + u.u2 > self.params.mu + self.slack:
            return f"u1 + u2 = {u.u1 + u.u2:.6g} exceeds mu = {self.params.mu:.6g}"
        return None

    def attack_violation(self, a: AttackInput) -> str | None:
        if not math.isfinite(a.v):
            return "non-finite attack rate"
        if a.v < -self.slack or a.v > self.params.nu + self.slack:
            return f"v = {a.v:.6g} outside [0, {self.params.nu:.6g}]"
        return None

    def arrival_violation(self, a: ArrivalSample) -> str | None:
        if not math.isfinite(a.alpha):
            return "non-finite arrival rate"
        if a.alpha < -self.slack or a.alpha > self.params.alpha_max + self.slack:
            return f"alpha = {a.alpha:.6g} outside [0, {self.params.alpha_max:.6g}]"
        return None

    def check_control(self, u: ControlInput, t: float):
        detail = self.control_violation(u)
        if detail:
            raise StrategyFaultError(Players.DEFENDER, t, detail)

    def check_attack(self, a: AttackInput, t: float):
        detail = self.attack_violation(a)
        if detail:
            raise StrategyFaultError(Players.ATTACKER, t, detail)

    def check_arrival(self, a: ArrivalSample, t: float):
        detail = self.arrival_violation(a)
        if detail:
            raise StrategyFaultError(Players.ARRIVAL, t, detail)
