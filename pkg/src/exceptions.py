# src/exceptions.py
from typing import Optional

class FluidGameError(Exception):
    """Base exception for model and scenario errors"""
    pass

class InvalidParameterError(FluidGameError):
    """Raised when a numeric precondition fails"""
    pass

class DimensionMismatchError(FluidGameError):
    """Raised when matrix and vector shapes disagree"""
    pass

class AllocationConstraintError(FluidGameError):
    """Raised when an allocation violates Cu <= capacity or u >= 0"""
    def __init__(self, t: float, report):
        self.t = t
        self.report = report
        super().__init__(f"Allocation constraint violated at t={t:.6g}: {report.describe()}")

class StrategyFaultError(FluidGameError):
    """Raised when a player emits an inadmissible control"""
    def __init__(self, player: str, t: float, detail: str):
        self.player = player
        self.t = t
        super().__init__(f"Strategy fault by {player} at t={t:.6g}: {detail}")

class StrategyUnavailableError(FluidGameError):
    """Raised when the switching strategy is requested without Condition 1"""
    pass

class UndefinedConditionError(FluidGameError):
    """Raised when a condition or bound needs epsilon > 0"""
    pass

class NotStabilizableError(FluidGameError):
    """Raised when the classic fluid queue cannot be drained"""
    pass

class EmptyPolytopeError(FluidGameError):
    """Raised on support queries against an empty polytope"""
    pass

class HorizonMismatchError(FluidGameError):
    """Raised when stochastic paths and the fluid path disagree in length"""
    pass

class ScenarioParseError(FluidGameError):
    """Raised when a scenario file is not valid JSON"""
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")

class ScenarioValidationError(FluidGameError):
    """Raised when a scenario violates a field invariant"""
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
