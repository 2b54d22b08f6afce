# src/constants.py
class ErrorMessages:
    NON_FINITE_INPUT = "Non-finite value in simulation input"
    NON_POSITIVE_DT = "Step size dt must be positive"
    CONDITION1_VIOLATED = "Condition 1 violated: mu must exceed nu + alpha_max"
    UNDEFINED_FOR_EPSILON = "Quantity undefined for epsilon <= 0"
    NOT_STABILIZABLE = "Fluid model not stabilizable: mu must exceed alpha_max"
    EMPTY_POLYTOPE = "Support function of an empty polytope is undefined"
    HORIZON_MISMATCH = "Sample paths and fluid trajectory cover different horizons"
    STOCHASTIC_SECTION_MISSING = "Scenario has no 'stochastic' section"

class Tolerances:
    ADMISSIBILITY = 1e-9 # relative to max(1, mu)
    TIME_ABSOLUTE = 1e-9
    ALLOCATION = 1e-12
    MEMBERSHIP_RELATIVE = 1e-8
    RANK = 1e-12

class ExitCodes:
    OK = 0
    USAGE_OR_IO = 1
    CONDITION_FAILURE = 2

class Players:
    DEFENDER = "defender"
    ATTACKER = "attacker"
    ARRIVAL = "arrival profile"

SCENARIO_FORMAT_VERSION = 1
REPORT_FORMAT_VERSION = 1
TRAJECTORY_COLUMNS = ["t", "q1", "q2", "u1", "u2", "v", "alpha"]
MONOTONICITY_PROBES = 3 # scan points re-tested after the capture time is found
MAX_POLYLINE_POINTS = 2000
