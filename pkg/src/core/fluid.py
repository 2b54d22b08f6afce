import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Union

import numpy as np

from ..constants import Tolerances
from ..exceptions import AllocationConstraintError, DimensionMismatchError, InvalidParameterError
from ..models import FluidTrajectory
from ..utils.validation_utils import require_positive

logger = logging.getLogger(__name__)

@dataclass
class FluidNetworkModel:
    """
    Linear fluid network dq/dt = Bu + alpha with Cu <= capacity, u >= 0
    and state space 0 <= q <= upper.
    """
    B: np.ndarray                       # N x N_u effects matrix
    C: np.ndarray                       # N_m x N_u constituency matrix (0/1)
    alpha: np.ndarray                   # N arrival vector
    upper: Optional[np.ndarray] = None  # N buffer caps, inf where unbounded
    capacity: Optional[np.ndarray] = None  # N_m, defaults to e

    def __post_init__(self):
        self.B = np.atleast_2d(np.asarray(self.B, dtype=float))
        self.C = np.atleast_2d(np.asarray(self.C, dtype=float))
        self.alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        n, n_u = self.B.shape
        n_m = self.C.shape[0]

        if self.C.shape[1] != n_u:
            raise DimensionMismatchError(f"C has {self.C.shape[1]} columns, B has {n_u} activities")
        if self.alpha.shape != (n,):
            raise DimensionMismatchError(f"alpha has shape {self.alpha.shape}, expected ({n},)")
        if not np.isin(self.C, (0.0, 1.0)).all():
            raise InvalidParameterError("Constituency matrix entries must be 0 or 1")
        if (self.C.sum(axis=1) < 1).any():
            raise InvalidParameterError("Every resource row of C must serve at least one activity")

        self.upper = np.full(n, np.inf) if self.upper is None else np.atleast_1d(np.asarray(self.upper, dtype=float))
        if self.upper.shape != (n,):
            raise DimensionMismatchError(f"upper has shape {self.upper.shape}, expected ({n},)")
        self.capacity = np.ones(n_m) if self.capacity is None else np.atleast_1d(np.asarray(self.capacity, dtype=float))
        if self.capacity.shape != (n_m,):
            raise DimensionMismatchError(f"capacity has shape {self.capacity.shape}, expected ({n_m},)")

    @property
    def n_buffers(self) -> int:
        return self.B.shape[0]

    @property
    def n_activities(self) -> int:
        return self.B.shape[1]

@dataclass
class AllocationReport:
    ok: bool
    violated_rows: List[int] = field(default_factory=list)
    negative_components: List[int] = field(default_factory=list)
    utilization: Optional[np.ndarray] = None

    def describe(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.violated_rows:
            parts.append(f"capacity exceeded in rows {self.violated_rows}")
        if self.negative_components:
            parts.append(f"negative rate in components {self.negative_components}")
        return "; ".join(parts)

def validate_allocation(C, u, capacity=None) -> AllocationReport:
    """Checks u >= 0 and Cu <= capacity (e by default) componentwise."""
    C = np.atleast_2d(np.asarray(C, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.ndim != 1 or C.shape[1] != u.shape[0]:
        raise DimensionMismatchError(f"C is {C.shape[0]}x{C.shape[1]} but u has shape {u.shape}")
    capacity = np.ones(C.shape[0]) if capacity is None else np.atleast_1d(np.asarray(capacity, dtype=float))
    if capacity.shape != (C.shape[0],):
        raise DimensionMismatchError(f"capacity has shape {capacity.shape}, expected ({C.shape[0]},)")

    utilization = C @ u
    violated = np.flatnonzero(utilization > capacity + Tolerances.ALLOCATION).tolist()
    negative = np.flatnonzero(u < -Tolerances.ALLOCATION).tolist()
    return AllocationReport(
        ok=not violated and not negative,
        violated_rows=violated,
        negative_components=negative,
        utilization=utilization,
    )

Allocation = Union[Callable[[float, np.ndarray], np.ndarray], np.ndarray, List[float], float]

def _as_policy(allocation: Allocation) -> Callable[[float, np.ndarray], np.ndarray]:
    if callable(allocation):
        return allocation
    constant = np.atleast_1d(np.asarray(allocation, dtype=float))
    return lambda t, q: constant

def simulate_fluid(
    model: FluidNetworkModel,
    allocation: Allocation,
    q0,
    t_max: float,
    dt: float,
    tol: float = 1e-6,
) -> FluidTrajectory:
    """
    Integrates dq/dt = Bu + alpha with u sampled and held over each step,
    projecting onto q >= 0. The cumulative allocation z(t) is the running
    integral of u.
    """
    require_positive("dt", dt)
    require_positive("t_max", t_max)
    policy = _as_policy(allocation)
    q = np.atleast_1d(np.asarray(q0, dtype=float)).copy()
    if q.shape != (model.n_buffers,):
        raise DimensionMismatchError(f"q0 has shape {q.shape}, expected ({model.n_buffers},)")
    if (q < 0).any() or not np.isfinite(q).all():
        raise InvalidParameterError("q0 must be finite and nonnegative")

    n_steps = int(math.ceil(t_max / dt - 1e-12))
    times = np.minimum(np.arange(n_steps + 1) * dt, t_max)
    qs = np.empty((n_steps + 1, model.n_buffers))
    zs = np.zeros((n_steps + 1, model.n_activities))
    qs[0] = q

    drain_time = 0.0 if q.max(initial=0.0) <= tol else None
    bound_exceeded_at = 0.0 if (q > model.upper).any() else None

    for i in range(n_steps):
        t, h = times[i], times[i + 1] - times[i]
        u = np.atleast_1d(np.asarray(policy(t, qs[i]), dtype=float))
        report = validate_allocation(model.C, u, model.capacity)
        if not report.ok:
            raise AllocationConstraintError(float(t), report)

        qs[i + 1] = np.maximum(qs[i] + (model.B @ u + model.alpha) * h, 0.0)
        zs[i + 1] = zs[i] + u * h

        level_prev, level = qs[i].max(initial=0.0), qs[i + 1].max(initial=0.0)
        if drain_time is None and level <= tol:
            frac = (level_prev - tol) / (level_prev - level) if level_prev != level else 1.0
            drain_time = float(t + min(max(frac, 0.0), 1.0) * h)
        if bound_exceeded_at is None and (qs[i + 1] > model.upper).any():
            bound_exceeded_at = float(times[i + 1])
            logger.warning(f"Fluid state left the state space at t={bound_exceeded_at:.6g}")

    logger.debug(f"Fluid integration finished: {n_steps} steps, drain_time={drain_time}")
    return FluidTrajectory(
        times=times,
        q=qs,
        z=zs,
        drain_time=drain_time,
        bound_exceeded_at=bound_exceeded_at,
    )
