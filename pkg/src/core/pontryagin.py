import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np
from scipy.integrate import trapezoid
from scipy.spatial import ConvexHull, QhullError

from ..config import get_settings
from ..constants import MONOTONICITY_PROBES, ErrorMessages, Tolerances
from ..exceptions import EmptyPolytopeError, InvalidParameterError, UndefinedConditionError
from ..models import GameState
from ..schemas import CaptureTimeResult, GameParams, InitialState
from ..utils.validation_utils import require_finite

logger = logging.getLogger(__name__)

PhasePoint = Union[GameState, InitialState]

def _canonical(vertices: np.ndarray) -> np.ndarray:
    """Rotates a counterclockwise vertex cycle to start at its lexicographic minimum."""
    start = np.lexsort((vertices[:, 1], vertices[:, 0]))[0]
    return np.roll(vertices, -start, axis=0)

@dataclass(frozen=True)
class Polytope2:
    """Convex polygon in the plane; may degenerate to a segment, a point or nothing."""
    vertices: np.ndarray

    @classmethod
    def empty(cls) -> "Polytope2":
        return cls(np.empty((0, 2)))

    @classmethod
    def hull(cls, points) -> "Polytope2":
        pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
        if pts.shape[0] <= 1:
            return cls(pts)

        centered = pts - pts.mean(axis=0)
        scale = max(1.0, float(np.abs(pts).max()))
        if np.linalg.matrix_rank(centered, tol=Tolerances.RANK * scale) == 2:
            try:
                hull = ConvexHull(pts)
                # Qhull lists 2-D hull vertices counterclockwise
                return cls(_canonical(pts[hull.vertices]))
            except QhullError:
                logger.debug("Qhull rejected a nearly flat point set; treating it as a segment")

        _, _, vt = np.linalg.svd(centered)
        proj = centered @ vt[0]
        ends = pts[[int(np.argmin(proj)), int(np.argmax(proj))]]
        return cls(ends[np.lexsort((ends[:, 1], ends[:, 0]))])

    @property
    def is_empty(self) -> bool:
        return self.vertices.shape[0] == 0

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def transform(self, matrix: np.ndarray) -> "Polytope2":
        if self.is_empty:
            return self
        return Polytope2.hull(self.vertices @ np.asarray(matrix, dtype=float).T)

    def allclose(self, other: "Polytope2", atol: float = 1e-12) -> bool:
        return self.vertices.shape == other.vertices.shape and bool(
            np.allclose(self.vertices, other.vertices, rtol=0.0, atol=atol)
        )

@dataclass(frozen=True)
class DirectionGrid:
    n_dirs: int = 256

    def __post_init__(self):
        if self.n_dirs < 8:
            raise InvalidParameterError(f"Direction grid needs at least 8 directions (got {self.n_dirs})")

    @cached_property
    def vectors(self) -> np.ndarray:
        angles = 2.0 * np.pi * np.arange(self.n_dirs) / self.n_dirs
        return np.column_stack([np.cos(angles), np.sin(angles)])

    def refined(self, factor: int = 2) -> "DirectionGrid":
        return DirectionGrid(self.n_dirs * factor)

def _require_condition1(params: GameParams):
    if not condition1(params):
        raise UndefinedConditionError(ErrorMessages.CONDITION1_VIOLATED)

def control_deficit_polytope(params: GameParams) -> Polytope2:
    """Intersection over v in V of (U - v): the triangle with legs eps."""
    eps = params.epsilon
    if eps < 0:
        return Polytope2.empty()
    return Polytope2.hull([(0.0, 0.0), (eps, 0.0), (0.0, eps)])

def matrix_exp_At(params: GameParams, t: float) -> np.ndarray:
    """e^{At} for A = [[0, k], [0, 0]]; A is nilpotent so the series stops at I + At."""
    require_finite(t)
    return np.array([[1.0, params.k * t], [0.0, 1.0]])

def pontryagin_map(t: float, params: GameParams) -> Polytope2:
    """omega(t) = co{(0,0), (eps,0), (k t eps, eps)}."""
    require_finite(t)
    if t < 0:
        raise InvalidParameterError(f"Pontryagin map is defined for t >= 0 (got {t})")
    eps = params.epsilon
    if eps < 0:
        return Polytope2.empty()
    return Polytope2.hull([(0.0, 0.0), (eps, 0.0), (params.k * t * eps, eps)])

def condition1(params: GameParams) -> bool:
    return params.mu > params.nu + params.alpha_max

def condition2(params: GameParams, q0: PhasePoint) -> bool:
    eps = params.epsilon
    if eps <= 0:
        raise UndefinedConditionError(ErrorMessages.UNDEFINED_FOR_EPSILON)
    return params.q1_max - q0.q1 >= params.k / (2.0 * eps) * q0.q2 ** 2

def support(poly: Polytope2, direction) -> float:
    if poly.is_empty:
        raise EmptyPolytopeError(ErrorMessages.EMPTY_POLYTOPE)
    return float(np.max(poly.vertices @ np.asarray(direction, dtype=float)))

def _support_lines(params: GameParams, directions: np.ndarray):
    """
    Each vertex of omega(tau) moves linearly in tau, so <vertex_i(tau), p> is
    c_i + d_i * tau. Returns (c, d) with shape (3, n_dirs).
    """
    eps, k = params.epsilon, params.k
    p1, p2 = directions[:, 0], directions[:, 1]
    zeros = np.zeros_like(p1)
    c = np.stack([zeros, eps * p1, eps * p2])
    d = np.stack([zeros, zeros, k * eps * p1])
    return c, d

def aumann_support_many(T: float, directions, params: GameParams, n_quad: int) -> np.ndarray:
    """
    Support function of the integral of omega over [0, T] for several
    directions at once. The integrand is the upper envelope of three lines
    in tau, so splitting at the envelope's breakpoints makes the composite
    trapezoid rule exact.
    """
    if n_quad < 2:
        raise InvalidParameterError(f"Quadrature needs at least 2 points per piece (got {n_quad})")
    require_finite(T)
    if T < 0:
        raise InvalidParameterError(f"Integration horizon must be nonnegative (got {T})")
    _require_condition1(params)
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    if T == 0:
        return np.zeros(directions.shape[0])

    c, d = _support_lines(params, directions)
    cuts = [np.zeros(directions.shape[0]), np.full(directions.shape[0], T)]
    for i, j in ((0, 1), (0, 2), (1, 2)):
        slope_gap = d[i] - d[j]
        with np.errstate(divide="ignore", invalid="ignore"):
            crossing = np.where(slope_gap != 0, (c[j] - c[i]) / slope_gap, 0.0)
        cuts.append(np.clip(crossing, 0.0, T))
    nodes = np.sort(np.stack(cuts, axis=1), axis=1)            # (n_dirs, 5)

    weights = np.linspace(0.0, 1.0, n_quad)
    lo, hi = nodes[:, :-1, None], nodes[:, 1:, None]
    taus = lo + (hi - lo) * weights                             # (n_dirs, 4, n_quad)
    envelope = np.max(c[:, :, None, None] + d[:, :, None, None] * taus[None], axis=0)
    return trapezoid(envelope, taus, axis=-1).sum(axis=1)

def aumann_integral_support(T: float, direction, params: GameParams, n_quad: int = 16) -> float:
    return float(aumann_support_many(T, np.asarray(direction, dtype=float)[None, :], params, n_quad)[0])

def nikolsky_membership(
    T: float,
    q0: PhasePoint,
    params: GameParams,
    grid: DirectionGrid,
    n_quad: int = 16,
    tol: Optional[float] = None,
) -> bool:
    """
    Tests e^{AT} q0 against the integral of omega over [0, T] through the
    support function in every grid direction (an outer approximation).
    """
    x = matrix_exp_At(params, T) @ np.array([q0.q1, q0.q2])
    if tol is None:
        tol = Tolerances.MEMBERSHIP_RELATIVE * (1.0 + float(np.linalg.norm(x)))
    bounds = aumann_support_many(T, grid.vectors, params, n_quad)
    return bool(np.all(grid.vectors @ x <= bounds + tol))

def min_capture_time(
    q0: PhasePoint,
    params: GameParams,
    grid: DirectionGrid,
    tol_T: float,
    n_quad: int = 16,
    horizon: Optional[float] = None,
) -> CaptureTimeResult:
    """
    First T on a geometric scan tol_T * 2^j where the membership test holds,
    refined by bisection to tol_T. A few later scan points are re-tested and
    any failure is reported as non-monotone.
    """
    _require_condition1(params)
    if tol_T <= 0:
        raise InvalidParameterError(f"tol_T must be positive (got {tol_T})")
    if horizon is None:
        horizon = get_settings().CAPTURE_HORIZON_FACTOR * tol_T

    evaluations = 0

    def member(T: float) -> bool:
        nonlocal evaluations
        evaluations += 1
        return nikolsky_membership(T, q0, params, grid, n_quad)

    def result(capture_time: Optional[float], monotone: bool = True) -> CaptureTimeResult:
        return CaptureTimeResult(
            capture_time=capture_time,
            monotone=monotone,
            n_dirs=grid.n_dirs,
            n_quad=n_quad,
            tol_T=tol_T,
            horizon=horizon,
            evaluations=evaluations,
        )

    if member(0.0):
        return result(0.0)

    lo, hi = 0.0, None
    T = tol_T
    while T <= horizon:
        if member(T):
            hi = T
            break
        lo = T
        T *= 2.0
    if hi is None:
        logger.info(f"No capture time found up to horizon {horizon:.6g}")
        return result(None)
    logger.debug(f"Capture time bracketed in [{lo:.6g}, {hi:.6g}]")

    monotone = True
    probe = 2.0 * hi
    for _ in range(MONOTONICITY_PROBES):
        if probe > horizon:
            break
        if not member(probe):
            monotone = False
            logger.warning(f"Membership lost again at T={probe:.6g} after holding at T={hi:.6g}")
            break
        probe *= 2.0

    while hi - lo > tol_T:
        mid = 0.5 * (lo + hi)
        if member(mid):
            hi = mid
        else:
            lo = mid
    return result(hi, monotone)
