"""Symplectic leaves of a rank-2 Poisson structure, seen one point at a time.

At a point q of rank 2 the leaf through q has tangent plane equal to the image of the anchor.
For u, v in that plane pick covectors alpha, beta with anchor(alpha) = u and anchor(beta) = v;
then omega(u, v) = pi(alpha, beta) = <alpha, v>, whatever lifts were picked.

Completeness (every Hamiltonian vector field being complete) is a global property of the closed
manifold and cannot be decided on an open chart, so nothing here attempts it: flows simply stop
at the chart boundary.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from tqdm import tqdm

from .brackets import hamiltonian_vector_field
from .defaults import (
    DEFAULT_MIN_STEP,
    DEFAULT_RADII,
    DEFAULT_STEP,
    FRAME_TOLERANCE,
    LIFT_TOLERANCE,
    NORM_GROWTH_LIMIT,
    RANK_TOLERANCE,
    SINGULAR_DISTANCE_GUARD,
)
from .errors import DimensionMismatchError, LiftError, SingularPointError
from .models import ModelKind, describe, singular_distance
from .multivector import bivector_matrix, numeric_rank, rank_at

LOGGER = logging.getLogger(__name__)


def _float_point(point):
    return tuple(float(coordinate) for coordinate in point)


def anchor_matrix(P, q):
    """The matrix B with anchor(alpha) = B @ alpha at q (B = pi^ij)."""
    return bivector_matrix(P.bivector, q)


def casimir_differentials(P, q):
    q = _float_point(q)
    return np.asarray([F.gradient(q, exact=False) for F in P.casimirs], dtype=float).reshape(
        len(P.casimirs), P.dimension
    )


def require_regular(P, q):
    """Raise SingularPointError unless q has rank 2 and keeps clear of the singular set."""
    distance = singular_distance(P)
    if distance is not None and distance(q) < SINGULAR_DISTANCE_GUARD:
        raise SingularPointError(f"{q} is within {SINGULAR_DISTANCE_GUARD} of the singular set")
    rank = rank_at(P.bivector, q)
    if rank != 2:
        raise SingularPointError(f"Rank {rank} at {q}; leaf computations need rank 2")


def _orthonormal_columns(matrix, tolerance=RANK_TOLERANCE):
    """Orthonormal basis (as rows) of the column space of ``matrix``."""
    left, singular_values, _ = np.linalg.svd(matrix)
    largest = singular_values.max() if singular_values.size else 0.0
    scale = largest if largest >= tolerance else 1.0
    rank = int(np.sum(singular_values > tolerance * scale))
    return left[:, :rank].T


def _null_space(matrix, tolerance=RANK_TOLERANCE):
    """Orthonormal basis (as rows) of the kernel of ``matrix``."""
    columns = matrix.shape[1]
    if matrix.shape[0] == 0:
        return np.eye(columns)
    _, singular_values, right = np.linalg.svd(matrix)
    largest = singular_values.max() if singular_values.size else 0.0
    scale = largest if largest >= tolerance else 1.0
    rank = int(np.sum(singular_values > tolerance * scale))
    return right[rank:]


def characteristic_basis(P, q):
    """Orthonormal basis of the characteristic distribution (the anchor image) at q."""
    return _orthonormal_columns(anchor_matrix(P, _float_point(q)))


def casimir_critical(P, q):
    """Whether the declared Casimir differentials are linearly dependent at q.

    At such points the level set is singular and the leaf through q is q itself.
    """
    if not P.casimirs:
        return False
    return numeric_rank(casimir_differentials(P, q)) < len(P.casimirs)


def anchor_kernel(P, q):
    """Orthonormal basis (rows) of the covectors the anchor sends to zero at q."""
    return _null_space(anchor_matrix(P, _float_point(q)))


def covector_lift(P, q, w, tolerance=LIFT_TOLERANCE):
    """Minimum-norm alpha with anchor(alpha) = w at q."""
    q = _float_point(q)
    w = np.asarray(w, dtype=float)
    if w.shape != (P.dimension,):
        raise DimensionMismatchError(f"Vector has shape {w.shape}, chart has {P.dimension}")
    matrix = anchor_matrix(P, q)
    alpha = np.linalg.lstsq(matrix, w, rcond=None)[0]
    residual = float(np.linalg.norm(matrix @ alpha - w))
    if residual > tolerance * max(1.0, float(np.linalg.norm(w))):
        raise LiftError(f"{tuple(w)} is not in the anchor image at {q} (residual {residual:.3g})")
    return alpha


@dataclass(frozen=True)
class LeafFrame:
    point: Tuple[float, ...]
    u: Tuple[float, ...]
    v: Tuple[float, ...]
    residual: float = 0.0


def _frame_residual(P, q, u, v):
    gram = np.array([[u @ u, u @ v], [v @ u, v @ v]])
    residual = float(np.max(np.abs(gram - np.eye(2))))
    if P.casimirs:
        differentials = casimir_differentials(P, q)
        scale = np.maximum(1.0, np.linalg.norm(differentials, axis=1))
        residual = max(
            residual,
            float(np.max(np.abs(differentials @ u) / scale)),
            float(np.max(np.abs(differentials @ v) / scale)),
        )
    return residual


def leaf_frame(P, q):
    """Orthonormal (u, v) spanning the leaf plane at q, ordered so that omega(u, v) > 0.

    The plane is the common kernel of the Casimir differentials when they are independent, and
    the anchor image otherwise.
    """
    require_regular(P, q)
    q = _float_point(q)
    plane = None
    if P.casimirs and len(P.casimirs) == P.dimension - 2 and not casimir_critical(P, q):
        plane = _null_space(casimir_differentials(P, q))
    if plane is None or plane.shape[0] != 2:
        plane = characteristic_basis(P, q)
    u, v = plane[0], plane[1]
    if leaf_form(P, q, u, v) < 0:
        v = -v
    residual = _frame_residual(P, q, u, v)
    if residual > FRAME_TOLERANCE:
        LOGGER.warning(f"Leaf frame at {q} is off by {residual:.3g}")
    return LeafFrame(q, tuple(float(c) for c in u), tuple(float(c) for c in v), residual)


def leaf_form(P, q, u, v, alpha=None, beta=None):
    """omega(u, v) = pi(alpha, beta) on the leaf through q.

    ``alpha`` and ``beta`` default to the minimum-norm lifts of u and v; any other lifts give the
    same value.
    """
    require_regular(P, q)
    q = _float_point(q)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    alpha = covector_lift(P, q, u) if alpha is None else np.asarray(alpha, dtype=float)
    beta = covector_lift(P, q, v) if beta is None else np.asarray(beta, dtype=float)
    return float(alpha @ anchor_matrix(P, q) @ beta)


def area_form_ratio(P, q):
    """r with omega = r * (Euclidean area form) on the leaf through q, positive by orientation."""
    frame = leaf_frame(P, q)
    return leaf_form(P, frame.point, frame.u, frame.v)


@dataclass(frozen=True)
class ReferenceFrame:
    """A hand-derived orthonormal leaf frame with one covector lift and the resulting omega(u, v)."""

    point: Tuple[float, ...]
    u: Tuple[float, ...]
    v: Tuple[float, ...]
    lift: Tuple[float, ...]
    lifted: str
    value: float


def _lefschetz_reference(q, k):
    x1, y1, x2, y2 = q
    inner = x1 ** 2 + y1 ** 2
    total = inner + x2 ** 2 + y2 ** 2
    if inner:
        norm = math.sqrt(inner * total)
        u = np.array([-(x1 * x2 + y1 * y2), -(x1 * y2 - x2 * y1), inner, 0.0]) / norm
        v = np.array([x1 * y2 - x2 * y1, -(x1 * x2 + y1 * y2), 0.0, inner]) / norm
        alpha = np.array([0.0, 0.0, 0.0, 1.0 / (k * norm)])
    else:
        u = np.array([1.0, 0.0, 0.0, 0.0])
        v = np.array([0.0, 1.0, 0.0, 0.0])
        alpha = np.array([0.0, 1.0 / (k * (x2 ** 2 + y2 ** 2)), 0.0, 0.0])
    return u, v, alpha, "u", float(alpha @ v)


def _fold_reference(q, k):
    _, x1, x2, x3 = q
    transverse = x2 ** 2 + x3 ** 2
    if transverse:
        root = math.sqrt(transverse)
        radius = math.sqrt(x1 ** 2 + transverse)
        u = np.array([0.0, 0.0, x3, -x2]) / root
        v = np.array([0.0, transverse, x1 * x2, x1 * x3]) / (root * radius)
        beta = np.array([0.0, 0.0, -x3, x2]) / (k * root * radius)
    else:
        u = np.array([0.0, 0.0, math.copysign(1.0, x1), 0.0])
        v = np.array([0.0, 0.0, 0.0, 1.0])
        beta = np.array([0.0, 0.0, -1.0 / (x1 * k), 0.0])
    return u, v, beta, "v", float(-(beta @ u))


def reference_frame(P, q):
    """The explicit frame for the Lefschetz and fold models, with k read off at q."""
    require_regular(P, q)
    q = _float_point(q)
    kind = describe(P).kind
    k = float(P.k(q, exact=False))
    if kind is ModelKind.LEFSCHETZ:
        u, v, lift, lifted, value = _lefschetz_reference(q, k)
    elif kind.is_fold:
        u, v, lift, lifted, value = _fold_reference(q, k)
    else:
        raise ValueError(f"No reference frame for a {P.model_tag} structure")
    return ReferenceFrame(q, tuple(u), tuple(v), tuple(lift), lifted, value)


def frames_agree(a, b, tolerance=FRAME_TOLERANCE):
    """Whether two orthonormal frames span the same plane (equal orthogonal projectors)."""
    first = np.array([a.u, a.v])
    second = np.array([b.u, b.v])
    return bool(np.max(np.abs(first.T @ first - second.T @ second)) <= tolerance)


@dataclass(frozen=True)
class RadialPath:
    """r -> origin + r * direction / |direction|."""

    origin: Tuple[float, ...]
    direction: Tuple[float, ...]

    def point(self, radius):
        direction = np.asarray(self.direction, dtype=float)
        length = float(np.linalg.norm(direction))
        if not length:
            raise ValueError("A radial path needs a nonzero direction")
        return tuple(float(c) for c in np.asarray(self.origin, dtype=float) + radius * direction / length)


def default_path(P):
    """Straight approach to the singular set: along x1 from the origin (theta = 0 for folds)."""
    zeros = (0.0,) * P.dimension
    direction = [0.0] * P.dimension
    direction[1 if describe(P).kind.is_fold else 0] = 1.0
    return RadialPath(zeros, tuple(direction))


@dataclass(frozen=True)
class ScalingFit:
    model: str
    radii: Tuple[float, ...]
    values: Tuple[float, ...]
    slope: float
    intercept: float
    residual: float


def scaling_fit(P, path=None, radii=None):
    """Least-squares slope of log(area_form_ratio) against log(radius) along ``path``."""
    path = path or default_path(P)
    radii = sorted((float(r) for r in (radii or DEFAULT_RADII)), reverse=True)
    if any(r <= 0 for r in radii) or len(set(radii)) != len(radii):
        raise ValueError(f"Radii must be distinct and positive, got {radii}")
    if len(radii) < 2:
        raise ValueError("A slope needs at least two radii")
    values = [area_form_ratio(P, path.point(radius)) for radius in radii]
    logs_r = np.log(radii)
    logs_v = np.log(np.abs(values))
    slope, intercept = np.polyfit(logs_r, logs_v, 1)
    residual = float(np.max(np.abs(logs_v - (slope * logs_r + intercept))))
    LOGGER.info(f"Scaling slope for {P.model_tag}: {slope:.6f} (fit residual {residual:.3g})")
    return ScalingFit(P.model_tag, tuple(radii), tuple(values), float(slope), float(intercept), residual)


@dataclass(frozen=True)
class StepPolicy:
    step: float = DEFAULT_STEP
    min_step: float = DEFAULT_MIN_STEP
    growth_limit: float = NORM_GROWTH_LIMIT


@dataclass(frozen=True)
class FlowEvent:
    kind: str
    time: float
    point: Tuple[float, ...]


@dataclass(frozen=True)
class LeafTrajectory:
    label: str
    times: Tuple[float, ...]
    points: Tuple[Tuple[float, ...], ...]
    casimir_values: Tuple[Tuple[float, ...], ...]
    drift: Tuple[float, ...]
    events: Tuple[FlowEvent, ...] = field(default_factory=tuple)

    @property
    def endpoint(self):
        return self.points[-1]

    @property
    def max_drift(self):
        return max(self.drift, default=0.0)


def _rk4(vector, x, dt):
    k1 = vector(x)
    k2 = vector(x + dt / 2 * k1)
    k3 = vector(x + dt / 2 * k2)
    k4 = vector(x + dt * k3)
    return x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_hamiltonian(P, h, x0, T, policy=None, label=None, progress=False):
    """Classical RK4 along X_h from x0 for time T.

    The step is halved for every doubling of the bivector norm beyond ``growth_limit`` times its
    value at x0. Leaving the chart box, approaching the singular set and step underflow stop the
    flow and are recorded as events.
    """
    policy = policy or StepPolicy()
    h = P.chart.scalar(h)
    if T < 0:
        raise ValueError(f"Flow time must be non-negative, got {T}")
    x0 = _float_point(P.chart.check_point(x0))
    if not P.chart.contains(x0):
        raise ValueError(f"Start point {x0} is outside the chart box")

    components = hamiltonian_vector_field(P, h)

    def vector(x):
        point = tuple(x)
        return np.array([float(component(point, exact=False)) for component in components])

    def norm(x):
        return float(np.linalg.norm(bivector_matrix(P.bivector, tuple(x))))

    def casimirs(x):
        return tuple(float(F(tuple(x), exact=False)) for F in P.casimirs)

    distance = singular_distance(P)
    reference = max(norm(x0), np.finfo(float).tiny)
    start_values = casimirs(x0)

    x = np.asarray(x0, dtype=float)
    t = 0.0
    times, points, values, events = [0.0], [P.chart.normalize(x0)], [start_values], []
    with tqdm(total=float(T), unit="t", disable=not progress) as bar:
        while t < T:
            remaining = T - t
            halvings = 0
            while norm(x) > policy.growth_limit * reference * 2 ** halvings:
                halvings += 1
            dt = policy.step / 2 ** halvings
            if dt < policy.min_step:
                events.append(FlowEvent("StepUnderflow", t, tuple(float(c) for c in x)))
                LOGGER.warning(f"Step underflow at t={t:.6g}, x={tuple(x)}")
                break
            # the last step absorbs a remainder shorter than min_step
            if remaining - dt < policy.min_step:
                dt = remaining
            candidate = _rk4(vector, x, dt)
            if not P.chart.contains(tuple(candidate)):
                events.append(FlowEvent("BoundaryExit", t, tuple(float(c) for c in x)))
                LOGGER.warning(f"Flow leaves the chart box after t={t:.6g}")
                break
            if distance is not None and distance(candidate) < SINGULAR_DISTANCE_GUARD:
                events.append(FlowEvent("SingularApproach", t, tuple(float(c) for c in x)))
                LOGGER.warning(f"Flow reaches the singular set after t={t:.6g}")
                break
            x = candidate
            t = T if dt == remaining else t + dt
            times.append(t)
            points.append(P.chart.normalize(tuple(float(c) for c in x)))
            values.append(casimirs(x))
            bar.update(dt)

    drift = tuple(
        max(abs(row[index] - start) for row in values) / max(abs(start), 1.0)
        for index, start in enumerate(start_values)
    )
    if drift:
        LOGGER.debug(f"Casimir drift along the flow: {drift}")
    return LeafTrajectory(
        label or f"h={h.polynomial if h.is_exact else 'smooth'}",
        tuple(times),
        tuple(points),
        tuple(values),
        drift,
        tuple(events),
    )
