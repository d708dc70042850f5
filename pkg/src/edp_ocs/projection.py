"""Projection onto the parabolic cone z² ≤ w·c₀ and the cuts it induces."""

import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
import scipy.optimize

from .exceptions import CutError, InputError, raise_exception
from .solver_logging import get_logger

LOG = get_logger()

NEWTON_STEPS = 4
ORACLE_XTOL = 1e-14


@dataclass(frozen=True)
class ConePoint:
    """Point (z, w) of the plane of one parabolic cone with radius c₀."""

    z: float
    w: float
    c0: float

    def __post_init__(self):
        if not self.c0 > 0:
            raise_exception(InputError, "InputError", f"c0 must be positive, got {self.c0}", __name__)

    def distance(self, other: "ConePoint") -> float:
        """Euclidean distance in the (z, w) plane."""
        return math.hypot(self.z - other.z, self.w - other.w)


class GeometricCut(NamedTuple):
    """Linear cut a_z·z + a_w·w ≤ b."""

    a_z: float
    a_w: float
    b: float

    def lhs(self, z, w):
        """Left-hand side at (z, w); works elementwise on arrays."""
        return self.a_z * z + self.a_w * w

    def violation(self, z, w):
        """Amount by which (z, w) violates the cut (negative if satisfied)."""
        return self.lhs(z, w) - self.b

    def normalized(self) -> "GeometricCut":
        """The same cut with a unit normal; its violation is then a distance."""
        norm = math.hypot(self.a_z, self.a_w)
        return GeometricCut(self.a_z / norm, self.a_w / norm, self.b / norm)


def violation_tolerance(c0: float) -> float:
    """Threshold on z² − w·c₀ above which a point counts as outside."""
    return 1e-8 * max(1.0, c0 * c0)


def is_outside(point: ConePoint) -> bool:
    """True if the point violates z² ≤ w·c₀ by more than the tolerance."""
    return point.z * point.z - point.w * point.c0 > violation_tolerance(point.c0)


# -----------------------------------------------------------------------------
# Cubic equations
# -----------------------------------------------------------------------------


def _polish(coeffs: Tuple[float, float, float, float], root: float) -> float:
    a, b, c, d = coeffs
    best, best_res = root, abs(((a * root + b) * root + c) * root + d)
    for _ in range(NEWTON_STEPS):
        slope = (3 * a * best + 2 * b) * best + c
        if slope == 0 or best_res == 0:
            break
        trial = best - (((a * best + b) * best + c) * best + d) / slope
        res = abs(((a * trial + b) * trial + c) * trial + d)
        if res >= best_res:
            break
        best, best_res = trial, res
    return best


def cardano_real_roots(a: float, b: float, c: float, d: float) -> Tuple[float, ...]:
    """Real roots of aλ³ + bλ² + cλ + d = 0 by Cardano's formula.

    With Q = (3ac − b²)/(9a²) and R = (9abc − 27a²d − 2b³)/(54a³): when
    Q³ + R² > 0 the single real root S + T − b/(3a) is returned, using real
    cube roots; otherwise all three roots come from the trigonometric form.
    Every root gets a few Newton steps.

    :returns: real roots in ascending order
    :raises InputError: if a = 0
    """
    if a == 0:
        raise_exception(InputError, "InputError", "leading coefficient must be nonzero", __name__)
    q = (3 * a * c - b * b) / (9 * a * a)
    r = (9 * a * b * c - 27 * a * a * d - 2 * b**3) / (54 * a**3)
    shift = b / (3 * a)
    disc = q**3 + r * r

    if disc > 0:
        root = math.sqrt(disc)
        roots = [float(np.cbrt(r + root) + np.cbrt(r - root)) - shift]
    elif q == 0:
        roots = [-shift]
    else:
        radius = math.sqrt(-q)
        angle = math.acos(max(-1.0, min(1.0, r / math.sqrt(-(q**3)))))
        roots = [
            2 * radius * math.cos((angle + 2 * math.pi * k) / 3) - shift for k in range(3)
        ]
    return tuple(sorted(_polish((a, b, c, d), root) for root in roots))


def cardano_real_root(a: float, b: float, c: float, d: float) -> float:
    """Largest real root of aλ³ + bλ² + cλ + d = 0."""
    return cardano_real_roots(a, b, c, d)[-1]


# -----------------------------------------------------------------------------
# Projection
# -----------------------------------------------------------------------------


def multiplier_cubic(point: ConePoint) -> Tuple[float, float, float, float]:
    """Coefficients of the cubic in the multiplier λ of the projection.

    Stationarity gives z̄ = ẑ/(1+2λ) and w̄ = ŵ + λc₀; substituting into
    z̄² = w̄c₀ gives
    4c₀²λ³ + (4c₀² + 4c₀ŵ)λ² + (c₀² + 4c₀ŵ)λ + (c₀ŵ − ẑ²) = 0.
    """
    c0, z_hat, w_hat = point.c0, point.z, point.w
    return (
        4 * c0 * c0,
        4 * c0 * c0 + 4 * c0 * w_hat,
        c0 * c0 + 4 * c0 * w_hat,
        c0 * w_hat - z_hat * z_hat,
    )


def project(point: ConePoint) -> ConePoint:
    """Nearest point of the cone z² ≤ w·c₀ in closed form.

    Points that are not outside are returned unchanged. For an outside
    point the multiplier λ is the real root of the cubic with 1 + 2λ > 0
    whose foot point is nearest.

    :param point: point to project
    :returns: foot point on the cone boundary
    """
    if not is_outside(point):
        return point
    if point.z == 0 and point.w < 0:
        return ConePoint(0.0, 0.0, point.c0)

    best = None
    for lam in cardano_real_roots(*multiplier_cubic(point)):
        if 1 + 2 * lam <= 0:
            continue
        foot = ConePoint(point.z / (1 + 2 * lam), point.w + lam * point.c0, point.c0)
        if best is None or point.distance(foot) < point.distance(best):
            best = foot
    if best is None:
        # Unreachable for an outside point: the multiplier is nonnegative.
        LOG.warning("No admissible multiplier for (%r, %r), using the oracle", point.z, point.w)
        return projection_oracle(point)
    return best


def projection_oracle(point: ConePoint) -> ConePoint:
    """Nearest point of the cone by one-dimensional root finding.

    Minimises (z − ẑ)² + (z²/c₀ − ŵ)² along the boundary w = z²/c₀. The
    derivative is proportional to g(z) = (2/c₀²)z³ + (1 − 2ŵ/c₀)z − |ẑ|,
    which is convex on [0, |ẑ|] with g(0) ≤ 0 < g(|ẑ|) for an outside point,
    so Brent's method on that bracket finds the unique minimiser.

    :param point: point to project
    :returns: foot point on the cone boundary
    """
    if not is_outside(point):
        return point
    c0, w_hat = point.c0, point.w
    target = abs(point.z)
    if target == 0:
        return ConePoint(0.0, 0.0, c0)

    def stationary(z):
        return (2 / (c0 * c0)) * z**3 + (1 - 2 * w_hat / c0) * z - target

    z = scipy.optimize.brentq(
        stationary, 0.0, target, xtol=ORACLE_XTOL, rtol=4 * np.finfo(float).eps
    )
    z = math.copysign(z, point.z)
    return ConePoint(z, z * z / c0, c0)


def geometric_cut(hat: ConePoint, bar: ConePoint) -> GeometricCut:
    """Supporting hyperplane at the foot point separating the outside point.

    (ẑ − z̄)(z − z̄) + (ŵ − w̄)(w − w̄) ≤ 0, i.e. a_z = ẑ − z̄, a_w = ŵ − w̄,
    b = a_z·z̄ + a_w·w̄.

    :param hat: outside point
    :param bar: its projection
    :returns: cut violated by ``hat`` by ‖hat − bar‖²
    :raises CutError: if the two points coincide
    """
    a_z = hat.z - bar.z
    a_w = hat.w - bar.w
    if a_z == 0 and a_w == 0:
        raise_exception(CutError, "CutError", "point coincides with its projection", __name__)
    return GeometricCut(a_z, a_w, a_z * bar.z + a_w * bar.w)
