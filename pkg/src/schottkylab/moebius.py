"""Moebius maps, hyperbolic distance and complex powers of derivatives.

Maps are stored as real SL(2, R) matrices (their half-plane action).  The
disc-model action is obtained by conjugating with the Cayley transform
``z -> (z - i) / (z + i)``, so the model is always carried by context.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

Model = Literal["halfplane", "disc"]
MODELS = ("halfplane", "disc")

POLE_TOL = 1e-14
NEAR_PARABOLIC_TOL = 1e-10
DOMAIN_MARGIN = 1e-14

_CAYLEY = np.array([[1.0, -1.0j], [1.0, 1.0j]])
_CAYLEY_INV = np.array([[1.0j, 1.0j], [-1.0, 1.0]]) / 2.0j


class PoleError(ZeroDivisionError):
    """The point sits on (or numerically at) the pole of the map."""


class BranchError(ValueError):
    """No continuous logarithm of cz+d exists on the requested disc."""


class NearParabolicWarning(UserWarning):
    pass


def _check_model(model: str) -> None:
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


@dataclass(frozen=True)
class MoebiusMap:
    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_array(cls, m) -> "MoebiusMap":
        m = np.asarray(m, dtype=float).reshape(2, 2)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1])).normalized()

    @classmethod
    def from_disc_matrix(cls, m) -> "MoebiusMap":
        """Real form of a PSU(1,1) matrix acting on the unit disc."""
        m = np.asarray(m, dtype=complex).reshape(2, 2)
        h = _CAYLEY_INV @ m @ _CAYLEY
        h = h / cmath.sqrt(np.linalg.det(h))
        # overall sign of h is free; pick the one that makes the entries real
        k = int(np.argmax(np.abs(h)))
        h = h * (abs(h.flat[k]) / h.flat[k])
        if np.max(np.abs(h.imag)) > 1e-9 * max(1.0, np.max(np.abs(h))):
            raise ValueError("matrix does not preserve the unit disc")
        return cls.from_array(h.real)

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        return self.a + self.d

    def normalized(self) -> "MoebiusMap":
        det = self.det
        if det <= 0:
            raise ValueError(f"determinant must be positive, got {det!r}")
        if abs(det - 1.0) <= 1e-14:
            return self
        k = 1.0 / math.sqrt(det)
        return MoebiusMap(self.a * k, self.b * k, self.c * k, self.d * k)

    def array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def matrix(self, model: Model = "halfplane") -> np.ndarray:
        """Complex 2x2 matrix of the action in ``model`` (determinant 1)."""
        _check_model(model)
        m = self.array().astype(complex)
        if model == "disc":
            m = _CAYLEY @ m @ _CAYLEY_INV
        return m

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __call__(self, z, model: Model = "halfplane"):
        return mobius_apply(self, z, model)

    def is_integral(self) -> bool:
        return all(float(x).is_integer() for x in (self.a, self.b, self.c, self.d))


@dataclass(frozen=True)
class IsometryClass:
    kind: str
    translation_length: Optional[float] = None


def to_disc(z):
    """Cayley transform from the upper half-plane to the unit disc."""
    return (z - 1j) / (z + 1j)


def to_halfplane(w):
    return 1j * (1 + w) / (1 - w)


def convert(z, source: Model, target: Model):
    _check_model(source)
    _check_model(target)
    if source == target:
        return z
    return to_disc(z) if target == "disc" else to_halfplane(z)


def in_model(z, model: Model, margin: float = DOMAIN_MARGIN) -> bool:
    _check_model(model)
    if model == "halfplane":
        return bool(np.all(np.imag(z) > margin))
    return bool(np.all(np.abs(z) < 1.0 - margin))


def check_point(z, model: Model) -> None:
    if not in_model(z, model):
        raise ValueError(f"point {z!r} is not inside the {model} model")


def mobius_apply(m: MoebiusMap, z, model: Model = "halfplane"):
    """Apply ``m`` to ``z`` (scalar or array) in the given model."""
    (a, b), (c, d) = m.matrix(model)
    den = c * z + d
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleError(f"{z!r} is at the pole of the map")
    return (a * z + b) / den


def mobius_classify(m: MoebiusMap) -> IsometryClass:
    m = m.normalized()
    t = abs(m.trace)
    if m.b == 0 and m.c == 0 and m.a == m.d:
        return IsometryClass("identity")
    if t > 2.0:
        if t - 2.0 < NEAR_PARABOLIC_TOL:
            warnings.warn(
                f"|trace| = {t!r} is within {NEAR_PARABOLIC_TOL} of 2; length is ill-conditioned",
                NearParabolicWarning,
                stacklevel=2,
            )
        return IsometryClass("hyperbolic", translation_length_from_trace(t))
    if t == 2.0:
        return IsometryClass("parabolic")
    return IsometryClass("elliptic")


def translation_length_from_trace(t):
    """2 arccosh(|t|/2), evaluated stably for large traces."""
    x = np.abs(t) / 2.0
    return 2.0 * np.arccosh(x)


def hyperbolic_distance(z, w, model: Model = "halfplane"):
    _check_model(model)
    diff = np.abs(z - w)
    if model == "halfplane":
        q = diff / (2.0 * np.sqrt(np.imag(z) * np.imag(w)))
    else:
        q = diff / np.sqrt((1.0 - np.abs(z) ** 2) * (1.0 - np.abs(w) ** 2))
    return 2.0 * np.arcsinh(q)


def sigma_kernel(z, w, model: Model = "halfplane"):
    """cosh^2(d(z, w)/2), the point-pair invariant used with Poincare series."""
    d = hyperbolic_distance(z, w, model)
    return np.cosh(d / 2.0) ** 2


def distance_to_geodesic(z, center, radius, model: Model = "halfplane"):
    """Distance from ``z`` to the geodesic carried by a circle orthogonal to the boundary.

    Returns 0 when ``z`` lies inside the circle.
    """
    _check_model(model)
    gap = np.abs(z - center) ** 2 - radius**2
    if model == "halfplane":
        q = gap / (2.0 * radius * np.imag(z))
    else:
        q = gap / (radius * (1.0 - np.abs(z) ** 2))
    return np.where(gap <= 0, 0.0, np.arcsinh(np.maximum(q, 0.0)))


def geodesic_separation(c1, r1, c2, r2) -> float:
    """Distance between two disjoint geodesics given by boundary-orthogonal circles."""
    x = (abs(c1 - c2) ** 2 - r1 * r1 - r2 * r2) / (2.0 * r1 * r2)
    if x <= 1.0:
        return 0.0
    return math.acosh(x)


def image_disc(m: MoebiusMap, center: complex, radius: float, model: Model = "halfplane") -> Tuple[complex, float]:
    """Euclidean disc m(D) for a disc D that does not contain the pole of m."""
    (a, b), (c, d) = m.matrix(model)
    if abs(c) < 1e-300:
        return (a * center + b) / d, radius * abs(a / d)
    mid = c * center + d
    rho = abs(c) * radius
    gap = abs(mid) ** 2 - rho**2
    if gap <= 0:
        raise PoleError("disc contains the pole of the map")
    inv_center = mid.conjugate() / gap
    inv_radius = rho / gap
    return a / c - inv_center / c, inv_radius / abs(c)


def power_derivative(
    m: MoebiusMap,
    z,
    s: complex,
    model: Model = "halfplane",
    anchor: Optional[Tuple[complex, complex]] = None,
    disc: Optional[Tuple[complex, float]] = None,
):
    """(m'(z))**s = exp(-2 s log(cz+d)).

    Without ``anchor`` the principal logarithm is used.  ``anchor = (z0, L0)``
    selects the branch of log m' that equals ``L0`` at ``z0`` and is continuous
    on any disc containing ``z0`` whose image under ``z -> cz+d`` avoids 0.
    Passing ``disc = (center, radius)`` checks that condition.
    """
    (_, _), (c, d) = m.matrix(model)
    if disc is not None:
        center, radius = disc
        if abs(c * center + d) <= abs(c) * radius:
            raise BranchError("image of the disc under z -> cz+d winds around 0")
    w = c * np.asarray(z) + d
    if np.any(np.abs(w) < POLE_TOL):
        raise PoleError(f"{z!r} is at the pole of the map")
    if anchor is None:
        logd = -2.0 * np.log(w)
    else:
        z0, L0 = anchor
        logd = L0 - 2.0 * np.log(w / (c * z0 + d))
    out = np.exp(s * logd)
    return out if np.ndim(out) else complex(out)


def log_derivative(m: MoebiusMap, z, model: Model = "halfplane", anchor=None):
    (_, _), (c, d) = m.matrix(model)
    w = c * np.asarray(z) + d
    if anchor is None:
        return -2.0 * np.log(w)
    z0, L0 = anchor
    return L0 - 2.0 * np.log(w / (c * z0 + d))
