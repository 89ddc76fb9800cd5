"""Upper half-plane primitives: points, isometries, distance, geodesics.

Isometries are real 2x2 matrices of determinant +1 acting by fractional
linear maps.  ±g act identically; the stored representative has
trace >= 0 (for trace 0: c > 0, or d > 0 when c = 0).  Geodesics are
oriented pairs of boundary points on R ∪ {∞}; a vertical line at x0 is
``Geodesic(x0, inf)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DegenerateGeodesicError,
    InvalidPointError,
    NotHyperbolicError,
    TrivialElementError,
)

INF = math.inf
MIN_Y = 1e-300
TRACE_TOL = 1e-10
VERTICAL_RTOL = 1e-13


def _acosh1p(u: float) -> float:
    """arccosh(1 + u) without cancellation for small u."""
    return math.log1p(u + math.sqrt(u * (u + 2.0)))


# ── Points ────────────────────────────────────────────────


@dataclass(frozen=True)
class PlanePoint:
    """A point x + iy of the upper half-plane."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidPointError(f"non-finite point ({self.x}, {self.y})")
        if self.y < MIN_Y:
            raise InvalidPointError(f"point below the real axis or on it: y = {self.y}")

    @classmethod
    def from_complex(cls, z: complex) -> "PlanePoint":
        return cls(float(z.real), float(z.imag))

    def __complex__(self) -> complex:
        return complex(self.x, self.y)

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


I = PlanePoint(0.0, 1.0)


def distance(p: PlanePoint, q: PlanePoint) -> float:
    """Hyperbolic distance arccosh(1 + |p - q|² / (2 p.y q.y))."""
    dx = p.x - q.x
    dy = p.y - q.y
    u = (dx * dx + dy * dy) / (2.0 * p.y * q.y)
    return _acosh1p(u)


def distance_arrays(
    x: np.ndarray, y: np.ndarray, x0: float | np.ndarray, y0: float | np.ndarray
) -> np.ndarray:
    """Vectorized distance between (x, y) and (x0, y0), broadcasting."""
    dx = x - x0
    dy = y - y0
    u = (dx * dx + dy * dy) / (2.0 * y * y0)
    return np.log1p(u + np.sqrt(u * (u + 2.0)))


def right_triangle_hypotenuse(a: float, b: float) -> float:
    """Side opposite the right angle: cosh c = cosh a · cosh b."""
    return math.acosh(math.cosh(a) * math.cosh(b))


# ── Isometries ────────────────────────────────────────────


class ElementKind(str, Enum):
    IDENTITY = "identity"
    HYPERBOLIC = "hyperbolic"
    PARABOLIC = "parabolic"
    ELLIPTIC = "elliptic"


def _normalize(a: float, b: float, c: float, d: float, sign: int) -> tuple[float, ...]:
    det = a * d - b * c
    if not math.isfinite(det) or det * sign <= 0.0:
        raise ValueError(f"matrix determinant {det} has the wrong sign or is zero")
    s = 1.0 / math.sqrt(abs(det))
    a, b, c, d = a * s, b * s, c * s, d * s
    tr = a + d
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if abs(tr) > 1e-15 * scale:
        flip = tr < 0.0
    elif c != 0.0:
        flip = c < 0.0
    else:
        flip = d < 0.0
    if flip:
        a, b, c, d = -a, -b, -c, -d
    return a, b, c, d


@dataclass(frozen=True)
class Isometry:
    """Orientation-preserving isometry z ↦ (az + b)/(cz + d), ad − bc = 1."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        a, b, c, d = _normalize(self.a, self.b, self.c, self.d, +1)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diagonal(cls, length: float) -> "Isometry":
        """z ↦ e^{length} z, translation by *length* along the imaginary axis."""
        h = 0.5 * length
        return cls(math.exp(h), 0.0, 0.0, math.exp(-h))

    @classmethod
    def from_matrix(cls, m: np.ndarray | list) -> "Isometry":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def entries(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Isometry":
        return Isometry(self.d, -self.b, -self.c, self.a)

    def power(self, n: int) -> "Isometry":
        base = self if n >= 0 else self.inverse()
        result = Isometry.identity()
        for _ in range(abs(n)):
            result = result @ base
        return result

    def conjugate_by(self, h: "Isometry") -> "Isometry":
        """h · self · h⁻¹."""
        return h @ self @ h.inverse()

    def __call__(self, p: PlanePoint) -> PlanePoint:
        return apply(self, p)

    def boundary_image(self, t: float) -> float:
        """Action on R ∪ {∞}."""
        if math.isinf(t):
            return INF if self.c == 0.0 else self.a / self.c
        den = self.c * t + self.d
        if den == 0.0:
            return INF
        return (self.a * t + self.b) / den

    def is_identity(self, tol: float = 1e-12) -> bool:
        return (
            abs(self.a - 1.0) <= tol
            and abs(self.d - 1.0) <= tol
            and abs(self.b) <= tol
            and abs(self.c) <= tol
        )


def apply(g: Isometry, p: PlanePoint) -> PlanePoint:
    """Fractional linear action; y of the image is y/|cz + d|²."""
    den_re = g.c * p.x + g.d
    den_im = g.c * p.y
    n2 = den_re * den_re + den_im * den_im
    num_re = g.a * p.x + g.b
    num_im = g.a * p.y
    x = (num_re * den_re + num_im * den_im) / n2
    return PlanePoint(x, p.y / n2)


def apply_arrays(g: Isometry, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`apply` on coordinate arrays."""
    den_re = g.c * x + g.d
    den_im = g.c * y
    n2 = den_re * den_re + den_im * den_im
    num_re = g.a * x + g.b
    num_im = g.a * y
    return (num_re * den_re + num_im * den_im) / n2, y / n2


def classify(g: Isometry, tol: float = TRACE_TOL) -> ElementKind:
    """Classify by |trace| against 2."""
    if g.is_identity(tol):
        return ElementKind.IDENTITY
    t = abs(g.trace)
    if t > 2.0 + tol:
        return ElementKind.HYPERBOLIC
    if t >= 2.0 - tol:
        return ElementKind.PARABOLIC
    return ElementKind.ELLIPTIC


def translation_length(g: Isometry, tol: float = TRACE_TOL) -> float:
    """2·arccosh(|trace|/2) for hyperbolic g.

    Raises TrivialElementError for the identity and NotHyperbolicError
    (with ``kind`` set) for parabolic and elliptic elements.
    """
    kind = classify(g, tol)
    if kind is ElementKind.IDENTITY:
        raise TrivialElementError("translation length of the identity")
    if kind is not ElementKind.HYPERBOLIC:
        err = NotHyperbolicError(f"element is {kind.value} (trace {g.trace:.12g})")
        err.kind = kind  # type: ignore[attr-defined]
        raise err
    return 2.0 * _acosh1p(0.5 * abs(g.trace) - 1.0)


# ── Geodesics ─────────────────────────────────────────────


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic from boundary point *start* to *end* (either may be ∞)."""

    start: float
    end: float

    def __post_init__(self) -> None:
        s, e = self.start, self.end
        if math.isnan(s) or math.isnan(e):
            raise DegenerateGeodesicError("NaN endpoint")
        if math.isinf(s) and math.isinf(e):
            raise DegenerateGeodesicError("both endpoints at infinity")
        if s == e:
            raise DegenerateGeodesicError(f"coincident endpoints {s}")
        if math.isinf(s):
            object.__setattr__(self, "start", INF)
        if math.isinf(e):
            object.__setattr__(self, "end", INF)

    @classmethod
    def imaginary_axis(cls) -> "Geodesic":
        return cls(0.0, INF)

    @classmethod
    def vertical(cls, x0: float) -> "Geodesic":
        return cls(x0, INF)

    def reversed(self) -> "Geodesic":
        return Geodesic(self.end, self.start)

    def image(self, g: Isometry) -> "Geodesic":
        return Geodesic(g.boundary_image(self.start), g.boundary_image(self.end))

    def same_line(self, other: "Geodesic", tol: float = 1e-9) -> bool:
        """Equal as unoriented geodesics."""
        def close(u: float, v: float) -> bool:
            if math.isinf(u) or math.isinf(v):
                return math.isinf(u) and math.isinf(v)
            return abs(u - v) <= tol * max(1.0, abs(u), abs(v))

        return (close(self.start, other.start) and close(self.end, other.end)) or (
            close(self.start, other.end) and close(self.end, other.start)
        )


def standardizing_map(g: Geodesic) -> Isometry:
    """Isometry sending g to the imaginary axis, start ↦ 0, end ↦ ∞."""
    u, v = g.start, g.end
    if math.isinf(v):
        return Isometry(1.0, -u, 0.0, 1.0)
    if math.isinf(u):
        return Isometry(0.0, -1.0, 1.0, -v)
    s = 1.0 if u > v else -1.0
    return Isometry(s, -s * u, 1.0, -v)


def translation_along(g: Geodesic, t: float) -> Isometry:
    """Translation by signed distance t along g, in g's orientation."""
    s = standardizing_map(g)
    return s.inverse() @ Isometry.diagonal(t) @ s


def axis(g: Isometry) -> Geodesic:
    """Axis of a hyperbolic element, oriented from repelling to attracting point."""
    if classify(g) is not ElementKind.HYPERBOLIC:
        raise NotHyperbolicError(f"axis of a non-hyperbolic element (trace {g.trace:.12g})")
    a, b, c, d = g.entries
    disc = math.sqrt((a + d) ** 2 - 4.0)
    if abs(c) <= VERTICAL_RTOL * max(1.0, abs(a), abs(b), abs(d)):
        # z ↦ (a/d) z + b/d, with c at rounding level
        fixed = b / (d - a)
        return Geodesic(fixed, INF) if abs(a) > abs(d) else Geodesic(INF, fixed)
    # Fixed points solve c z² + (d − a) z − b = 0.
    dm = d - a
    q = -0.5 * (dm + math.copysign(disc, dm if dm != 0.0 else 1.0))
    r1 = q / c
    r2 = -b / q if q != 0.0 else (a - d - disc) / (2.0 * c)
    # Attracting fixed point has |g'(ξ)| = 1/|cξ + d|² < 1.
    if abs(c * r1 + d) > 1.0:
        return Geodesic(r2, r1)
    return Geodesic(r1, r2)


def fermi_coordinates(p: PlanePoint, ax: Geodesic) -> tuple[float, float]:
    """Polar (r, θ) of p after moving *ax* onto the imaginary axis."""
    w = apply(standardizing_map(ax), p)
    r = math.hypot(w.x, w.y)
    theta = math.atan2(w.y, w.x)
    return r, theta


def from_fermi(r: float, theta: float, ax: Geodesic) -> PlanePoint:
    """Inverse of :func:`fermi_coordinates`."""
    if r <= 0.0 or not (0.0 < theta < math.pi):
        raise InvalidPointError(f"Fermi coordinates out of range: r={r}, θ={theta}")
    w = PlanePoint.from_complex(cmath.rect(r, theta))
    return apply(standardizing_map(ax).inverse(), w)


def distance_to_geodesic(p: PlanePoint, g: Geodesic) -> float:
    """|log tan(θ/2)|, equal to arccosh(1/sin θ)."""
    _, theta = fermi_coordinates(p, g)
    return abs(math.log(math.tan(0.5 * theta)))


def signed_distance_arrays(g: Geodesic, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Signed distance to g, positive on the side where θ > π/2."""
    u, v = apply_arrays(standardizing_map(g), x, y)
    return np.arcsinh(-u / v)


def fermi_points(g: Geodesic, s: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Points at position s along g and signed distance x from it."""
    r = np.exp(s)
    return apply_arrays(standardizing_map(g).inverse(), -r * np.tanh(x), r / np.cosh(x))


def foot_of_perpendicular(p: PlanePoint, g: Geodesic) -> PlanePoint:
    s = standardizing_map(g)
    w = apply(s, p)
    return apply(s.inverse(), PlanePoint(0.0, math.hypot(w.x, w.y)))


def _standard_endpoints(g1: Geodesic, g2: Geodesic) -> tuple[Isometry, float, float]:
    s = standardizing_map(g1)
    return s, s.boundary_image(g2.start), s.boundary_image(g2.end)


def geodesic_distance(g1: Geodesic, g2: Geodesic) -> float:
    """Distance between two geodesics; 0 when they meet or share an endpoint."""
    _, a, b = _standard_endpoints(g1, g2)
    if math.isinf(a) or math.isinf(b) or a == 0.0 or b == 0.0 or a * b < 0.0:
        return 0.0
    ra, rb = math.sqrt(abs(a)), math.sqrt(abs(b))
    return math.log((ra + rb) / abs(rb - ra))


def common_perpendicular(g1: Geodesic, g2: Geodesic) -> Geodesic:
    """The geodesic orthogonal to two ultraparallel geodesics."""
    s, a, b = _standard_endpoints(g1, g2)
    if math.isinf(a) or math.isinf(b) or a * b <= 0.0:
        raise DegenerateGeodesicError("geodesics are not ultraparallel")
    rho = math.copysign(math.sqrt(a * b), a)
    inv = s.inverse()
    return Geodesic(inv.boundary_image(-rho), inv.boundary_image(rho))


def intersection(g1: Geodesic, g2: Geodesic) -> PlanePoint:
    """Crossing point of two intersecting geodesics."""
    s, a, b = _standard_endpoints(g1, g2)
    if math.isinf(a) or math.isinf(b) or a * b >= 0.0:
        raise DegenerateGeodesicError("geodesics do not cross")
    return apply(s.inverse(), PlanePoint(0.0, math.sqrt(-a * b)))


# ── Reflections ───────────────────────────────────────────


@dataclass(frozen=True)
class Reflection:
    """Reflection z ↦ (a z̄ + b)/(c z̄ + d), ad − bc = −1."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        a, b, c, d = self.a, self.b, self.c, self.d
        det = a * d - b * c
        if not det < 0.0:
            raise ValueError(f"reflection matrix needs negative determinant, got {det}")
        s = 1.0 / math.sqrt(-det)
        object.__setattr__(self, "a", a * s)
        object.__setattr__(self, "b", b * s)
        object.__setattr__(self, "c", c * s)
        object.__setattr__(self, "d", d * s)

    @classmethod
    def across(cls, g: Geodesic) -> "Reflection":
        s = standardizing_map(g)
        m = s.inverse().matrix @ np.array([[-1.0, 0.0], [0.0, 1.0]]) @ s.matrix
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "Reflection") -> Isometry:
        return Isometry.from_matrix(self.matrix @ other.matrix)

    def __call__(self, p: PlanePoint) -> PlanePoint:
        return apply_anti(self, p)


def apply_anti(r: Reflection, p: PlanePoint) -> PlanePoint:
    zc = complex(p.x, -p.y)
    w = (r.a * zc + r.b) / (r.c * zc + r.d)
    return PlanePoint(w.real, w.imag)


def cylinder_injectivity(length: float, t: float) -> float:
    """Injectivity radius on a cylinder of core *length*, at distance t from the core."""
    return math.asinh(math.sinh(0.5 * length) * math.cosh(t))


# ── Hyperboloid model ─────────────────────────────────────


def to_hyperboloid(p: PlanePoint) -> np.ndarray:
    """(X0, X1, X2) on X0² - X1² - X2² = 1, with i ↦ (1, 0, 0)."""
    r2 = p.x * p.x + p.y * p.y
    return np.array([(1.0 + r2) / (2.0 * p.y), p.x / p.y, (r2 - 1.0) / (2.0 * p.y)])


def to_hyperboloid_arrays(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    r2 = x * x + y * y
    return np.stack([(1.0 + r2) / (2.0 * y), x / y, (r2 - 1.0) / (2.0 * y)], axis=-1)


def from_hyperboloid(X: np.ndarray) -> PlanePoint:
    y = 1.0 / (X[0] - X[2])
    return PlanePoint(float(X[1] * y), float(y))


def hyperboloid_mean(points: list[PlanePoint]) -> PlanePoint:
    """Normalized Minkowski average of a finite point set."""
    s = np.sum([to_hyperboloid(p) for p in points], axis=0)
    s = s / math.sqrt(s[0] ** 2 - s[1] ** 2 - s[2] ** 2)
    return from_hyperboloid(s)
