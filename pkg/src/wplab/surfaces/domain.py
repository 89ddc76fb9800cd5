"""Dirichlet fundamental domains, point reduction and area quadrature.

The domain is built in the Klein model centered at the chosen point: the
bisector between the center and γ·center is the chord k·W⃗ = W0 - 1, with
W the hyperboloid image of γ·center.  A convex polygon is clipped by these
chords, and for groups with geodesic boundary also by the chords of the
boundary lifts so that the result covers the convex core.

Integrals over the domain use polar coordinates about the center, where the
Klein angle is the hyperbolic angle and the Klein radius is tanh ρ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from ..errors import InfiniteCovolumeError, NonSurfaceGroupError, QuadratureError
from ..groups import DEFAULT_CAP, FuchsianGroup, OrbitCertificate, orbit_ball
from ..helpers import debug_log
from ..kernels import GREEN_SCALE, Q1_ASYMPTOTIC, q1_profile
from ..models import PairingValue
from ..plane import (
    ElementKind,
    Isometry,
    PlanePoint,
    apply,
    apply_arrays,
    axis,
    classify,
    to_hyperboloid,
    to_hyperboloid_arrays,
    translation_length,
)
from .collar import annulus_quadrature

FaceKind = Literal["bisector", "core"]

INSIDE_TOL = 1e-12
IDEAL_TOL = 1e-6
START_BOX = 1.5


@dataclass(frozen=True)
class Face:
    """Half-plane n·k <= b of the Klein disk (b >= 0 keeps the center inside)."""

    normal: tuple[float, float]
    offset: float
    kind: FaceKind
    element: Isometry | None = None

    def excess(self, k: np.ndarray) -> np.ndarray:
        return k @ np.asarray(self.normal) - self.offset


@dataclass
class FundamentalDomain:
    center: PlanePoint
    faces: list[Face]
    vertices: np.ndarray  # (V, 2) Klein coordinates, counterclockwise
    edge_faces: list[int]  # face index of the edge leaving each vertex
    area: float
    area_deficit: float | None = None
    band_length: float | None = None
    radius: float = 0.0
    area_stable: bool | None = None
    _to_center: Isometry = field(default_factory=Isometry.identity, repr=False)
    certificate: OrbitCertificate | None = None

    @property
    def certified(self) -> bool:
        """Stable orbit ball and stable area."""
        return bool(self.area_stable) and self.certificate is not None and self.certificate.stable

    @property
    def is_band(self) -> bool:
        return self.band_length is not None

    # ── Coordinates ──

    def klein(self, p: PlanePoint) -> np.ndarray:
        X = to_hyperboloid(apply(self._to_center, p))
        return X[1:] / X[0]

    def klein_arrays(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        u, v = apply_arrays(self._to_center, x, y)
        X = to_hyperboloid_arrays(u, v)
        return X[..., 1:] / X[..., :1]

    def from_polar(self, rho: np.ndarray, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Upper half-plane points at hyperbolic radius ρ and angle φ about the center."""
        X0 = np.cosh(rho)
        X1 = np.sinh(rho) * np.cos(phi)
        X2 = np.sinh(rho) * np.sin(phi)
        y = 1.0 / (X0 - X2)
        return apply_arrays(self._to_center.inverse(), X1 * y, y)

    # ── Membership ──

    def contains(self, p: PlanePoint, tol: float = 1e-10) -> bool:
        if self.is_band:
            r = math.hypot(p.x, p.y)
            return 0.0 <= math.log(r) < self.band_length  # type: ignore[operator]
        k = self.klein(p)
        return all(f.excess(k) <= tol for f in self.faces if f.kind == "bisector")

    def reduce_point(self, p: PlanePoint, max_steps: int = 10_000) -> tuple[PlanePoint, Isometry]:
        """Move p into the domain; returns (image, γ) with image = γ·p."""
        g = Isometry.identity()
        q = p
        if self.is_band:
            n = math.floor(math.log(math.hypot(p.x, p.y)) / self.band_length)  # type: ignore[operator]
            g = Isometry.diagonal(-n * self.band_length)  # type: ignore[operator]
            return apply(g, p), g
        bisectors = [f for f in self.faces if f.kind == "bisector"]
        normals = np.array([f.normal for f in bisectors])
        offsets = np.array([f.offset for f in bisectors])
        for _ in range(max_steps):
            excess = normals @ self.klein(q) - offsets
            worst = int(np.argmax(excess))
            if excess[worst] <= 1e-12:
                return q, g
            step = bisectors[worst].element.inverse()  # type: ignore[union-attr]
            g = step @ g
            q = apply(step, q)
        raise NonSurfaceGroupError("point reduction did not terminate")

    # ── Quadrature ──

    def integrate(
        self,
        f: Callable[[np.ndarray, np.ndarray], np.ndarray],
        *,
        nodes: int = 24,
        rel_tol: float = 1e-3,
        rho_max: float = 7.0,
        x_max: float = 8.0,
        max_nodes: int = 512,
    ) -> PairingValue:
        """∫ f dA over the domain; f takes upper half-plane arrays (x, y).

        Band domains integrate over {1 <= |z| < e^ℓ, |signed distance| <= x_max}.
        Ideal vertices are cut at hyperbolic radius rho_max.
        """
        if self.is_band:
            def g(s: np.ndarray, x: np.ndarray) -> np.ndarray:
                r = np.exp(s)
                return f(r * np.tanh(x), r / np.cosh(x))

            return annulus_quadrature(
                g, self.band_length, -x_max, x_max,  # type: ignore[arg-type]
                nodes=nodes, s_nodes=max(nodes, 8), rel_tol=rel_tol, max_nodes=max_nodes,
            )

        prev: float | None = None
        n = nodes
        while n <= max_nodes:
            value = self._fan_rule(f, n, rho_max)
            if prev is not None and abs(value - prev) <= rel_tol * max(abs(value), 1e-300):
                return PairingValue(value, abs(value - prev))
            prev = value
            n *= 2
        raise QuadratureError(f"domain quadrature did not converge with {max_nodes} nodes")

    def _fan_rule(self, f: Callable, n: int, rho_max: float) -> float:
        x, y, w = self.quadrature_nodes(n, rho_max)
        return float(np.sum(np.asarray(f(x, y), dtype=float) * w))

    def quadrature_nodes(self, n: int, rho_max: float = 7.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Nodes (x, y) and area weights of the n×n polar rule on each edge's fan.

        Ideal vertices are cut at hyperbolic radius rho_max.
        """
        if self.is_band:
            raise InfiniteCovolumeError("band domains have no polar rule")
        t, w = np.polynomial.legendre.leggauss(n)
        tau = 0.5 * (t + 1.0)
        wt = 0.5 * w
        xs, ys, ws = [], [], []
        for phi_a, phi_b, normal, offset in self._edges():
            dphi = (phi_b - phi_a) % (2.0 * math.pi)
            phi = phi_a + dphi * tau * tau * (3.0 - 2.0 * tau)
            wphi = wt * dphi * 6.0 * tau * (1.0 - tau)
            kr = offset / (np.cos(phi) * normal[0] + np.sin(phi) * normal[1])
            rho_edge = np.minimum(np.arctanh(np.clip(kr, 0.0, 1.0 - 1e-16)), rho_max)
            rho = rho_edge[:, None] * tau[None, :]
            wr = rho_edge[:, None] * wt[None, :] * np.sinh(rho)
            x, y = self.from_polar(rho, np.broadcast_to(phi[:, None], rho.shape))
            xs.append(x.ravel())
            ys.append(y.ravel())
            ws.append((wr * wphi[:, None]).ravel())
        return np.concatenate(xs), np.concatenate(ys), np.concatenate(ws)

    def _edges(self) -> list[tuple[float, float, tuple[float, float], float]]:
        out = []
        V = len(self.vertices)
        for i in range(V):
            a = self.vertices[i]
            b = self.vertices[(i + 1) % V]
            normal, offset = _line_through(a, b)
            out.append((math.atan2(a[1], a[0]), math.atan2(b[1], b[0]), normal, offset))
        return out


# ── Construction ──────────────────────────────────────────


def _line_through(a: np.ndarray, b: np.ndarray) -> tuple[tuple[float, float], float]:
    d = b - a
    n = np.array([d[1], -d[0]])
    n /= np.hypot(n[0], n[1])
    off = float(n @ a)
    if off < 0.0:
        n, off = -n, -off
    return (float(n[0]), float(n[1])), off


def _round_pair(k: np.ndarray) -> tuple[float, float]:
    return (round(float(k[0]), 9), round(float(k[1]), 9))


def _ideal_to_klein(t: float, to_center: Isometry) -> np.ndarray:
    s = to_center.boundary_image(t)
    if math.isinf(s):
        return np.array([0.0, 1.0])
    return np.array([2.0 * s, s * s - 1.0]) / (1.0 + s * s)


def _clip(
    verts: list[np.ndarray], labels: list[int], face: Face, index: int
) -> tuple[list[np.ndarray], list[int]]:
    n = np.asarray(face.normal)
    out_v: list[np.ndarray] = []
    out_l: list[int] = []
    V = len(verts)
    for i in range(V):
        P, Q = verts[i], verts[(i + 1) % V]
        ep = float(n @ P - face.offset)
        eq = float(n @ Q - face.offset)
        p_in, q_in = ep <= INSIDE_TOL, eq <= INSIDE_TOL
        if p_in:
            out_v.append(P)
            out_l.append(labels[i])
            if not q_in:
                out_v.append(P + (Q - P) * (ep / (ep - eq)))
                out_l.append(index)
        elif q_in:
            out_v.append(P + (Q - P) * (ep / (ep - eq)))
            out_l.append(labels[i])
    return _dedupe(out_v, out_l)


def _dedupe(verts: list[np.ndarray], labels: list[int]) -> tuple[list[np.ndarray], list[int]]:
    keep_v: list[np.ndarray] = []
    keep_l: list[int] = []
    for v, lab in zip(verts, labels):
        if keep_v and np.hypot(*(v - keep_v[-1])) < 1e-13:
            keep_l[-1] = lab
            continue
        keep_v.append(v)
        keep_l.append(lab)
    if len(keep_v) > 1 and np.hypot(*(keep_v[0] - keep_v[-1])) < 1e-13:
        keep_v.pop()
        keep_l.pop()
    return keep_v, keep_l


def _face_vector(face_normal: tuple[float, float], offset: float) -> np.ndarray:
    v = np.array([offset, face_normal[0], face_normal[1]])
    return v / math.sqrt(face_normal[0] ** 2 + face_normal[1] ** 2 - offset**2)


def angle_deficit_area(verts: np.ndarray) -> float:
    """(V - 2)π minus the interior angles, from Minkowski normals of the sides."""
    V = len(verts)
    lines = [_line_through(verts[i], verts[(i + 1) % V]) for i in range(V)]
    total = 0.0
    for i in range(V):
        e1 = _face_vector(*lines[i - 1])
        e2 = _face_vector(*lines[i])
        c = e1[0] * e2[0] - e1[1] * e2[1] - e1[2] * e2[2]
        total += math.acos(max(-1.0, min(1.0, c)))
    return (V - 2) * math.pi - total


def area_from_edges(verts: np.ndarray, *, nodes: int = 16, max_nodes: int = 4096, rel_tol: float = 1e-12) -> float:
    """Σ over edges of ∫ (1/√(1 - ρ(φ)²) - 1) dφ, ρ the Klein radius of the edge."""
    total = 0.0
    V = len(verts)
    for i in range(V):
        a, b = verts[i], verts[(i + 1) % V]
        normal, offset = _line_through(a, b)
        phi_a = math.atan2(a[1], a[0])
        dphi = (math.atan2(b[1], b[0]) - phi_a) % (2.0 * math.pi)
        prev: float | None = None
        n = nodes
        while True:
            t, w = np.polynomial.legendre.leggauss(n)
            tau = 0.5 * (t + 1.0)
            phi = phi_a + dphi * tau * tau * (3.0 - 2.0 * tau)
            jac = 0.5 * w * dphi * 6.0 * tau * (1.0 - tau)
            rho = offset / (np.cos(phi) * normal[0] + np.sin(phi) * normal[1])
            val = float(np.sum((1.0 / np.sqrt(np.maximum(1.0 - rho * rho, 1e-300)) - 1.0) * jac))
            if prev is not None and abs(val - prev) <= rel_tol * max(abs(val), 1e-300) + 1e-14:
                break
            prev = val
            n *= 2
            if n > max_nodes:
                raise QuadratureError("edge area integral did not converge")
        total += val
    return total


def _polygon(faces: list[Face]) -> tuple[np.ndarray, list[int]]:
    box = START_BOX
    verts = [np.array(v, dtype=float) for v in ((-box, -box), (box, -box), (box, box), (-box, box))]
    labels = [-1, -1, -1, -1]
    for idx, face in enumerate(faces):
        n = np.asarray(face.normal)
        if max(float(n @ v) for v in verts) <= face.offset + INSIDE_TOL:
            continue
        verts, labels = _clip(verts, labels, face, idx)
        if len(verts) < 3:
            raise NonSurfaceGroupError("Dirichlet domain collapsed to nothing")
    return np.array(verts), labels


def dirichlet_domain(
    G: FuchsianGroup,
    center: PlanePoint | None = None,
    R: float = 8.0,
    *,
    band: bool = False,
    certify: bool = True,
    cap: int = DEFAULT_CAP,
) -> FundamentalDomain:
    """Dirichlet domain about *center* from the bisectors of an orbit ball of radius R.

    With *certify* the orbit ball carries a stability certificate and the area
    is compared against a domain built from a ball one unit wider.
    """
    center = G.basepoint() if center is None else center
    if band:
        if G.rank != 1 or classify(G.generators[0]) is not ElementKind.HYPERBOLIC:
            raise InfiniteCovolumeError("band mode needs a cyclic hyperbolic group")
        g = G.generators[0]
        if abs(g.entries[1]) + abs(g.entries[2]) > 1e-12:
            raise InfiniteCovolumeError("band mode needs the translation axis on the imaginary axis")
        return FundamentalDomain(
            center, [], np.empty((0, 2)), [], math.inf,
            band_length=translation_length(g), radius=R,
        )

    to_center = Isometry(1.0, -center.x, 0.0, center.y)
    ball = orbit_ball(G, center, center, R, cap=cap, certify=certify)
    faces: list[Face] = []
    for e in ball.elements:
        if not e.word:
            continue
        X = to_hyperboloid(apply(to_center, apply(e.isometry, center)))
        faces.append(Face((float(X[1]), float(X[2])), float(X[0] - 1.0), "bisector", e.isometry))

    hyperbolic_boundary = [
        b for b in G.boundary_elements if classify(b) is ElementKind.HYPERBOLIC
    ]
    for b in hyperbolic_boundary:
        ax = axis(b)
        seen: set[tuple] = set()
        for e in ball.elements:
            lift = ax.image(e.isometry)
            k1 = _ideal_to_klein(lift.start, to_center)
            k2 = _ideal_to_klein(lift.end, to_center)
            key = tuple(sorted((_round_pair(k1), _round_pair(k2))))
            if key in seen:
                continue
            seen.add(key)
            normal, offset = _line_through(k1, k2)
            faces.append(Face(normal, offset, "core"))

    verts, labels = _polygon(faces)
    radii = np.hypot(verts[:, 0], verts[:, 1])
    if np.any(radii > 1.0 + IDEAL_TOL) or -1 in labels:
        raise InfiniteCovolumeError(
            f"domain reaches infinity along an arc (max Klein radius {radii.max():.6g})"
        )
    ideal = radii > 1.0 - 1e-9
    verts[ideal] /= radii[ideal, None]

    area = area_from_edges(verts)
    deficit = angle_deficit_area(verts)
    if area < 1e-3:
        raise NonSurfaceGroupError(f"domain area collapsed to {area:.3g}")
    domain = FundamentalDomain(
        center, faces, verts, labels, area, deficit, None, R, None, to_center, ball.certificate
    )
    debug_log(
        "domain", "dirichlet",
        radius=R, faces=len(faces), vertices=len(verts), area=area, deficit=deficit,
        ideal=int(ideal.sum()),
    )
    if certify:
        wider = dirichlet_domain(G, center, R + 1.0, certify=False, cap=cap)
        domain.area_stable = abs(wider.area - area) <= 1e-3 * abs(wider.area)
    return domain


# ── Green's function mass ─────────────────────────────────


def green_mass(
    G: FuchsianGroup,
    domain: FundamentalDomain,
    p: PlanePoint,
    R: float = 6.0,
    *,
    nodes: int = 24,
    rel_tol: float = 1e-3,
    rho_max: float = 5.0,
    cap: int = DEFAULT_CAP,
) -> PairingValue:
    """∫ G(p, q) dA(q) over the domain, expected to be 1.

    Orbit points γp within R of every node are enumerated once; the sum
    truncated at R misses about (4/3)e^{-R}, reported as the kernel tail.
    """
    if domain.is_band:
        reach = R + 8.0 + domain.band_length  # type: ignore[operator]
        base = PlanePoint(0.0, 1.0)
    else:
        reach = R + rho_max
        base = domain.center
    ball = orbit_ball(G, base, p, reach, cap=cap, certify=False)
    pts = np.array([to_hyperboloid(apply(e.isometry, p)) for e in ball.elements])
    # Minkowski form -X0 Y0 + X1 Y1 + X2 Y2 as a matrix product.
    pts_m = pts * np.array([-1.0, 1.0, 1.0])

    def integrand(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        Q = to_hyperboloid_arrays(x.ravel(), y.ravel())
        out = np.zeros(Q.shape[0])
        for lo in range(0, Q.shape[0], 4096):
            chunk = Q[lo:lo + 4096]
            ch = np.maximum(-(chunk @ pts_m.T), 1.0)
            d = np.arccosh(ch)
            mask = (d <= R) & (d > 1e-12)
            vals = np.zeros_like(d)
            vals[mask] = q1_profile(d[mask])
            out[lo:lo + 4096] = vals.sum(axis=1)
        return GREEN_SCALE * out.reshape(x.shape)

    result = domain.integrate(integrand, nodes=nodes, rel_tol=rel_tol, rho_max=rho_max)
    tail = GREEN_SCALE * Q1_ASYMPTOTIC * math.pi * math.exp(-R)
    debug_log("domain", "green_mass", value=result.value, tail=tail, orbit=len(ball))
    return PairingValue(result.value, result.quadrature_error, tail)


def sample_domain(domain: FundamentalDomain, count: int, seed: int = 0) -> list[PlanePoint]:
    """Random points of the domain (rejection sampling in the Klein disk)."""
    rng = np.random.default_rng(seed)
    out: list[PlanePoint] = []
    if domain.is_band:
        s = rng.uniform(0.0, domain.band_length, count)  # type: ignore[arg-type]
        x = rng.uniform(-3.0, 3.0, count)
        r = np.exp(s)
        return [PlanePoint(float(a), float(b)) for a, b in zip(r * np.tanh(x), r / np.cosh(x))]
    inv = domain._to_center.inverse()
    while len(out) < count:
        k = rng.uniform(-1.0, 1.0, 2)
        if k @ k >= 0.98:
            continue
        if any(f.excess(k) > -1e-9 for f in domain.faces if f.kind == "bisector"):
            continue
        X = np.array([1.0, k[0], k[1]]) / math.sqrt(1.0 - k @ k)
        y = 1.0 / (X[0] - X[2])
        out.append(apply(inv, PlanePoint(float(X[1] * y), float(y))))
    return out


def reduce_points(domain: FundamentalDomain, points: Sequence[PlanePoint]) -> list[PlanePoint]:
    return [domain.reduce_point(p)[0] for p in points]
