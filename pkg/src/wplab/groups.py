"""Finitely generated Fuchsian groups and certified orbit enumeration.

Words are tuples of signed letters: ``k + 1`` is generator ``k`` and
``-(k + 1)`` its inverse.  Orbit balls are built by breadth-first search
over reduced words with right multiplication, so consecutive orbit
points γ·t and γs·t are d(t, s·t) apart.  Branches whose orbit point
leaves the ball of radius R + slack are pruned; the result is
certified by rerunning with a longer word cutoff and a wider slack and
requiring the same element set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BallTooLargeError,
    NoClosedGeodesicError,
    NonSurfaceGroupError,
    SpecFormatError,
    TrivialElementError,
)
from .helpers import debug_log
from .plane import (
    ElementKind,
    Geodesic,
    Isometry,
    PlanePoint,
    apply,
    axis,
    classify,
    distance,
    distance_to_geodesic,
    fermi_coordinates,
    standardizing_map,
    translation_length,
)

DEFAULT_CAP = 10_000_000
KEY_CELL = 1e-6
KEY_TOL = 1e-9
RADIUS_RTOL = 1e-12
# Smallest reach at which short_geodesics looks for lifts.
MIN_REACH = 1.5

Word = tuple[int, ...]


# ── Groups ────────────────────────────────────────────────


@dataclass(frozen=True)
class FuchsianGroup:
    """Generators plus labels; optional peripheral words and suggested basepoint."""

    generators: tuple[Isometry, ...]
    labels: tuple[str, ...] = ()
    boundary: tuple[Word, ...] = ()
    center: PlanePoint | None = None

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        if not gens:
            raise SpecFormatError("a group needs at least one generator")
        labels = tuple(self.labels) or tuple(
            chr(ord("a") + k) if k < 26 else f"g{k}" for k in range(len(gens))
        )
        if len(labels) != len(gens):
            raise SpecFormatError(f"{len(labels)} labels for {len(gens)} generators")
        for g, name in zip(gens, labels):
            if g.is_identity(1e-12):
                raise TrivialElementError(f"generator {name!r} is the identity")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "boundary", tuple(tuple(w) for w in self.boundary))

    @property
    def rank(self) -> int:
        return len(self.generators)

    def letters(self) -> list[tuple[int, Isometry]]:
        """Generators and their inverses as (signed letter, isometry)."""
        out: list[tuple[int, Isometry]] = []
        for k, g in enumerate(self.generators):
            out.append((k + 1, g))
            out.append((-(k + 1), g.inverse()))
        return out

    def letter(self, s: int) -> Isometry:
        g = self.generators[abs(s) - 1]
        return g if s > 0 else g.inverse()

    def element(self, word: Sequence[int]) -> Isometry:
        result = Isometry.identity()
        for s in word:
            result = result @ self.letter(s)
        return result

    def word_label(self, word: Sequence[int]) -> str:
        if not word:
            return "1"
        parts = []
        for s in word:
            name = self.labels[abs(s) - 1]
            parts.append(name if s > 0 else f"{name}^-1")
        return " ".join(parts)

    @property
    def boundary_elements(self) -> list[Isometry]:
        return [self.element(w) for w in self.boundary]

    def basepoint(self) -> PlanePoint:
        return self.center if self.center is not None else PlanePoint(0.0, 1.0)

    def with_generator(self, index: int, g: Isometry) -> "FuchsianGroup":
        gens = list(self.generators)
        gens[index] = g
        return FuchsianGroup(tuple(gens), self.labels, self.boundary, self.center)

    # ── Serialization ──

    def to_dict(self) -> dict:
        d: dict = {
            "generators": [list(g.entries) for g in self.generators],
            "labels": list(self.labels),
        }
        if self.boundary:
            d["boundary"] = [list(w) for w in self.boundary]
        if self.center is not None:
            d["center"] = [self.center.x, self.center.y]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FuchsianGroup":
        try:
            gens = tuple(Isometry(*map(float, row)) for row in d["generators"])
            labels = tuple(str(x) for x in d.get("labels", ()))
            boundary = tuple(tuple(int(s) for s in w) for w in d.get("boundary", ()))
            center = d.get("center")
            base = PlanePoint(float(center[0]), float(center[1])) if center else None
        except (KeyError, TypeError, ValueError) as e:
            raise SpecFormatError(f"bad group document: {e}") from e
        return cls(gens, labels, boundary, base)


def cyclic_group(g: Isometry, label: str = "a") -> FuchsianGroup:
    return FuchsianGroup((g,), (label,))


# ── Orbit balls ───────────────────────────────────────────


@dataclass(frozen=True)
class OrbitElement:
    word: Word
    isometry: Isometry
    dist: float


@dataclass(frozen=True)
class OrbitCertificate:
    """Record of the stabilization check."""

    word_length: int
    extended_word_length: int
    slack: float
    extended_slack: float
    rounds: int
    stable: bool


@dataclass(frozen=True)
class OrbitBall:
    basepoint: PlanePoint
    target: PlanePoint
    radius: float
    elements: tuple[OrbitElement, ...]
    certificate: OrbitCertificate | None = None

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def distances(self) -> np.ndarray:
        return np.array([e.dist for e in self.elements])

    def within(self, r: float) -> list[OrbitElement]:
        return [e for e in self.elements if e.dist <= r]

    def growth_fit(self) -> tuple[float, float]:
        """(g, C) with count(r) ≈ C·e^{g r}, fitted on the outer half of the ball."""
        return fit_growth(self.distances, self.radius)


def fit_growth(dists: np.ndarray, radius: float) -> tuple[float, float]:
    if dists.size < 3:
        return 1.0, float(max(dists.size, 1)) * math.exp(-radius)
    rs = np.linspace(0.5 * radius, radius, 12)
    counts = np.searchsorted(np.sort(dists), rs, side="right").astype(float)
    ok = counts > 0
    if ok.sum() < 3 or np.ptp(counts[ok]) == 0:
        return 1.0, float(dists.size) * math.exp(-radius)
    g, logc = np.polyfit(rs[ok], np.log(counts[ok]), 1)
    return float(max(g, 0.0)), float(math.exp(logc))


def _keys(entries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Grid cells of matrix entries and a mask of entries near a cell edge."""
    scaled = entries / KEY_CELL
    cells = np.floor(scaled)
    frac = scaled - cells
    edge = KEY_TOL / KEY_CELL
    near = (frac < edge) | (frac > 1.0 - edge)
    return cells.astype(np.int64), near


def _variants(cell: np.ndarray, near: np.ndarray, scaled: np.ndarray) -> Iterable[tuple]:
    """All keys an entry row could round to under the dedup tolerance."""
    yield tuple(cell.tolist())
    idx = np.flatnonzero(near)
    if idx.size == 0:
        return
    for mask in range(1, 1 << idx.size):
        alt = cell.copy()
        for bit, j in enumerate(idx):
            if mask >> bit & 1:
                alt[j] += -1 if scaled[j] - cell[j] < 0.5 else 1
        yield tuple(alt.tolist())


def _normalize_batch(m: np.ndarray) -> np.ndarray:
    """Rescale to det 1 and fix the sign (trace >= 0) for an (N, 4) batch."""
    det = m[:, 0] * m[:, 3] - m[:, 1] * m[:, 2]
    m = m / np.sqrt(det)[:, None]
    tr = m[:, 0] + m[:, 3]
    scale = np.abs(m).max(axis=1)
    zero_tr = np.abs(tr) <= 1e-15 * scale
    alt = np.where(m[:, 2] != 0.0, m[:, 2], m[:, 3])
    flip = np.where(zero_tr, alt < 0.0, tr < 0.0)
    m[flip] *= -1.0
    return m


def _enumerate(
    G: FuchsianGroup,
    base: PlanePoint,
    target: PlanePoint,
    radius: float,
    slack: float,
    max_length: int,
    cap: int,
) -> tuple[dict[tuple, OrbitElement], int]:
    letters = G.letters()
    let_ids = np.array([s for s, _ in letters])
    let_mats = np.array([g.entries for _, g in letters])  # (m, 4)
    bound = radius + slack
    inside = radius * (1.0 + RADIUS_RTOL) + RADIUS_RTOL

    seen: set[tuple] = set()
    found: dict[tuple, OrbitElement] = {}

    ident = np.array([[1.0, 0.0, 0.0, 1.0]])
    cell, near = _keys(ident[0])
    key0 = tuple(cell.tolist())
    seen.add(key0)
    d0 = distance(base, target)
    if d0 <= inside:
        found[key0] = OrbitElement((), Isometry.identity(), d0)

    frontier_mats = ident
    frontier_words: list[Word] = [()]
    length = 0
    tx, ty = target.x, target.y

    while frontier_words and length < max_length:
        length += 1
        # Right products γ·s for every frontier γ and letter s, as (n·m, 4).
        a = frontier_mats[:, None, :]
        b = let_mats[None, :, :]
        prod = np.stack(
            [
                a[..., 0] * b[..., 0] + a[..., 1] * b[..., 2],
                a[..., 0] * b[..., 1] + a[..., 1] * b[..., 3],
                a[..., 2] * b[..., 0] + a[..., 3] * b[..., 2],
                a[..., 2] * b[..., 1] + a[..., 3] * b[..., 3],
            ],
            axis=-1,
        ).reshape(-1, 4)
        prod = _normalize_batch(prod)

        den_re = prod[:, 2] * tx + prod[:, 3]
        den_im = prod[:, 2] * ty
        n2 = den_re * den_re + den_im * den_im
        px = ((prod[:, 0] * tx + prod[:, 1]) * den_re + prod[:, 0] * ty * den_im) / n2
        py = ty / n2
        dx = px - base.x
        dy = py - base.y
        u = (dx * dx + dy * dy) / (2.0 * py * base.y)
        dist = np.log1p(u + np.sqrt(u * (u + 2.0)))

        scaled = prod / KEY_CELL
        cells, nears = _keys(prod)

        # Drop immediate cancellations and branches outside the pruning radius.
        last = np.array([w[-1] if w else 0 for w in frontier_words])
        m = len(letters)
        cancel = (last[:, None] == -let_ids[None, :]).reshape(-1)
        candidates = np.flatnonzero(~cancel & (dist <= bound))

        next_mats: list[np.ndarray] = []
        next_words: list[Word] = []
        for idx in candidates:
            keys = list(_variants(cells[idx], nears[idx], scaled[idx]))
            if any(k in seen for k in keys):
                continue
            seen.add(keys[0])
            i, j = divmod(int(idx), m)
            new_word = frontier_words[i] + (int(let_ids[j]),)
            next_mats.append(prod[idx])
            next_words.append(new_word)
            if dist[idx] <= inside:
                found[keys[0]] = OrbitElement(
                    new_word, Isometry(*prod[idx].tolist()), float(dist[idx])
                )
        if len(found) > cap or len(next_words) > cap:
            g, _ = fit_growth(np.array([e.dist for e in found.values()]), radius)
            raise BallTooLargeError(max(len(found), len(next_words)), cap, g)
        frontier_mats = np.array(next_mats) if next_mats else np.empty((0, 4))
        frontier_words = next_words

    return found, length


def _same_keys(a: dict[tuple, OrbitElement], b: dict[tuple, OrbitElement]) -> bool:
    """Equal element sets, allowing keys to straddle a cell edge."""
    if len(a) != len(b):
        return False
    for key in b.keys() - a.keys():
        e = b[key]
        entries = np.array(e.isometry.entries)
        cell, near = _keys(entries)
        if not any(k in a for k in _variants(cell, near, entries / KEY_CELL)):
            return False
    return True


def generator_slack(G: FuchsianGroup, target: PlanePoint) -> float:
    """Largest step d(t, s·t) over generators s."""
    return max(distance(target, apply(g, target)) for g in G.generators)


def orbit_ball(
    G: FuchsianGroup,
    base: PlanePoint,
    target: PlanePoint,
    R: float,
    *,
    slack: float | None = None,
    cap: int = DEFAULT_CAP,
    max_length: int = 400,
    certify: bool = True,
    max_rounds: int = 4,
) -> OrbitBall:
    """All distinct γ with d(base, γ·target) <= R."""
    if not R > 0.0:
        raise ValueError(f"orbit ball radius must be positive, got {R}")
    s0 = generator_slack(G, target) if slack is None else float(slack)
    found, length = _enumerate(G, base, target, R, s0, max_length, cap)
    debug_log("orbit", "enumerate", radius=R, slack=s0, count=len(found), length=length)

    cert = None
    if certify:
        s, L, rounds, stable = s0, length, 0, False
        while rounds < max_rounds:
            rounds += 1
            s_ext, L_ext = s * 1.5, L + 5
            wider, length_ext = _enumerate(G, base, target, R, s_ext, L_ext, cap)
            if _same_keys(found, wider):
                stable = True
                cert = OrbitCertificate(L, L_ext, s, s_ext, rounds, True)
                break
            debug_log(
                "orbit", "certify_grew",
                radius=R, before=len(found), after=len(wider), slack=s_ext,
            )
            found, s, L = wider, s_ext, length_ext
        if not stable:
            cert = OrbitCertificate(L, L + 5, s, s * 1.5, rounds, False)

    elements = tuple(sorted(found.values(), key=lambda e: (e.dist, len(e.word), e.word)))
    return OrbitBall(base, target, float(R), elements, cert)


# ── Closed geodesics ──────────────────────────────────────


@dataclass(frozen=True)
class GeodesicClass:
    """A primitive hyperbolic element, its translation length and axis."""

    representative: Isometry
    length: float
    axis: Geodesic

    @classmethod
    def of(cls, g: Isometry) -> "GeodesicClass":
        return cls(g, translation_length(g), axis(g))


def _endpoint_key(g: Geodesic) -> tuple:
    def r(t: float) -> float:
        return math.inf if math.isinf(t) else round(t, 9)

    return tuple(sorted((r(g.start), r(g.end))))


def _canonical_lift(
    base: PlanePoint, ax: Geodesic, conjugators: Sequence[Isometry]
) -> tuple[Isometry, Geodesic]:
    best: tuple[float, tuple, Isometry, Geodesic] | None = None
    for h in conjugators:
        lift = ax.image(h)
        d = round(distance_to_geodesic(base, lift), 9)
        cand = (d, _endpoint_key(lift), h, lift)
        if best is None or cand[:2] < best[:2]:
            best = cand
    assert best is not None
    return best[2], best[3]


def default_reach(l_max: float) -> float:
    """Collar half-width arcsinh(1/sinh(ℓ/2)) of l_max plus one, at least 1.5."""
    return max(MIN_REACH, math.asinh(1.0 / math.sinh(0.5 * l_max)) + 1.0)


def short_geodesics(
    G: FuchsianGroup,
    base: PlanePoint,
    l_max: float,
    *,
    reach: float | None = None,
    cap: int = DEFAULT_CAP,
) -> list[GeodesicClass]:
    """Primitive classes of length <= l_max with a lift within *reach* of base.

    An element whose axis is δ from base moves it by 2·arcsinh(sinh(ℓ/2)·cosh δ),
    which fixes the search radius.  Classes are merged up to conjugacy and
    inversion by moving each axis to the lift closest to base.

    The default reach is the collar half-width of l_max plus one, so a base
    anywhere in the collar of a short geodesic, or just past its edge, still
    sees a lift.
    """
    if not l_max > 0.0:
        raise ValueError(f"l_max must be positive, got {l_max}")
    if reach is None:
        reach = default_reach(l_max)
    R = 2.0 * math.asinh(math.sinh(0.5 * l_max) * math.cosh(reach)) + 1e-9
    ball = orbit_ball(G, base, base, R, cap=cap)
    conj_ball = orbit_ball(G, base, base, 2.0 * reach + l_max + 1.0, cap=cap, certify=False)
    conjugators = [e.isometry for e in conj_ball.elements]

    classes: dict[tuple, GeodesicClass] = {}
    for e in ball.elements:
        kind = classify(e.isometry)
        if kind is ElementKind.IDENTITY:
            continue
        if kind is ElementKind.ELLIPTIC:
            raise NonSurfaceGroupError(
                f"elliptic element {G.word_label(e.word)} (trace {e.isometry.trace:.12g})"
            )
        if kind is not ElementKind.HYPERBOLIC:
            continue
        length = translation_length(e.isometry)
        if length > l_max * (1.0 + 1e-12):
            continue
        h, lift = _canonical_lift(base, axis(e.isometry), conjugators)
        key = _endpoint_key(lift)
        rep = e.isometry.conjugate_by(h)
        current = classes.get(key)
        if current is None or length < current.length - 1e-12:
            classes[key] = GeodesicClass(rep, length, axis(rep))
    result = sorted(classes.values(), key=lambda c: (c.length, _endpoint_key(c.axis)))
    debug_log("groups", "short_geodesics", l_max=l_max, found=len(result))
    return result


def systole(G: FuchsianGroup, base: PlanePoint, *, reach: float = MIN_REACH) -> float:
    """Length of the shortest closed geodesic."""
    hyperbolic = [g for g in G.generators if classify(g) is ElementKind.HYPERBOLIC]
    if G.rank == 1:
        if not hyperbolic:
            raise NoClosedGeodesicError("cyclic group is not hyperbolic")
        return translation_length(hyperbolic[0])

    # Any hyperbolic short word bounds the systole from above.
    candidates = [g for g in G.generators] + [
        g @ h for g in G.generators for h in G.generators
    ] + [g @ h.inverse() for g in G.generators for h in G.generators if g is not h]
    lengths = [
        translation_length(g) for g in candidates if classify(g) is ElementKind.HYPERBOLIC
    ]
    if not lengths:
        raise NoClosedGeodesicError("no hyperbolic element among short words")
    bound = min(lengths) * (1.0 + 1e-9)
    for _ in range(3):
        found = short_geodesics(G, base, bound, reach=reach)
        if found:
            return found[0].length
        reach *= 2.0
    raise NoClosedGeodesicError(f"no closed geodesic of length <= {bound:.6g} in reach")


# ── Cosets and injectivity ────────────────────────────────


def coset_representatives(
    G: FuchsianGroup,
    A: Isometry,
    base: PlanePoint,
    R: float,
    *,
    cap: int = DEFAULT_CAP,
    tol: float = 1e-7,
) -> list[Isometry]:
    """One γ per right coset ⟨A⟩γ with d(axis(A), γ·base) <= R.

    Cosets are told apart by the Fermi fingerprint of γ·base: signed
    distance to the axis and position along it modulo ℓ.
    """
    ax = axis(A)
    ell = translation_length(A)
    anchor = apply(standardizing_map(ax).inverse(), PlanePoint(0.0, 1.0))
    ball = orbit_ball(G, anchor, base, R + ell + 1e-9, cap=cap)

    reps: list[Isometry] = []
    xs: list[float] = []
    ss: list[float] = []
    for e in ball.elements:
        r, theta = fermi_coordinates(apply(e.isometry, base), ax)
        x = math.log(math.tan(0.5 * theta))
        if abs(x) > R * (1.0 + RADIUS_RTOL) + RADIUS_RTOL:
            continue
        s = math.log(r) % ell
        if xs:
            dx = np.abs(np.array(xs) - x)
            ds = np.abs(np.array(ss) - s)
            ds = np.minimum(ds, ell - ds)
            if np.any((dx < tol) & (ds < tol)):
                continue
        reps.append(e.isometry)
        xs.append(x)
        ss.append(s)
    return reps


def injectivity_radius(
    G: FuchsianGroup, p: PlanePoint, *, cap: int = DEFAULT_CAP, certify: bool = True
) -> float:
    """Half the shortest displacement d(p, γp) over nontrivial γ."""
    bound = min(distance(p, apply(g, p)) for g in G.generators)
    ball = orbit_ball(G, p, p, bound, cap=cap, certify=certify)
    best = min(
        (e.dist for e in ball.elements if e.word and not e.isometry.is_identity(1e-9)),
        default=bound,
    )
    return 0.5 * best


def validate_group(
    G: FuchsianGroup,
    base: PlanePoint,
    R: float = 6.0,
    *,
    cap: int = DEFAULT_CAP,
    certify: bool = True,
) -> int:
    """Raise NonSurfaceGroupError if an element moving base by <= R is elliptic.

    Returns the number of elements checked.  An orbit ball that does not
    stabilize is logged and checked as enumerated.
    """
    ball = orbit_ball(G, base, base, R, cap=cap, certify=certify)
    if ball.certificate is not None and not ball.certificate.stable:
        debug_log("groups", "validate_unstable", radius=R, count=len(ball))
    for e in ball.elements:
        if e.word and classify(e.isometry) is ElementKind.ELLIPTIC:
            raise NonSurfaceGroupError(
                f"elliptic element {G.word_label(e.word)} (trace {e.isometry.trace:.12g})"
            )
    return len(ball)
