"""Hadamard model spaces and their geodesic calculus.

Three concrete spaces are provided: Euclidean n-space, the hyperboloid model
of hyperbolic n-space, and a spider tree (finitely many rays glued at a hub).
All are complete, uniquely geodesic, and nonpositively curved, so the
comparison inequality

    d^2((1-t)x (+) ty, z) <= (1-t) d^2(x,z) + t d^2(y,z) - t(1-t) d^2(x,y)

holds, along with the Cauchy-Schwarz inequality for the quasi-linearization
pairing <ab, cd> = (d^2(a,d) + d^2(b,c) - d^2(a,c) - d^2(b,d)) / 2.

Convention used everywhere: ``combine(x, y, t)`` is the unique geodesic point
z with d(x, z) = t * d(x, y), i.e. t is the fraction of the way from x to y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError, UnsupportedOperationError

POINT_TOL = 1e-9     # validity of coordinates (hyperboloid constraint, radii)
ROUNDTRIP_TOL = 1e-8  # log/exp and projection round trips


@dataclass(frozen=True, eq=False, slots=True)
class SpacePoint:
    """A point of a model space, tagged with the id of its owning space.

    ``coords`` is the ambient coordinate vector (n entries Euclidean, n+1
    hyperboloid) or ``[leg, radius]`` for the spider tree. Points are value
    data; compare them with ``space.distance(p, q) == 0``, not ``==``.
    """

    space_id: str
    coords: np.ndarray


@dataclass(frozen=True, eq=False, slots=True)
class WholeSpace:
    space_id: str
    kind: str = field(default="whole_space", init=False)


@dataclass(frozen=True, eq=False, slots=True)
class Ball:
    """Closed geodesic ball of positive radius."""

    center: SpacePoint
    radius: float
    kind: str = field(default="ball", init=False)

    def __post_init__(self):
        if not (self.radius > 0):
            raise DomainError("ball radius must be positive")

    @property
    def space_id(self) -> str:
        return self.center.space_id


@dataclass(frozen=True, eq=False, slots=True)
class Segment:
    """Geodesic segment [a, b]; a == b gives a singleton."""

    a: SpacePoint
    b: SpacePoint
    kind: str = field(default="segment", init=False)

    def __post_init__(self):
        if self.a.space_id != self.b.space_id:
            raise DomainError("segment endpoints belong to different spaces")

    @property
    def space_id(self) -> str:
        return self.a.space_id


@dataclass(frozen=True, eq=False, slots=True)
class Halfspace:
    """Euclidean halfspace {x : normal . x <= offset}."""

    space_id: str
    normal: np.ndarray
    offset: float
    kind: str = field(default="halfspace", init=False)

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if n.ndim != 1 or not np.all(np.isfinite(n)) or float(n @ n) == 0.0:
            raise DomainError("halfspace normal must be a nonzero finite vector")
        object.__setattr__(self, "normal", n)


ConvexSubset = WholeSpace | Ball | Segment | Halfspace


class ModelSpace:
    """Common interface of the model spaces.

    Subclasses implement the metric, geodesic combination and projections;
    the quasi-linearization pairing is metric-generic and lives here. All
    operations are pure functions of immutable values.
    """

    space_id: str

    # -- points ------------------------------------------------------------

    def point(self, coords) -> SpacePoint:
        """Validate raw coordinates and wrap them as a point of this space."""
        raise NotImplementedError

    def base_point(self) -> SpacePoint:
        """A canonical point of the space (origin, hyperboloid apex, hub)."""
        raise NotImplementedError

    def check_point(self, p: SpacePoint) -> None:
        if p.space_id != self.space_id:
            raise DomainError(
                f"point belongs to space {p.space_id!r}, expected {self.space_id!r}"
            )

    def _wrap(self, coords: np.ndarray) -> SpacePoint:
        # internal fast constructor; coords already valid
        return SpacePoint(self.space_id, coords)

    # -- metric and geodesics ----------------------------------------------

    def distance(self, x: SpacePoint, y: SpacePoint) -> float:
        self.check_point(x)
        self.check_point(y)
        return self._distance(x, y)

    def combine(self, x: SpacePoint, y: SpacePoint, t: float) -> SpacePoint:
        """The geodesic point z with d(x, z) = t * d(x, y), for t in [0, 1]."""
        self.check_point(x)
        self.check_point(y)
        if not (0.0 <= t <= 1.0):
            raise DomainError(f"combine parameter t={t} outside [0, 1]")
        if t == 0.0:
            return x
        if t == 1.0:
            return y
        return self._combine(x, y, t)

    def quasilin(self, a: SpacePoint, b: SpacePoint, c: SpacePoint, d: SpacePoint) -> float:
        """Quasi-linearization <ab, cd>, an inner-product surrogate built
        from squared distances. Satisfies <ab,ab> = d^2(a,b), symmetry in
        the two vector slots, antisymmetry under slot reversal, and the
        splitting identity <ax,cd> + <xb,cd> = <ab,cd>."""
        for p in (a, b, c, d):
            self.check_point(p)
        dad = self._distance(a, d)
        dbc = self._distance(b, c)
        dac = self._distance(a, c)
        dbd = self._distance(b, d)
        return 0.5 * (dad * dad + dbc * dbc - dac * dac - dbd * dbd)

    # -- tangent maps (Euclidean / hyperboloid only) -------------------------

    def log_map(self, base: SpacePoint, target: SpacePoint) -> np.ndarray:
        """Tangent vector at ``base`` pointing to ``target`` with norm equal
        to d(base, target). Inverse of exp_map."""
        raise UnsupportedOperationError(f"{self.space_id} has no tangent structure")

    def exp_map(self, base: SpacePoint, v: np.ndarray) -> SpacePoint:
        raise UnsupportedOperationError(f"{self.space_id} has no tangent structure")

    def tangent_norm(self, base: SpacePoint, v: np.ndarray) -> float:
        raise UnsupportedOperationError(f"{self.space_id} has no tangent structure")

    # -- convex subsets -----------------------------------------------------

    def check_set(self, cset: ConvexSubset) -> None:
        if cset.space_id != self.space_id:
            raise DomainError(
                f"set belongs to space {cset.space_id!r}, expected {self.space_id!r}"
            )

    def project(self, cset: ConvexSubset, x: SpacePoint) -> SpacePoint:
        """Metric projection onto a closed convex set. Idempotent; the
        result satisfies the obtuse-angle property <p(x)x, p(x)y> <= 0 for
        every y in the set."""
        self.check_set(cset)
        self.check_point(x)
        if cset.kind == "whole_space":
            return x
        if cset.kind == "ball":
            d = self._distance(cset.center, x)
            if d <= cset.radius:
                return x
            return self._combine(cset.center, x, cset.radius / d)
        if cset.kind == "segment":
            if self._distance(cset.a, cset.b) < 1e-15:
                return cset.a
            return self._project_segment(cset.a, cset.b, x)
        if cset.kind == "halfspace":
            return self._project_halfspace(cset, x)
        raise UnsupportedOperationError(f"unknown set kind {cset.kind!r}")

    def contains(self, cset: ConvexSubset, x: SpacePoint, tol: float = POINT_TOL) -> bool:
        self.check_set(cset)
        self.check_point(x)
        if cset.kind == "whole_space":
            return True
        if cset.kind == "ball":
            return self._distance(cset.center, x) <= cset.radius + tol
        if cset.kind == "halfspace":
            nx = float(cset.normal @ x.coords)
            return nx <= cset.offset + tol * (1.0 + float(np.linalg.norm(cset.normal)))
        return self._distance(self.project(cset, x), x) <= tol

    def _project_segment(self, a: SpacePoint, b: SpacePoint, x: SpacePoint) -> SpacePoint:
        raise NotImplementedError

    def _project_halfspace(self, cset: Halfspace, x: SpacePoint) -> SpacePoint:
        raise UnsupportedOperationError(f"halfspaces are not supported on {self.space_id}")

    # -- sampling ------------------------------------------------------------

    def sample_point(self, rng: np.random.Generator, scale: float = 1.0) -> SpacePoint:
        raise NotImplementedError

    def sample_in(self, cset: ConvexSubset, rng: np.random.Generator, scale: float = 1.0) -> SpacePoint:
        """A random point of the set (projection of a nearby random point)."""
        self.check_set(cset)
        if cset.kind == "segment":
            return self.combine(cset.a, cset.b, float(rng.uniform()))
        if cset.kind == "ball":
            raw = self.perturb(cset.center, rng, cset.radius * float(rng.uniform(0, 1.5)))
            return self.project(cset, raw)
        return self.project(cset, self.sample_point(rng, scale))

    def perturb(self, p: SpacePoint, rng: np.random.Generator, scale: float) -> SpacePoint:
        """A random point at controlled distance from p (used by samplers)."""
        raise NotImplementedError

    def _distance(self, x: SpacePoint, y: SpacePoint) -> float:
        raise NotImplementedError

    def _combine(self, x: SpacePoint, y: SpacePoint, t: float) -> SpacePoint:
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class Euclidean(ModelSpace):
    """R^n with the usual metric; geodesics are straight segments."""

    dim: int
    space_id: str = field(init=False, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("dimension must be >= 1")
        object.__setattr__(self, "space_id", f"euclidean:{self.dim}")
        z = np.zeros(self.dim)
        z.setflags(write=False)
        object.__setattr__(self, "_base", SpacePoint(self.space_id, z))

    def point(self, coords) -> SpacePoint:
        arr = np.asarray(coords, dtype=float).reshape(-1).copy()
        if arr.shape != (self.dim,):
            raise DomainError(f"expected {self.dim} coordinates, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("coordinates must be finite")
        arr.setflags(write=False)
        return SpacePoint(self.space_id, arr)

    def base_point(self) -> SpacePoint:
        return self._base

    def _distance(self, x: SpacePoint, y: SpacePoint) -> float:
        if self.dim == 1:  # tiny-array numpy overhead dominates 1-d runs
            return abs(float(x.coords[0]) - float(y.coords[0]))
        d = x.coords - y.coords
        return math.sqrt(float(d @ d))

    def _combine(self, x: SpacePoint, y: SpacePoint, t: float) -> SpacePoint:
        return self._wrap((1.0 - t) * x.coords + t * y.coords)

    def log_map(self, base: SpacePoint, target: SpacePoint) -> np.ndarray:
        self.check_point(base)
        self.check_point(target)
        return target.coords - base.coords

    def exp_map(self, base: SpacePoint, v: np.ndarray) -> SpacePoint:
        self.check_point(base)
        return self._wrap(base.coords + np.asarray(v, dtype=float))

    def tangent_norm(self, base: SpacePoint, v: np.ndarray) -> float:
        if self.dim == 1:
            return abs(float(v[0]))
        v = np.asarray(v, dtype=float)
        return math.sqrt(float(v @ v))

    def _project_segment(self, a: SpacePoint, b: SpacePoint, x: SpacePoint) -> SpacePoint:
        ab = b.coords - a.coords
        t = float((x.coords - a.coords) @ ab) / float(ab @ ab)
        t = min(1.0, max(0.0, t))
        return self._wrap((1.0 - t) * a.coords + t * b.coords)

    def _project_halfspace(self, cset: Halfspace, x: SpacePoint) -> SpacePoint:
        n = cset.normal
        excess = float(n @ x.coords) - cset.offset
        if excess <= 0.0:
            return x
        return self._wrap(x.coords - (excess / float(n @ n)) * n)

    def sample_point(self, rng: np.random.Generator, scale: float = 1.0) -> SpacePoint:
        return self._wrap(rng.normal(size=self.dim) * scale)

    def perturb(self, p: SpacePoint, rng: np.random.Generator, scale: float) -> SpacePoint:
        return self._wrap(p.coords + rng.normal(size=self.dim) * scale)


@dataclass(frozen=True, eq=True)
class Hyperboloid(ModelSpace):
    """Hyperbolic n-space as the upper sheet {x : <x,x>_M = -1, x0 >= 1} of
    the hyperboloid in Minkowski space R^{1,n}, with the Minkowski form
    <x,y>_M = -x0 y0 + sum_i xi yi and metric d(x,y) = arccosh(-<x,y>_M).

    Distances are evaluated through the chordal identity
    <x-y, x-y>_M = 4 sinh^2(d/2), which is stable for nearby points where
    arccosh of a near-1 argument would lose half the digits. The arccosh
    argument clamp (>= 1) of the naive formula corresponds to clamping the
    chordal square at 0 here.
    """

    dim: int
    space_id: str = field(init=False, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("dimension must be >= 1")
        object.__setattr__(self, "space_id", f"hyperboloid:{self.dim}")
        e0 = np.zeros(self.dim + 1)
        e0[0] = 1.0
        e0.setflags(write=False)
        object.__setattr__(self, "_base", SpacePoint(self.space_id, e0))

    @staticmethod
    def minkowski(u: np.ndarray, v: np.ndarray) -> float:
        # = (full dot) - 2 u0 v0, avoiding slice views
        return float(u @ v) - 2.0 * float(u[0]) * float(v[0])

    def point(self, coords) -> SpacePoint:
        arr = np.asarray(coords, dtype=float).reshape(-1).copy()
        if arr.shape != (self.dim + 1,):
            raise DomainError(f"expected {self.dim + 1} ambient coordinates, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("coordinates must be finite")
        m = self.minkowski(arr, arr)
        if abs(m + 1.0) > POINT_TOL * (1.0 + float(arr @ arr)):
            raise DomainError(f"not on the hyperboloid: <x,x>_M = {m}")
        if arr[0] < 1.0 - POINT_TOL:
            raise DomainError("point lies on the lower sheet (x0 < 1)")
        arr.setflags(write=False)
        return SpacePoint(self.space_id, arr)

    def from_spatial(self, spatial) -> SpacePoint:
        """Lift spatial coordinates onto the sheet: x0 = sqrt(1 + |s|^2)."""
        s = np.asarray(spatial, dtype=float).reshape(-1)
        if s.shape != (self.dim,):
            raise DomainError(f"expected {self.dim} spatial coordinates, got {s.shape}")
        return self.point(np.concatenate(([math.sqrt(1.0 + float(s @ s))], s)))

    def base_point(self) -> SpacePoint:
        return self._base

    def _renorm(self, z: np.ndarray) -> np.ndarray:
        # put z back on the sheet exactly: recompute the time coordinate
        z = np.array(z, dtype=float)
        z[0] = math.sqrt(1.0 + float(z[1:] @ z[1:]))
        return z

    def _distance(self, x: SpacePoint, y: SpacePoint) -> float:
        dl = x.coords - y.coords
        d0 = float(dl[0])
        q = float(dl @ dl) - 2.0 * d0 * d0  # Minkowski square = 4 sinh^2(d/2)
        if q <= 0.0:
            return 0.0
        return 2.0 * math.asinh(0.5 * math.sqrt(q))

    def _tangent_toward(self, x: SpacePoint, y: SpacePoint) -> tuple[np.ndarray, float]:
        # unit tangent at x toward y and the distance; (zero, 0) if x == y
        d = self._distance(x, y)
        if d < 1e-14:
            return np.zeros(self.dim + 1), 0.0
        m = self.minkowski(x.coords, y.coords)
        w = y.coords + m * x.coords          # Minkowski-orthogonal to x
        nw = self.minkowski(w, w)            # = sinh^2 d
        nw = math.sqrt(nw) if nw > 0 else 0.0
        if nw == 0.0:
            return np.zeros(self.dim + 1), 0.0
        return w / nw, d

    def _combine(self, x: SpacePoint, y: SpacePoint, t: float) -> SpacePoint:
        # slerp form: gamma(s) = (sinh(d-s) x + sinh(s) y) / sinh(d). A
        # positive combination of the endpoints, so no cancellation on long
        # geodesics (unlike the cosh/sinh tangent form).
        d = self._distance(x, y)
        if d < 1e-14:
            return x
        s = t * d
        sd = math.sinh(d)
        z = (math.sinh(d - s) / sd) * x.coords + (math.sinh(s) / sd) * y.coords
        return self._wrap(self._renorm(z))

    def log_map(self, base: SpacePoint, target: SpacePoint) -> np.ndarray:
        self.check_point(base)
        self.check_point(target)
        v, d = self._tangent_toward(base, target)
        return v * d

    def exp_map(self, base: SpacePoint, v: np.ndarray) -> SpacePoint:
        self.check_point(base)
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim + 1,):
            raise DomainError(f"tangent vector must have {self.dim + 1} entries")
        # re-orthogonalize against the base point (absorbs drift <= 1e-8)
        v = v + self.minkowski(base.coords, v) * base.coords
        t = self.minkowski(v, v)
        t = math.sqrt(t) if t > 0 else 0.0
        if t < 1e-16:
            return base
        z = math.cosh(t) * base.coords + math.sinh(t) * (v / t)
        return self._wrap(self._renorm(z))

    def tangent_norm(self, base: SpacePoint, v: np.ndarray) -> float:
        v = np.asarray(v, dtype=float)
        q = self.minkowski(v, v)
        return math.sqrt(q) if q > 0 else 0.0

    def _project_segment(self, a: SpacePoint, b: SpacePoint, x: SpacePoint) -> SpacePoint:
        # minimize cosh d(x, gamma(s)) = A cosh s + B sinh s over s in [0, L]
        # where gamma is the unit-speed geodesic from a to b; the unconstrained
        # minimizer is s* = artanh(-B/A), then clamp.
        v, L = self._tangent_toward(a, b)
        A = -self.minkowski(x.coords, a.coords)
        B = -self.minkowski(x.coords, v)
        ratio = -B / A  # |B| < A for any point x and unit-speed geodesic
        ratio = min(1.0 - 1e-16, max(-1.0 + 1e-16, ratio))
        s = math.atanh(ratio)
        t = min(1.0, max(0.0, s / L))
        return self.combine(a, b, t)

    def sample_point(self, rng: np.random.Generator, scale: float = 1.0) -> SpacePoint:
        return self.perturb(self.base_point(), rng, scale)

    def perturb(self, p: SpacePoint, rng: np.random.Generator, scale: float) -> SpacePoint:
        # Gaussian tangent at p: project a raw draw onto the tangent space,
        # then give it the length of an independent Gaussian displacement
        draw = rng.normal(size=2 * self.dim + 1)
        raw = draw[: self.dim + 1]
        v = raw + self.minkowski(p.coords, raw) * p.coords
        n = self.tangent_norm(p, v)
        g = draw[self.dim + 1:]
        length = math.sqrt(float(g @ g)) * scale
        if n < 1e-15 or length == 0.0:
            return p
        return self.exp_map(p, v * (length / n))


@dataclass(frozen=True, eq=True)
class Spider(ModelSpace):
    """Metric tree of ``num_legs`` rays glued at a hub. A point is a pair
    (leg, radius); radius 0 is the hub and is canonicalized to leg 0. The
    metric is |r1 - r2| along one leg and r1 + r2 across legs. Not a
    manifold: no tangent structure, so gradient-based solvers opt out.
    """

    num_legs: int
    space_id: str = field(init=False, compare=False)

    def __post_init__(self):
        if self.num_legs < 2:
            raise DomainError("spider needs at least 2 legs")
        object.__setattr__(self, "space_id", f"spider:{self.num_legs}")

    def point(self, coords) -> SpacePoint:
        if isinstance(coords, Mapping):
            leg, radius = coords["leg"], coords["radius"]
        else:
            leg, radius = coords
        leg = int(leg)
        radius = float(radius)
        if not (0 <= leg < self.num_legs):
            raise DomainError(f"leg index {leg} outside [0, {self.num_legs})")
        if not math.isfinite(radius) or radius < 0.0:
            raise DomainError(f"radius must be finite and >= 0, got {radius}")
        return self._pt(leg, radius)

    def _pt(self, leg: int, radius: float) -> SpacePoint:
        if radius <= 0.0:
            leg, radius = 0, 0.0  # the hub lies on every leg
        arr = np.array([float(leg), radius])
        arr.setflags(write=False)
        return SpacePoint(self.space_id, arr)

    def base_point(self) -> SpacePoint:
        return self._pt(0, 0.0)

    @staticmethod
    def leg_of(p: SpacePoint) -> int:
        return int(p.coords[0])

    @staticmethod
    def radius_of(p: SpacePoint) -> float:
        return float(p.coords[1])

    def _distance(self, x: SpacePoint, y: SpacePoint) -> float:
        lx, rx = int(x.coords[0]), float(x.coords[1])
        ly, ry = int(y.coords[0]), float(y.coords[1])
        if lx == ly or rx == 0.0 or ry == 0.0:
            return abs(rx - ry)
        return rx + ry

    def _combine(self, x: SpacePoint, y: SpacePoint, t: float) -> SpacePoint:
        lx, rx = int(x.coords[0]), float(x.coords[1])
        ly, ry = int(y.coords[0]), float(y.coords[1])
        if rx == 0.0:
            lx = ly
        if ry == 0.0:
            ly = lx
        if lx == ly:
            return self._pt(lx, (1.0 - t) * rx + t * ry)
        s = t * (rx + ry)  # arc length walked from x through the hub
        if s <= rx:
            return self._pt(lx, rx - s)
        return self._pt(ly, s - rx)

    def _project_segment(self, a: SpacePoint, b: SpacePoint, x: SpacePoint) -> SpacePoint:
        la, ra = int(a.coords[0]), float(a.coords[1])
        lb, rb = int(b.coords[0]), float(b.coords[1])
        lx, rx = int(x.coords[0]), float(x.coords[1])
        if ra == 0.0:
            la = lb
        if rb == 0.0:
            lb = la
        if la == lb:  # path is an interval on a single leg
            lo, hi = min(ra, rb), max(ra, rb)
            if lx == la and rx > 0.0:
                return self._pt(la, min(hi, max(lo, rx)))
            # x sits on a different leg (or at the hub): nearest path point
            # is the endpoint closest to the hub
            return self._pt(la, lo)
        # path runs through the hub: leg la down to 0, then up leg lb
        if lx == la and rx > 0.0:
            return self._pt(la, min(ra, rx))
        if lx == lb and rx > 0.0:
            return self._pt(lb, min(rb, rx))
        return self._pt(0, 0.0)

    def sample_point(self, rng: np.random.Generator, scale: float = 1.0) -> SpacePoint:
        leg = int(rng.integers(self.num_legs))
        return self._pt(leg, float(rng.exponential(scale)))

    def perturb(self, p: SpacePoint, rng: np.random.Generator, scale: float) -> SpacePoint:
        q = self.sample_point(rng, scale)
        d = self._distance(p, q)
        if d == 0.0:
            return p
        return self.combine(p, q, min(1.0, abs(float(rng.normal())) * scale / d))


def canonical_point(space: ModelSpace, cset: ConvexSubset) -> SpacePoint:
    """Some point of the set, used as a default witness or sampling anchor."""
    space.check_set(cset)
    if cset.kind == "ball":
        return cset.center
    if cset.kind == "segment":
        return cset.a
    if cset.kind == "halfspace":
        n = cset.normal
        return space.point(n * (cset.offset / float(n @ n)))
    return space.base_point()


# ---------------------------------------------------------------------------
# config-format (de)serialization
# ---------------------------------------------------------------------------

def space_from_config(desc: Mapping) -> ModelSpace:
    """Build a space from its config descriptor, e.g.
    {"kind": "hyperboloid", "dim": 2} or {"kind": "spider", "legs": 3}."""
    kind = desc.get("kind")
    if kind == "euclidean":
        return Euclidean(int(desc["dim"]))
    if kind == "hyperboloid":
        return Hyperboloid(int(desc["dim"]))
    if kind == "spider":
        return Spider(int(desc["legs"]))
    raise DomainError(f"unknown space kind {kind!r}")


def space_to_config(space: ModelSpace) -> dict:
    if isinstance(space, Euclidean):
        return {"kind": "euclidean", "dim": space.dim}
    if isinstance(space, Hyperboloid):
        return {"kind": "hyperboloid", "dim": space.dim}
    if isinstance(space, Spider):
        return {"kind": "spider", "legs": space.num_legs}
    raise DomainError(f"unknown space type {type(space).__name__}")


def point_from_config(space: ModelSpace, desc) -> SpacePoint:
    """Points in configs: a coordinate list (ambient), {"spatial": [...]}
    for the hyperboloid, or {"leg": i, "radius": r} for the spider."""
    if isinstance(space, Spider):
        return space.point(desc)
    if isinstance(desc, Mapping):
        if isinstance(space, Hyperboloid) and "spatial" in desc:
            return space.from_spatial(desc["spatial"])
        raise DomainError(f"cannot read a point of {space.space_id} from {desc!r}")
    return space.point(desc)


def point_to_config(space: ModelSpace, p: SpacePoint):
    if isinstance(space, Spider):
        return {"leg": Spider.leg_of(p), "radius": Spider.radius_of(p)}
    return [float(c) for c in p.coords]


def set_from_config(space: ModelSpace, desc: Mapping) -> ConvexSubset:
    kind = desc.get("kind")
    if kind == "whole_space":
        return WholeSpace(space.space_id)
    if kind == "ball":
        return Ball(point_from_config(space, desc["center"]), float(desc["radius"]))
    if kind == "segment":
        return Segment(point_from_config(space, desc["a"]), point_from_config(space, desc["b"]))
    if kind == "halfspace":
        if not isinstance(space, Euclidean):
            raise UnsupportedOperationError("halfspaces exist only in Euclidean spaces")
        return Halfspace(space.space_id, np.asarray(desc["normal"], dtype=float), float(desc["offset"]))
    raise DomainError(f"unknown set kind {kind!r}")
