"""Planar primitives for unit-disk tight-core constructions.

Everything here works with circles of radius exactly 1 (the normalized
ribbon half-width).  Angles are measured counterclockwise from the +x
axis; arc sweeps are signed, positive meaning counterclockwise travel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

TAU = 2.0 * math.pi

# Contact classification tolerances.  Tangential contact means the angle
# between the two tangent directions is below ANGLE_TOL; two points closer
# than POINT_TOL are treated as coincident.
ANGLE_TOL = 1e-8
POINT_TOL = 1e-9


class GeometryError(ValueError):
    pass


class CentersCoincide(GeometryError):
    pass


class InternalTangentInfeasible(GeometryError):
    """Internal tangent requested for circles closer than distance 2."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __add__(self, other: "Point") -> "Point":
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> "Point":
        return Point(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self) -> "Point":
        return Point(-self.x, -self.y)

    def dot(self, other: "Point") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point") -> float:
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def unit(self) -> "Point":
        n = self.norm()
        if n == 0.0:
            raise GeometryError("cannot normalize zero vector")
        return Point(self.x / n, self.y / n)

    def perp(self) -> "Point":
        """Rotate by +90 degrees."""
        return Point(-self.y, self.x)

    def perp_cw(self) -> "Point":
        """Rotate by -90 degrees."""
        return Point(self.y, -self.x)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)

    def rotated(self, theta: float) -> "Point":
        c, s = math.cos(theta), math.sin(theta)
        return Point(c * self.x - s * self.y, s * self.x + c * self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def unit_dir(theta: float) -> Point:
    return Point(math.cos(theta), math.sin(theta))


class Orientation(Enum):
    CCW = 1
    CW = -1

    @property
    def sign(self) -> int:
        return self.value

    def reversed(self) -> "Orientation":
        return Orientation.CW if self is Orientation.CCW else Orientation.CCW


@dataclass(frozen=True)
class Arc:
    """Unit-radius circular arc.

    The arc starts at angle ``start_angle`` on the circle around ``center``
    and sweeps by the signed amount ``sweep`` (positive = CCW).
    """

    center: Point
    start_angle: float
    sweep: float

    @property
    def end_angle(self) -> float:
        return self.start_angle + self.sweep

    def length(self) -> float:
        return abs(self.sweep)

    def point_at(self, t: float) -> Point:
        """Point at fraction t in [0, 1] along the arc."""
        return self.center + unit_dir(self.start_angle + t * self.sweep)

    def start(self) -> Point:
        return self.point_at(0.0)

    def end(self) -> Point:
        return self.point_at(1.0)

    def direction_at(self, t: float) -> Point:
        theta = self.start_angle + t * self.sweep
        s = math.copysign(1.0, self.sweep)  # signed zero keeps the sense
        return Point(-math.sin(theta), math.cos(theta)) * s

    def start_direction(self) -> Point:
        return self.direction_at(0.0)

    def end_direction(self) -> Point:
        return self.direction_at(1.0)

    def angle_range_contains(self, theta: float, tol: float = 1e-12) -> bool:
        """Does the swept angular interval contain angle theta (mod 2pi)?"""
        if self.sweep >= 0:
            delta = (theta - self.start_angle) % TAU
            return delta <= self.sweep + tol
        delta = (self.start_angle - theta) % TAU
        return delta <= -self.sweep + tol


@dataclass(frozen=True)
class Segment:
    """Straight piece.  Zero length is allowed; then ``direction_hint``
    carries the travel direction (the common tangent direction at a
    degenerate internal tangent)."""

    p: Point
    q: Point
    direction_hint: Point | None = None

    def length(self) -> float:
        return (self.q - self.p).norm()

    def point_at(self, t: float) -> Point:
        return Point(self.p.x + t * (self.q.x - self.p.x),
                     self.p.y + t * (self.q.y - self.p.y))

    def start(self) -> Point:
        return self.p

    def end(self) -> Point:
        return self.q

    def direction(self) -> Point:
        d = self.q - self.p
        n = d.norm()
        if n <= POINT_TOL:
            if self.direction_hint is None:
                raise GeometryError("zero-length segment without direction hint")
            return self.direction_hint
        return Point(d.x / n, d.y / n)

    def direction_at(self, t: float) -> Point:
        return self.direction()

    def start_direction(self) -> Point:
        return self.direction()

    def end_direction(self) -> Point:
        return self.direction()


Piece = Arc | Segment


class TangentKind(Enum):
    EXTERNAL = "external"
    INTERNAL = "internal"


@dataclass(frozen=True)
class TangentLine:
    """Directed common tangent between two unit circles.

    Travel goes from ``from_point`` (tangency on the first circle) to
    ``to_point`` (tangency on the second).  ``direction`` is the unit travel
    direction and stays meaningful when the tangent degenerates to a point.
    """

    from_point: Point
    to_point: Point
    kind: TangentKind
    direction: Point

    def length(self) -> float:
        return (self.to_point - self.from_point).norm()

    def segment(self) -> Segment:
        return Segment(self.from_point, self.to_point, direction_hint=self.direction)


def common_tangent(a: Point, oa: Orientation, b: Point, ob: Orientation) -> TangentLine:
    """Directed common tangent between unit circles centred at a and b.

    The returned tangent is the unique one whose travel direction (from the
    circle at ``a`` to the circle at ``b``) matches circular motion with
    sense ``oa`` at its first tangency and ``ob`` at its second.  Same
    orientations give the external tangent (length d), opposite ones the
    internal tangent (length sqrt(d^2 - 4), needing d >= 2).
    """
    v = b - a
    d = v.norm()
    if d <= POINT_TOL:
        raise CentersCoincide(f"circle centres coincide at {a}")
    u = Point(v.x / d, v.y / d)
    sa, sb = oa.sign, ob.sign
    if sa == sb:
        w = u
        kind = TangentKind.EXTERNAL
    else:
        if d < 2.0 - POINT_TOL:
            raise InternalTangentInfeasible(
                f"internal tangent needs centre distance >= 2, got {d:.12g}")
        lam = math.sqrt(max(d * d - 4.0, 0.0))
        # Rotate u by the angle with cos = lam/d, sin = 2*sa/d.
        w = Point((lam * u.x - 2.0 * sa * u.y) / d,
                  (lam * u.y + 2.0 * sa * u.x) / d)
        kind = TangentKind.INTERNAL
    ta = a + sa * w.perp_cw()
    tb = b + sb * w.perp_cw()
    return TangentLine(ta, tb, kind, w)


def arc_between(center: Point, orient: Orientation, from_angle: float,
                to_angle: float) -> Arc:
    """Arc on the unit circle at ``center`` from one angle to another,
    traversed in sense ``orient``.  Equal angles give a zero sweep."""
    if orient is Orientation.CCW:
        sweep = (to_angle - from_angle) % TAU
    else:
        sweep = -((from_angle - to_angle) % TAU)
    return Arc(center, from_angle, sweep)


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def distance_point_segment(p: Point, seg: Segment) -> float:
    d = seg.q - seg.p
    dd = d.dot(d)
    if dd <= POINT_TOL * POINT_TOL:
        return (p - seg.p).norm()
    t = _clamp((p - seg.p).dot(d) / dd, 0.0, 1.0)
    return (p - seg.point_at(t)).norm()


def distance_point_arc(p: Point, arc: Arc) -> float:
    v = p - arc.center
    r = v.norm()
    if r <= POINT_TOL:
        return 1.0
    theta = v.angle()
    if arc.angle_range_contains(theta):
        return abs(r - 1.0)
    return min((p - arc.start()).norm(), (p - arc.end()).norm())


def distance_point_piece(p: Point, piece: Piece) -> float:
    """Euclidean distance from p to the point set of the piece."""
    if isinstance(piece, Arc):
        return distance_point_arc(p, piece)
    return distance_point_segment(p, piece)


class IntersectionKind(Enum):
    TRANSVERSE = "transverse"
    TANGENTIAL = "tangential"


@dataclass(frozen=True)
class IntersectionPoint:
    point: Point
    kind: IntersectionKind


@dataclass(frozen=True)
class OverlapInterval:
    """Pieces sharing a whole sub-arc or sub-segment (a double interval)."""

    start: Point
    end: Point


IntersectionResult = IntersectionPoint | OverlapInterval


def _classify(p: Point, dir_a: Point, dir_b: Point) -> IntersectionPoint:
    cross = abs(dir_a.cross(dir_b))
    kind = IntersectionKind.TANGENTIAL if cross < ANGLE_TOL else IntersectionKind.TRANSVERSE
    return IntersectionPoint(p, kind)


def _segment_param(seg: Segment, p: Point) -> float | None:
    """Parameter of p on the segment, or None if p is off the segment."""
    d = seg.q - seg.p
    dd = d.dot(d)
    if dd <= POINT_TOL * POINT_TOL:
        return 0.0 if (p - seg.p).norm() <= POINT_TOL else None
    t = _clamp((p - seg.p).dot(d) / dd, 0.0, 1.0)
    if (p - seg.point_at(t)).norm() <= POINT_TOL:
        return t
    return None


def _intersect_segments(a: Segment, b: Segment) -> list[IntersectionResult]:
    if a.length() <= POINT_TOL or b.length() <= POINT_TOL:
        # Degenerate segments meet pieces only at coincident points.
        pa = a.p
        if b.length() <= POINT_TOL:
            if (pa - b.p).norm() <= POINT_TOL:
                return [_classify(pa, a.direction(), b.direction())]
            return []
        if _segment_param(b, pa) is not None:
            return [_classify(pa, a.direction(), b.direction())]
        return []
    da = a.q - a.p
    db = b.q - b.p
    denom = da.cross(db)
    rel = b.p - a.p
    if abs(denom) <= ANGLE_TOL * da.norm() * db.norm():
        # Parallel.  Check for collinear overlap.
        if abs(rel.cross(da)) > POINT_TOL * da.norm():
            return []
        ua = da.unit()
        t0 = (b.p - a.p).dot(ua)
        t1 = (b.q - a.p).dot(ua)
        lo, hi = min(t0, t1), max(t0, t1)
        lo = max(lo, 0.0)
        hi = min(hi, a.length())
        if hi - lo > POINT_TOL:
            return [OverlapInterval(a.p + lo * ua, a.p + hi * ua)]
        if hi - lo > -POINT_TOL:
            p = a.p + (0.5 * (lo + hi)) * ua
            return [_classify(p, a.direction(), b.direction())]
        return []
    t = rel.cross(db) / denom
    s = rel.cross(da) / denom
    eps_a = POINT_TOL / da.norm()
    eps_b = POINT_TOL / db.norm()
    if -eps_a <= t <= 1.0 + eps_a and -eps_b <= s <= 1.0 + eps_b:
        p = a.point_at(_clamp(t, 0.0, 1.0))
        return [_classify(p, a.direction(), b.direction())]
    return []


def _arc_tangent_dir(arc: Arc, p: Point) -> Point:
    v = p - arc.center
    s = 1.0 if arc.sweep >= 0 else -1.0
    return v.perp().unit() * s


def _intersect_segment_arc(seg: Segment, arc: Arc) -> list[IntersectionResult]:
    if seg.length() <= POINT_TOL:
        if abs(distance_point_arc(seg.p, arc)) <= POINT_TOL:
            return [_classify(seg.p, seg.direction(), _arc_tangent_dir(arc, seg.p))]
        return []
    d = seg.q - seg.p
    L = d.norm()
    u = Point(d.x / L, d.y / L)
    rel = arc.center - seg.p
    proj = rel.dot(u)
    h = rel.cross(u)  # signed distance of centre from the segment line
    disc = 1.0 - h * h
    if abs(abs(h) - 1.0) <= POINT_TOL:
        hits = [proj]  # line tangent to the circle
    elif disc > 0.0:
        root = math.sqrt(disc)
        hits = [proj - root, proj + root]
    else:
        hits = []
    results: list[IntersectionResult] = []
    for t in hits:
        if -POINT_TOL <= t <= L + POINT_TOL:
            p = seg.p + _clamp(t, 0.0, L) * u
            theta = (p - arc.center).angle()
            if arc.angle_range_contains(theta, tol=POINT_TOL):
                pt = arc.center + unit_dir(theta)
                results.append(_classify(pt, seg.direction(), _arc_tangent_dir(arc, pt)))
    return results


def _intersect_arcs(a: Arc, b: Arc) -> list[IntersectionResult]:
    v = b.center - a.center
    d = v.norm()
    if d <= POINT_TOL:
        # Same supporting circle: overlap interval or endpoint touches.
        return _intersect_cocircular(a, b)
    if d >= 2.0 + POINT_TOL:
        return []
    if d >= 2.0 - POINT_TOL:
        # Externally tangent circles touch at the midpoint.
        p = a.center + 0.5 * v
        theta_a = (p - a.center).angle()
        theta_b = (p - b.center).angle()
        if a.angle_range_contains(theta_a, POINT_TOL) and b.angle_range_contains(theta_b, POINT_TOL):
            pa = a.center + unit_dir(theta_a)
            return [_classify(pa, _arc_tangent_dir(a, pa), _arc_tangent_dir(b, pa))]
        return []
    # Two proper circle intersections (equal radii 1).
    half = 0.5 * d
    root = math.sqrt(max(1.0 - half * half, 0.0))
    mid = a.center + 0.5 * v
    n = v.perp().unit()
    out: list[IntersectionResult] = []
    for sgn in (+1.0, -1.0):
        p = mid + sgn * root * n
        theta_a = (p - a.center).angle()
        theta_b = (p - b.center).angle()
        if a.angle_range_contains(theta_a, POINT_TOL) and b.angle_range_contains(theta_b, POINT_TOL):
            pa = a.center + unit_dir(theta_a)
            out.append(_classify(pa, _arc_tangent_dir(a, pa), _arc_tangent_dir(b, pa)))
    return out


def _norm_interval(arc: Arc) -> tuple[float, float]:
    """Return the swept interval as (lo, hi) with hi-lo = |sweep|, lo in [0, 2pi)."""
    if arc.sweep >= 0:
        lo = arc.start_angle % TAU
        return lo, lo + arc.sweep
    hi = arc.start_angle % TAU
    return hi + arc.sweep, hi


def _intersect_cocircular(a: Arc, b: Arc) -> list[IntersectionResult]:
    lo_a, hi_a = _norm_interval(a)
    lo_b, hi_b = _norm_interval(b)
    out: list[IntersectionResult] = []
    seen: list[Point] = []
    for shift in (-TAU, 0.0, TAU):
        lo = max(lo_a, lo_b + shift)
        hi = min(hi_a, hi_b + shift)
        if hi - lo > POINT_TOL:
            p0 = a.center + unit_dir(lo)
            p1 = a.center + unit_dir(hi)
            out.append(OverlapInterval(p0, p1))
        elif hi - lo > -POINT_TOL:
            p = a.center + unit_dir(0.5 * (lo + hi))
            if all((p - q).norm() > POINT_TOL for q in seen):
                seen.append(p)
                out.append(_classify(p, _arc_tangent_dir(a, p), _arc_tangent_dir(b, p)))
    return out


def intersect_pieces(a: Piece, b: Piece) -> list[IntersectionResult]:
    """All intersections of two pieces.

    Points are flagged transverse or tangential (tangent directions within
    ANGLE_TOL of parallel); shared sub-arcs/sub-segments come back as
    OverlapInterval results.
    """
    if isinstance(a, Segment) and isinstance(b, Segment):
        return _intersect_segments(a, b)
    if isinstance(a, Segment) and isinstance(b, Arc):
        return _intersect_segment_arc(a, b)
    if isinstance(a, Arc) and isinstance(b, Segment):
        out = _intersect_segment_arc(b, a)
        return out
    return _intersect_arcs(a, b)
