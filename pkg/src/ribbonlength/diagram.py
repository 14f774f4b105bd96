"""Disk configurations, loop itineraries, and their realized tight cores.

A diagram is a set of labelled unit disks plus, per link component, a
cyclic itinerary of (disk, winding sense) stops.  Realization wraps each
stop's disk with a unit arc and joins consecutive stops by their unique
common tangent, producing a closed C1 curve of arcs and segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    TAU,
    Arc,
    IntersectionKind,
    IntersectionPoint,
    Orientation,
    OverlapInterval,
    Piece,
    Point,
    Segment,
    common_tangent,
    intersect_pieces,
    unit_dir,
)

FEASIBILITY_SLACK = 1e-9
JOINT_TOL = 1e-9


class DiagramError(ValueError):
    pass


class UnknownDisk(DiagramError):
    pass


class InfeasibleItinerary(DiagramError):
    pass


class NonIntegerTurning(DiagramError):
    """Signed sweep sum is not a multiple of 2pi; a joint must be broken."""


@dataclass(frozen=True)
class DiskConfig:
    """Ordered labelled unit-disk centres with pairwise distance >= 2."""

    disks: tuple[tuple[str, Point], ...]

    def __post_init__(self):
        ids = [d for d, _ in self.disks]
        if len(set(ids)) != len(ids):
            raise DiagramError(f"duplicate disk ids in {ids}")
        for i in range(len(self.disks)):
            for j in range(i + 1, len(self.disks)):
                d = (self.disks[i][1] - self.disks[j][1]).norm()
                if d < 2.0 - FEASIBILITY_SLACK:
                    raise DiagramError(
                        f"disks {ids[i]} and {ids[j]} at distance {d:.12g} < 2")

    @staticmethod
    def from_pairs(pairs) -> "DiskConfig":
        return DiskConfig(tuple((name, Point(float(x), float(y)))
                                for name, (x, y) in pairs))

    @property
    def ids(self) -> list[str]:
        return [name for name, _ in self.disks]

    def center(self, disk_id: str) -> Point:
        for name, c in self.disks:
            if name == disk_id:
                return c
        raise UnknownDisk(f"no disk named {disk_id!r}")

    def with_center(self, disk_id: str, center: Point) -> "DiskConfig":
        if disk_id not in self.ids:
            raise UnknownDisk(f"no disk named {disk_id!r}")
        return DiskConfig(tuple((n, center if n == disk_id else c)
                                for n, c in self.disks))

    def with_centers(self, centers: dict[str, Point]) -> "DiskConfig":
        return DiskConfig(tuple((n, centers.get(n, c)) for n, c in self.disks))

    def transformed(self, func) -> "DiskConfig":
        return DiskConfig(tuple((n, func(c)) for n, c in self.disks))


@dataclass(frozen=True)
class ItineraryStop:
    disk: str
    orient: Orientation


@dataclass(frozen=True)
class LoopItinerary:
    """Cyclic sequence of stops; a single stop realizes the full circle."""

    stops: tuple[ItineraryStop, ...]

    def __post_init__(self):
        if len(self.stops) < 1:
            raise DiagramError("itinerary needs at least one stop")

    @staticmethod
    def of(*stops) -> "LoopItinerary":
        out = []
        for disk, orient in stops:
            if isinstance(orient, str):
                orient = Orientation.CCW if orient.lower() == "ccw" else Orientation.CW
            out.append(ItineraryStop(disk, orient))
        return LoopItinerary(tuple(out))


@dataclass(frozen=True)
class Diagram:
    config: DiskConfig
    loops: tuple[LoopItinerary, ...]
    name: str = ""

    def __post_init__(self):
        if not self.loops:
            raise DiagramError("diagram needs at least one loop")
        ids = set(self.config.ids)
        used = set()
        for loop in self.loops:
            for stop in loop.stops:
                if stop.disk not in ids:
                    raise UnknownDisk(f"loop references unknown disk {stop.disk!r}")
                used.add(stop.disk)
        unused = ids - used
        if unused:
            raise DiagramError(f"disks never visited by any loop: {sorted(unused)}")


@dataclass(frozen=True)
class CsCurve:
    """Closed C1 concatenation of unit arcs and straight segments."""

    pieces: tuple[Piece, ...]

    def length(self) -> float:
        return sum(p.length() for p in self.pieces)

    def joint_defects(self) -> list[float]:
        """Angle mismatch at each joint (piece i end vs piece i+1 start)."""
        out = []
        n = len(self.pieces)
        for i in range(n):
            a = self.pieces[i]
            b = self.pieces[(i + 1) % n]
            da = a.end_direction()
            db = b.start_direction()
            dot = max(-1.0, min(1.0, da.dot(db)))
            out.append(math.acos(dot))
        return out

    def max_joint_defect(self) -> float:
        return max(self.joint_defects(), default=0.0)

    def signed_sweep_sum(self) -> float:
        return sum(p.sweep for p in self.pieces if isinstance(p, Arc))

    def turning_number(self) -> int:
        total = self.signed_sweep_sum()
        n = total / TAU
        rounded = round(n)
        if abs(total - rounded * TAU) > 1e-6:
            raise NonIntegerTurning(
                f"sweep sum {total:.9g} is not a multiple of 2pi")
        return int(rounded)

    def sample(self, step: float):
        """Sample the curve at arc-length spacing <= step.

        Returns (points, tangents, params, piece_index) as numpy arrays,
        where params are cumulative arc lengths.
        """
        pts, tans, params, idx = [], [], [], []
        s0 = 0.0
        for k, piece in enumerate(self.pieces):
            L = piece.length()
            if L <= 0.0:
                continue
            n = max(2, int(math.ceil(L / step)) + 1)
            ts = np.linspace(0.0, 1.0, n, endpoint=False)
            if isinstance(piece, Arc):
                ang = piece.start_angle + ts * piece.sweep
                x = piece.center.x + np.cos(ang)
                y = piece.center.y + np.sin(ang)
                s = 1.0 if piece.sweep >= 0 else -1.0
                tx, ty = -np.sin(ang) * s, np.cos(ang) * s
            else:
                d = piece.direction()
                x = piece.p.x + ts * (piece.q.x - piece.p.x)
                y = piece.p.y + ts * (piece.q.y - piece.p.y)
                tx = np.full_like(x, d.x)
                ty = np.full_like(y, d.y)
            pts.append(np.column_stack([x, y]))
            tans.append(np.column_stack([tx, ty]))
            params.append(s0 + ts * L)
            idx.append(np.full(len(ts), k, dtype=int))
            s0 += L
        if not pts:
            raise DiagramError("cannot sample a curve with zero total length")
        return (np.concatenate(pts), np.concatenate(tans),
                np.concatenate(params), np.concatenate(idx))


def realize(config: DiskConfig, loop: LoopItinerary) -> CsCurve:
    """Realize one itinerary as its closed C1 tight core.

    Consecutive stops are joined by the unique common tangent compatible
    with their winding senses; each stop contributes the arc from its
    incoming to its outgoing tangency point, traversed in the stop's sense.
    Coincident tangency points mean the stop wraps its full circle.
    """
    stops = loop.stops
    k = len(stops)
    if k == 1:
        stop = stops[0]
        c = config.center(stop.disk)
        return CsCurve((Arc(c, 0.0, TAU * stop.orient.sign),))
    tangents = []
    for i in range(k):
        a = stops[i]
        b = stops[(i + 1) % k]
        ca = config.center(a.disk)
        cb = config.center(b.disk)
        try:
            tangents.append(common_tangent(ca, a.orient, cb, b.orient))
        except ValueError as exc:
            raise InfeasibleItinerary(
                f"stops {i} ({a.disk}) -> {(i + 1) % k} ({b.disk}): {exc}") from exc
    pieces: list[Piece] = []
    for i in range(k):
        stop = stops[i]
        c = config.center(stop.disk)
        t_in = tangents[i - 1].to_point
        t_out = tangents[i].from_point
        a_in = (t_in - c).angle()
        a_out = (t_out - c).angle()
        s = stop.orient.sign
        sweep = (s * (a_out - a_in)) % TAU
        if sweep < 1e-12 or sweep > TAU - 1e-12:
            # Coincident tangency points.  When the curve arrives or leaves
            # along a segment of positive length this is a grazing
            # pass-through (zero arc, kept in the piece list); when both
            # adjacent tangents are degenerate the stop wraps its whole
            # disk, as at a pinch between touching disks.
            if (tangents[i - 1].length() > 1e-9 or tangents[i].length() > 1e-9):
                sweep = 0.0
            else:
                sweep = TAU
        pieces.append(Arc(c, a_in, s * sweep))
        pieces.append(tangents[i].segment())
    return CsCurve(tuple(pieces))


def realize_all(diagram: Diagram) -> list[CsCurve]:
    return [realize(diagram.config, loop) for loop in diagram.loops]


def curve_length(curve: CsCurve) -> float:
    return curve.length()


def total_length(diagram: Diagram) -> float:
    return sum(c.length() for c in realize_all(diagram))


def ribbonlength(diagram: Diagram) -> float:
    """Core length over ribbon width (the width is the normalized 2)."""
    return total_length(diagram) / 2.0


def turning_number(curve: CsCurve) -> int:
    return curve.turning_number()


@dataclass(frozen=True)
class Crossing:
    """One self-intersection of a realized diagram.

    ``passages`` lists (loop index, piece index, travel direction) for each
    branch through the point; ``kind`` is "transverse", "tangential"
    (branches cross with parallel tangents) or "touch" (branches meet but do
    not cross).  Overlap intervals are reported separately.
    """

    point: Point
    passages: tuple[tuple[int, int, Point], ...]
    kind: str

    @property
    def is_crossing(self) -> bool:
        return self.kind in ("transverse", "tangential")


@dataclass(frozen=True)
class CrossingReport:
    crossings: tuple[Crossing, ...]
    overlaps: tuple[tuple[Point, Point], ...]

    def count(self) -> int:
        return sum(1 for c in self.crossings if c.is_crossing)


def _piece_entry_exit(curves: list[CsCurve]):
    """Flattened piece list with loop/piece ids, skip zero-length pieces."""
    flat = []
    for li, curve in enumerate(curves):
        for pi, piece in enumerate(curve.pieces):
            flat.append((li, pi, piece))
    return flat


def _adjacent(li_a: int, pi_a: int, li_b: int, pi_b: int, n_pieces: int) -> bool:
    if li_a != li_b:
        return False
    d = abs(pi_a - pi_b)
    return d <= 1 or d == n_pieces - 1


def _passage_key(li: int, pi: int, piece: Piece, point: Point, n_pieces: int):
    """Curve position of a hit, as (loop, fractional piece index)."""
    if isinstance(piece, Arc):
        if abs(piece.sweep) < 1e-12:
            t = 0.0
        else:
            theta = (point - piece.center).angle()
            if piece.sweep >= 0:
                t = ((theta - piece.start_angle) % TAU) / piece.sweep
            else:
                t = -((piece.start_angle - theta) % TAU) / piece.sweep
            t = min(max(t, 0.0), 1.0)
    else:
        L = piece.length()
        t = 0.0 if L <= 1e-12 else min(max(
            (point - piece.p).dot(piece.q - piece.p) / (L * L), 0.0), 1.0)
    return li, (pi + t) % n_pieces


def _arclength_between(curve: CsCurve, pos_a: float, pos_b: float) -> float:
    """Cyclic arc-length distance between two fractional piece positions."""
    lengths = [p.length() for p in curve.pieces]
    total = sum(lengths)

    def abs_len(pos: float) -> float:
        pi = int(pos) % len(lengths)
        t = pos - int(pos)
        return sum(lengths[:pi]) + t * lengths[pi]

    d = abs(abs_len(pos_a) - abs_len(pos_b))
    return min(d, total - d)


def _curve_point_and_dir(curve: CsCurve, pos: float):
    n = len(curve.pieces)
    pi = int(pos) % n
    t = pos - int(pos)
    piece = curve.pieces[pi]
    # Walk forward over zero-length pieces for a usable local direction.
    return piece.point_at(t), piece.direction_at(t)


def _offset_at(curve: CsCurve, pos: float, delta: float, origin: Point, tangent: Point):
    """Normal offset of the curve point at arc-length delta from pos,
    relative to the line through origin with the given tangent."""
    n = len(curve.pieces)
    pi = int(pos) % n
    t = pos - int(pos)
    remaining = delta
    # Move by arc length along pieces, forwards or backwards.
    if remaining >= 0:
        piece = curve.pieces[pi]
        t_len = piece.length() * (1.0 - t)
        while remaining > t_len:
            remaining -= t_len
            pi = (pi + 1) % n
            piece = curve.pieces[pi]
            t = 0.0
            t_len = piece.length()
        L = piece.length()
        frac = t + (remaining / L if L > 0 else 0.0)
        p = piece.point_at(min(frac, 1.0))
    else:
        remaining = -remaining
        piece = curve.pieces[pi]
        t_len = piece.length() * t
        while remaining > t_len:
            remaining -= t_len
            pi = (pi - 1) % n
            piece = curve.pieces[pi]
            t = 1.0
            t_len = piece.length()
        L = piece.length()
        frac = t - (remaining / L if L > 0 else 0.0)
        p = piece.point_at(max(frac, 0.0))
    return (p - origin).cross(tangent) * -1.0


def self_crossings(diagram: Diagram, curves: list[CsCurve] | None = None) -> CrossingReport:
    """All self-intersections among non-adjacent pieces, classified.

    Transverse points, tangential crossings (branches exchange sides) and
    non-crossing touches are distinguished; overlap intervals are collected
    separately.  Multiple piece-pair hits at one point are merged into a
    single crossing record.
    """
    if curves is None:
        curves = realize_all(diagram)
    flat = _piece_entry_exit(curves)
    raw_hits: list[tuple[Point, int, int, Piece]] = []
    overlaps: list[tuple[Point, Point]] = []
    for i in range(len(flat)):
        li_a, pi_a, pa = flat[i]
        for j in range(i + 1, len(flat)):
            li_b, pi_b, pb = flat[j]
            if _adjacent(li_a, pi_a, li_b, pi_b, len(curves[li_a].pieces)):
                continue
            for res in intersect_pieces(pa, pb):
                if isinstance(res, OverlapInterval):
                    overlaps.append((res.start, res.end))
                else:
                    raw_hits.append((res.point, li_a, pi_a, pa))
                    raw_hits.append((res.point, li_b, pi_b, pb))
    # Cluster hit points.
    clusters: list[list[int]] = []
    reps: list[Point] = []
    for idx, (p, _, _, _) in enumerate(raw_hits):
        placed = False
        for ci, rep in enumerate(reps):
            if (p - rep).norm() <= 1e-7:
                clusters[ci].append(idx)
                placed = True
                break
        if not placed:
            reps.append(p)
            clusters.append([idx])
    crossings: list[Crossing] = []
    for rep, members in zip(reps, clusters):
        # Group hits into passages: hits on the same local strand through the
        # point are separated by (near-)zero arc length along the curve.
        passages: list[tuple[int, float]] = []
        for idx in members:
            p, li, pi, piece = raw_hits[idx]
            key_li, key_pos = _passage_key(li, pi, piece, rep, len(curves[li].pieces))
            merged = False
            for eli, epos in passages:
                if eli == key_li and _arclength_between(curves[eli], epos, key_pos) <= 1e-6:
                    merged = True
                    break
            if not merged:
                passages.append((key_li, key_pos))
        if len(passages) < 2:
            continue
        pass_info = []
        for li, pos in passages:
            _, tan = _curve_point_and_dir(curves[li], pos)
            pass_info.append((li, int(pos) % len(curves[li].pieces), tan))
        kind = _classify_crossing(rep, passages, pass_info, curves)
        crossings.append(Crossing(rep, tuple(pass_info), kind))
    return CrossingReport(tuple(crossings), tuple(overlaps))


def _classify_crossing(point: Point, passages, pass_info, curves) -> str:
    if len(passages) > 2:
        return "multiple"
    (la, posa), (lb, posb) = passages
    ta = pass_info[0][2]
    tb = pass_info[1][2]
    if abs(ta.cross(tb)) > 1e-7:
        return "transverse"
    # Tangential contact: compare normal offsets of both branches on both
    # sides to decide whether the branches exchange sides.
    delta = 0.05
    diff_before = (_offset_at(curves[la], posa, -delta, point, ta)
                   - _offset_at(curves[lb], posb, -delta * _dir_match(ta, tb), point, ta))
    diff_after = (_offset_at(curves[la], posa, +delta, point, ta)
                  - _offset_at(curves[lb], posb, +delta * _dir_match(ta, tb), point, ta))
    if diff_before * diff_after < 0:
        return "tangential"
    return "touch"


def _dir_match(ta: Point, tb: Point) -> float:
    """+1 if the two tangents point the same way, else -1."""
    return 1.0 if ta.dot(tb) >= 0 else -1.0


def isometry(theta: float, shift: Point):
    """Rigid motion: rotation by theta followed by translation."""
    def apply(p: Point) -> Point:
        return p.rotated(theta) + shift
    return apply
