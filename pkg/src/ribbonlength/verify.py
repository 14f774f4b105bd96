"""Numerical verification of the ribbon conditions for a realized diagram.

Four checks: the separation bound (unit tangent disks on both sides of the
core stay empty except across crossings), the non-overlapping condition
(normal bands of width 1 on each side meet only above core intersections),
the crossing condition (all self-intersections are honest double points),
and the region condition (every bounded complementary region holds exactly
one configuration disk).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diagram import (CrossingReport, CsCurve, Diagram, realize_all,
                      self_crossings)
from .geometry import Arc, Point, Segment
from .regions import GridTooCoarse, RegionGrid, build_region_grid, disks_by_region

CLEARANCE_TOL = 1e-6
CROSSING_EXCUSE_RADIUS = 2.0


@dataclass(frozen=True)
class Violation:
    kind: str                   # SeparationBound | NonOverlap | CrossingCondition |
                                # MissingRegionDisk | InfiniteDoubleSet
    location: Point
    measurement: float
    detail: str = ""


@dataclass
class CheckReport:
    status: str                 # ribbon | diskOnly | invalid
    violations: list[Violation]
    crossing_count: int
    bounded_region_estimate: int

    def to_text(self) -> str:
        lines = [f"status: {self.status}",
                 f"crossings: {self.crossing_count}",
                 f"bounded regions: {self.bounded_region_estimate}"]
        if self.violations:
            lines.append("violations:")
            for v in self.violations:
                lines.append(f"  {v.kind} at ({v.location.x:.6f},{v.location.y:.6f})"
                             f" measurement={v.measurement:.6f}"
                             + (f" ({v.detail})" if v.detail else ""))
        else:
            lines.append("violations: none")
        return "\n".join(lines)

    def to_kv(self) -> str:
        lines = [f"status={self.status}",
                 f"crossing_count={self.crossing_count}",
                 f"region_count={self.bounded_region_estimate}"]
        for v in self.violations:
            lines.append(f"violation={v.kind}@({v.location.x:.6f},{v.location.y:.6f})"
                         f":{v.measurement:.6f}")
        return "\n".join(lines)


def _diagram_samples(diagram: Diagram, sample_step: float,
                     curves: list[CsCurve]):
    pts, tans, loops, params = [], [], [], []
    for li, curve in enumerate(curves):
        p, t, s, piece_idx = curve.sample(sample_step)
        pts.append(p)
        tans.append(t)
        loops.append(np.full(len(p), li))
        params.append(s)
    return (np.concatenate(pts), np.concatenate(tans),
            np.concatenate(loops), np.concatenate(params))


def _curve_total(curves: list[CsCurve]) -> float:
    return sum(c.length() for c in curves)


def assert_curvature_bound(curves: list[CsCurve]) -> None:
    """Structural curvature check: every piece is a unit arc or a segment."""
    for curve in curves:
        for piece in curve.pieces:
            if not isinstance(piece, (Arc, Segment)):
                raise TypeError(f"unexpected piece {type(piece)}")


def _crossing_points(crossings: CrossingReport) -> list[Point]:
    return [c.point for c in crossings.crossings if c.is_crossing]


def check_separation(diagram: Diagram, sample_step: float | None = None,
                     curves: list[CsCurve] | None = None,
                     crossings: CrossingReport | None = None) -> list[Violation]:
    """Sampled test of the separation bound.

    Two parts.  First, any pair of crossings closer than the ribbon width 2
    is a violation (this is the paper-style practical criterion; crossing
    disks of the band cannot stay disjoint).  Second, a tangent-disk probe:
    a foreign core point strictly inside a unit disk tangent to the core is
    a violation when the two strands genuinely interfere there (their
    normal bands meet) and no transverse crossing within distance 2 of both
    sample points explains the proximity.  The purely local part of the
    bound (curvature at most 1, tangent circles on both sides) holds for
    every realized cs-curve by construction.
    """
    if curves is None:
        curves = realize_all(diagram)
    if crossings is None:
        crossings = self_crossings(diagram, curves)
    total = _curve_total(curves)
    if sample_step is None:
        sample_step = 1e-3 * total
    violations: list[Violation] = []
    cross_pts = _crossing_points(crossings)
    # Crossing pairs closer than the ribbon width.
    for i in range(len(cross_pts)):
        for j in range(i + 1, len(cross_pts)):
            dist = (cross_pts[i] - cross_pts[j]).norm()
            if dist < 2.0 - CLEARANCE_TOL:
                mid = (cross_pts[i] + cross_pts[j]) * 0.5
                violations.append(Violation(
                    "SeparationBound", mid, dist,
                    "crossing pair closer than ribbon width"))
    # Tangent-disk probe with band-interference confirmation.
    pts, tans, loops, params = _diagram_samples(diagram, sample_step, curves)
    normals = np.column_stack([-tans[:, 1], tans[:, 0]])
    cross_arr = (np.array([[p.x, p.y] for p in cross_pts])
                 if cross_pts else np.zeros((0, 2)))
    lengths = [c.length() for c in curves]
    reported = 0
    for side in (+1.0, -1.0):
        centers = pts + side * normals
        for i in range(len(pts)):
            c = centers[i]
            d = np.linalg.norm(pts - c, axis=1)
            inside = d < 1.0 - CLEARANCE_TOL
            if not np.any(inside):
                continue
            li = loops[i]
            local = (loops == li) & (np.minimum(
                np.abs(params - params[i]),
                lengths[int(li)] - np.abs(params - params[i])) < 2.5)
            inside &= ~local
            for j in np.nonzero(inside)[0]:
                if len(cross_arr):
                    dp = np.linalg.norm(cross_arr - pts[i], axis=1)
                    dq = np.linalg.norm(cross_arr - pts[j], axis=1)
                    if np.any((dp < CROSSING_EXCUSE_RADIUS)
                              & (dq < CROSSING_EXCUSE_RADIUS)):
                        continue
                if not _bands_meet(pts[i], tans[i], pts[j], tans[j], sample_step):
                    continue
                violations.append(Violation(
                    "SeparationBound", Point(*c), float(d[j]),
                    f"core point at distance {d[j]:.6f} inside tangent disk"))
                reported += 1
                break
            if reported > 20:
                break
        if reported > 20:
            break
    return violations


def _bands_meet(p, tp, q, tq, sample_step: float) -> bool:
    """Do the width-1 normal sweeps at two sample points intersect?"""
    np_ = np.array([-tp[1], tp[0]])
    nq = np.array([-tq[1], tq[0]])
    rel = q - p
    denom = np_[0] * nq[1] - np_[1] * nq[0]
    if abs(denom) < 1e-9:
        n_off = rel.dot(np_)
        t_off = rel.dot(tp)
        return abs(n_off) < 2.0 - CLEARANCE_TOL and abs(t_off) <= 2.0 * sample_step
    s = (rel[0] * nq[1] - rel[1] * nq[0]) / denom
    z = p + s * np_
    return (abs(s) < 1.0 - CLEARANCE_TOL
            and np.linalg.norm(z - q) < 1.0 - CLEARANCE_TOL)


def check_non_overlap(diagram: Diagram, sample_step: float | None = None,
                      curves: list[CsCurve] | None = None,
                      crossings: CrossingReport | None = None) -> list[Violation]:
    """Sampled test of the non-overlapping condition.

    The ribbon is the width-1 normal sweep on each side of the core.  Two
    normal lines meeting at a point closer than 1 to both base points mean
    two band branches overlap there; that is a violation unless the strands
    cross nearby.
    """
    if curves is None:
        curves = realize_all(diagram)
    if crossings is None:
        crossings = self_crossings(diagram, curves)
    total = _curve_total(curves)
    if sample_step is None:
        sample_step = 1e-3 * total
    pts, tans, loops, params = _diagram_samples(diagram, sample_step, curves)
    cross_pts = _crossing_points(crossings)
    cross_arr = (np.array([[p.x, p.y] for p in cross_pts])
                 if cross_pts else np.zeros((0, 2)))
    lengths = [c.length() for c in curves]
    n = len(pts)
    violations: list[Violation] = []
    # Pair scan restricted to sample pairs within distance 2.
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
    ii, jj = np.nonzero(np.triu(dist < 2.0 - CLEARANCE_TOL, k=1))
    # drop parameter-local pairs (the same strand next to itself)
    same = loops[ii] == loops[jj]
    dpar = np.abs(params[ii] - params[jj])
    loop_len = np.array([lengths[int(l)] for l in loops[ii]])
    cyc = np.minimum(dpar, loop_len - dpar)
    keep = ~(same & (cyc < 1.0))
    ii, jj = ii[keep], jj[keep]
    if len(ii) == 0:
        return violations
    ti = tans[ii]
    tj = tans[jj]
    ni = np.column_stack([-ti[:, 1], ti[:, 0]])
    nj = np.column_stack([-tj[:, 1], tj[:, 0]])
    rel = pts[jj] - pts[ii]
    denom = ni[:, 0] * nj[:, 1] - ni[:, 1] * nj[:, 0]
    parallel = np.abs(denom) < 1e-9
    u = np.empty(len(ii))
    v = np.empty(len(ii))
    z = np.empty((len(ii), 2))
    np.seterr(divide="ignore", invalid="ignore")
    s = (rel[:, 0] * nj[:, 1] - rel[:, 1] * nj[:, 0]) / denom
    z_g = pts[ii] + s[:, None] * ni
    u_g = np.abs(s)
    v_g = np.linalg.norm(z_g - pts[jj], axis=1)
    # parallel normals: overlap along the common normal direction
    n_off = np.sum(rel * ni, axis=1)
    t_off = np.sum(rel * ti, axis=1)
    z_p = pts[ii] + (n_off / 2.0)[:, None] * ni
    u_p = np.abs(n_off) / 2.0
    ok_p = np.abs(t_off) <= 2.0 * sample_step
    u = np.where(parallel, np.where(ok_p, u_p, 2.0), u_g)
    v = np.where(parallel, np.where(ok_p, u_p, 2.0), v_g)
    z = np.where(parallel[:, None], z_p, z_g)
    hit = (u < 1.0 - CLEARANCE_TOL) & (v < 1.0 - CLEARANCE_TOL)
    found = 0
    for k in np.nonzero(hit)[0]:
        i, j = ii[k], jj[k]
        if len(cross_arr):
            dp = np.linalg.norm(cross_arr - pts[i], axis=1)
            dq = np.linalg.norm(cross_arr - pts[j], axis=1)
            if np.any((dp < CROSSING_EXCUSE_RADIUS) & (dq < CROSSING_EXCUSE_RADIUS)):
                continue
        violations.append(Violation(
            "NonOverlap", Point(z[k, 0], z[k, 1]),
            float(np.linalg.norm(pts[i] - pts[j])),
            "ribbon branches overlap without a core crossing"))
        found += 1
        if found >= 20:
            break
    return violations


def check_crossings(diagram: Diagram,
                    curves: list[CsCurve] | None = None,
                    crossings: CrossingReport | None = None):
    """Classify self-intersections and flag crossing-condition breaches."""
    if curves is None:
        curves = realize_all(diagram)
    if crossings is None:
        crossings = self_crossings(diagram, curves)
    violations: list[Violation] = []
    for c in crossings.crossings:
        if c.kind == "multiple":
            violations.append(Violation(
                "CrossingCondition", c.point, float(len(c.passages)),
                "more than two branches through one point"))
    for (p0, p1) in crossings.overlaps:
        mid = (p0 + p1) * 0.5
        violations.append(Violation(
            "InfiniteDoubleSet", mid, (p1 - p0).norm(),
            "double interval shared by two strands"))
    return crossings.count(), violations


def check_region_disks(diagram: Diagram, grid_step: float = 0.05,
                       curves: list[CsCurve] | None = None,
                       crossings: CrossingReport | None = None):
    """Flood-fill region estimate plus the one-disk-per-region check.

    Returns (bounded_region_estimate, violations, grid).  The estimate
    counts merged complementary regions; consistency against the crossing
    Euler count is left to the caller, which knows the crossing count.
    """
    if curves is None:
        curves = realize_all(diagram)
    if crossings is None:
        crossings = self_crossings(diagram, curves)
    grid = build_region_grid(diagram, grid_step, curves, crossings)
    mapping = disks_by_region(diagram, grid, curves)
    violations: list[Violation] = []
    for region, disks in mapping.items():
        if region == -1:
            for name in disks:
                violations.append(Violation(
                    "MissingRegionDisk", diagram.config.center(name), 0.0,
                    f"disk {name} not inside any bounded region"))
        elif len(disks) != 1:
            c0 = diagram.config.center(disks[0])
            violations.append(Violation(
                "MissingRegionDisk", c0, float(len(disks)),
                f"region {region} holds disks {disks}"))
    regions_with_disk = {r for r in mapping if r != -1}
    for r in range(1, grid.region_count + 1):
        if r not in regions_with_disk:
            violations.append(Violation(
                "MissingRegionDisk", Point(0.0, 0.0), 0.0,
                f"region {r} holds no disk"))
    # Disk centres must keep clearance 1 from the core.
    for name, center in diagram.config.disks:
        dmin = min(_dist_to_curves(center, curves), 2.0)
        if dmin < 1.0 - CLEARANCE_TOL:
            violations.append(Violation(
                "MissingRegionDisk", center, dmin,
                f"disk {name} cut by the core (clearance {dmin:.6f})"))
    return grid.region_count, violations, grid


def _dist_to_curves(p: Point, curves: list[CsCurve]) -> float:
    from .geometry import distance_point_piece
    return min(distance_point_piece(p, piece)
               for curve in curves for piece in curve.pieces)


def graph_components(diagram: Diagram, curves: list[CsCurve] | None = None,
                     crossings: CrossingReport | None = None) -> int:
    """Connected components of the realized curve union."""
    if curves is None:
        curves = realize_all(diagram)
    if crossings is None:
        crossings = self_crossings(diagram, curves)
    n = len(curves)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for c in crossings.crossings:
        ls = {li for li, _, _ in c.passages}
        ls = sorted(ls)
        for other in ls[1:]:
            ra, rb = find(ls[0]), find(other)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    return len({find(i) for i in range(n)})


def full_report(diagram: Diagram, sample_step: float | None = None,
                grid_step: float = 0.05) -> CheckReport:
    """Aggregate ribbon-condition checks with default parameters."""
    curves = realize_all(diagram)
    assert_curvature_bound(curves)
    crossings = self_crossings(diagram, curves)
    violations: list[Violation] = []
    violations += check_separation(diagram, sample_step, curves, crossings)
    violations += check_non_overlap(diagram, sample_step, curves, crossings)
    count, vio = check_crossings(diagram, curves, crossings)
    violations += vio
    region_estimate, vio, _ = check_region_disks(diagram, grid_step, curves, crossings)
    violations += vio
    benign = {"SeparationBound", "NonOverlap"}
    if not violations:
        status = "ribbon"
    elif all(v.kind in benign for v in violations):
        status = "diskOnly"
    else:
        status = "invalid"
    return CheckReport(status, violations, count, region_estimate)
