"""Grid-based estimation of the bounded complementary regions of a diagram.

The plane is rasterized on a square grid, curve cells are marked as
barriers, and the remaining cells are labelled by connected components.
Domains that meet only at a non-crossing tangential double point are merged
into one complementary region, following the disk-space convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .diagram import CrossingReport, CsCurve, Diagram, realize_all, self_crossings
from .geometry import Point


class GridTooCoarse(ValueError):
    pass


@dataclass
class RegionGrid:
    origin: Point
    step: float
    labels: np.ndarray          # 0 = curve barrier, -1 = unbounded, k >= 1 regions
    domain_count: int           # bounded domains before merging
    region_count: int           # bounded regions after tangential merges
    merges: list[tuple[int, int]]
    region_of_domain: dict[int, int]
    absorbed_domains: int = 0   # sub-resolution pockets folded into the barrier

    def cell_of(self, p: Point) -> tuple[int, int]:
        return (int((p.x - self.origin.x) / self.step),
                int((p.y - self.origin.y) / self.step))

    def label_at(self, p: Point) -> int:
        i, j = self.cell_of(p)
        if 0 <= i < self.labels.shape[0] and 0 <= j < self.labels.shape[1]:
            return int(self.labels[i, j])
        return -1

    def region_at(self, p: Point) -> int:
        lab = self.label_at(p)
        return self.region_of_domain.get(lab, -1) if lab > 0 else -1


def _rasterize(curves: list[CsCurve], origin: Point, step: float, shape):
    barrier = np.zeros(shape, dtype=bool)
    for curve in curves:
        pts, _, _, _ = curve.sample(step / 3.0)
        ii = ((pts[:, 0] - origin.x) / step).astype(int)
        jj = ((pts[:, 1] - origin.y) / step).astype(int)
        ok = (ii >= 0) & (ii < shape[0]) & (jj >= 0) & (jj < shape[1])
        barrier[ii[ok], jj[ok]] = True
    return barrier


def build_region_grid(diagram: Diagram, grid_step: float = 0.05,
                      curves: list[CsCurve] | None = None,
                      crossings: CrossingReport | None = None,
                      min_cells: int = 10) -> RegionGrid:
    """Flood-fill the complement of the realized diagram.

    Bounded domains adjacent at non-crossing tangential contacts are merged.
    Raises GridTooCoarse when a bounded domain has fewer than ``min_cells``
    cells.
    """
    if curves is None:
        curves = realize_all(diagram)
    if crossings is None:
        crossings = self_crossings(diagram, curves)
    xs: list[float] = []
    ys: list[float] = []
    for curve in curves:
        pts, _, _, _ = curve.sample(0.05)
        xs += [pts[:, 0].min(), pts[:, 0].max()]
        ys += [pts[:, 1].min(), pts[:, 1].max()]
    pad = 3.0
    origin = Point(min(xs) - pad, min(ys) - pad)
    w = max(xs) + pad - origin.x
    h = max(ys) + pad - origin.y
    shape = (int(math.ceil(w / grid_step)) + 1, int(math.ceil(h / grid_step)) + 1)
    barrier = _rasterize(curves, origin, grid_step, shape)
    free = ~barrier
    labels, n = ndimage.label(free)  # 4-connectivity
    # Unbounded = any label touching the frame.
    edge_labels = set(np.unique(labels[0, :])) | set(np.unique(labels[-1, :])) \
        | set(np.unique(labels[:, 0])) | set(np.unique(labels[:, -1]))
    edge_labels.discard(0)
    sizes = ndimage.sum_labels(np.ones_like(labels), labels, index=range(1, n + 1))
    # Domains below min_cells are unresolvable at this resolution: thin
    # slivers near tangencies or sub-disk-sized pockets.  They are absorbed
    # into the barrier; a complementary region of a disk diagram holds a
    # unit disk and is always vastly larger.
    bounded = [k for k in range(1, n + 1)
               if k not in edge_labels and sizes[k - 1] >= min_cells]
    absorbed = [k for k in range(1, n + 1)
                if k not in edge_labels and sizes[k - 1] < min_cells]
    # Relabel: unbounded -> -1, barrier/absorbed -> 0, bounded -> 1..m
    relabel = np.zeros(n + 1, dtype=int)
    for k in edge_labels:
        relabel[k] = -1
    for i, k in enumerate(bounded, start=1):
        relabel[k] = i
    lab = relabel[labels]
    if grid_step > 0.5:
        raise GridTooCoarse(f"grid step {grid_step} cannot resolve unit disks")
    # Merge domains across non-crossing tangential contacts ("touch" kind).
    parent = list(range(len(bounded) + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    merges = []
    for crossing in crossings.crossings:
        if crossing.kind != "touch":
            continue
        tangent = crossing.passages[0][2]
        labs = set()
        for sgn in (+1.0, -1.0):
            for dist in (2.0, 3.0, 4.0):
                probe = crossing.point + (sgn * dist * grid_step) * tangent
                l = _label_near(lab, origin, grid_step, probe)
                if l > 0:
                    labs.add(l)
                    break
        if len(labs) == 2:
            a, b = sorted(labs)
            merges.append((a, b))
            union(a, b)
    roots = sorted({find(i) for i in range(1, len(bounded) + 1)})
    region_index = {r: i + 1 for i, r in enumerate(roots)}
    region_of_domain = {i: region_index[find(i)] for i in range(1, len(bounded) + 1)}
    return RegionGrid(origin, grid_step, lab, len(bounded), len(roots),
                      merges, region_of_domain, len(absorbed))


def _label_near(lab: np.ndarray, origin: Point, step: float, p: Point) -> int:
    i = int((p.x - origin.x) / step)
    j = int((p.y - origin.y) / step)
    if not (0 <= i < lab.shape[0] and 0 <= j < lab.shape[1]):
        return -1
    v = int(lab[i, j])
    if v != 0:
        return v
    # On a barrier cell: look at the 8-neighbourhood.
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            ii, jj = i + di, j + dj
            if 0 <= ii < lab.shape[0] and 0 <= jj < lab.shape[1]:
                v = int(lab[ii, jj])
                if v > 0:
                    return v
    return 0


def disks_by_region(diagram: Diagram, grid: RegionGrid,
                    curves: list[CsCurve] | None = None) -> dict[int, list[str]]:
    """Map merged-region index to the disk ids whose centres lie inside."""
    if curves is None:
        curves = realize_all(diagram)
    out: dict[int, list[str]] = {}
    for name, center in diagram.config.disks:
        r = grid.region_at(center)
        if r > 0:
            out.setdefault(r, []).append(name)
        else:
            out.setdefault(-1, []).append(name)
    return out
