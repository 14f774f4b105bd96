"""Length gradient, projected gradient descent, and first-order optimality.

The total core length of a diagram is a function of the disk centres.  Its
gradient has a closed form: moving one disk changes the length through the
tangent segments touching that disk, each contributing the unit vector
along the segment pointing toward its tangency on the moving disk.
Degenerate (zero-length) tangents contribute their limiting direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .diagram import Diagram, DiskConfig, LoopItinerary, realize, total_length
from .geometry import Point, TangentKind, common_tangent

CONTACT_TOL = 1e-7


class OptimizeError(ValueError):
    pass


class InfeasibleStart(OptimizeError):
    pass


@dataclass
class OptimizeSettings:
    step_size: float = 0.05
    max_iterations: int = 100_000
    grad_tolerance: float = 1e-9
    fixed_disks: frozenset[str] = frozenset()


@dataclass
class OptimizeResult:
    final_config: DiskConfig
    final_length: float
    iterations: int
    converged: bool
    active_contacts: list[tuple[str, str]]


@dataclass
class EquilibriumReport:
    is_critical: bool
    multipliers: dict[tuple[str, str], float]
    residual: float


def length_gradient(diagram: Diagram) -> dict[str, Point]:
    """Gradient of total core length with respect to each disk centre."""
    grad = {name: Point(0.0, 0.0) for name in diagram.config.ids}
    for loop in diagram.loops:
        stops = loop.stops
        k = len(stops)
        if k == 1:
            continue  # a lone circle does not pull on its disk
        for i in range(k):
            a = stops[i]
            b = stops[(i + 1) % k]
            t = common_tangent(diagram.config.center(a.disk), a.orient,
                               diagram.config.center(b.disk), b.orient)
            w = t.direction
            # Unit vector toward the tangency on each endpoint disk.
            grad[a.disk] = grad[a.disk] - w
            grad[b.disk] = grad[b.disk] + w
    return grad


def _active_contacts(config: DiskConfig, tol: float = CONTACT_TOL):
    out = []
    disks = config.disks
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            d = (disks[i][1] - disks[j][1]).norm()
            if d <= 2.0 + tol:
                out.append((disks[i][0], disks[j][0]))
    return out


def certify_equilibrium(diagram: Diagram, tol: float = CONTACT_TOL,
                        fixed_disks: frozenset[str] | set[str] = frozenset()) -> EquilibriumReport:
    """First-order optimality test at the current configuration.

    The configuration is critical when, for every free disk, the length
    gradient is balanced by nonnegative contact forces along active
    contacts: grad_i = sum_j mu_ij (c_i - c_j)/2 with mu_ij >= 0, shared by
    the two disks of each contact.  The residual is the norm of the
    unexplained gradient remainder.
    """
    grad = length_gradient(diagram)
    contacts = _active_contacts(diagram.config, tol)
    free = [n for n in diagram.config.ids if n not in fixed_disks]
    rows = {n: k for k, n in enumerate(free)}
    b = np.zeros(2 * len(free))
    for n in free:
        g = grad[n]
        b[2 * rows[n]] = g.x
        b[2 * rows[n] + 1] = g.y
    usable = [c for c in contacts if c[0] in rows or c[1] in rows]
    if not usable:
        residual = float(np.linalg.norm(b))
        return EquilibriumReport(residual <= max(tol, 1e-9) * 10 + 1e-9, {}, residual)
    A = np.zeros((2 * len(free), len(usable)))
    for k, (na, nb) in enumerate(usable):
        ca = diagram.config.center(na)
        cb = diagram.config.center(nb)
        n_ab = (ca - cb) * 0.5
        if na in rows:
            A[2 * rows[na], k] = n_ab.x
            A[2 * rows[na] + 1, k] = n_ab.y
        if nb in rows:
            A[2 * rows[nb], k] = -n_ab.x
            A[2 * rows[nb] + 1, k] = -n_ab.y
    mu, residual = nnls(A, b)
    multipliers = {usable[k]: float(mu[k]) for k in range(len(usable))}
    return EquilibriumReport(residual <= 1e-6, multipliers, float(residual))


def project_feasible(config: DiskConfig, fixed: frozenset[str] | set[str],
                     max_sweeps: int = 100) -> DiskConfig:
    """Restore pairwise centre distance >= 2 by iterated pair projections."""
    centers = {n: c for n, c in config.disks}
    order = config.ids
    projected = project_centers(centers, fixed, max_sweeps)
    return DiskConfig(tuple((n, projected[n]) for n in order))


def project_centers(centers: dict[str, Point], fixed: frozenset[str] | set[str],
                    max_sweeps: int = 100) -> dict[str, Point]:
    """Iterated pairwise projection of raw centres onto the distance-2 set.

    Violating pairs are pushed apart symmetrically along their centre line;
    fixed disks do not move (the free partner takes the whole correction).
    """
    centers = dict(centers)
    names = list(centers)
    for _ in range(max_sweeps):
        worst = 0.0
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                a, b = names[i], names[j]
                if a in fixed and b in fixed:
                    continue
                v = centers[b] - centers[a]
                d = v.norm()
                if d >= 2.0:
                    continue
                worst = max(worst, 2.0 - d)
                if d < 1e-12:
                    v = Point(1.0, 0.0)
                    d = 1.0
                u = v * (1.0 / d)
                gap = 2.0 - d
                if a in fixed:
                    centers[b] = centers[b] + gap * u
                elif b in fixed:
                    centers[a] = centers[a] - gap * u
                else:
                    centers[a] = centers[a] - (0.5 * gap) * u
                    centers[b] = centers[b] + (0.5 * gap) * u
        if worst <= 1e-12:
            break
    return centers


def minimize(diagram: Diagram, settings: OptimizeSettings | None = None) -> OptimizeResult:
    """Projected gradient descent on total core length over disk centres.

    The first disk is held fixed when no fixed set is given (translation
    gauge).  Each step is backtracked until the length decreases, so the
    accepted length sequence is monotone nonincreasing and every iterate is
    feasible.  Convergence is certified by the contact-force residual.
    """
    if settings is None:
        settings = OptimizeSettings()
    fixed = set(settings.fixed_disks)
    if not fixed:
        fixed = {diagram.config.ids[0]}
    config = diagram.config
    for i in range(len(config.disks)):
        for j in range(i + 1, len(config.disks)):
            if (config.disks[i][1] - config.disks[j][1]).norm() < 2.0 - 1e-9:
                raise InfeasibleStart("initial configuration violates distance 2")
    current = Diagram(config, diagram.loops, diagram.name)
    length = total_length(current)
    iterations = 0
    converged = False
    for iterations in range(1, settings.max_iterations + 1):
        report = certify_equilibrium(current, fixed_disks=fixed)
        if report.residual < settings.grad_tolerance:
            converged = True
            break
        grad = length_gradient(current)
        step = settings.step_size
        improved = False
        while step >= 1e-14:
            centers = {}
            for n, c in current.config.disks:
                if n in fixed:
                    centers[n] = c
                else:
                    g = grad[n]
                    centers[n] = Point(c.x - step * g.x, c.y - step * g.y)
            projected = project_centers(centers, fixed)
            trial_cfg = DiskConfig(tuple((n, projected[n]) for n in current.config.ids))
            trial = Diagram(trial_cfg, diagram.loops, diagram.name)
            trial_len = total_length(trial)
            if trial_len < length - 1e-15:
                current = trial
                length = trial_len
                improved = True
                break
            step *= 0.5
        if not improved:
            # No descent direction left; accept the point as converged if
            # the force balance explains the gradient, else report stall.
            report = certify_equilibrium(current, fixed_disks=fixed)
            converged = report.residual < max(settings.grad_tolerance, 1e-6)
            break
    return OptimizeResult(current.config, length, iterations, converged,
                          _active_contacts(current.config))
