"""Minimization of the discrete energy with pinned vertices or a free boundary.

L-BFGS with Armijo backtracking on the free vertex positions; pinned
vertices stay at their targets bit for bit.  :func:`ramp_solve` moves the
pinned targets in equal increments and warm-starts each solve.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .elasticity import (
    PotentialV,
    StabilityReport,
    branch_triangles,
    energy_and_gradient,
    phase_winding,
    stability_report,
)
from .errors import LineSearchFailure, NonFiniteEnergy, SolverError
from .mesh import DeformedState, TriangleMesh

logger = logging.getLogger(__name__)

MIN_STEP = 1e-16
ROUNDING = 1e-12


@dataclass
class Constraints:
    """Pinned vertex targets; an empty mapping means a free boundary."""

    pinned: dict = field(default_factory=dict)

    def __post_init__(self):
        self.pinned = {int(i): complex(w) for i, w in self.pinned.items()}
        if not all(np.isfinite(w) for w in self.pinned.values()):
            raise ValueError("pinned targets must be finite")

    @property
    def free_boundary(self) -> bool:
        return not self.pinned

    def validate(self, mesh: TriangleMesh) -> None:
        bad = [i for i in self.pinned if not 0 <= i < mesh.n_vertices]
        if bad:
            raise ValueError(f"pinned indices out of range: {bad[:5]}")

    @classmethod
    def from_map(cls, mesh: TriangleMesh, indices, fn) -> "Constraints":
        idx = np.asarray(indices, dtype=int)
        vals = np.atleast_1d(fn(mesh.vertices[idx]))
        return cls(dict(zip(idx.tolist(), vals.tolist())))


@dataclass
class SolverConfig:
    grad_tol: float = 1e-8
    max_iters: int = 20000
    history: int = 8
    ls_shrink: float = 0.5
    ls_slope: float = 1e-4
    ramp_steps: int = 1

    def __post_init__(self):
        if not (self.grad_tol > 0 and self.max_iters > 0 and self.history > 0 and self.ramp_steps > 0):
            raise ValueError("solver settings must be positive")
        if not 0 < self.ls_shrink < 1:
            raise ValueError("ls_shrink must lie in (0, 1)")
        if not 0 < self.ls_slope < 0.5:
            raise ValueError("ls_slope must lie in (0, 0.5)")


@dataclass
class SolveReport:
    final_energy: float
    grad_norm: float
    iters: int
    converged: bool
    energy_trace: list
    stability: Optional[StabilityReport] = None
    branch_points: list = field(default_factory=list)
    winding: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "final_energy": self.final_energy,
            "grad_norm": self.grad_norm,
            "iters": self.iters,
            "converged": self.converged,
            "energy_trace_length": len(self.energy_trace),
            "branch_points": list(self.branch_points),
            "branch_vertices": {str(v): w for v, w in sorted(self.winding.items())},
        }
        if self.stability is not None:
            out["stability"] = self.stability.summary()
        return out


def _dot(u: np.ndarray, v: np.ndarray) -> float:
    return float(np.real(np.vdot(u, v)))


def minimize(mesh: TriangleMesh, init: DeformedState, cons: Constraints, V: PotentialV,
             cfg: Optional[SolverConfig] = None) -> tuple[DeformedState, SolveReport]:
    """Minimize ``E_V`` over the free vertices starting from ``init``.

    Steps satisfy the Armijo condition, or, once energy differences fall to
    rounding level (``ROUNDING * |E|``), a curvature test on the gradient.

    Convergence: ``max |grad_i| * diameter / area <= cfg.grad_tol`` over the
    free vertices.
    """
    cfg = cfg or SolverConfig()
    cons.validate(mesh)
    pos = np.array(init.positions if isinstance(init, DeformedState) else init, dtype=complex)
    if len(pos) != mesh.n_vertices or not np.all(np.isfinite(pos)):
        raise ValueError("initial state must be finite with one position per vertex")
    pinned = np.array(sorted(cons.pinned), dtype=int)
    if pinned.size:
        pos[pinned] = [cons.pinned[i] for i in pinned.tolist()]
    free = np.ones(mesh.n_vertices, dtype=bool)
    free[pinned] = False
    scale = mesh.diameter / mesh.area

    def fg(x):
        pos[free] = x
        E, g = energy_and_gradient(mesh, pos, V)
        return E, g[free]

    def gnorm(g):
        return float(np.max(np.abs(g))) * scale if g.size else 0.0

    x = pos[free].copy()
    E, g = fg(x)
    if not math.isfinite(E):
        raise NonFiniteEnergy("initial energy is not finite")
    trace = [E]
    mem: deque = deque(maxlen=cfg.history)
    it = 0
    gn = gnorm(g)

    def finish(converged):
        pos[free] = x
        state = DeformedState(pos)
        stab = stability_report(mesh, state, V)
        rep = SolveReport(E, gn, it, converged, trace, stab, branch_triangles(mesh, state, stab),
                          phase_winding(mesh, state))
        return state, rep

    while gn > cfg.grad_tol and it < cfg.max_iters:
        d = _direction(g, mem)
        slope = _dot(g, d)
        if slope >= 0:
            mem.clear()
            d, slope = -g, -_dot(g, g)
        t = 1.0 if mem else min(1.0, 0.1 * mesh.diameter / max(float(np.max(np.abs(g))), 1e-300))
        while True:
            xn = x + t * d
            En, gnew = fg(xn)
            if math.isfinite(En) and En <= E + cfg.ls_slope * t * slope:
                break
            # near the minimum energy differences drown in rounding; fall back
            # on the directional derivative (approximate Armijo test)
            if math.isfinite(En) and En <= E + ROUNDING * abs(E) and abs(_dot(gnew, d)) <= 0.9 * abs(slope):
                break
            t *= cfg.ls_shrink
            if t < MIN_STEP:
                break
        if t < MIN_STEP:
            if mem:
                logger.debug("line search failed at iteration %d; restarting with steepest descent", it)
                mem.clear()
                pos[free] = x
                continue
            state, rep = finish(False)
            raise LineSearchFailure(f"no descent step above {MIN_STEP} at iteration {it}", state, rep)
        s, y = xn - x, gnew - g
        sy = _dot(s, y)
        if sy > 1e-12 * math.sqrt(_dot(s, s) * _dot(y, y)):
            mem.append((s, y, 1.0 / sy))
        x, g, E = xn, gnew, En
        gn = gnorm(g)
        trace.append(E)
        it += 1
    return finish(gn <= cfg.grad_tol)


def _direction(g: np.ndarray, mem) -> np.ndarray:
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(mem):
        a = rho * _dot(s, q)
        alphas.append(a)
        q -= a * y
    if mem:
        s, y, _ = mem[-1]
        q *= _dot(s, y) / _dot(y, y)
    for (s, y, rho), a in zip(mem, reversed(alphas)):
        b = rho * _dot(y, q)
        q += (a - b) * s
    return -q


def linear_blend(mesh: TriangleMesh, pinned: dict) -> np.ndarray:
    """Initial guess: identity plus an inverse-distance-squared blend of the
    pinned displacements (Shepard interpolation); pinned vertices hit their
    targets exactly."""
    pos = mesh.vertices.copy()
    if not pinned:
        return pos
    idx = np.fromiter(pinned, dtype=int)
    pos[idx] = [pinned[i] for i in idx.tolist()]
    disp = pos[idx] - mesh.vertices[idx]
    free = np.setdiff1d(np.arange(mesh.n_vertices), idx)
    for chunk in np.array_split(free, max(1, len(free) // 512)):
        d2 = np.abs(mesh.vertices[chunk][:, None] - mesh.vertices[idx][None, :]) ** 2
        w = 1.0 / d2
        pos[chunk] += (w @ disp) / w.sum(axis=1)
    return pos


def ramp_solve(mesh: TriangleMesh, cons_target: Constraints, V: PotentialV,
               cfg: Optional[SolverConfig] = None, init: Optional[DeformedState] = None):
    """Quasi-static continuation from the reference to the pinned targets.

    Step ``s`` of ``cfg.ramp_steps`` pins vertex ``i`` at
    ``z_i + (s/steps)(target_i - z_i)``; the last step uses the targets exactly.
    """
    cfg = cfg or SolverConfig()
    if not cons_target.pinned:
        raise ValueError("ramp_solve needs at least one pinned vertex")
    cons_target.validate(mesh)
    steps = cfg.ramp_steps
    state = init if init is not None else DeformedState.identity(mesh)
    out = []
    for s in range(1, steps + 1):
        if s == steps:
            cons = cons_target
        else:
            frac = s / steps
            cons = Constraints({i: mesh.vertices[i] + frac * (w - mesh.vertices[i])
                                for i, w in cons_target.pinned.items()})
        try:
            state, rep = minimize(mesh, state, cons, V, cfg)
        except SolverError as exc:
            exc.step = s
            raise
        logger.info("ramp step %d/%d: E=%.6e iters=%d converged=%s", s, steps, rep.final_energy,
                    rep.iters, rep.converged)
        out.append((state, rep))
    return out


def smooth_perturbation(mesh: TriangleMesh, amplitude: float, modes: int, rng) -> np.ndarray:
    """Random sum of ``modes`` plane-wave products with wavelength near the
    mesh diameter, scaled so the largest displacement is ``amplitude * diameter``."""
    z = mesh.vertices
    c = z.mean()
    L = mesh.diameter
    field = np.zeros(mesh.n_vertices, dtype=complex)
    for _ in range(modes):
        kx, ky = rng.normal(size=2) * (2 * np.pi / L)
        px, py = rng.uniform(0, 2 * np.pi, size=2)
        w = complex(rng.normal(), rng.normal())
        field += w * np.sin(kx * (z.real - c.real) + px) * np.cos(ky * (z.imag - c.imag) + py)
    peak = float(np.max(np.abs(field)))
    return field * (amplitude * L / peak) if peak > 0 else field
