"""Discrete energy ``E_V`` for piecewise-linear maps on triangle meshes.

On each triangle the affine map has constant Wirtinger derivatives
``f_z`` and ``f_zbar``; the energy is

    E_V = sum_T area_T * (V(|f_z|^2) + |f_zbar|^2) / 2.

``f_z`` and ``f_zbar`` are complex-linear in the vertex images, so for every
triangle we precompute weights with ``f_z = sum_k alpha_k w_k`` and
``f_zbar = sum_k beta_k w_k``.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import kernels
from ._fallback import scatter
from .errors import DegenerateTriangle, VariationOnBoundary
from .mesh import DeformedState, TriangleMesh

REG_EPS = 1e-10
MELTING_TOL = 1e-6
BRANCH_TOL = 1e-8
DEGENERATE_RTOL = 1e-14


@dataclass(frozen=True)
class PotentialV:
    """Convex potential of ``x = |f_z|^2`` with its first two derivatives.

    For ``kind == "lambda"`` the potential is ``lam (sqrt(x) - 1)^2`` with
    ``sqrt(x)`` replaced by ``sqrt(x + eps^2)`` so that value and gradient stay
    smooth where ``f_z`` vanishes.
    """

    value: Callable
    d1: Callable
    d2: Callable
    kind: str = "custom"
    lam: Optional[float] = None
    eps: float = 0.0

    @classmethod
    def lambda_(cls, lam: float, eps: float = REG_EPS) -> "PotentialV":
        if not lam > 0:
            raise ValueError("lambda must be positive")
        e2 = eps * eps

        def value(x):
            return lam * (np.sqrt(x + e2) - 1.0) ** 2

        def d1(x):
            return lam * (1.0 - 1.0 / np.sqrt(x + e2))

        def d2(x):
            return lam / (2.0 * (x + e2) ** 1.5)

        return cls(value, d1, d2, "lambda", float(lam), eps)

    @classmethod
    def custom(cls, value: Callable, d1: Callable, d2: Callable,
               probes=(1e-4, 0.01, 0.25, 0.5, 0.9, 1.1, 2.0, 4.0, 16.0)) -> "PotentialV":
        p = np.asarray(probes, dtype=float)
        if abs(value(1.0)) > 1e-12 or abs(d1(1.0)) > 1e-9:
            raise ValueError("V must attain its minimum 0 at x = 1")
        if np.any(np.asarray(d2(p)) <= 0) or np.any(np.asarray(value(p)) <= 0):
            raise ValueError("V must be strictly convex and positive away from x = 1")
        if np.any(np.diff(np.asarray(d1(p))) <= 0):
            raise ValueError("V' must be increasing")
        return cls(value, d1, d2, "custom")


@dataclass(frozen=True)
class TriangleDerivatives:
    fz: complex
    fzbar: complex
    ref_area: float


def triangle_wirtinger(ref, img) -> TriangleDerivatives:
    """Wirtinger derivatives of the affine map sending ``ref`` onto ``img``."""
    z0, z1, z2 = (complex(z) for z in ref)
    w0, w1, w2 = (complex(w) for w in img)
    e1, e2 = z1 - z0, z2 - z0
    cross = e1.real * e2.imag - e1.imag * e2.real
    xs = [z0.real, z1.real, z2.real]
    ys = [z0.imag, z1.imag, z2.imag]
    bbox = max(max(xs) - min(xs), max(ys) - min(ys))
    if abs(cross) / 2 <= DEGENERATE_RTOL * bbox * bbox or bbox == 0:
        raise DegenerateTriangle("reference triangle is degenerate")
    det = e1 * e2.conjugate() - e1.conjugate() * e2
    d1, d2 = w1 - w0, w2 - w0
    fz = (d1 * e2.conjugate() - d2 * e1.conjugate()) / det
    fzbar = (e1 * d2 - e2 * d1) / det
    return TriangleDerivatives(fz, fzbar, abs(cross) / 2)


class MeshGeometry:
    """Per-triangle Wirtinger weights and reference areas of a mesh."""

    def __init__(self, mesh: TriangleMesh):
        z = mesh.vertices[mesh.triangles]
        e1 = z[:, 1] - z[:, 0]
        e2 = z[:, 2] - z[:, 0]
        det = e1 * np.conj(e2) - np.conj(e1) * e2
        alpha = np.empty((mesh.n_triangles, 3), dtype=complex)
        beta = np.empty_like(alpha)
        alpha[:, 1] = np.conj(e2) / det
        alpha[:, 2] = -np.conj(e1) / det
        alpha[:, 0] = -(alpha[:, 1] + alpha[:, 2])
        beta[:, 1] = -e2 / det
        beta[:, 2] = e1 / det
        beta[:, 0] = -(beta[:, 1] + beta[:, 2])
        self.alpha = np.ascontiguousarray(alpha)
        self.beta = np.ascontiguousarray(beta)
        self.area = np.ascontiguousarray(mesh.areas, dtype=float)
        self.tris = np.ascontiguousarray(mesh.triangles, dtype=np.int64)
        self.n_vertices = mesh.n_vertices

    def wirtinger(self, pos: np.ndarray):
        w = pos[self.tris]
        return np.sum(self.alpha * w, axis=1), np.sum(self.beta * w, axis=1)


_GEOMETRY: "weakref.WeakKeyDictionary[TriangleMesh, MeshGeometry]" = weakref.WeakKeyDictionary()


def geometry(mesh: TriangleMesh) -> MeshGeometry:
    geo = _GEOMETRY.get(mesh)
    if geo is None:
        geo = _GEOMETRY[mesh] = MeshGeometry(mesh)
    return geo


def _positions(state) -> np.ndarray:
    if isinstance(state, DeformedState):
        return state.positions
    return np.asarray(state, dtype=complex)


def wirtinger_fields(mesh: TriangleMesh, state):
    """Per-triangle ``(f_z, f_zbar)`` arrays of the piecewise-linear map."""
    return geometry(mesh).wirtinger(_positions(state))


def energy_and_gradient(mesh: TriangleMesh, state, V: PotentialV, need_grad: bool = True,
                        backend: Optional[str] = None):
    """Energy and per-vertex gradient (``dE/dx + i dE/dy``)."""
    geo = geometry(mesh)
    pos = np.ascontiguousarray(_positions(state), dtype=complex)
    if V.kind == "lambda":
        dens, grad = kernels.get(backend)(geo.alpha, geo.beta, geo.area, geo.tris, pos,
                                          V.lam, V.eps, need_grad)
        return float(np.sum(dens)), grad
    a, b = geo.wirtinger(pos)
    x = a.real**2 + a.imag**2
    dens = geo.area * 0.5 * (V.value(x) + b.real**2 + b.imag**2)
    if not need_grad:
        return float(np.sum(dens)), None
    ga = V.d1(x) * a
    contrib = geo.area[:, None] * (np.conj(geo.alpha) * ga[:, None] + np.conj(geo.beta) * b[:, None])
    return float(np.sum(dens)), scatter(geo.tris, contrib, geo.n_vertices)


def energy(mesh: TriangleMesh, state, V: PotentialV) -> float:
    return energy_and_gradient(mesh, state, V, need_grad=False)[0]


def gradient(mesh: TriangleMesh, state, V: PotentialV) -> np.ndarray:
    return energy_and_gradient(mesh, state, V)[1]


def energy_area_identity(mesh: TriangleMesh, state, V: PotentialV) -> tuple[float, float]:
    """Both sides of ``E_V + area(f)/2 = sum area (V(|f_z|^2) + |f_z|^2)/2``."""
    geo = geometry(mesh)
    a, b = geo.wirtinger(_positions(state))
    x = np.abs(a) ** 2
    lhs = energy(mesh, state, V) + 0.5 * float(np.sum(geo.area * (x - np.abs(b) ** 2)))
    rhs = float(np.sum(geo.area * 0.5 * (V.value(x) + x)))
    return lhs, rhs


def image_area(mesh: TriangleMesh, state) -> float:
    """Oriented area of the image, counted with multiplicity."""
    geo = geometry(mesh)
    a, b = geo.wirtinger(_positions(state))
    return float(np.sum(geo.area * (np.abs(a) ** 2 - np.abs(b) ** 2)))


STABLE, MELTING, UNSTABLE = "stable_strict", "melting", "unstable"


@dataclass
class StabilityReport:
    s: np.ndarray
    flags: np.ndarray
    branch_triangles: np.ndarray
    fz_abs: np.ndarray

    def count(self, flag: str) -> int:
        return int(np.sum(self.flags == flag))

    def summary(self) -> dict:
        return {
            STABLE: self.count(STABLE),
            MELTING: self.count(MELTING),
            UNSTABLE: self.count(UNSTABLE),
            "branch_points": [int(t) for t in self.branch_triangles],
        }


def stability_report(mesh: TriangleMesh, state, V: PotentialV, melting_tol: float = MELTING_TOL,
                     branch_tol: float = BRANCH_TOL) -> StabilityReport:
    """Classify triangles by the sign of ``1 + V'(|f_z|^2)``."""
    a, _ = wirtinger_fields(mesh, state)
    return _classify(np.asarray(a), V, melting_tol, branch_tol)


def analytic_stability(mesh: TriangleMesh, fz, V: PotentialV, melting_tol: float = MELTING_TOL,
                       branch_tol: float = BRANCH_TOL) -> StabilityReport:
    """Same classification with ``f_z`` taken from a closed form at triangle centroids."""
    centroids = mesh.vertices[mesh.triangles].mean(axis=1)
    return _classify(np.asarray(fz(centroids), dtype=complex), V, melting_tol, branch_tol)


def _classify(a, V, melting_tol, branch_tol) -> StabilityReport:
    x = np.abs(a) ** 2
    s = 1.0 + V.d1(x)
    flags = np.where(s > melting_tol, STABLE, np.where(s < -melting_tol, UNSTABLE, MELTING))
    branch = np.nonzero(np.abs(a) < branch_tol)[0]
    return StabilityReport(s, flags, branch, np.abs(a))


def _vertex_stars(mesh: TriangleMesh):
    """Incident triangles of each interior vertex, ordered counterclockwise."""
    geo = geometry(mesh)
    stars = getattr(geo, "stars", None)
    if stars is None:
        z = mesh.vertices
        cen = z[mesh.triangles].mean(axis=1)
        inc = [[] for _ in range(mesh.n_vertices)]
        for t, tri in enumerate(mesh.triangles.tolist()):
            for v in tri:
                inc[v].append(t)
        stars = {}
        for v in mesh.interior.tolist():
            ts = np.array(inc[v])
            stars[v] = ts[np.argsort(np.angle(cen[ts] - z[v]))]
        geo.stars = stars
    return stars


def phase_winding(mesh: TriangleMesh, state) -> dict:
    """Winding number of ``f_z`` around each interior vertex; nonzero entries only.

    A discrete branch point shows up as a vertex around which the phase of
    the piecewise constant ``f_z`` turns a full multiple of ``2 pi``.
    """
    a, _ = wirtinger_fields(mesh, state)
    out = {}
    for v, ts in _vertex_stars(mesh).items():
        ph = a[ts]
        turn = float(np.sum(np.angle(np.roll(ph, -1) / ph)))
        w = int(round(turn / (2 * np.pi)))
        if w:
            out[v] = w
    return out


def branch_triangles(mesh: TriangleMesh, state, report: Optional[StabilityReport] = None) -> list:
    """Triangles with vanishing ``f_z`` plus the stars of winding vertices."""
    if report is not None:
        found = set(int(t) for t in report.branch_triangles)
    else:
        a, _ = wirtinger_fields(mesh, state)
        found = set(np.nonzero(np.abs(a) < BRANCH_TOL)[0].tolist())
    stars = _vertex_stars(mesh)
    for v in phase_winding(mesh, state):
        found.update(int(t) for t in stars[v])
    return sorted(found)


def second_variation(mesh: TriangleMesh, state, V: PotentialV, variation) -> float:
    """Quadratic form ``sum area (2 V'' <f_z,h_z>^2 + (1 + V') |h_z|^2)``.

    Only defined for variations vanishing on the boundary, where it equals the
    second derivative of ``E_V`` along the variation.
    """
    h = np.asarray(variation, dtype=complex)
    if np.any(h[mesh.boundary] != 0):
        raise VariationOnBoundary("variation must vanish at boundary vertices")
    geo = geometry(mesh)
    a, _ = geo.wirtinger(_positions(state))
    hz, _ = geo.wirtinger(h)
    x = np.abs(a) ** 2
    inner = (a * np.conj(hz)).real
    return float(np.sum(geo.area * (2 * V.d2(x) * inner**2 + (1 + V.d1(x)) * np.abs(hz) ** 2)))


def rigid_fit(mesh: TriangleMesh, state):
    """Best-fit orientation-preserving rigid motion ``z -> r z + t`` (``|r| = 1``).

    Returns ``(r, t, max_residual / diameter)``.
    """
    z = mesh.vertices
    w = _positions(state)
    zc, wc = z - z.mean(), w - w.mean()
    s = np.sum(np.conj(zc) * wc)
    r = s / abs(s) if abs(s) > 0 else 1.0 + 0j
    t = w.mean() - r * z.mean()
    res = float(np.max(np.abs(r * z + t - w))) / mesh.diameter
    return complex(r), complex(t), res


__all__ = [
    "PotentialV",
    "TriangleDerivatives",
    "triangle_wirtinger",
    "MeshGeometry",
    "geometry",
    "wirtinger_fields",
    "energy",
    "gradient",
    "energy_and_gradient",
    "energy_area_identity",
    "image_area",
    "stability_report",
    "analytic_stability",
    "StabilityReport",
    "second_variation",
    "phase_winding",
    "branch_triangles",
    "rigid_fit",
    "STABLE",
    "MELTING",
    "UNSTABLE",
]
