"""Planar triangle meshes: container, text I/O, validation and generators.

Mesh text format::

    # comment
    v <x> <y>
    t <i> <j> <k>      (0-based, counterclockwise)
    b <i>              (optional boundary marker)

State files hold one ``p <x> <y>`` line per vertex, in vertex order.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateTriangle, MeshError

DEGENERATE_RTOL = 1e-14


def signed_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    z0, z1, z2 = (vertices[triangles[:, k]] for k in range(3))
    e1, e2 = z1 - z0, z2 - z0
    return 0.5 * (e1.real * e2.imag - e1.imag * e2.real)


def _edge_counts(triangles: np.ndarray) -> Counter:
    directed = Counter()
    for a, b, c in triangles.tolist():
        directed[(a, b)] += 1
        directed[(b, c)] += 1
        directed[(c, a)] += 1
    return directed


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Reference mesh; vertices are complex reference positions ``z_i``.

    Construction validates CCW orientation, positive areas, edge-manifoldness
    and (when given) that the boundary markers match the edge-incidence count.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray

    def __init__(self, vertices, triangles, boundary: Optional[Sequence[int]] = None):
        v = np.ascontiguousarray(vertices, dtype=complex)
        t = np.ascontiguousarray(triangles, dtype=np.int64).reshape(-1, 3)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise MeshError("vertices must be a finite 1-d array")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise MeshError("triangle index out of range")
        if np.any((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])):
            raise MeshError("triangle with repeated vertex")
        area = signed_areas(v, t)
        span = np.ptp(v.real) + np.ptp(v.imag) if len(v) else 0.0
        bad = np.nonzero(area <= DEGENERATE_RTOL * span**2)[0]
        if bad.size:
            raise DegenerateTriangle(f"triangle {int(bad[0])} is degenerate or clockwise")
        directed = _edge_counts(t)
        if any(c > 1 for c in directed.values()):
            raise MeshError("mesh is not edge-manifold or inconsistently oriented")
        bverts = sorted({a for (a, b) in directed if (b, a) not in directed} |
                        {b for (a, b) in directed if (b, a) not in directed})
        if boundary is not None and sorted(set(int(i) for i in boundary)) != bverts:
            raise MeshError("boundary markers disagree with edge-incidence boundary")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        object.__setattr__(self, "boundary", np.array(bverts, dtype=np.int64))
        object.__setattr__(self, "_areas", area)
        self.vertices.setflags(write=False)
        self.triangles.setflags(write=False)
        self.boundary.setflags(write=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def areas(self) -> np.ndarray:
        return self._areas

    @property
    def area(self) -> float:
        return float(np.sum(self._areas))

    @property
    def diameter(self) -> float:
        v = self.vertices
        return float(math.hypot(np.ptp(v.real), np.ptp(v.imag)))

    @property
    def interior(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[self.boundary] = False
        return np.nonzero(mask)[0]

    def boundary_edges(self) -> list[tuple[int, int]]:
        directed = _edge_counts(self.triangles)
        return [(a, b) for (a, b) in directed if (b, a) not in directed]

    def boundary_loops(self) -> list[list[int]]:
        """Boundary vertex cycles, each traversed with the domain on the left."""
        nxt = dict(self.boundary_edges())
        loops = []
        seen = set()
        for start in sorted(nxt):
            if start in seen:
                continue
            loop = [start]
            seen.add(start)
            cur = nxt[start]
            while cur != start:
                if cur in seen:
                    raise MeshError("boundary is not a disjoint union of simple loops")
                loop.append(cur)
                seen.add(cur)
                cur = nxt[cur]
            loops.append(loop)
        return loops

    def euler_characteristic(self) -> int:
        edges = {tuple(sorted(e)) for e in _edge_counts(self.triangles)}
        return self.n_vertices - len(edges) + self.n_triangles


@dataclass(frozen=True, eq=False)
class DeformedState:
    """Image positions ``f_i`` of the mesh vertices."""

    positions: np.ndarray

    def __init__(self, positions):
        p = np.array(positions, dtype=complex).ravel()
        if not np.all(np.isfinite(p)):
            raise ValueError("state contains non-finite entries")
        p.setflags(write=False)
        object.__setattr__(self, "positions", p)

    def __len__(self):
        return len(self.positions)

    @classmethod
    def identity(cls, mesh: TriangleMesh) -> "DeformedState":
        return cls(mesh.vertices)

    @classmethod
    def from_map(cls, mesh: TriangleMesh, fn) -> "DeformedState":
        return cls(fn(mesh.vertices))


# -- text I/O ------------------------------------------------------------------

def parse_mesh(text: str) -> TriangleMesh:
    verts, tris, marks = [], [], []
    have_marks = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "v" and len(parts) == 3:
                verts.append(complex(float(parts[1]), float(parts[2])))
            elif parts[0] == "t" and len(parts) == 4:
                tris.append([int(p) for p in parts[1:]])
            elif parts[0] == "b" and len(parts) == 2:
                have_marks = True
                marks.append(int(parts[1]))
            else:
                raise ValueError
        except ValueError:
            raise MeshError(f"line {lineno}: cannot parse {raw!r}") from None
    if have_marks and any(not 0 <= m < len(verts) for m in marks):
        raise MeshError("boundary marker index out of range")
    return TriangleMesh(np.array(verts, dtype=complex), np.array(tris, dtype=np.int64).reshape(-1, 3),
                        marks if have_marks else None)


def format_mesh(mesh: TriangleMesh) -> str:
    out = [f"# {mesh.n_vertices} vertices, {mesh.n_triangles} triangles"]
    out += [f"v {z.real!r} {z.imag!r}" for z in mesh.vertices.tolist()]
    out += [f"t {a} {b} {c}" for a, b, c in mesh.triangles.tolist()]
    out += [f"b {i}" for i in mesh.boundary.tolist()]
    return "\n".join(out) + "\n"


def load_mesh(path) -> TriangleMesh:
    return parse_mesh(Path(path).read_text())


def save_mesh(mesh: TriangleMesh, path) -> None:
    Path(path).write_text(format_mesh(mesh))


def parse_state(text: str, n_vertices: Optional[int] = None) -> DeformedState:
    pts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "p" or len(parts) != 3:
            raise MeshError(f"line {lineno}: expected 'p <x> <y>'")
        pts.append(complex(float(parts[1]), float(parts[2])))
    if n_vertices is not None and len(pts) != n_vertices:
        raise MeshError(f"state has {len(pts)} points, mesh has {n_vertices} vertices")
    return DeformedState(pts)


def format_state(state: DeformedState) -> str:
    return "".join(f"p {w.real!r} {w.imag!r}\n" for w in state.positions.tolist())


def load_state(path, n_vertices: Optional[int] = None) -> DeformedState:
    return parse_state(Path(path).read_text(), n_vertices)


def save_state(state: DeformedState, path) -> None:
    Path(path).write_text(format_state(state))


# -- generators ----------------------------------------------------------------

def _ccw(verts: np.ndarray, tri: list) -> list:
    a, b, c = (verts[i] for i in tri)
    cross = (b - a).real * (c - a).imag - (b - a).imag * (c - a).real
    return tri if cross > 0 else [tri[0], tri[2], tri[1]]


def _zip_rings(verts, inner: list, inner_ang, outer: list, outer_ang) -> list:
    """Triangulate the band between two closed rings by angular merging."""
    na, nb = len(inner), len(outer)
    tris = []
    i = j = 0
    two_pi = 2 * math.pi

    def ang(seq, k):
        return seq[k % len(seq)] + two_pi * (k // len(seq))

    while i < na or j < nb:
        adv_inner = j >= nb or (i < na and ang(inner_ang, i + 1) < ang(outer_ang, j + 1))
        if adv_inner:
            tri = [inner[i % na], inner[(i + 1) % na], outer[j % nb]]
            i += 1
        else:
            tri = [inner[i % na], outer[j % nb], outer[(j + 1) % nb]]
            j += 1
        tris.append(_ccw(verts, tri))
    return tris


def disk_mesh(radius: float = 1.0, resolution: int = 16, center: complex = 0j) -> TriangleMesh:
    """Ring-structured disk; ``resolution`` boundary vertices (>= 3)."""
    if resolution < 3:
        raise MeshError("disk resolution must be at least 3")
    m = max(1, round(resolution / 6))
    verts = [complex(center)]
    rings, angs = [], []
    for k in range(1, m + 1):
        nk = max(3, round(resolution * k / m))
        shift = 0.5 * (k % 2)
        a = [2 * math.pi * (j + shift) / nk for j in range(nk)]
        idx = list(range(len(verts), len(verts) + nk))
        verts.extend(center + radius * k / m * np.exp(1j * np.array(a)))
        rings.append(idx)
        angs.append(a)
    verts = np.array(verts, dtype=complex)
    tris = [_ccw(verts, [0, rings[0][j], rings[0][(j + 1) % len(rings[0])]]) for j in range(len(rings[0]))]
    for k in range(m - 1):
        tris += _zip_rings(verts, rings[k], angs[k], rings[k + 1], angs[k + 1])
    return TriangleMesh(verts, np.array(tris), rings[-1])


def annulus_mesh(r1: float, r2: float, resolution: int = 32, layers: Optional[int] = None) -> TriangleMesh:
    """Annulus with ``resolution`` vertices per ring; layer count keeps cells near-equilateral."""
    if resolution < 3:
        raise MeshError("annulus resolution must be at least 3")
    if not 0 < r1 < r2:
        raise MeshError("annulus requires 0 < r1 < r2")
    if layers is None:
        layers = max(1, round(resolution * (r2 - r1) / (math.pi * (r1 + r2))))
    verts, rings, angs = [], [], []
    for k in range(layers + 1):
        r = r1 + (r2 - r1) * k / layers
        shift = 0.5 * (k % 2)
        a = [2 * math.pi * (j + shift) / resolution for j in range(resolution)]
        rings.append(list(range(len(verts), len(verts) + resolution)))
        angs.append(a)
        verts.extend(r * np.exp(1j * np.array(a)))
    verts = np.array(verts, dtype=complex)
    tris = []
    for k in range(layers):
        tris += _zip_rings(verts, rings[k], angs[k], rings[k + 1], angs[k + 1])
    return TriangleMesh(verts, np.array(tris), rings[0] + rings[-1])


def rectangle_mesh(width: float, height: float, nx: int, ny: int, origin: complex = 0j) -> TriangleMesh:
    """Structured grid with alternating diagonals; ``(nx+1)(ny+1)`` vertices."""
    if nx < 1 or ny < 1:
        raise MeshError("rectangle needs nx, ny >= 1")
    xs = np.linspace(0, width, nx + 1)
    ys = np.linspace(0, height, ny + 1)
    verts = (origin + xs[None, :] + 1j * ys[:, None]).ravel()

    def vid(i, j):
        return j * (nx + 1) + i

    tris = []
    for j in range(ny):
        for i in range(nx):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            if (i + j) % 2 == 0:
                tris += [[a, b, c], [a, c, d]]
            else:
                tris += [[a, b, d], [b, c, d]]
    return TriangleMesh(verts, np.array(tris))


def subdivide(mesh: TriangleMesh, project=None) -> TriangleMesh:
    """Split every triangle into four at edge midpoints.

    ``project`` (optional) maps new boundary midpoints back onto the curved
    boundary, e.g. radial projection for disks.
    """
    verts = list(mesh.vertices)
    mid = {}
    bedges = {tuple(sorted(e)) for e in mesh.boundary_edges()}

    def midpoint(a, b):
        key = (min(a, b), max(a, b))
        if key not in mid:
            z = 0.5 * (verts[a] + verts[b])
            if project is not None and key in bedges:
                z = project(z)
            mid[key] = len(verts)
            verts.append(z)
        return mid[key]

    tris = []
    for a, b, c in mesh.triangles.tolist():
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        tris += [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
    return TriangleMesh(np.array(verts), np.array(tris))


def circle_projector(radii: Sequence[float], center: complex = 0j):
    """Radial projection onto the nearest of the given circles."""
    radii = list(radii)

    def project(z):
        d = z - center
        r = abs(d)
        target = min(radii, key=lambda R: abs(R - r))
        return center + d * (target / r)

    return project
