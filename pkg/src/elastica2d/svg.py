"""Plain SVG output for reference and deformed meshes or curve grids.

Coordinates are written with a fixed number of digits so identical input
always gives byte-identical files.
"""
from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from .elasticity import MELTING, STABLE, UNSTABLE

REFERENCE_GRAY = "#c8c8c8"
CLASS_COLORS = {STABLE: "#1f5fa8", MELTING: "#e08a00", UNSTABLE: "#c0152f"}
IMAGE_COLOR = CLASS_COLORS[STABLE]
WIDTH = 800
MARGIN = 20


class Canvas:
    """Maps complex plane coordinates into a fixed-width SVG viewport (y up)."""

    def __init__(self, points: np.ndarray, width: int = WIDTH, margin: int = MARGIN):
        pts = np.asarray(points, dtype=complex).ravel()
        pts = pts[np.isfinite(pts)]
        if pts.size == 0:
            pts = np.array([0j, 1 + 1j])
        self.x0, self.x1 = float(pts.real.min()), float(pts.real.max())
        self.y0, self.y1 = float(pts.imag.min()), float(pts.imag.max())
        span = max(self.x1 - self.x0, self.y1 - self.y0, 1e-12)
        self.scale = (width - 2 * margin) / span
        self.margin = margin
        self.width = int(round(2 * margin + (self.x1 - self.x0) * self.scale))
        self.height = int(round(2 * margin + (self.y1 - self.y0) * self.scale))
        self.items: list[str] = []

    def xy(self, z) -> tuple[np.ndarray, np.ndarray]:
        z = np.asarray(z, dtype=complex)
        x = self.margin + (z.real - self.x0) * self.scale
        y = self.margin + (self.y1 - z.imag) * self.scale
        return x, y

    def _coords(self, z) -> str:
        x, y = self.xy(z)
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(np.atleast_1d(x), np.atleast_1d(y)))

    def polyline(self, z, stroke: str, width: float = 1.0, closed: bool = False):
        z = np.asarray(z, dtype=complex)
        ok = np.isfinite(z)
        # split at non-finite samples so gaps stay gaps
        runs, cur = [], []
        for w, good in zip(z, ok):
            if good:
                cur.append(w)
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        tag = "polygon" if closed and ok.all() else "polyline"
        for run in runs:
            if len(run) < 2:
                continue
            self.items.append(f'<{tag} points="{self._coords(run)}" fill="none" stroke="{stroke}" '
                              f'stroke-width="{width:g}"/>')

    def triangle(self, z, stroke: str, width: float = 0.6, fill: str = "none"):
        self.items.append(f'<polygon points="{self._coords(z)}" fill="{fill}" stroke="{stroke}" '
                          f'stroke-width="{width:g}" stroke-linejoin="round"/>')

    def dot(self, z, radius: float = 3.5, fill: str = "#000000"):
        x, y = self.xy(z)
        self.items.append(f'<circle cx="{float(x):.3f}" cy="{float(y):.3f}" r="{radius:g}" fill="{fill}"/>')

    def render(self, title: Optional[str] = None) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">')
        body = [head, f'<rect width="{self.width}" height="{self.height}" fill="#ffffff"/>']
        if title:
            body.append(f"<title>{_escape(title)}</title>")
        body.extend(self.items)
        body.append("</svg>")
        return "\n".join(body) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def mesh_figure(mesh, positions, flags: Optional[Sequence[str]] = None,
                branch_points: Iterable[complex] = (), title: Optional[str] = None,
                show_reference: bool = True) -> str:
    """Reference mesh in light gray, image triangles stroked by stability class."""
    pos = np.asarray(positions, dtype=complex)
    pts = np.concatenate([mesh.vertices, pos]) if show_reference else pos
    cv = Canvas(pts)
    if show_reference:
        for tri in mesh.triangles:
            cv.triangle(mesh.vertices[tri], REFERENCE_GRAY, 0.5)
    flags = list(flags) if flags is not None else [STABLE] * mesh.n_triangles
    # unstable last so it is drawn on top
    order = sorted(range(mesh.n_triangles), key=lambda t: (flags[t] == UNSTABLE, flags[t] == MELTING, t))
    for t in order:
        cv.triangle(pos[mesh.triangles[t]], CLASS_COLORS.get(flags[t], IMAGE_COLOR), 0.6)
    for p in branch_points:
        cv.dot(p)
    return cv.render(title)


def curves_figure(reference: Sequence, image: Sequence, image_colors: Optional[Sequence[str]] = None,
                  dots: Iterable[complex] = (), title: Optional[str] = None) -> str:
    """Reference polylines in gray under their images."""
    pts = [np.asarray(c, dtype=complex) for c in list(reference) + list(image)]
    cv = Canvas(np.concatenate(pts) if pts else np.zeros(0, complex))
    for c in reference:
        cv.polyline(c, REFERENCE_GRAY, 0.8)
    colors = list(image_colors) if image_colors is not None else [IMAGE_COLOR] * len(image)
    for c, col in zip(image, colors):
        cv.polyline(c, col, 1.0)
    for p in dots:
        cv.dot(p)
    return cv.render(title)
