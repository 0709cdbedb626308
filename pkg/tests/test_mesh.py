import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastica2d.errors import DegenerateTriangle, MeshError
from elastica2d.mesh import (
    DeformedState,
    TriangleMesh,
    annulus_mesh,
    circle_projector,
    disk_mesh,
    format_mesh,
    load_mesh,
    load_state,
    parse_mesh,
    parse_state,
    rectangle_mesh,
    save_mesh,
    save_state,
    subdivide,
)

SQUARE = np.array([0, 1, 1 + 1j, 1j])


def test_rectangle_counts():
    m = rectangle_mesh(1, 1, 2, 2)
    assert (m.n_vertices, m.n_triangles, len(m.boundary)) == (9, 8, 8)
    assert abs(m.area - 1) < 1e-15
    assert m.euler_characteristic() == 1


@pytest.mark.parametrize("res", [3, 7, 16, 40])
def test_disk(res):
    m = disk_mesh(1.0, res)
    assert np.all(m.areas > 0)
    assert len(m.boundary_loops()) == 1
    assert m.euler_characteristic() == 1
    assert len(m.boundary) == res
    assert np.allclose(np.abs(m.vertices[m.boundary]), 1)
    assert parse_mesh(format_mesh(m)).n_triangles == m.n_triangles


def test_disk_resolution_minimum():
    with pytest.raises(MeshError):
        disk_mesh(1.0, 2)


def test_disk_center_and_radius():
    m = disk_mesh(2.0, 24, 1 + 1j)
    assert np.allclose(np.abs(m.vertices[m.boundary] - (1 + 1j)), 2)


def test_annulus_two_loops():
    m = annulus_mesh(1, 2, 16)
    loops = m.boundary_loops()
    assert len(loops) == 2
    assert m.euler_characteristic() == 0
    radii = sorted(np.mean(np.abs(m.vertices[lp])) for lp in loops)
    assert np.allclose(radii, [1, 2])
    with pytest.raises(MeshError):
        annulus_mesh(2, 1, 16)


def test_boundary_loops_orientation():
    m = disk_mesh(1.0, 12)
    (loop,) = m.boundary_loops()
    z = m.vertices[loop]
    signed = 0.5 * np.sum((z.real * np.roll(z.imag, -1) - np.roll(z.real, -1) * z.imag))
    assert signed > 0


def test_validation_errors():
    with pytest.raises(MeshError):
        TriangleMesh(SQUARE, [[0, 1, 5]])
    with pytest.raises(MeshError):
        TriangleMesh(SQUARE, [[0, 1, 1]])
    with pytest.raises(DegenerateTriangle):
        TriangleMesh(SQUARE, [[0, 2, 1]])  # clockwise
    with pytest.raises(DegenerateTriangle):
        TriangleMesh(np.array([0, 1, 2]), [[0, 1, 2]])
    with pytest.raises(MeshError):
        TriangleMesh(SQUARE, [[0, 1, 2], [0, 1, 3]])  # edge 0-1 used twice in the same direction
    with pytest.raises(MeshError):
        TriangleMesh(SQUARE, [[0, 1, 2], [0, 2, 3]], boundary=[0, 1, 2])
    with pytest.raises(MeshError):
        TriangleMesh(np.array([0, 1, np.nan]), [[0, 1, 2]])


def test_degeneracy_threshold_is_relative():
    tiny = 1e-9 * np.array([0, 1, 1j])
    assert TriangleMesh(tiny, [[0, 1, 2]]).area > 0


def test_parse_mesh_text():
    text = "# square\nv 0 0\nv 1 0\nv 1 1\nv 0 1\nt 0 1 2\nt 0 2 3  # second\nb 0\nb 1\nb 2\nb 3\n"
    m = parse_mesh(text)
    assert m.n_triangles == 2 and len(m.boundary) == 4
    with pytest.raises(MeshError):
        parse_mesh("v 0 0\nq 1 2\n")
    with pytest.raises(MeshError):
        parse_mesh("v 0 0\nv 1 0\nv 0 1\nt 0 1 2\nb 7\n")


def test_io_roundtrip(tmp_path):
    m = disk_mesh(1.3, 20)
    save_mesh(m, tmp_path / "m.txt")
    m2 = load_mesh(tmp_path / "m.txt")
    assert np.array_equal(m.vertices, m2.vertices)
    assert np.array_equal(m.triangles, m2.triangles)
    assert np.array_equal(m.boundary, m2.boundary)
    s = DeformedState(m.vertices * (0.3 + 0.9j) + 1 / 3)
    save_state(s, tmp_path / "s.txt")
    s2 = load_state(tmp_path / "s.txt", m.n_vertices)
    assert np.array_equal(s.positions, s2.positions)
    with pytest.raises(MeshError):
        load_state(tmp_path / "s.txt", m.n_vertices + 1)
    with pytest.raises(MeshError):
        parse_state("p 1\n")


def test_state_validation():
    with pytest.raises(ValueError):
        DeformedState([0, np.inf])
    s = DeformedState([1, 2])
    with pytest.raises(ValueError):
        s.positions[0] = 3


def test_subdivide():
    m = disk_mesh(1.0, 12)
    f = subdivide(m, circle_projector([1.0]))
    assert f.n_triangles == 4 * m.n_triangles
    assert np.allclose(np.abs(f.vertices[f.boundary]), 1)
    assert len(f.boundary) == 2 * len(m.boundary)
    r = subdivide(rectangle_mesh(2, 1, 2, 1))
    assert abs(r.area - 2) < 1e-14


def test_mesh_hashable_by_identity():
    a, b = rectangle_mesh(1, 1, 1, 1), rectangle_mesh(1, 1, 1, 1)
    assert a != b and len({a, b}) == 2


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 5), st.floats(0.1, 5), st.integers(1, 6), st.integers(1, 6))
def test_rectangle_properties(w, h, nx, ny):
    m = rectangle_mesh(w, h, nx, ny)
    assert m.n_vertices == (nx + 1) * (ny + 1)
    assert m.n_triangles == 2 * nx * ny
    assert len(m.boundary) == 2 * (nx + ny)
    assert abs(m.area - w * h) < 1e-12 * w * h
    again = parse_mesh(format_mesh(m))
    assert np.array_equal(again.vertices, m.vertices)
