import numpy as np
import pytest

from morphopt.elasticity import element_strains
from morphopt.errors import InvalidParameterError
from morphopt.mesh import (Mesh, area_and_gradients, build_hexagon_mesh,
                           build_rect_mesh, hexagon_rotation_permutation,
                           points_in_hexagon)


def single_triangle_mesh(p0=(0.0, 0.0), p1=(1.0, 0.0), p2=(0.0, 1.0)):
    return Mesh(np.array([p0, p1, p2]), np.array([[0, 1, 2]]),
                np.array([], dtype=int), np.array([], dtype=int), 1.0)


class TestRectMesh:
    def test_cell_counting_example(self):
        mesh = build_rect_mesh(1.0, 1 / 3, 1 / 3, "left",
                               (2 / 3, 0.0, 1.0, 1 / 3))
        assert mesh.n_nodes == 8
        assert mesh.n_triangles == 6
        assert len(mesh.dirichlet_nodes) == 2
        assert np.all(mesh.nodes[mesh.dirichlet_nodes][:, 0] == 0.0)

    def test_full_resolution_grid_scale(self):
        box = (1 - 1 / 15, 1 / 6 - 1 / 30, 1.0, 1 / 6 + 1 / 30)
        mesh = build_rect_mesh(1.0, 1 / 3, 2e-3, "left", box)
        assert mesh.n_nodes == 501 * 168          # 500 x 167 cells
        assert mesh.n_triangles == 2 * 500 * 167
        assert len(mesh.target_elements) > 0
        c = mesh.centroids()[mesh.target_elements]
        assert c[:, 0].min() >= box[0] and c[:, 1].min() >= box[1]
        assert abs(mesh.area - 1 / 3) <= 1e-12 / 3

    def test_whole_domain_target(self):
        mesh = build_rect_mesh(1.0, 1.0, 0.5, "bottom", (0.0, 0.0, 1.0, 1.0))
        assert mesh.n_triangles == 8
        assert len(mesh.target_elements) == 8

    def test_degenerate_dimensions_rejected(self):
        with pytest.raises(InvalidParameterError):
            build_rect_mesh(1.0, 0.01, 0.5, "left", None)

    def test_refinement_quadruples_triangles(self):
        coarse = build_rect_mesh(1.0, 0.5, 0.25, "left", None)
        fine = build_rect_mesh(1.0, 0.5, 0.125, "left", None)
        assert fine.n_triangles == 4 * coarse.n_triangles

    def test_unknown_side_rejected(self):
        with pytest.raises(InvalidParameterError):
            build_rect_mesh(1.0, 1.0, 0.5, "north", None)

    def test_area_tiles_domain(self):
        mesh = build_rect_mesh(0.7, 0.4, 0.05, "top", None)
        assert abs(mesh.area - 0.28) <= 1e-12 * 0.28


class TestShapeGradients:
    def test_unit_right_triangle(self):
        mesh = single_triangle_mesh()
        area, grads = area_and_gradients(mesh, 0)
        assert area == pytest.approx(0.5, abs=1e-15)
        expected = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_allclose(grads, expected, atol=1e-14)

    def test_partition_of_unity(self):
        mesh = build_hexagon_mesh(1.0, 0.2, 0.3)
        sums = mesh.grads.sum(axis=1)
        assert np.max(np.abs(sums)) <= 1e-14 / mesh.cell_size

    def test_translation_invariance(self):
        a = single_triangle_mesh((0.1, 0.3), (0.9, 0.2), (0.4, 1.1))
        b = single_triangle_mesh((5.1, -6.7), (5.9, -6.8), (5.4, -5.9))
        np.testing.assert_allclose(a.areas, b.areas, rtol=1e-13)
        np.testing.assert_allclose(a.grads, b.grads, atol=1e-12)

    def test_affine_field_reproduced_exactly(self):
        mesh = build_rect_mesh(1.0, 0.5, 0.1, "left", None)
        A = np.array([[0.3, -1.2], [0.7, 0.4]])
        b = np.array([0.1, -0.2])
        u = mesh.nodes @ A.T + b
        strains = element_strains(mesh, u)
        sym = 0.5 * (A + A.T)
        assert np.max(np.abs(strains - sym)) <= 1e-13

    def test_invalid_triangle_index(self):
        mesh = single_triangle_mesh()
        with pytest.raises(InvalidParameterError):
            area_and_gradients(mesh, 5)


class TestHexagonMesh:
    def test_target_unresolved_is_error(self):
        with pytest.raises(InvalidParameterError, match="unresolved"):
            build_hexagon_mesh(0.35, 0.35 / 2, 0.035)

    def test_target_area_one_percent(self):
        mesh = build_hexagon_mesh(0.35, 0.35 / 40, 0.035)
        target_area = float(np.sum(mesh.areas[mesh.target_elements]))
        exact = 1.5 * np.sqrt(3.0) * 0.035 ** 2
        # within one layer of cells around the small hexagon's boundary
        slack = 6 * 0.035 * mesh.cell_size * 2
        assert abs(target_area - exact) <= slack
        assert abs(exact / mesh.area - 0.01) < 1e-12

    def test_hexagon_area_formula(self):
        mesh = build_hexagon_mesh(1.0, 0.5, 0.5)
        exact = 1.5 * np.sqrt(3.0)
        assert abs(mesh.area - exact) <= 1e-12 * exact

    def test_clamped_edges_alternate(self):
        edge = 0.35
        mesh = build_hexagon_mesh(edge, edge / 8, 0.1)
        clamped = mesh.nodes[mesh.dirichlet_nodes]
        s32 = np.sqrt(3.0) / 2.0
        normals = {"odd": [(0.0, 1.0), (-s32, -0.5), (s32, -0.5)],
                   "even": [(s32, 0.5), (-s32, 0.5), (0.0, -1.0)]}
        apothem = edge * s32
        on_any = np.zeros(len(clamped), dtype=bool)
        for n in normals["odd"]:
            on_any |= np.abs(clamped @ np.array(n) - apothem) <= 1e-9
        assert on_any.all()
        # three edges' worth of nodes, shared vertices not double counted
        m = round(edge / (edge / 8))
        assert len(mesh.dirichlet_nodes) == 3 * (m + 1)

    def test_even_orientation_differs(self):
        a = build_hexagon_mesh(1.0, 0.25, 0.3, clamp_orientation="odd")
        b = build_hexagon_mesh(1.0, 0.25, 0.3, clamp_orientation="even")
        assert not np.array_equal(a.dirichlet_nodes, b.dirichlet_nodes)
        assert len(a.dirichlet_nodes) == len(b.dirichlet_nodes)

    def test_rotation_symmetry_permutation(self):
        mesh = build_hexagon_mesh(0.35, 0.35 / 6, 0.1)
        perm = hexagon_rotation_permutation(mesh)
        assert len(np.unique(perm)) == mesh.n_nodes
        rot = np.array([[-0.5, -np.sqrt(3) / 2], [np.sqrt(3) / 2, -0.5]])
        np.testing.assert_allclose(mesh.nodes[perm], mesh.nodes @ rot.T,
                                   atol=1e-12)

    def test_points_in_hexagon(self):
        pts = np.array([[0.0, 0.0], [0.99, 0.0], [1.01, 0.0], [0.0, 0.87]])
        np.testing.assert_array_equal(points_in_hexagon(pts, 1.0),
                                      [True, True, False, False])


class TestMeshValidation:
    def test_clockwise_triangle_rejected(self):
        with pytest.raises(InvalidParameterError):
            Mesh(np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]),
                 np.array([[0, 1, 2]]), np.array([], dtype=int),
                 np.array([], dtype=int), 1.0)

    def test_bad_node_index_rejected(self):
        with pytest.raises(InvalidParameterError):
            Mesh(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
                 np.array([[0, 1, 7]]), np.array([], dtype=int),
                 np.array([], dtype=int), 1.0)

    def test_interior_dirichlet_node_rejected(self):
        mesh = build_rect_mesh(1.0, 1.0, 0.25, "left", None)
        interior = [i for i in range(mesh.n_nodes)
                    if i not in mesh.boundary_nodes()][0]
        with pytest.raises(InvalidParameterError):
            Mesh(mesh.nodes, mesh.triangles, np.array([interior]),
                 np.array([], dtype=int), mesh.cell_size)

    def test_immutability(self):
        mesh = build_rect_mesh(1.0, 1.0, 0.5, "left", None)
        with pytest.raises(ValueError):
            mesh.nodes[0, 0] = 5.0
        with pytest.raises(ValueError):
            mesh.areas[0] = 2.0

    def test_dirichlet_dofs_are_both_components(self):
        mesh = build_rect_mesh(1.0, 1.0, 0.5, "left", None)
        dofs = mesh.dirichlet_dofs()
        assert len(dofs) == 2 * len(mesh.dirichlet_nodes)
        assert np.all(np.isin(dofs // 2, mesh.dirichlet_nodes))
