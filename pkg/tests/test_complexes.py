import math

import numpy as np
import pytest

from combidyn import (
    CellComplex,
    VectorAssignment,
    barycentric_subdivision,
    cubical_grid,
    simplicial_complex,
)

from conftest import random_simplicial_instance
from oracles import euler_characteristic


def triangle():
    pts = np.array([(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)])
    return simplicial_complex(pts, [(0, 1, 2)])


class TestCellComplex:
    def test_cells_sorted_by_dim_then_vertices(self):
        K = triangle()
        specs = [(c.dim, c.vertex_ids) for c in K.cells]
        assert specs == sorted(specs)
        assert [c.id for c in K.cells] == list(range(7))

    def test_face_closure_required(self):
        pts = np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
        with pytest.raises(ValueError, match="face"):
            CellComplex(pts, [("simplex", (0, 1, 2)), ("simplex", (0,)), ("simplex", (1,)), ("simplex", (2,))])

    def test_faces_cofaces_duality(self):
        K = triangle()
        for c in K.cells:
            for f in K.faces(c.id):
                assert c.id in K.cofaces(f)
            for g in K.cofaces(c.id):
                assert c.id in K.faces(g)

    def test_closure_and_boundary(self):
        K = triangle()
        top = K.cell_by_vertices((0, 1, 2))
        assert K.closure(top.id) == frozenset(range(7))
        assert K.boundary(top.id) == frozenset(range(6))
        v = K.cell_by_vertices((0,))
        assert K.closure(v.id) == frozenset({v.id})
        assert K.boundary(v.id) == frozenset()

    def test_admissible_pairs_triangle(self):
        K = triangle()
        pairs = [p.as_tuple() for p in K.admissible_pairs()]
        assert pairs == sorted(pairs)
        # every vertex under two edges, every edge under the triangle
        assert len(pairs) == 9
        for lo, up in pairs:
            assert K.cell(up).dim == K.cell(lo).dim + 1
            assert lo in K.codim1_faces(up)

    def test_single_square_has_12_admissible_pairs(self):
        pts = np.array([(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)])
        K = cubical_grid(pts, side=1.0)
        assert K.counts_by_dim() == {0: 4, 1: 4, 2: 1}
        assert len(K.admissible_pairs()) == 12

    def test_barycenter(self):
        K = triangle()
        top = K.cell_by_vertices((0, 1, 2))
        assert np.allclose(K.barycenter(top.id), (1.0, 1.0 / 3.0))
        edge = K.cell_by_vertices((0, 2))
        assert np.allclose(K.barycenter(edge.id), (1.0, 0.0))

    def test_euler_characteristic(self):
        K = triangle()
        assert K.euler_characteristic() == 1
        assert K.euler_characteristic() == euler_characteristic(K.counts_by_dim())

    def test_cell_by_vertices_missing(self):
        K = triangle()
        with pytest.raises(KeyError):
            K.cell_by_vertices((0, 3))


class TestSimplicialClosure:
    def test_closes_under_subsets(self):
        pts = np.array([(0.0, 0.0), (2.0, 0.0), (1.0, 1.8), (3.0, 1.6)])
        K = simplicial_complex(pts, [(0, 1, 2), (1, 2, 3)])
        assert K.counts_by_dim() == {0: 4, 1: 5, 2: 2}

    def test_duplicate_generators_collapse(self):
        pts = np.array([(0.0, 0.0), (1.0, 0.0)])
        K = simplicial_complex(pts, [(0, 1), (1, 0), (0, 1)])
        assert K.counts_by_dim() == {0: 2, 1: 1}


class TestSubdivision:
    def test_single_triangle_counts(self):
        K = triangle()
        vectors = VectorAssignment({c.id: np.array([1.0, 0.0]) for c in K.cells})
        K2, _ = barycentric_subdivision(K, vectors)
        assert K2.counts_by_dim() == {0: 7, 1: 12, 2: 6}
        assert K2.euler_characteristic() == 1

    def test_single_edge_counts(self):
        pts = np.array([(0.0, 0.0), (1.0, 0.0)])
        K = simplicial_complex(pts, [(0, 1)])
        vectors = VectorAssignment({c.id: np.array([1.0, 1.0]) for c in K.cells})
        K2, _ = barycentric_subdivision(K, vectors)
        assert K2.counts_by_dim() == {0: 3, 1: 2}

    def test_vectors_inherited_from_carrier(self):
        K = triangle()
        # tag every original cell with a distinct vector
        vectors = VectorAssignment(
            {c.id: np.array([float(c.id), -float(c.id)]) for c in K.cells}
        )
        K2, vec2 = barycentric_subdivision(K, vectors)
        original = {tuple(vectors[c.id]) for c in K.cells}
        for c in K2.cells:
            assert tuple(vec2[c.id]) in original
        # all six new triangles sit inside the original one and inherit its tag
        top = K.cell_by_vertices((0, 1, 2))
        for c in K2.cells:
            if c.dim == 2:
                assert np.array_equal(vec2[c.id], vectors[top.id])
        # new vertices at original barycenters keep the original cell's vector
        for c in K.cells:
            new_v = K2.cell_by_vertices((c.id,))
            assert np.allclose(K2.barycenter(new_v.id), K.barycenter(c.id))
            assert np.array_equal(vec2[new_v.id], vectors[c.id])

    def test_boundary_edges_inherit_edge_vectors(self):
        K = triangle()
        vectors = VectorAssignment(
            {c.id: np.array([float(c.id) + 1.0, 0.0]) for c in K.cells}
        )
        K2, vec2 = barycentric_subdivision(K, vectors)

        def cross(u, v):
            return u[0] * v[1] - u[1] * v[0]

        for c in K2.cells:
            if c.dim != 1:
                continue
            a, b = (K2.barycenter(v) for v in c.vertex_ids)
            for e in K.cells:
                if e.dim != 1:
                    continue
                p, q = (K.barycenter(v) for v in e.vertex_ids)
                seg = q - p
                # does the new edge lie inside the original edge segment?
                if (
                    abs(cross(seg, a - p)) < 1e-12
                    and abs(cross(seg, b - p)) < 1e-12
                    and min(p[0], q[0]) - 1e-12 <= min(a[0], b[0])
                    and max(a[0], b[0]) <= max(p[0], q[0]) + 1e-12
                ):
                    assert np.array_equal(vec2[c.id], vectors[e.id])

    def test_top_cell_multiplication_random(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            K, vectors = random_simplicial_instance(rng, allow_zero_vectors=False)
            K2, _ = barycentric_subdivision(K, vectors)
            assert K2.euler_characteristic() == K.euler_characteristic()
            d = K.dim
            assert K2.counts_by_dim()[d] == math.factorial(d + 1) * K.counts_by_dim()[d]

    def test_cubical_rejected(self):
        pts = np.array([(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)])
        K = cubical_grid(pts, side=1.0)
        vectors = VectorAssignment({c.id: np.ones(2) for c in K.cells})
        with pytest.raises(ValueError, match="simplicial"):
            barycentric_subdivision(K, vectors)

    def test_missing_vector_rejected(self):
        K = triangle()
        vectors = VectorAssignment({0: np.ones(2)})
        with pytest.raises(ValueError, match="vector"):
            barycentric_subdivision(K, vectors)
