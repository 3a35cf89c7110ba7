import numpy as np
import pytest

from combidyn import (
    CellComplex,
    VectorAssignment,
    assign_vertex_average,
    build_cost_model,
    build_problem,
    cubical_grid,
    delaunay_2d,
    preset_field,
    simplicial_complex,
)


@pytest.fixture(scope="session")
def toy():
    """The worked triangle: X = (0,0),(1,1),(2,0) with one rotating field."""
    sample = preset_field("toy")
    complex = delaunay_2d(sample.points)
    vectors = assign_vertex_average(complex, sample.vectors)
    return sample, complex, vectors


@pytest.fixture(scope="session")
def grad_toy():
    """Same triangle, first vector tilted to (0.05, 1); the near-degenerate
    instance whose optimum flips between cyclic and gradient around alpha 0.14."""
    sample = preset_field("grad_toy")
    complex = delaunay_2d(sample.points)
    vectors = assign_vertex_average(complex, sample.vectors)
    return sample, complex, vectors


# generating simplex pools for random small complexes over up to 5 vertices;
# every entry closes to at most 12 cells so exhaustive enumeration stays cheap
_GEN_POOL = [
    [(0, 1, 2)],
    [(0, 1, 2), (1, 2, 3)],
    [(0, 1, 2), (2, 3)],
    [(0, 1, 2), (3, 4)],
    [(0, 1), (1, 2), (2, 0)],
    [(0, 1), (1, 2), (2, 3), (3, 0)],
    [(0, 1, 2), (1, 2, 3), (0, 3)],
    [(0,), (1, 2)],
    [(0, 1)],
]


def random_simplicial_instance(rng: np.random.Generator, allow_zero_vectors=True):
    """Small random complex plus per-cell vectors, for solver stress tests.

    Cell counts stay at or below 12 so brute-force enumeration is cheap.
    Vertex positions are jittered to keep geometry generic; occasionally a
    zero vector is planted to exercise the degenerate cost branch.
    """
    gens = _GEN_POOL[rng.integers(len(_GEN_POOL))]
    n_vertices = max(max(g) for g in gens) + 1
    base = np.array(
        [(0.0, 0.0), (2.0, 0.0), (1.0, 1.8), (3.0, 1.6), (-1.0, 1.4)]
    )[:n_vertices]
    vertices = base + rng.normal(scale=0.2, size=base.shape)
    complex = simplicial_complex(vertices, gens)
    vectors = {}
    for cell in complex.cells:
        v = rng.normal(size=2)
        if allow_zero_vectors and rng.random() < 0.05:
            v = np.zeros(2)
        vectors[cell.id] = v
    return complex, VectorAssignment(vectors)


def random_cubical_instance(rng: np.random.Generator, max_extent: int = 3):
    """Random 2D lattice patch with vertex-sampled vectors. A 2x2 patch (the
    max_extent=2 case) closes to 9 cells, small enough for enumeration."""
    w = int(rng.integers(2, max_extent + 1))
    h = int(rng.integers(2, max_extent + 1))
    pts = np.array([(i * 1.0, j * 1.0) for i in range(w) for j in range(h)])
    keep = rng.random(len(pts)) < 0.9
    keep[:4] = True
    complex = cubical_grid(pts[keep], side=1.0)
    data = rng.normal(size=(int(keep.sum()), 2))
    vectors = assign_vertex_average(complex, data)
    return complex, vectors


def random_instance(rng: np.random.Generator, small: bool = False):
    """Either flavour, with a random alpha; returns (complex, vectors, alpha).
    With small=True every instance has at most 12 cells."""
    if rng.random() < 0.7:
        complex, vectors = random_simplicial_instance(rng)
    else:
        complex, vectors = random_cubical_instance(rng, max_extent=2 if small else 3)
    alpha = float(rng.uniform(0.0, 2.0))
    return complex, vectors, alpha


def problem_for(complex: CellComplex, vectors, alpha: float):
    return build_problem(build_cost_model(complex, vectors, alpha), complex)
