"""Complex builders: 2D Delaunay, axis-aligned cubical grids, Dowker complexes.

The Delaunay triangulation is incremental Bowyer-Watson with exact orientation
and in-circle predicates (float filter, exact rational fallback). Degenerate
inputs are the norm here, not the exception: regular grids make every quad
cocircular, so the diagonal choice must come from a deterministic rule rather
than from rounding noise. The rule used is: a point exactly on a circumcircle
counts as outside, and points are inserted in input order. Both together fix
the triangulation of any cocircular family by the lexicographic index of its
points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .complexes import CellComplex, simplicial_complex
from .datagen import FieldSample

__all__ = [
    "delaunay_2d",
    "cubical_grid",
    "snap_to_lattice",
    "DowkerRelation",
    "dowker_complex",
    "dowker_complex_from_matrix",
]

# Error-bound coefficients for the floating-point predicate filters, in the
# style of adaptive-precision arithmetic: if |det| exceeds the bound the float
# sign is certain, otherwise recompute with Fractions (exact, since binary
# floats are rationals).
_EPS = np.finfo(float).eps / 2
_ORIENT_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_INCIRCLE_BOUND = (10.0 + 96.0 * _EPS) * _EPS


def _orient2d(ax, ay, bx, by, cx, cy) -> int:
    """Sign of the signed area of triangle abc (+1 counterclockwise)."""
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    errbound = _ORIENT_BOUND * (abs(detleft) + abs(detright))
    if det > errbound:
        return 1
    if det < -errbound:
        return -1
    F = Fraction
    det = (F(ax) - F(cx)) * (F(by) - F(cy)) - (F(ay) - F(cy)) * (F(bx) - F(cx))
    return (det > 0) - (det < 0)


def _incircle(ax, ay, bx, by, cx, cy, dx, dy) -> int:
    """Sign of the in-circle determinant: +1 iff d is strictly inside the
    circumcircle of the counterclockwise triangle abc."""
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    bcdet = bdx * cdy - cdx * bdy
    cadet = cdx * ady - adx * cdy
    abdet = adx * bdy - bdx * ady
    det = alift * bcdet + blift * cadet + clift * abdet
    permanent = (
        alift * (abs(bdx * cdy) + abs(cdx * bdy))
        + blift * (abs(cdx * ady) + abs(adx * cdy))
        + clift * (abs(adx * bdy) + abs(bdx * ady))
    )
    errbound = _INCIRCLE_BOUND * permanent
    if det > errbound:
        return 1
    if det < -errbound:
        return -1
    F = Fraction
    adx, ady = F(ax) - F(dx), F(ay) - F(dy)
    bdx, bdy = F(bx) - F(dx), F(by) - F(dy)
    cdx, cdy = F(cx) - F(dx), F(cy) - F(dy)
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    )
    return (det > 0) - (det < 0)


def _strictly_in_circumcircle(pts, tri, p) -> bool:
    a, b, c = tri
    s = _orient2d(*pts[a], *pts[b], *pts[c])
    if s == 0:
        raise AssertionError(f"degenerate triangle {tri} in triangulation")
    return _incircle(*pts[a], *pts[b], *pts[c], *p) * s > 0


def delaunay_2d(points) -> CellComplex:
    """Delaunay triangulation of planar points as a simplicial complex.

    Fully collinear input degenerates gracefully to the path of consecutive
    edges along the line. Anything with three or more points and no duplicates
    is accepted.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("delaunay_2d expects an (n, 2) point array")
    n = len(pts)
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    seen: dict[tuple[float, float], int] = {}
    for i, p in enumerate(pts):
        key = (p[0], p[1])
        if key in seen:
            raise ValueError(f"duplicate points at indices {seen[key]} and {i}")
        seen[key] = i

    anchor_b = next(i for i in range(1, n) if (pts[i] != pts[0]).any())
    if all(
        _orient2d(*pts[0], *pts[anchor_b], *pts[k]) == 0
        for k in range(n)
        if k not in (0, anchor_b)
    ):
        order = sorted(range(n), key=lambda i: (pts[i][0], pts[i][1]))
        edges = [(order[i], order[i + 1]) for i in range(n - 1)]
        return simplicial_complex(pts, edges)

    # Super-triangle comfortably containing everything; its vertices get the
    # indices n, n+1, n+2 and are dropped at the end.
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    cx, cy = (lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2
    span = max(hi[0] - lo[0], hi[1] - lo[1], 1.0)
    work = np.vstack(
        [
            pts,
            [cx - 16 * span, cy - 9 * span],
            [cx + 16 * span, cy - 9 * span],
            [cx, cy + 16 * span],
        ]
    )
    triangles: set[tuple[int, int, int]] = {(n, n + 1, n + 2)}

    for i in range(n):
        p = work[i]
        cavity = [t for t in triangles if _strictly_in_circumcircle(work, t, p)]
        if not cavity:
            raise AssertionError(f"insertion point {i} fell outside the triangulation")
        edge_count: dict[tuple[int, int], int] = {}
        for t in cavity:
            triangles.remove(t)
            for e in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2])):
                edge_count[e] = edge_count.get(e, 0) + 1
        for e, cnt in edge_count.items():
            if cnt == 1:
                triangles.add(tuple(sorted((e[0], e[1], i))))

    real = [t for t in triangles if max(t) < n]
    covered = {v for t in real for v in t}
    if covered != set(range(n)):
        raise AssertionError(f"points {sorted(set(range(n)) - covered)} ended up in no triangle")
    return simplicial_complex(pts, sorted(real))


def _lattice_indices(points: np.ndarray, side: float, tol_factor: float = 1e-9):
    """Map points onto integer lattice coordinates of pitch `side`, anchored at
    the per-axis minimum. Raises if any coordinate is off-lattice."""
    origin = points.min(axis=0)
    idx = np.rint((points - origin) / side).astype(int)
    snapped = origin + idx * side
    err = np.abs(points - snapped).max(axis=1)
    bad = np.nonzero(err > tol_factor * side)[0]
    if len(bad):
        i = int(bad[0])
        raise ValueError(
            f"point {i} at {points[i].tolist()} is off-lattice for side {side} "
            f"(deviation {err[i]:.3g})"
        )
    return origin, idx, snapped


def cubical_grid(points, side: float) -> CellComplex:
    """Cubical complex on lattice-aligned points in R^2 or R^3.

    Includes every elementary cube, of every dimension, all of whose corners
    are data points; that set is closed under faces by construction. Vertex
    coordinates are canonicalized to the lattice.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise ValueError("cubical_grid expects points in R^2 or R^3")
    if side <= 0:
        raise ValueError("side must be positive")
    origin, idx, snapped = _lattice_indices(pts, side)
    d = pts.shape[1]

    site_of: dict[tuple[int, ...], int] = {}
    for i, key in enumerate(tuple(int(k) for k in row) for row in idx):
        if key in site_of:
            raise ValueError(f"points {site_of[key]} and {i} snap to the same lattice site {key}")
        site_of[key] = i

    cells: list[tuple[str, tuple[int, ...]]] = []
    axes = range(d)
    for key, vid in site_of.items():
        for k in range(d + 1):
            for spanned in itertools.combinations(axes, k):
                corners = []
                for offs in itertools.product((0, 1), repeat=k):
                    corner = list(key)
                    for a, o in zip(spanned, offs):
                        corner[a] += o
                    c = site_of.get(tuple(corner))
                    if c is None:
                        break
                    corners.append(c)
                else:
                    cells.append(("cube", tuple(corners)))
    return CellComplex(snapped, cells)


def snap_to_lattice(sample: FieldSample, side: float) -> FieldSample:
    """Lossy preprocessing for trajectory-like data: round every point to the
    nearest lattice site of pitch `side` and merge points landing on the same
    site by averaging their vectors. The result satisfies cubical_grid's
    on-lattice requirement."""
    if side <= 0:
        raise ValueError("side must be positive")
    pts = np.asarray(sample.points, dtype=float)
    vecs = np.asarray(sample.vectors, dtype=float)
    origin = pts.min(axis=0)
    idx = np.rint((pts - origin) / side).astype(int)
    groups: dict[tuple[int, ...], list[int]] = {}
    for i, key in enumerate(map(tuple, idx)):
        groups.setdefault(key, []).append(i)
    keys = sorted(groups)
    new_pts = np.array([origin + np.array(k) * side for k in keys])
    new_vecs = np.array([vecs[groups[k]].mean(axis=0) for k in keys])
    return FieldSample(new_pts, new_vecs)


@dataclass(frozen=True)
class DowkerRelation:
    """Metric-ball relation between data points and landmarks: a landmark y is
    related to a data point x iff |y - x| < radius."""

    data: np.ndarray
    landmarks: np.ndarray
    radius: float

    def matrix(self) -> np.ndarray:
        Y = np.asarray(self.landmarks, dtype=float)
        X = np.asarray(self.data, dtype=float)
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        diff = Y[:, None, :] - X[None, :, :]
        return np.linalg.norm(diff, axis=2) < self.radius


_MAX_LANDMARKS_PER_POINT = 20


def dowker_complex_from_matrix(
    landmarks, relation: np.ndarray
) -> tuple[CellComplex, dict[int, tuple[int, ...]]]:
    """Dowker complex of an arbitrary boolean relation (rows: landmarks,
    columns: data points), plus the witness map.

    A landmark subset enters the complex iff some data point relates to all of
    it; the witnesses of a cell are exactly those data points.
    """
    Y = np.asarray(landmarks, dtype=float)
    rel = np.asarray(relation, dtype=bool)
    if rel.ndim != 2 or rel.shape[0] != len(Y):
        raise ValueError("relation must be a (landmarks x data points) boolean matrix")

    simplices: set[tuple[int, ...]] = set()
    for x in range(rel.shape[1]):
        related = tuple(np.nonzero(rel[:, x])[0].tolist())
        if len(related) > _MAX_LANDMARKS_PER_POINT:
            raise ValueError(
                f"data point {x} relates to {len(related)} landmarks; "
                "the subset blow-up would be unreasonable"
            )
        for k in range(1, len(related) + 1):
            simplices.update(itertools.combinations(related, k))

    complex = simplicial_complex(Y, sorted(simplices, key=lambda s: (len(s), s)))
    witness_map: dict[int, tuple[int, ...]] = {}
    for c in complex.cells:
        mask = rel[list(c.vertex_ids)].all(axis=0)
        witness_map[c.id] = tuple(np.nonzero(mask)[0].tolist())
    return complex, witness_map


def dowker_complex(rel: DowkerRelation) -> tuple[CellComplex, dict[int, tuple[int, ...]]]:
    return dowker_complex_from_matrix(rel.landmarks, rel.matrix())
