"""Cell complexes with an explicit face lattice.

A complex stores its cells in one dense array sorted by (dim, vertex_ids), with
codimension-1 face links; every other incidence is derived from those links.
Simplicial and cubical cells share the same container and differ only in how
their codim-1 faces are enumerated, so the matching and flow machinery never
has to care which kind it is working on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "Cell",
    "CellComplex",
    "AdmissiblePair",
    "VectorAssignment",
    "simplicial_complex",
    "barycentric_subdivision",
]


@dataclass(frozen=True)
class Cell:
    id: int
    dim: int
    vertex_ids: tuple[int, ...]
    kind: str  # "simplex" or "cube"


@dataclass(frozen=True)
class AdmissiblePair:
    """A cell and one of its codimension-1 cofaces, by id."""

    lower: int
    upper: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.lower, self.upper)


class VectorAssignment:
    """One vector per cell, all of the same dimension."""

    def __init__(self, vectors: Mapping[int, np.ndarray]):
        self.vectors = {cid: np.asarray(v, dtype=float) for cid, v in vectors.items()}
        dims = {v.shape for v in self.vectors.values()}
        if len(dims) > 1:
            raise ValueError(f"inconsistent vector dimensions: {sorted(dims)}")

    def __getitem__(self, cell_id: int) -> np.ndarray:
        return self.vectors[cell_id]

    def __contains__(self, cell_id: int) -> bool:
        return cell_id in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)


def _cube_dim(n_corners: int) -> int:
    d = n_corners.bit_length() - 1
    if 1 << d != n_corners:
        raise ValueError(f"cube must have a power-of-two corner count, got {n_corners}")
    return d


def _simplex_codim1_faces(vids: tuple[int, ...]) -> list[tuple[int, ...]]:
    return [vids[:i] + vids[i + 1 :] for i in range(len(vids))]


def _cube_codim1_faces(vids: tuple[int, ...], coords: np.ndarray) -> list[tuple[int, ...]]:
    # Faces of an axis-aligned cube: split the corner set by min/max on each
    # spanned axis. Corner coordinates come from one shared vertex table, so
    # exact float comparison is safe here.
    pts = coords[list(vids)]
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    spanned = [a for a in range(pts.shape[1]) if lo[a] != hi[a]]
    if len(spanned) != _cube_dim(len(vids)):
        raise ValueError(f"corners {vids} do not span an axis-aligned cube")
    faces = []
    for a in spanned:
        for side in (lo[a], hi[a]):
            sub = tuple(v for v, p in zip(vids, pts) if p[a] == side)
            faces.append(sub)
    return faces


class CellComplex:
    """Finite cell complex, closed under faces, with dense integer cell ids.

    Cells are sorted by (dim, vertex_ids) and ids assigned in that order, so
    every id order is also a dimension order. Construction validates face
    closure: each codim-1 face of each cell must itself be a cell.
    """

    def __init__(self, vertices: np.ndarray, cell_specs: Iterable[tuple[str, tuple[int, ...]]]):
        self.vertices = np.asarray(vertices, dtype=float)
        if self.vertices.ndim != 2:
            raise ValueError("vertices must be an (n, d) array")

        seen: dict[tuple[int, ...], str] = {}
        for kind, vids in cell_specs:
            vids = tuple(sorted(set(vids)))
            if not vids:
                raise ValueError("empty cell")
            if max(vids) >= len(self.vertices) or min(vids) < 0:
                raise ValueError(f"cell {vids} references unknown vertex")
            prev = seen.setdefault(vids, kind)
            if prev != kind:
                raise ValueError(f"cell {vids} declared with two kinds")

        def dim_of(vids: tuple[int, ...], kind: str) -> int:
            return len(vids) - 1 if kind == "simplex" else _cube_dim(len(vids))

        ordered = sorted(seen.items(), key=lambda kv: (dim_of(kv[0], kv[1]), kv[0]))
        self.cells: list[Cell] = [
            Cell(i, dim_of(vids, kind), vids, kind) for i, (vids, kind) in enumerate(ordered)
        ]
        self._id_of: dict[tuple[int, ...], int] = {c.vertex_ids: c.id for c in self.cells}

        self._face_ids: list[tuple[int, ...]] = []
        for c in self.cells:
            if c.dim == 0:
                self._face_ids.append(())
                continue
            if c.kind == "simplex":
                raw = _simplex_codim1_faces(c.vertex_ids)
            else:
                raw = _cube_codim1_faces(c.vertex_ids, self.vertices)
            ids = []
            for fv in raw:
                fid = self._id_of.get(fv)
                if fid is None:
                    raise ValueError(f"complex not closed under faces: {fv} of {c.vertex_ids} missing")
                if self.cells[fid].dim != c.dim - 1:
                    raise ValueError(f"face {fv} of {c.vertex_ids} has wrong dimension")
                ids.append(fid)
            self._face_ids.append(tuple(sorted(ids)))

        cof: list[list[int]] = [[] for _ in self.cells]
        for c in self.cells:
            for fid in self._face_ids[c.id]:
                cof[fid].append(c.id)
        self._coface_ids: list[tuple[int, ...]] = [tuple(sorted(x)) for x in cof]

        self._barycenters: np.ndarray | None = None
        self._faces_cache: dict[int, frozenset[int]] = {}
        self._cofaces_cache: dict[int, frozenset[int]] = {}

    # -- basic accessors ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def point_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.cells), default=-1)

    def cell(self, cell_id: int) -> Cell:
        try:
            return self.cells[cell_id]
        except IndexError:
            raise KeyError(f"no cell with id {cell_id}") from None

    def cell_by_vertices(self, vids: Iterable[int]) -> Cell:
        key = tuple(sorted(vids))
        if key not in self._id_of:
            raise KeyError(f"no cell with vertices {key}")
        return self.cells[self._id_of[key]]

    def counts_by_dim(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.cells:
            out[c.dim] = out.get(c.dim, 0) + 1
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in self.counts_by_dim().items())

    # -- incidence ----------------------------------------------------------

    def codim1_faces(self, cell_id: int) -> tuple[int, ...]:
        return self._face_ids[self.cell(cell_id).id]

    def codim1_cofaces(self, cell_id: int) -> tuple[int, ...]:
        return self._coface_ids[self.cell(cell_id).id]

    def faces(self, cell_id: int) -> frozenset[int]:
        """All proper faces, every codimension."""
        cached = self._faces_cache.get(cell_id)
        if cached is None:
            self.cell(cell_id)
            acc: set[int] = set()
            stack = list(self._face_ids[cell_id])
            while stack:
                f = stack.pop()
                if f not in acc:
                    acc.add(f)
                    stack.extend(self._face_ids[f])
            cached = frozenset(acc)
            self._faces_cache[cell_id] = cached
        return cached

    def cofaces(self, cell_id: int) -> frozenset[int]:
        """All proper cofaces, every codimension."""
        cached = self._cofaces_cache.get(cell_id)
        if cached is None:
            self.cell(cell_id)
            acc: set[int] = set()
            stack = list(self._coface_ids[cell_id])
            while stack:
                f = stack.pop()
                if f not in acc:
                    acc.add(f)
                    stack.extend(self._coface_ids[f])
            cached = frozenset(acc)
            self._cofaces_cache[cell_id] = cached
        return cached

    def closure(self, cell_id: int) -> frozenset[int]:
        return self.faces(cell_id) | {self.cell(cell_id).id}

    def boundary(self, cell_id: int) -> frozenset[int]:
        return self.faces(cell_id)

    def admissible_pairs(self) -> list[AdmissiblePair]:
        """All (face, coface) pairs one dimension apart, sorted by (lower, upper)."""
        pairs = [
            AdmissiblePair(fid, c.id)
            for c in self.cells
            if c.dim >= 1
            for fid in self._face_ids[c.id]
        ]
        pairs.sort(key=lambda p: (p.lower, p.upper))
        return pairs

    # -- geometry -----------------------------------------------------------

    def barycenter(self, cell_id: int) -> np.ndarray:
        if self._barycenters is None:
            self._barycenters = np.stack(
                [self.vertices[list(c.vertex_ids)].mean(axis=0) for c in self.cells]
            )
        return self._barycenters[self.cell(cell_id).id]


def simplicial_complex(vertices: np.ndarray, simplices: Iterable[Iterable[int]]) -> CellComplex:
    """Build a simplicial complex from any generating set, closing under subsets."""
    closed: set[tuple[int, ...]] = set()
    stack = [tuple(sorted(set(s))) for s in simplices]
    while stack:
        s = stack.pop()
        if not s or s in closed:
            continue
        closed.add(s)
        if len(s) > 1:
            stack.extend(s[:i] + s[i + 1 :] for i in range(len(s)))
    return CellComplex(vertices, [("simplex", s) for s in sorted(closed, key=lambda s: (len(s), s))])


def barycentric_subdivision(
    complex: CellComplex, vectors: VectorAssignment
) -> tuple[CellComplex, VectorAssignment]:
    """Subdivide a simplicial complex; each cell's vector passes to the cells
    carved out of its interior.

    The subdivision is the order complex of the face poset: one vertex per
    original cell, placed at its barycenter, and one simplex per chain of
    proper faces. A chain's carrier is the largest cell in it, which is the
    unique original cell whose interior contains the new simplex, so the new
    vector of a chain is the old vector of its carrier.
    """
    if any(c.kind != "simplex" for c in complex.cells):
        raise ValueError("barycentric subdivision supports simplicial complexes only")
    for c in complex.cells:
        if c.id not in vectors:
            raise ValueError(f"no vector for cell {c.id}")

    new_vertices = np.stack([complex.barycenter(c.id) for c in complex.cells])

    # chains_at[c] = all chains of proper faces ending at c, as tuples of cell
    # ids; ids ascend with dimension, so each chain is already sorted and its
    # last entry is the carrier.
    chains_at: list[list[tuple[int, ...]]] = [[] for _ in complex.cells]
    for c in complex.cells:  # id order is dimension order
        own: list[tuple[int, ...]] = [(c.id,)]
        for fid in complex.faces(c.id):
            own.extend(ch + (c.id,) for ch in chains_at[fid])
        chains_at[c.id] = own

    all_chains = [ch for per_cell in chains_at for ch in per_cell]
    subdivided = simplicial_complex(new_vertices, all_chains)

    inherited = VectorAssignment(
        {c.id: vectors[max(c.vertex_ids)] for c in subdivided.cells}
    )
    return subdivided, inherited
