"""Matching cost model.

A pair (lower, upper) costs the cosine distance between the lower cell's
vector and the barycenter displacement of the pair, so a pair is cheap exactly
when the field at the lower cell points toward the upper cell. Staying
critical costs alpha. Pairs whose lower cell carries a zero vector cost the
cosine-distance maximum 2, which keeps them strictly worse than any critical
pair of cells as long as alpha < 1.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .complexes import AdmissiblePair, CellComplex, VectorAssignment
from .vectors import ZERO_TOL

__all__ = [
    "cosine_distance",
    "displacement",
    "CostModel",
    "build_cost_model",
    "critical_angle",
]


def cosine_distance(u, v) -> float:
    """1 - cos(angle between u and v), clamped into [0, 2]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine distance undefined for zero vectors")
    d = 1.0 - float(np.dot(u, v)) / (nu * nv)
    return min(2.0, max(0.0, d))


def displacement(complex: CellComplex, pair: AdmissiblePair | tuple[int, int]) -> np.ndarray:
    """Barycenter of the upper cell minus barycenter of the lower cell."""
    lo, up = pair.as_tuple() if isinstance(pair, AdmissiblePair) else pair
    return complex.barycenter(up) - complex.barycenter(lo)


@dataclass
class CostModel:
    alpha: float
    pair_costs: dict[tuple[int, int], float]
    n_cells: int

    @property
    def penalty(self) -> float:
        # Cost of a structurally forbidden pair in the full square formulation;
        # always exceeds two diagonals, so dropping such a pair pays.
        return max(2.0 * self.alpha + 1.0, 3.0)

    def pair_cost(self, lower: int, upper: int) -> float:
        return self.pair_costs[(lower, upper)]


def _pair_cost(complex, vectors, lo, up) -> float:
    v = vectors[lo]
    if float(np.linalg.norm(v)) < ZERO_TOL:
        return 2.0
    return cosine_distance(v, displacement(complex, (lo, up)))


def build_cost_model(
    complex: CellComplex, vectors: VectorAssignment, alpha: float, threads: int = 1
) -> CostModel:
    """Cost of every admissible pair, plus the shared diagonal cost alpha."""
    if not 0.0 <= alpha <= 2.0:
        raise ValueError(f"alpha must lie in [0, 2], got {alpha}")
    for c in complex.cells:
        if c.id not in vectors:
            raise ValueError(f"no vector for cell {c.id}")
    pairs = [p.as_tuple() for p in complex.admissible_pairs()]
    if threads > 1 and len(pairs) > 256:
        chunks = np.array_split(np.arange(len(pairs)), threads)
        costs = [0.0] * len(pairs)

        def work(ids):
            return [(int(i), _pair_cost(complex, vectors, *pairs[int(i)])) for i in ids]

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(work, chunks):
                for i, c in part:
                    costs[i] = c
        pair_costs = dict(zip(pairs, costs))
    else:
        pair_costs = {pq: _pair_cost(complex, vectors, *pq) for pq in pairs}
    return CostModel(alpha=float(alpha), pair_costs=pair_costs, n_cells=len(complex))


def critical_angle(alpha: float) -> float:
    """Angle in radians above which matching a pair is dearer than keeping
    both cells critical."""
    if not 0.0 <= alpha <= 2.0:
        raise ValueError(f"alpha must lie in [0, 2], got {alpha}")
    return math.acos(1.0 - alpha)
