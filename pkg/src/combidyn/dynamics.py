"""Flow induced by a matching and its recurrent structure.

Every cell gets a successor set: a critical cell maps to its whole closure,
a matched lower cell to its partner, and a matched upper cell to its other
proper faces. Recurrence is read off the strongly connected components of
that relation; critical cells are exactly the singletons with a self-loop.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import CellComplex
from .solver import Matching, verify_matching

__all__ = [
    "FlowGraph",
    "SccInfo",
    "CycleReport",
    "multiflow",
    "strongly_connected_components",
    "classify_recurrence",
]


@dataclass
class FlowGraph:
    succ: list[tuple[int, ...]]
    dims: tuple[int, ...]
    critical: frozenset[int]
    scc_id: list[int] | None = None

    def __len__(self) -> int:
        return len(self.succ)


def multiflow(complex: CellComplex, matching: Matching) -> FlowGraph:
    report = verify_matching(complex, matching)
    if not report.ok:
        first = report.violations[0]
        raise ValueError(f"matching is not valid: {first.kind}: {first.detail}")

    inverse = {up: lo for lo, up in matching.matched.items()}
    succ: list[tuple[int, ...]] = []
    for cell in complex.cells:
        c = cell.id
        if c in matching.critical:
            succ.append(tuple(sorted(complex.closure(c))))
        elif c in matching.matched:
            succ.append((matching.matched[c],))
        else:
            skip = inverse[c]
            succ.append(tuple(f for f in complex.codim1_faces(c) if f != skip))
    return FlowGraph(
        succ=succ,
        dims=tuple(cell.dim for cell in complex.cells),
        critical=matching.critical,
    )


@dataclass
class SccInfo:
    id: int
    cells: tuple[int, ...]
    size: int
    d: int | None  # alternation degree: cells live in dims d and d+1
    dims_present: tuple[int, ...]
    self_intersections: tuple[int, ...]  # cells with >1 successor inside the component
    is_critical_singleton: bool


@dataclass
class CycleReport:
    sccs: list[SccInfo]
    n_components: int
    critical_census: dict[int, int] | None = None

    def multi_cell(self) -> list[SccInfo]:
        return [s for s in self.sccs if s.size > 1]

    def critical_singletons(self) -> list[SccInfo]:
        return [s for s in self.sccs if s.is_critical_singleton]


def strongly_connected_components(flow: FlowGraph) -> CycleReport:
    """Tarjan over the flow, reported deterministically: components are
    numbered by their smallest cell id. Only recurrent components (more than
    one cell, or a critical self-loop) get an SccInfo entry; `scc_id` on the
    flow graph is filled for every cell."""
    n = len(flow.succ)
    comps = _tarjan(flow.succ)
    comps.sort(key=min)
    scc_id = [0] * n
    for cid, comp in enumerate(comps):
        for c in comp:
            scc_id[c] = cid
    flow.scc_id = scc_id

    infos: list[SccInfo] = []
    for cid, comp in enumerate(comps):
        members = set(comp)
        singleton_critical = len(comp) == 1 and comp[0] in flow.critical
        if len(comp) == 1 and not singleton_critical:
            continue
        inside_out = tuple(
            c for c in comp if sum(1 for s in flow.succ[c] if s in members) > 1
        )
        dims_present = tuple(sorted({flow.dims[c] for c in comp}))
        if len(dims_present) == 1:
            d = dims_present[0]
        elif len(dims_present) == 2 and dims_present[1] == dims_present[0] + 1:
            d = dims_present[0]
        else:
            d = None
        infos.append(
            SccInfo(
                id=cid,
                cells=comp,
                size=len(comp),
                d=d,
                dims_present=dims_present,
                self_intersections=inside_out,
                is_critical_singleton=singleton_critical,
            )
        )
    return CycleReport(sccs=infos, n_components=len(comps))


def classify_recurrence(flow: FlowGraph, matching: Matching) -> CycleReport:
    """SCC decomposition plus a per-dimension census of critical cells.

    Sanity-checks the structural facts the construction guarantees: critical
    cells are exactly the self-loop singletons, and no multi-cell component
    contains a critical cell.
    """
    if matching.critical != flow.critical:
        raise ValueError("flow graph and matching disagree on the critical set")
    report = strongly_connected_components(flow)
    for info in report.sccs:
        if info.size > 1 and any(c in flow.critical for c in info.cells):
            raise AssertionError(f"critical cell inside multi-cell component {info.id}")
    census: dict[int, int] = {}
    for c in sorted(flow.critical):
        census[flow.dims[c]] = census.get(flow.dims[c], 0) + 1
    report.critical_census = census
    return report


def _tarjan(succ: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Iterative Tarjan on an indexed adjacency list; components come out as
    sorted tuples."""
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[tuple[int, ...]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work: list[tuple[int, int]] = [(root, 0)]
        while work:
            node, ei = work.pop()
            if ei == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            edges = succ[node]
            advanced = False
            while ei < len(edges):
                w = edges[ei]
                ei += 1
                if index[w] == -1:
                    work.append((node, ei))
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    if index[w] < low[node]:
                        low[node] = index[w]
            if advanced:
                continue
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == node:
                        break
                out.append(tuple(sorted(comp)))
            if work:
                parent = work[-1][0]
                if low[node] < low[parent]:
                    low[parent] = low[node]
        # fallthrough: all nodes reachable from root are classified
    return out
