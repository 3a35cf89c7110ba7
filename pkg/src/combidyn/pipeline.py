"""End-to-end driver: field CSV in, solved and analyzed flow out.

Holds the config dataclass, the CSV readers, the pipeline itself, and the
exporters. Everything here is deterministic given identical input bytes and
config; floats are serialized at 9 significant digits with fixed key order so
repeated runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .builders import (
    DowkerRelation,
    cubical_grid,
    delaunay_2d,
    dowker_complex_from_matrix,
    snap_to_lattice,
)
from .complexes import CellComplex, VectorAssignment, barycentric_subdivision
from .costs import CostModel, build_cost_model
from .datagen import FieldSample
from .dynamics import CycleReport, FlowGraph, classify_recurrence, multiflow
from .gradient import CycleConstraint, alpha_sweep, is_gradient, solve_gradient_constrained
from .solver import (
    Matching,
    MatchingProblem,
    build_problem,
    evaluate_matching,
    objective_decomposition,
    solve_exact,
    verify_matching,
)
from .vectors import assign_dowker_average, assign_vertex_average

__all__ = [
    "PipelineConfig",
    "Analysis",
    "ParseError",
    "read_field_csv",
    "read_landmarks_csv",
    "read_relation_csv",
    "run_pipeline",
    "build_report_document",
    "export_report",
    "export_dot",
    "export_arrows",
    "verify_report",
]

COMPLEX_KINDS = ("delaunay2d", "cubical", "dowker")
GRADIENT_MODES = ("off", "sweep", "constraints")


class ParseError(ValueError):
    """Input file problem, annotated with path and line number."""

    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


@dataclass
class PipelineConfig:
    complex_kind: str = "delaunay2d"
    alpha: float = 0.5
    subdivide: int = 0
    gradient_mode: str = "off"
    side: float | None = None  # cubical lattice pitch
    radius: float | None = None  # dowker ball radius
    landmarks: str | None = None  # dowker landmark CSV
    relation: str | None = None  # dowker explicit 0/1 relation CSV (overrides radius)
    snap: bool = False  # round scattered samples onto the cubical lattice
    threads: int = 1

    def validate(self, point_dim: int) -> None:
        if self.complex_kind not in COMPLEX_KINDS:
            raise ValueError(f"unknown complex kind {self.complex_kind!r}")
        if self.gradient_mode not in GRADIENT_MODES:
            raise ValueError(f"unknown gradient mode {self.gradient_mode!r}")
        if not 0.0 <= self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in [0, 2], got {self.alpha}")
        if self.subdivide < 0:
            raise ValueError("subdivide must be a non-negative integer")
        if self.complex_kind == "delaunay2d" and point_dim != 2:
            raise ValueError(f"delaunay2d needs 2-dimensional points, got d={point_dim}")
        if self.complex_kind == "cubical":
            if point_dim not in (2, 3):
                raise ValueError(f"cubical needs d in {{2, 3}}, got d={point_dim}")
            if self.side is None or self.side <= 0:
                raise ValueError("cubical complex needs --side > 0")
            if self.subdivide > 0:
                raise ValueError("barycentric subdivision applies to simplicial complexes only")
        if self.complex_kind == "dowker":
            if self.landmarks is None:
                raise ValueError("dowker complex needs --landmarks")
            if self.relation is None and (self.radius is None or self.radius <= 0):
                raise ValueError("dowker complex needs --radius > 0 or an explicit --relation")
        if self.snap and self.complex_kind != "cubical":
            raise ValueError("--snap only applies to cubical complexes")

    def echo(self) -> dict:
        return {
            "complex": self.complex_kind,
            "alpha": _sig9(self.alpha),
            "subdivide": self.subdivide,
            "gradient": self.gradient_mode,
            "side": None if self.side is None else _sig9(self.side),
            "radius": None if self.radius is None else _sig9(self.radius),
            "landmarks": self.landmarks,
            "relation": self.relation,
            "snap": self.snap,
        }

    @classmethod
    def from_echo(cls, echo: dict) -> "PipelineConfig":
        return cls(
            complex_kind=echo["complex"],
            alpha=float(echo["alpha"]),
            subdivide=int(echo["subdivide"]),
            gradient_mode=echo["gradient"],
            side=None if echo["side"] is None else float(echo["side"]),
            radius=None if echo["radius"] is None else float(echo["radius"]),
            landmarks=echo["landmarks"],
            relation=echo["relation"],
            snap=bool(echo["snap"]),
        )


def _sig9(x: float) -> float:
    return float(format(float(x), ".9g"))


def _fmt9(x: float) -> str:
    return format(float(x), ".9g")


def read_field_csv(path) -> FieldSample:
    """Read `x1..xd,v1..vd` rows. d is inferred from the header."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(path, 1, "empty input file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or len(header) % 2 != 0:
        raise ParseError(path, 1, f"expected an even number of columns x1..xd,v1..vd, got {header}")
    d = len(header) // 2
    expected = [f"x{i}" for i in range(1, d + 1)] + [f"v{i}" for i in range(1, d + 1)]
    if header != expected:
        raise ParseError(path, 1, f"expected header {','.join(expected)}, got {','.join(header)}")
    points, vectors = [], []
    for ln, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2 * d:
            raise ParseError(path, ln, f"expected {2 * d} values, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise ParseError(path, ln, str(exc)) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError(path, ln, "non-finite value")
        points.append(vals[:d])
        vectors.append(vals[d:])
    if not points:
        raise ParseError(path, 2, "no data rows")
    return FieldSample(np.asarray(points, dtype=float), np.asarray(vectors, dtype=float))


def read_landmarks_csv(path) -> np.ndarray:
    """Read `y1..yd` landmark rows."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(path, 1, "empty landmark file")
    header = [h.strip() for h in rows[0]]
    d = len(header)
    expected = [f"y{i}" for i in range(1, d + 1)]
    if d < 1 or header != expected:
        raise ParseError(path, 1, f"expected header y1..yd, got {','.join(header)}")
    out = []
    for ln, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != d:
            raise ParseError(path, ln, f"expected {d} values, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise ParseError(path, ln, str(exc)) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError(path, ln, "non-finite value")
        out.append(vals)
    if not out:
        raise ParseError(path, 2, "no landmark rows")
    return np.asarray(out, dtype=float)


def read_relation_csv(path) -> np.ndarray:
    """Read a headerless 0/1 matrix: one row per data point, one column per
    landmark."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    out = []
    width = None
    for ln, row in enumerate(rows, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            vals = [int(c) for c in row]
        except ValueError as exc:
            raise ParseError(path, ln, str(exc)) from None
        if any(v not in (0, 1) for v in vals):
            raise ParseError(path, ln, "relation entries must be 0 or 1")
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise ParseError(path, ln, f"expected {width} columns, got {len(vals)}")
        out.append(vals)
    if not out:
        raise ParseError(path, 1, "empty relation file")
    return np.asarray(out, dtype=bool)


@dataclass
class Analysis:
    config: PipelineConfig
    sample: FieldSample
    complex: CellComplex
    vectors: VectorAssignment
    cost_model: CostModel
    problem: MatchingProblem
    matching: Matching
    flow: FlowGraph
    recurrence: CycleReport
    alpha_effective: float
    constraints: tuple[CycleConstraint, ...] = ()
    document: dict = field(default_factory=dict)


def _build_complex(config: PipelineConfig, sample: FieldSample):
    if config.complex_kind == "delaunay2d":
        complex = delaunay_2d(sample.points)
        vectors = assign_vertex_average(complex, sample.vectors)
    elif config.complex_kind == "cubical":
        source = snap_to_lattice(sample, config.side) if config.snap else sample
        complex = cubical_grid(source.points, config.side)
        vectors = assign_vertex_average(complex, source.vectors)
    else:
        landmarks = read_landmarks_csv(config.landmarks)
        if config.relation is not None:
            # CSV rows follow the field file's convention (one per data point);
            # the builder wants landmarks as rows
            rows = read_relation_csv(config.relation)
            if rows.shape != (len(sample.points), len(landmarks)):
                raise ValueError(
                    f"relation shape {rows.shape} does not match "
                    f"{len(sample.points)} points x {len(landmarks)} landmarks"
                )
            rel = rows.T
        else:
            rel = DowkerRelation(sample.points, landmarks, config.radius).matrix()
        complex, witness = dowker_complex_from_matrix(landmarks, rel)
        vectors = assign_dowker_average(complex, witness, sample.vectors)

    for _ in range(config.subdivide):
        complex, vectors = barycentric_subdivision(complex, vectors)
    return complex, vectors


def run_pipeline(config: PipelineConfig, input_path) -> Analysis:
    sample = read_field_csv(input_path)
    config.validate(sample.dim)
    complex, vectors = _build_complex(config, sample)

    constraints: tuple[CycleConstraint, ...] = ()
    if config.gradient_mode == "sweep":
        alpha_eff, matching = alpha_sweep(complex, vectors)
        cost_model = build_cost_model(complex, vectors, alpha_eff, threads=config.threads)
        problem = build_problem(cost_model, complex)
    else:
        alpha_eff = config.alpha
        cost_model = build_cost_model(complex, vectors, alpha_eff, threads=config.threads)
        problem = build_problem(cost_model, complex)
        if config.gradient_mode == "constraints":
            matching, constraints = solve_gradient_constrained(problem, complex)
        else:
            matching = solve_exact(problem)

    report = verify_matching(complex, matching)
    if not report.ok:
        first = report.violations[0]
        raise RuntimeError(f"solver output failed verification: {first.kind}: {first.detail}")

    flow = multiflow(complex, matching)
    recurrence = classify_recurrence(flow, matching)
    analysis = Analysis(
        config=config,
        sample=sample,
        complex=complex,
        vectors=vectors,
        cost_model=cost_model,
        problem=problem,
        matching=matching,
        flow=flow,
        recurrence=recurrence,
        alpha_effective=alpha_eff,
        constraints=constraints,
    )
    analysis.document = build_report_document(analysis)
    return analysis


def build_report_document(analysis: Analysis) -> dict:
    complex = analysis.complex
    matching = analysis.matching
    n_matched, cosine_sum, n_critical = objective_decomposition(matching, analysis.cost_model)

    doc: dict = {
        "config_echo": analysis.config.echo(),
        "complex": {
            "counts": {str(d): n for d, n in sorted(complex.counts_by_dim().items())}
        },
        "problem": {"N": analysis.problem.n_cells, "m": analysis.problem.m},
        "objective": {
            "total": _sig9(matching.objective),
            "matched": n_matched,
            "cosine_sum": _sig9(cosine_sum),
            "critical": n_critical,
            "alpha": _sig9(analysis.alpha_effective),
        },
        "matching": [{"lower": lo, "upper": up} for lo, up in matching.pairs()],
        "critical": [_cell_entry(complex, c) for c in sorted(matching.critical)],
        "scc": _scc_entries(analysis.recurrence),
    }
    if analysis.config.gradient_mode != "off":
        ok, _ = is_gradient(complex, matching)
        doc["gradient"] = {
            "mode": analysis.config.gradient_mode,
            "is_gradient": ok,
            "constraint_rounds": len(analysis.constraints),
        }
    return doc


def _cell_entry(complex: CellComplex, cell_id: int) -> dict:
    cell = complex.cell(cell_id)
    return {
        "id": cell.id,
        "dim": cell.dim,
        "vertices": list(cell.vertex_ids),
        "barycenter": [_sig9(x) for x in complex.barycenter(cell.id)],
    }


def _scc_entries(recurrence: CycleReport) -> list[dict]:
    return [
        {
            "id": info.id,
            "size": info.size,
            "d": info.d,
            "self_intersections": len(info.self_intersections),
            "cells": list(info.cells),
        }
        for info in recurrence.sccs
    ]


def export_report(analysis: Analysis, path) -> None:
    doc = analysis.document or build_report_document(analysis)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def export_dot(analysis: Analysis, path) -> None:
    """Flow graph in DOT form: one node per cell, one edge per flow arrow.
    Critical cells are drawn doubled."""
    lines = ["digraph flow {"]
    for cell in analysis.complex.cells:
        shape = "doublecircle" if cell.id in analysis.flow.critical else "circle"
        lines.append(f'  {cell.id} [label="{cell.id}:d{cell.dim}" shape={shape}];')
    for c, targets in enumerate(analysis.flow.succ):
        for t in targets:
            lines.append(f"  {c} -> {t};")
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n")


def export_arrows(analysis: Analysis, path) -> None:
    """Matched arrows as segments between barycenters, one CSV row per pair.
    Critical cells are not arrows; they live in the report's critical list."""
    d = analysis.complex.point_dim
    header = (
        ["lower", "upper"]
        + [f"from_x{i}" for i in range(1, d + 1)]
        + [f"to_x{i}" for i in range(1, d + 1)]
    )
    lines = [",".join(header)]
    for lo, up in analysis.matching.pairs():
        a = analysis.complex.barycenter(lo)
        b = analysis.complex.barycenter(up)
        row = [str(lo), str(up)] + [_fmt9(x) for x in a] + [_fmt9(x) for x in b]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def verify_report(report_path, input_path) -> tuple[bool, list[str]]:
    """Re-derive everything checkable from a serialized report: rebuild the
    complex from the echoed config, re-verify the matching axioms, recompute
    the objective at the reported alpha, and re-run the flow analysis to
    confirm the critical and SCC sections round-trip."""
    doc = json.loads(Path(report_path).read_text())
    sample = read_field_csv(input_path)
    config = PipelineConfig.from_echo(doc["config_echo"])
    config.validate(sample.dim)
    complex, vectors = _build_complex(config, sample)

    lines: list[str] = []
    ok = True

    counts = {str(d): n for d, n in sorted(complex.counts_by_dim().items())}
    good = counts == doc["complex"]["counts"]
    ok &= good
    lines.append(f"complex rebuild ({sum(counts.values())} cells): {'PASS' if good else 'FAIL'}")

    matching = Matching(
        matched={e["lower"]: e["upper"] for e in doc["matching"]},
        critical=frozenset(e["id"] for e in doc["critical"]),
        objective=float(doc["objective"]["total"]),
    )
    rep = verify_matching(complex, matching)
    ok &= rep.ok
    lines.append(
        f"matching axioms ({len(matching.matched)} pairs, {len(matching.critical)} critical): "
        f"{'PASS' if rep.ok else 'FAIL (' + ', '.join(sorted(rep.kinds())) + ')'}"
    )
    if not rep.ok:
        return False, lines

    model = build_cost_model(complex, vectors, float(doc["objective"]["alpha"]))
    recomputed = evaluate_matching(model, matching)
    good = abs(recomputed - float(doc["objective"]["total"])) <= 1e-6
    ok &= good
    lines.append(
        f"objective recomputation ({_fmt9(recomputed)} vs {_fmt9(doc['objective']['total'])}): "
        f"{'PASS' if good else 'FAIL'}"
    )

    flow = multiflow(complex, matching)
    recurrence = classify_recurrence(flow, matching)
    good = _scc_entries(recurrence) == doc["scc"]
    ok &= good
    lines.append(f"recurrence round-trip ({len(recurrence.sccs)} components): {'PASS' if good else 'FAIL'}")

    redone = [_cell_entry(complex, c) for c in sorted(matching.critical)]
    good = redone == doc["critical"]
    ok &= good
    lines.append(f"critical census round-trip: {'PASS' if good else 'FAIL'}")

    return bool(ok), lines
