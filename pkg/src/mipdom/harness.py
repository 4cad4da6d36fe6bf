"""Ranked indicator reports, indicator correlations and running-DoM matrices.

These are the pieces behind the ``report``, ``correlate`` and ``running``
commands. They work on in-memory point sets; the file helpers at the
bottom turn directories of CSV files into those inputs.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import PointSet, minmax_normalize, nondominated_filter, read_csv
from .errors import InvalidInputError
from .indicators import (
    CorrelationResult,
    IndicatorRow,
    additive_epsilon,
    hypervolume,
    igd_plus,
    pearson,
)
from .solver import SolveOptions, dom

__all__ = [
    "ReportDocument",
    "RunSeries",
    "RunningCell",
    "CorrelationReport",
    "joint_reference",
    "build_report",
    "correlate",
    "running_matrix",
    "running_csv",
    "load_algorithms",
    "load_run_series",
    "COMPARED",
    "dump_json",
]

# indicator columns correlated against DoM, in report order
COMPARED = ("neg_hv", "igd_plus", "eps_additive")
TERMINAL = "terminal"


@dataclass(frozen=True)
class ReportDocument:
    """Per-problem indicator table, rows ascending in DoM (ties by label)."""

    problem: str
    rows: tuple[IndicatorRow, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        keys = [(r.dom_value, r.algorithm) for r in self.rows]
        if keys != sorted(keys):
            raise InvalidInputError("report rows must be sorted by DoM, then label")

    def to_dict(self, *, deterministic: bool = False) -> dict:
        meta = dict(self.metadata)
        if deterministic:
            meta.pop("timings", None)
        return {
            "problem": self.problem,
            "rows": [r.to_dict() for r in self.rows],
            "metadata": meta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReportDocument":
        try:
            rows = [IndicatorRow(**r) for r in d["rows"]]
            return cls(problem=str(d["problem"]), rows=tuple(rows),
                       metadata=dict(d.get("metadata", {})))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"malformed report document: {exc}") from exc

    def to_text(self) -> str:
        head = ("algorithm", "DoM", "HV", "IGD+", "eps+")
        body = [
            (r.algorithm, f"{r.dom_value:.6g}", f"{r.hv_value:.6g}",
             f"{r.igd_plus_value:.6g}", f"{r.eps_additive_value:.6g}")
            for r in self.rows
        ]
        widths = [max(len(x[k]) for x in [head, *body]) for k in range(len(head))]

        def line(cells):
            first = cells[0].ljust(widths[0])
            return "  ".join([first] + [c.rjust(w) for c, w in zip(cells[1:], widths[1:])])

        out = [f"problem: {self.problem}", line(head), "  ".join("-" * w for w in widths)]
        out += [line(b) for b in body]
        return "\n".join(out) + "\n"


def joint_reference(sets) -> PointSet:
    """Non-dominated filter of the union of ``sets``."""
    sets = list(sets)
    if not sets:
        raise InvalidInputError("joint reference of no sets")
    union = sets[0]
    for s in sets[1:]:
        union = union.union(s)
    return nondominated_filter(union)


def build_report(algorithms: dict[str, PointSet], *, problem: str = "",
                 opts: SolveOptions | None = None, hv_ref=None) -> ReportDocument:
    """Score every algorithm against the joint reference of all of them.

    The HV reference point defaults to the componentwise maximum over the
    union of all sets.
    """
    if len(algorithms) < 2:
        raise InvalidInputError(f"a report needs at least 2 algorithms, got {len(algorithms)}")
    dims = {s.m_dim for s in algorithms.values()}
    if len(dims) != 1:
        raise InvalidInputError(f"inconsistent dimensions across algorithms: {sorted(dims)}")
    opts = opts or SolveOptions()
    ref = joint_reference(algorithms.values())
    if hv_ref is None:
        hv_ref = np.max([s.points.max(axis=0) for s in algorithms.values()], axis=0)
    hv_ref = np.asarray(hv_ref, dtype=float)

    rows, timings, backends, gaps = [], {}, {}, {}
    for label in sorted(algorithms):
        s = algorithms[label]
        t0 = time.perf_counter()
        sol = dom(s, ref, opts)
        timings[label] = time.perf_counter() - t0
        backends[label] = sol.backend
        gaps[label] = sol.gap
        rows.append(IndicatorRow(
            algorithm=label,
            dom_value=sol.value,
            hv_value=hypervolume(s, hv_ref),
            igd_plus_value=igd_plus(s, ref),
            eps_additive_value=additive_epsilon(s, ref),
        ))
    rows.sort(key=lambda r: (r.dom_value, r.algorithm))
    meta = {
        "gap_target": opts.relative_gap_target,
        "backend": backends,
        "gap": gaps,
        "hv_reference": hv_ref.tolist(),
        "reference_size": len(ref),
        "timings": timings,
    }
    return ReportDocument(problem=problem, rows=tuple(rows), metadata=meta)


@dataclass(frozen=True)
class CorrelationReport:
    """DoM-versus-indicator correlations per problem plus the pooled set.

    ``cells[group][column]`` is a :class:`CorrelationResult`, or the error
    message when the correlation is undefined for that cell.
    """

    cells: dict[str, dict[str, CorrelationResult | str]]

    def to_dict(self) -> dict:
        return {
            g: {c: (v.to_dict() if isinstance(v, CorrelationResult) else {"error": v})
                for c, v in cols.items()}
            for g, cols in self.cells.items()
        }

    def to_text(self) -> str:
        names = list(self.cells)
        w = max(len("group"), *(len(n) for n in names))
        out = ["group".ljust(w) + "".join(f"  {c:>22}" for c in COMPARED)]
        for g in names:
            parts = []
            for c in COMPARED:
                v = self.cells[g][c]
                if isinstance(v, CorrelationResult):
                    flag = "" if v.significant else " (ns)"
                    parts.append(f"{v.r:+.4f} p={v.p_value:.3g}{flag}")
                else:
                    parts.append("undefined")
            out.append(g.ljust(w) + "".join(f"  {p:>22}" for p in parts))
        return "\n".join(out) + "\n"


def _normalized_columns(doc: ReportDocument) -> dict[str, np.ndarray]:
    rows = doc.rows
    col = lambda attr: np.array([getattr(r, attr) for r in rows], dtype=float)
    return {
        "dom": minmax_normalize(col("dom_value")),
        # normalize first, then flip the sign so that smaller is better
        "neg_hv": -minmax_normalize(col("hv_value")),
        "igd_plus": minmax_normalize(col("igd_plus_value")),
        "eps_additive": minmax_normalize(col("eps_additive_value")),
    }


def _cell(x, y) -> CorrelationResult | str:
    try:
        return pearson(x, y)
    except InvalidInputError as exc:
        return str(exc)


def correlate(reports) -> CorrelationReport:
    """Pearson correlation of DoM against -HV, IGD+ and additive epsilon.

    Columns are min-max normalized within each problem before pooling.
    """
    reports = list(reports)
    total = sum(len(r.rows) for r in reports)
    if total < 3:
        raise InvalidInputError(f"correlation needs at least 3 rows, got {total}")
    cells: dict[str, dict] = {}
    pooled: dict[str, list] = {k: [] for k in ("dom", *COMPARED)}
    for k, doc in enumerate(reports):
        name = doc.problem or f"problem_{k + 1}"
        if name in cells:
            name = f"{name}#{k + 1}"
        if len(doc.rows) < 2:
            cells[name] = {c: "normalization needs at least two values" for c in COMPARED}
            continue
        cols = _normalized_columns(doc)
        cells[name] = {c: _cell(cols["dom"], cols[c]) for c in COMPARED}
        for key, v in cols.items():
            pooled[key].append(v)
    if pooled["dom"]:
        joined = {key: np.concatenate(v) for key, v in pooled.items()}
        cells["combined"] = {c: _cell(joined["dom"], joined[c]) for c in COMPARED}
    return CorrelationReport(cells)


@dataclass(frozen=True)
class RunSeries:
    """Point sets of one run, by generation, and the pivots to compare against.

    A pivot is either a generation number or ``"terminal"`` for the
    optional terminal reference set.
    """

    generations: tuple[tuple[int, PointSet], ...]
    pivots: tuple
    terminal: PointSet | None = None

    def __post_init__(self):
        gens = [g for g, _ in self.generations]
        if not gens:
            raise InvalidInputError("a run series needs at least one generation")
        if any(b <= a for a, b in zip(gens, gens[1:])):
            raise InvalidInputError("generation numbers must be strictly increasing")
        for pv in self.pivots:
            if pv == TERMINAL:
                if self.terminal is None:
                    raise InvalidInputError("terminal pivot requested without a terminal set")
            elif pv not in gens:
                raise InvalidInputError(f"pivot generation {pv} is not in the series")

    def pivot_set(self, pv) -> PointSet:
        if pv == TERMINAL:
            return self.terminal
        return dict(self.generations)[pv]


@dataclass(frozen=True)
class RunningCell:
    generation: int
    pivot: int | str
    dom: float


def running_matrix(series: RunSeries, opts: SolveOptions | None = None) -> list[RunningCell]:
    """DoM of every generation onto every (ND-filtered) pivot, generation-major."""
    opts = opts or SolveOptions()
    refs = {pv: nondominated_filter(series.pivot_set(pv)) for pv in series.pivots}
    cells = []
    for g, s in series.generations:
        for pv in series.pivots:
            cells.append(RunningCell(g, pv, dom(s, refs[pv], opts).value))
    return cells


def running_csv(cells: list[RunningCell]) -> str:
    lines = ["generation,pivot,dom"]
    lines += [f"{c.generation},{c.pivot},{c.dom!r}" for c in cells]
    return "\n".join(lines) + "\n"


def load_algorithms(directory) -> dict[str, PointSet]:
    """One point set per ``*.csv`` file, labelled by file stem."""
    d = Path(directory)
    if not d.is_dir():
        raise InvalidInputError(f"{d}: not a directory")
    return {f.stem: read_csv(f) for f in sorted(d.glob("*.csv"))}


_GEN = re.compile(r"(\d+)$")


def load_run_series(directory, pivots, *, terminal=None) -> RunSeries:
    """Read ``<prefix><generation>.csv`` files (e.g. ``gen_10.csv``).

    ``pivots`` lists generation numbers and/or ``"terminal"``; ``terminal``
    is a path to the terminal reference set.
    """
    d = Path(directory)
    if not d.is_dir():
        raise InvalidInputError(f"{d}: not a directory")
    found = []
    for f in d.glob("*.csv"):
        m = _GEN.search(f.stem)
        if m:
            found.append((int(m.group(1)), f))
    found.sort()
    gens = [g for g, _ in found]
    if len(set(gens)) != len(gens):
        raise InvalidInputError(f"{d}: duplicate generation numbers")
    for pv in pivots:
        if pv != TERMINAL and pv not in gens:
            raise InvalidInputError(f"{d}: missing generation file for pivot {pv}")
    term = read_csv(terminal) if terminal is not None else None
    return RunSeries(
        generations=tuple((g, read_csv(f)) for g, f in found),
        pivots=tuple(pivots),
        terminal=term,
    )


def dump_json(doc, dest=None, *, deterministic: bool = False) -> str:
    """Serialize a report object (or plain dict) to stable, sorted JSON."""
    if hasattr(doc, "to_dict"):
        try:
            payload = doc.to_dict(deterministic=deterministic)
        except TypeError:
            payload = doc.to_dict()
    else:
        payload = doc
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if dest is not None:
        Path(dest).write_text(text)
    return text
