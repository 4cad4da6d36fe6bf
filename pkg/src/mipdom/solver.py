"""Dominance-move solvers.

Three interchangeable backends produce a :class:`DomSolution`:

``exact-dp``
    Subset dynamic programme over assignments of Q-subsets to points of P.
    Exact, ``O(|P| 3^|Q|)`` time, used as the reference oracle.
``exact-2d``
    The bi-objective inward-neighbour procedure in :mod:`mipdom.exact2d`.
``external``
    The MIP of :mod:`mipdom.mip_model`, written to an LP file and solved by
    an external command (HiGHS through :mod:`mipdom.highs_driver` by default).

:func:`dom` is the public entry point; it prefilters the pair, picks a
backend and maps the answer back to the caller's indices.
"""

from __future__ import annotations

import math
import shlex
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from numba import njit

from .core import (
    PointSet,
    Translation,
    _check_same_dim,
    prefilter_pair,
    translate_nonnegative,
)
from .errors import BackendError, InvalidInputError, VerificationError
from .mip_model import DomMipModel, build_model, emit_lp

__all__ = [
    "SolveOptions",
    "SolveStatus",
    "DomSolution",
    "ExternalResult",
    "cover_cost",
    "relative_gap",
    "solve_dp_exact",
    "solve_external",
    "parse_solution",
    "reconstruct_solution",
    "dom",
    "highs_command",
]

BACKENDS = ("auto", "exact-dp", "exact-2d", "external")
DEFAULT_GAP = 1e-8
_GAP_FLOOR = 1e-12


def highs_command() -> str:
    """Command template that runs the bundled HiGHS driver."""
    return (
        f"{shlex.quote(sys.executable)} -m mipdom.highs_driver "
        "{lp_file} {sol_file} --gap {gap} --time-limit {time_limit}"
    )


@dataclass(frozen=True)
class SolveOptions:
    backend: str = "auto"
    relative_gap_target: float = DEFAULT_GAP
    time_limit: float | None = None
    external_command: str | None = None
    dp_size_limit: int = 20

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise InvalidInputError(
                f"unknown backend {self.backend!r}; choose one of {', '.join(BACKENDS)}"
            )
        if not (math.isfinite(self.relative_gap_target) and self.relative_gap_target >= 0):
            raise InvalidInputError("relative gap target must be finite and >= 0")
        if self.time_limit is not None and not self.time_limit > 0:
            raise InvalidInputError("time limit must be positive")
        if self.backend == "external" and not self.external_command:
            raise InvalidInputError("the external backend needs an external command")
        if self.dp_size_limit < 1:
            raise InvalidInputError("dp size limit must be >= 1")


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    WITHIN_GAP = "within-gap"
    TIME_LIMIT = "time-limit"
    INFEASIBLE_ERROR = "infeasible-error"


def relative_gap(incumbent: float, bound: float) -> float:
    return max(0.0, (incumbent - bound) / max(incumbent, _GAP_FLOOR))


@dataclass(frozen=True, eq=False)
class DomSolution:
    """Outcome of a dominance-move computation.

    ``assignment[j] = i`` says that moved point ``moved_points[i]`` weakly
    dominates ``q[j]``. ``zp`` (``(|P|, M)``) and ``zpq`` (``(|P|, |Q|, M)``)
    decompose the total move the way the MIP does; the exact backends put
    the whole move in ``zp``.
    """

    value: float
    best_bound: float
    gap: float
    status: SolveStatus
    assignment: dict[int, int]
    original_points: np.ndarray
    moved_points: np.ndarray
    zp: np.ndarray
    zpq: np.ndarray
    backend: str
    objective: float | None = None
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def changed_points(self) -> int:
        return int(np.any(self.moved_points != self.original_points, axis=1).sum())

    @property
    def move_decomposition(self) -> dict[str, np.ndarray]:
        return {"zp": self.zp, "zpq": self.zpq}

    @property
    def interval(self) -> tuple[float, float]:
        """``(best_bound, value)``: the true dominance move lies inside."""
        return self.best_bound, self.value

    def to_dict(self, *, deterministic: bool = False) -> dict:
        out = {
            "value": self.value,
            "best_bound": self.best_bound,
            "gap": self.gap,
            "status": self.status.value,
            "backend": self.backend,
            "objective": self.objective,
            "changed_points": self.changed_points,
            "assignment": {str(j): i for j, i in sorted(self.assignment.items())},
            "moved_points": self.moved_points.tolist(),
        }
        if not deterministic:
            out["elapsed"] = self.elapsed
        return out


def cover_cost(p, s) -> tuple[float, np.ndarray]:
    """Cheapest Manhattan move of ``p`` that weakly dominates every point of ``s``.

    The moved point is ``min(p, min(s))`` componentwise.
    """
    p = np.asarray(p, dtype=float)
    s = np.asarray(s.points if isinstance(s, PointSet) else s, dtype=float)
    if s.ndim == 1:
        s = s.reshape(1, -1)
    if s.shape[0] == 0:
        raise InvalidInputError("cover_cost needs a non-empty subset")
    if s.shape[1] != p.shape[0]:
        raise InvalidInputError(
            f"dimension mismatch: {p.shape[0]} vs {s.shape[1]} objectives"
        )
    moved = np.minimum(p, s.min(axis=0))
    return float(np.sum(p - moved)), moved


def _exact_solution(P: np.ndarray, Q: np.ndarray, owner: np.ndarray, backend: str,
                    elapsed: float = 0.0, extra: dict | None = None) -> DomSolution:
    """Package an assignment ``owner[j] = i`` as an optimal DomSolution."""
    moved = P.copy()
    for i in np.unique(owner):
        _, moved[i] = cover_cost(P[i], Q[owner == i])
    zp = P - moved
    value = float(zp.sum())
    return DomSolution(
        value=value,
        best_bound=value,
        gap=0.0,
        status=SolveStatus.OPTIMAL,
        assignment={j: int(i) for j, i in enumerate(owner)},
        original_points=P.copy(),
        moved_points=moved,
        zp=zp,
        zpq=np.zeros((P.shape[0], Q.shape[0], P.shape[1])),
        backend=backend,
        objective=value,
        elapsed=elapsed,
        extra=extra or {},
    )


@njit(cache=True)
def _subset_dp(cost):
    # g[S]: cheapest cover of subset S using the points processed so far
    n_p, size = cost.shape
    g = np.full(size, np.inf)
    g[0] = 0.0
    choice = np.zeros((n_p, size), dtype=np.int32)
    for k in range(n_p):
        ng = np.empty(size)
        ck = cost[k]
        for s in range(size):
            best = g[s]
            bt = 0
            t = (0 - s) & s  # submasks of s in increasing order
            while t != 0:
                v = g[s ^ t] + ck[t]
                if v < best:
                    best = v
                    bt = t
                t = (t - s) & s
            ng[s] = best
            choice[k, s] = bt
        g = ng
    return g[size - 1], choice


def _subset_costs(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    n = Q.shape[0]
    size = 1 << n
    mins = np.empty((size, Q.shape[1]))
    mins[0] = np.inf
    for b in range(n):
        lo = 1 << b
        mins[lo:2 * lo] = np.minimum(mins[:lo], Q[b])
    cost = np.empty((P.shape[0], size))
    for k in range(P.shape[0]):
        cost[k] = np.maximum(0.0, P[k] - mins).sum(axis=1)
    return cost


def solve_dp_exact(p, q, *, size_limit: int = 20) -> DomSolution:
    """Exact dominance move by dynamic programming over subsets of ``q``.

    ``g(k, S) = min_{T subset of S} g(k-1, S minus T) + cover_cost(p_k, T)``
    with ``T`` allowed to be empty. Among equal-cost optima, later points of
    ``p`` take the numerically smallest subset, so ties resolve towards
    lower indices of ``p``.
    """
    P = p.points if isinstance(p, PointSet) else np.asarray(p, dtype=float)
    Q = q.points if isinstance(q, PointSet) else np.asarray(q, dtype=float)
    _check_same_dim(P, Q)
    if Q.shape[0] > size_limit:
        raise BackendError(
            f"|Q| = {Q.shape[0]} exceeds the subset-DP limit of {size_limit}; "
            "use the external MIP backend or raise the limit"
        )
    t0 = time.perf_counter()
    cost = _subset_costs(P, Q)
    _, choice = _subset_dp(cost)
    owner = np.empty(Q.shape[0], dtype=int)
    s = (1 << Q.shape[0]) - 1
    for k in range(P.shape[0] - 1, -1, -1):
        t = int(choice[k, s])
        for j in range(Q.shape[0]):
            if t >> j & 1:
                owner[j] = k
        s ^= t
    return _exact_solution(P, Q, owner, "exact-dp", time.perf_counter() - t0)


@dataclass(frozen=True)
class ExternalResult:
    valuation: dict[str, float]
    objective: float
    bound: float | None
    stdout: str = ""
    stderr: str = ""


def parse_solution(text: str, known: set[str] | None = None) -> tuple[float, float | None, dict[str, float]]:
    """Parse a solution file into ``(objective, bound, values)``.

    Grammar: ``#`` comment lines, one ``objective <real>`` line, an optional
    ``bound <real>`` line, then ``name value`` pairs. Names outside
    ``known`` are rejected.
    """
    objective = None
    bound = None
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise BackendError(f"solution line {lineno}: expected 'name value', got {line!r}")
        key, tok = parts
        try:
            x = float(tok)
        except ValueError:
            raise BackendError(f"solution line {lineno}: bad number {tok!r}") from None
        if key == "objective":
            objective = x
        elif key == "bound":
            bound = x
        else:
            if known is not None and key not in known:
                raise BackendError(f"solution line {lineno}: unknown variable {key!r}")
            values[key] = x
    if objective is None:
        raise BackendError("solution file has no 'objective' line")
    return objective, bound, values


def _render_command(template: str, lp_file: Path, sol_file: Path, opts: SolveOptions) -> list[str]:
    subs = {
        "lp_file": str(lp_file),
        "sol_file": str(sol_file),
        "gap": repr(float(opts.relative_gap_target)),
        "time_limit": "none" if opts.time_limit is None else repr(float(opts.time_limit)),
    }
    try:
        return [tok.format(**subs) for tok in shlex.split(template)]
    except (KeyError, IndexError, ValueError) as exc:
        raise InvalidInputError(f"bad external command template {template!r}: {exc}") from None


def solve_external(model: DomMipModel, opts: SolveOptions) -> ExternalResult:
    """Emit ``model`` to a temporary LP file and run the external command on it.

    The command template may use ``{lp_file}``, ``{sol_file}``, ``{gap}`` and
    ``{time_limit}``.
    """
    if not opts.external_command:
        raise BackendError("no external command configured")
    with tempfile.TemporaryDirectory(prefix="mipdom-") as tmp:
        lp_file = Path(tmp) / "model.lp"
        sol_file = Path(tmp) / "model.sol"
        emit_lp(model, lp_file)
        cmd = _render_command(opts.external_command, lp_file, sol_file, opts)
        try:
            proc = subprocess.run(cmd, capture_output=True, text=True)
        except OSError as exc:
            raise BackendError(f"cannot run external command {cmd[0]!r}: {exc}") from exc
        if proc.returncode != 0:
            raise BackendError(
                f"external solver exited with status {proc.returncode}: "
                f"{proc.stderr.strip() or proc.stdout.strip()}"
            )
        if not sol_file.exists():
            raise BackendError("external solver wrote no solution file")
        objective, bound, values = parse_solution(sol_file.read_text(), model.variable_names())
    return ExternalResult(values, objective, bound, proc.stdout, proc.stderr)


def reconstruct_solution(model: DomMipModel, valuation: dict[str, float], p, q,
                         translation: Translation | None = None, *,
                         objective: float | None = None, bound: float | None = None,
                         gap_target: float = DEFAULT_GAP,
                         backend: str = "external") -> DomSolution:
    """Turn a raw MIP valuation into a verified :class:`DomSolution`.

    ``p`` and ``q`` are the sets in the caller's frame; ``model`` was built
    on their translation. Binaries must lie within ``1e-4`` of 0 or 1.
    The solver's moved point of an assigned ``p_i`` is ``phat_i`` minus the
    largest residual ``zpq`` over its assigned pairs, clamped to
    ``[lp, phat]``; it must cover its points within tolerance. The reported
    point is then the exact cheapest cover of the same assignment, so
    coverage holds exactly and ``value`` never undercuts the true optimum.
    """
    P = p.points if isinstance(p, PointSet) else np.asarray(p, dtype=float)
    Q = q.points if isinstance(q, PointSet) else np.asarray(q, dtype=float)
    n_p, n_q, n_m = model.n_p, model.n_q, model.m_dim
    if P.shape != (n_p, n_m) or Q.shape != (n_q, n_m):
        raise InvalidInputError("point sets do not match the model dimensions")
    get = valuation.get

    xpq = np.array([[get(model.xpq(i, j), 0.0) for j in range(n_q)] for i in range(n_p)])
    binaries = [v.name for v in model.variables if v.kind == "binary"]
    for name in binaries:
        x = get(name, 0.0)
        if min(abs(x), abs(x - 1.0)) > 1e-4:
            raise VerificationError(f"binary {name} = {x!r} is not integral")
    xpq = np.rint(xpq)
    owners = [np.flatnonzero(xpq[:, j]) for j in range(n_q)]
    for j, o in enumerate(owners):
        if o.size != 1:
            raise VerificationError(f"q_{j + 1} is assigned to {o.size} points")
    owner = np.array([int(o[0]) for o in owners], dtype=int)

    phat = np.array([[get(model.phat(i, m), 0.0) for m in range(n_m)] for i in range(n_p)])
    zp = np.array([[get(model.zp(i, m), 0.0) for m in range(n_m)] for i in range(n_p)])
    zpq = np.array([[[get(model.zpq(i, j, m), 0.0) for m in range(n_m)]
                     for j in range(n_q)] for i in range(n_p)])
    zpq *= xpq[:, :, None]

    moved_t = model.p.copy()
    for i in np.unique(owner):
        resid = zpq[i, owner == i].max(axis=0)
        moved_t[i] = np.clip(phat[i] - resid, model.lp[i], phat[i])
    offset = np.zeros(n_m) if translation is None else translation.offset
    moved = moved_t - offset

    tol = 1e-6 * (1.0 + np.abs(Q).max())
    slack = moved[owner] - Q
    if (slack > tol).any():
        j = int(np.argmax(slack.max(axis=1)))
        raise VerificationError(
            f"moved point {owner[j] + 1} fails to weakly dominate q_{j + 1} "
            f"by {slack[j].max():.3g}"
        )
    # the solver's point passed within tolerance; snap to the exact cheapest
    # cover of the same assignment so that coverage holds without slack
    moved = P.copy()
    for i in np.unique(owner):
        _, moved[i] = cover_cost(P[i], Q[owner == i])
    value = float(np.sum(P - moved))
    if objective is not None and value > objective + 1e-5 * (1.0 + abs(objective)):
        raise VerificationError(
            f"recomputed move {value!r} exceeds the solver objective {objective!r}"
        )

    lower = value if bound is None else min(float(bound), value)
    gap = relative_gap(value, lower)
    if gap <= DEFAULT_GAP:
        status = SolveStatus.OPTIMAL
    elif gap <= gap_target * (1 + 1e-9) + 1e-12:
        status = SolveStatus.WITHIN_GAP
    else:
        status = SolveStatus.TIME_LIMIT
    return DomSolution(
        value=value,
        best_bound=lower,
        gap=gap,
        status=status,
        assignment={j: int(i) for j, i in enumerate(owner)},
        original_points=P.copy(),
        moved_points=moved,
        zp=zp,
        zpq=zpq,
        backend=backend,
        objective=objective,
    )


def _pick_backend(m_dim: int, n_q: int, opts: SolveOptions) -> str:
    if opts.backend != "auto":
        return opts.backend
    if m_dim == 2:
        return "exact-2d"
    if n_q <= opts.dp_size_limit:
        return "exact-dp"
    if opts.external_command:
        return "external"
    raise BackendError(
        f"|Q| = {n_q} after prefiltering exceeds the subset-DP limit "
        f"({opts.dp_size_limit}) and no external solver command is configured"
    )


def dom(p: PointSet, q: PointSet, opts: SolveOptions | None = None) -> DomSolution:
    """Dominance move of ``p`` onto ``q``: least total Manhattan movement of
    the points of ``p`` after which every point of ``q`` is weakly dominated.

    The pair is prefiltered first; if nothing of ``q`` is left uncovered the
    answer is 0 and no backend runs.
    """
    opts = opts or SolveOptions()
    if not isinstance(p, PointSet):
        p = PointSet(p)
    if not isinstance(q, PointSet):
        q = PointSet(q)
    _check_same_dim(p, q)
    t0 = time.perf_counter()
    pre = prefilter_pair(p, q)

    if pre.fully_covered:
        P = pre.p_reduced.points
        sol = _exact_solution(P, q.points[:0], np.zeros(0, dtype=int), "prefilter")
        return _lift(sol, p, q, pre, time.perf_counter() - t0)

    pr, qr = pre.p_reduced, pre.q_reduced
    backend = _pick_backend(p.m_dim, len(qr), opts)
    if backend == "exact-dp":
        sol = solve_dp_exact(pr, qr, size_limit=opts.dp_size_limit)
    elif backend == "exact-2d":
        from .exact2d import dom_2d
        sol = dom_2d(pr, qr)
    else:
        pt, qt, shift = translate_nonnegative(pr, qr)
        model = build_model(pt, qt)
        try:
            raw = solve_external(model, opts)
        except BackendError as exc:
            raise BackendError(
                f"external solve of a {len(pr)}x{len(qr)}x{p.m_dim} instance failed: {exc}"
            ) from exc
        sol = reconstruct_solution(
            model, raw.valuation, pr, qr, shift,
            objective=raw.objective, bound=raw.bound,
            gap_target=opts.relative_gap_target, backend="external",
        )
    return _lift(sol, p, q, pre, time.perf_counter() - t0)


def _lift(sol: DomSolution, p: PointSet, q: PointSet, pre, elapsed: float) -> DomSolution:
    """Map a solution on the prefiltered pair back to the original indices."""
    P = p.points
    n_p, n_q, n_m = len(p), len(q), p.m_dim
    moved = P.copy()
    moved[pre.p_index] = sol.moved_points
    zp = np.zeros((n_p, n_m))
    zp[pre.p_index] = sol.zp
    zpq = np.zeros((n_p, n_q, n_m))
    if pre.q_index.size:
        zpq[np.ix_(pre.p_index, pre.q_index)] = sol.zpq

    assignment: dict[int, int] = {}
    for j_red, i_red in sol.assignment.items():
        assignment[int(pre.q_index[j_red])] = int(pre.p_index[i_red])
    for j, i in pre.zero_cost_covers:
        assignment[j] = i
    for j, survivor in pre.shadowed:
        assignment[j] = assignment[survivor]

    return DomSolution(
        value=sol.value,
        best_bound=sol.best_bound,
        gap=sol.gap,
        status=sol.status,
        assignment=dict(sorted(assignment.items())),
        original_points=P.copy(),
        moved_points=moved,
        zp=zp,
        zpq=zpq,
        backend=sol.backend,
        objective=sol.objective,
        elapsed=elapsed,
        extra=sol.extra,
    )
