"""Symbolic mixed-integer model of the dominance move and its LP-file writer.

Variables (1-based names, ``i`` over P, ``j`` over Q, ``m`` over objectives)::

    zp_i_m       continuous >= 0   move of p_i towards its intermediate point
    phat_i_m     continuous        intermediate point, lp_i_m <= phat <= up_i_m
    zpq_i_j_m    continuous >= 0   residual move needed for phat_i to cover q_j
    xp_i         binary            p_i is used
    xpq_i_j      binary            q_j is assigned to p_i
    xpqd_i_j_m   binary            residual of pair (i, j) is active on objective m
    xpqn_i_j_m   binary            residual of pair (i, j) is inactive on objective m

The model requires both sets to be non-negative (see
:func:`mipdom.core.translate_nonnegative`).
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .core import PointSet, format_float
from .errors import InvalidInputError

__all__ = [
    "ModelVariable",
    "LinearConstraint",
    "DomMipModel",
    "build_model",
    "model_size",
    "emit_lp",
]

CONTINUOUS = "continuous"
BINARY = "binary"


class ModelVariable(NamedTuple):
    name: str
    kind: str
    lower: float
    upper: float


class LinearConstraint(NamedTuple):
    name: str
    terms: tuple[tuple[float, str], ...]
    sense: str  # "<=", ">=" or "="
    rhs: float


def model_size(np_: int, nq: int, m: int) -> tuple[int, int, int]:
    """Closed-form (continuous, binary, constraint) counts of the model.

    Non-negativity of ``zp`` and ``zpq`` is counted as constraints.
    """
    for name, v in (("np", np_), ("nq", nq), ("m", m)):
        if int(v) != v or v < 1:
            raise InvalidInputError(f"{name} must be a positive integer, got {v!r}")
    np_, nq, m = int(np_), int(nq), int(m)
    n_cont = (2 + nq) * (np_ * m)
    n_bin = np_ * (1 + nq * (1 + 2 * m))
    n_cons = nq + np_ * (1 + 3 * m) + (np_ * nq) * (3 + 4 * m)
    return n_cont, n_bin, n_cons


@dataclass(frozen=True, eq=False)
class DomMipModel:
    p: np.ndarray
    q: np.ndarray
    variables: list[ModelVariable]
    constraints: list[LinearConstraint]
    objective: list[tuple[float, str]]
    big_m: np.ndarray  # (np, nq, m)
    lp: np.ndarray  # (np, m)
    up: np.ndarray  # (np, m)
    counted_bounds: int

    @property
    def n_p(self) -> int:
        return self.p.shape[0]

    @property
    def n_q(self) -> int:
        return self.q.shape[0]

    @property
    def m_dim(self) -> int:
        return self.p.shape[1]

    # index maps; arguments are 0-based, names 1-based
    @staticmethod
    def zp(i: int, m: int) -> str:
        return f"zp_{i + 1}_{m + 1}"

    @staticmethod
    def phat(i: int, m: int) -> str:
        return f"phat_{i + 1}_{m + 1}"

    @staticmethod
    def zpq(i: int, j: int, m: int) -> str:
        return f"zpq_{i + 1}_{j + 1}_{m + 1}"

    @staticmethod
    def xp(i: int) -> str:
        return f"xp_{i + 1}"

    @staticmethod
    def xpq(i: int, j: int) -> str:
        return f"xpq_{i + 1}_{j + 1}"

    @staticmethod
    def xpqd(i: int, j: int, m: int) -> str:
        return f"xpqd_{i + 1}_{j + 1}_{m + 1}"

    @staticmethod
    def xpqn(i: int, j: int, m: int) -> str:
        return f"xpqn_{i + 1}_{j + 1}_{m + 1}"

    def counts(self) -> tuple[int, int, int]:
        """Actual (continuous, binary, constraint) counts of this instance."""
        n_bin = sum(1 for v in self.variables if v.kind == BINARY)
        n_cont = len(self.variables) - n_bin
        return n_cont, n_bin, len(self.constraints) + self.counted_bounds

    def variable_names(self) -> set[str]:
        return {v.name for v in self.variables}

    def evaluate(self, valuation: dict[str, float]) -> float:
        """Objective value of ``valuation`` (missing variables read as 0)."""
        return float(sum(c * valuation.get(v, 0.0) for c, v in self.objective))

    def violations(self, valuation: dict[str, float], tol: float = 1e-6) -> list[str]:
        """Names of the rows and bounds that ``valuation`` violates by more than ``tol``."""
        bad = []
        for v in self.variables:
            x = valuation.get(v.name, 0.0)
            if x < v.lower - tol or x > v.upper + tol:
                bad.append(v.name)
            elif v.kind == BINARY and min(abs(x), abs(x - 1.0)) > tol:
                bad.append(v.name)
        for c in self.constraints:
            lhs = sum(a * valuation.get(v, 0.0) for a, v in c.terms)
            if c.sense == "<=" and lhs > c.rhs + tol:
                bad.append(c.name)
            elif c.sense == ">=" and lhs < c.rhs - tol:
                bad.append(c.name)
            elif c.sense == "=" and abs(lhs - c.rhs) > tol:
                bad.append(c.name)
        return bad


def _as_array(s) -> np.ndarray:
    return s.points if isinstance(s, PointSet) else np.asarray(s, dtype=float)


def build_model(p, q) -> DomMipModel:
    """Build the dominance-move MIP for a non-negative, prefiltered pair.

    Rows are materialized block by block (zp block, zpq block, linking,
    usage, assignment, pair aggregation), each block looping ``i`` then
    ``j`` then ``m``.
    """
    P, Q = _as_array(p), _as_array(q)
    if P.ndim != 2 or Q.ndim != 2 or P.shape[0] == 0 or Q.shape[0] == 0:
        raise InvalidInputError("both point sets must be non-empty")
    if P.shape[1] != Q.shape[1]:
        raise InvalidInputError(
            f"dimension mismatch: {P.shape[1]} vs {Q.shape[1]} objectives"
        )
    if (P < 0).any() or (Q < 0).any():
        raise InvalidInputError(
            "model building requires non-negative coordinates; translate first"
        )
    n_p, n_q, n_m = P.shape[0], Q.shape[0], P.shape[1]
    I, J, Ms = range(n_p), range(n_q), range(n_m)

    up = P.copy()
    lp = np.minimum(P, Q.min(axis=0))
    big_m = np.maximum(0.0, P[:, None, :] - Q[None, :, :])
    # big-M of the "residual inactive" row: must cover q - lp so that
    # xpqd = 0 stays feasible whatever phat is
    act_k = big_m - lp[:, None, :] + Q[None, :, :]

    zp = [[f"zp_{i + 1}_{m + 1}" for m in Ms] for i in I]
    ph = [[f"phat_{i + 1}_{m + 1}" for m in Ms] for i in I]
    xp = [f"xp_{i + 1}" for i in I]
    xpq = [[f"xpq_{i + 1}_{j + 1}" for j in J] for i in I]
    ij = [[f"{i + 1}_{j + 1}" for j in J] for i in I]
    zpq = [[[f"zpq_{ij[i][j]}_{m + 1}" for m in Ms] for j in J] for i in I]
    xd = [[[f"xpqd_{ij[i][j]}_{m + 1}" for m in Ms] for j in J] for i in I]
    xn = [[[f"xpqn_{ij[i][j]}_{m + 1}" for m in Ms] for j in J] for i in I]

    inf = float("inf")
    Pl, Ql, lpl, upl = P.tolist(), Q.tolist(), lp.tolist(), up.tolist()
    bml, akl = big_m.tolist(), act_k.tolist()

    variables: list[ModelVariable] = []
    add_var = variables.append
    for i in I:
        for m in Ms:
            add_var(ModelVariable(zp[i][m], CONTINUOUS, 0.0, inf))
        for m in Ms:
            add_var(ModelVariable(ph[i][m], CONTINUOUS, lpl[i][m], upl[i][m]))
    for i in I:
        for j in J:
            for m in Ms:
                add_var(ModelVariable(zpq[i][j][m], CONTINUOUS, 0.0, inf))
    for i in I:
        add_var(ModelVariable(xp[i], BINARY, 0.0, 1.0))
    for i in I:
        for j in J:
            add_var(ModelVariable(xpq[i][j], BINARY, 0.0, 1.0))
    for i in I:
        for j in J:
            for m in Ms:
                add_var(ModelVariable(xd[i][j][m], BINARY, 0.0, 1.0))
            for m in Ms:
                add_var(ModelVariable(xn[i][j][m], BINARY, 0.0, 1.0))

    rows: list[LinearConstraint] = []
    add = rows.append
    LC = LinearConstraint

    # zp block: zp >= p*xp - phat, zp <= p*xp  (zp >= 0 is a bound)
    for i in I:
        for m in Ms:
            pim, s = Pl[i][m], f"{i + 1}_{m + 1}"
            add(LC(f"zp_lb_{s}", ((1.0, zp[i][m]), (-pim, xp[i]), (1.0, ph[i][m])), ">=", 0.0))
            add(LC(f"zp_ub_{s}", ((1.0, zp[i][m]), (-pim, xp[i])), "<=", 0.0))

    # zpq block (zpq >= 0 is a bound):
    #   zpq >= phat - q - p (1 - xpq)
    #   zpq <= phat - q + K (1 - xpqd)
    #   zpq <= bigM * xpqd
    for i in I:
        for j in J:
            for m in Ms:
                pim, qjm = Pl[i][m], Ql[j][m]
                k, bm = akl[i][j][m], bml[i][j][m]
                z, h, s = zpq[i][j][m], ph[i][m], f"{ij[i][j]}_{m + 1}"
                add(LC(f"zpq_lb_{s}", ((1.0, z), (-1.0, h), (-pim, xpq[i][j])), ">=", -qjm - pim))
                add(LC(f"zpq_act_{s}", ((1.0, z), (-1.0, h), (k, xd[i][j][m])), "<=", k - qjm))
                add(LC(f"zpq_cap_{s}", ((1.0, z), (-bm, xd[i][j][m])), "<=", 0.0))

    # xp >= xpq
    for i in I:
        for j in J:
            add(LC(f"link_{ij[i][j]}", ((1.0, xp[i]), (-1.0, xpq[i][j])), ">=", 0.0))
    # xp <= sum_j xpq
    for i in I:
        add(LC(f"use_{i + 1}", ((1.0, xp[i]),) + tuple((-1.0, xpq[i][j]) for j in J), "<=", 0.0))
    # every q assigned exactly once
    for j in J:
        add(LC(f"assign_{j + 1}", tuple((1.0, xpq[i][j]) for i in I), "=", 1.0))
    # pair aggregation: an assigned pair classifies each objective as
    # active/inactive; residual moves are charged to assigned pairs only
    fm = float(n_m)
    for i in I:
        for j in J:
            s = ij[i][j]
            terms = tuple((1.0, n) for n in xd[i][j]) + tuple((1.0, n) for n in xn[i][j])
            add(LC(f"split_{s}", terms + ((-fm, xpq[i][j]),), "=", 0.0))
            cap = float(sum(bml[i][j]))
            add(LC(f"charge_{s}", tuple((1.0, n) for n in zpq[i][j]) + ((-cap, xpq[i][j]),), "<=", 0.0))

    objective = [(1.0, zp[i][m]) for i in I for m in Ms]
    objective += [(1.0, zpq[i][j][m]) for i in I for j in J for m in Ms]

    return DomMipModel(
        p=P.copy(),
        q=Q.copy(),
        variables=variables,
        constraints=rows,
        objective=objective,
        big_m=big_m,
        lp=lp,
        up=up,
        counted_bounds=n_p * n_m + n_p * n_q * n_m,
    )


_TERMS_PER_LINE = 8


def _linear_expr(terms: Iterable[tuple[float, str]]) -> list[str]:
    chunks: list[str] = []
    cur: list[str] = []
    for k, (c, name) in enumerate(terms):
        if c == 0.0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = name if mag == 1.0 else f"{format_float(mag)} {name}"
        if not cur and not chunks:
            cur.append(f"- {body}" if sign == "-" else body)
        else:
            cur.append(f"{sign} {body}")
        if len(cur) == _TERMS_PER_LINE:
            chunks.append(" ".join(cur))
            cur = []
    if cur:
        chunks.append(" ".join(cur))
    return chunks


def _rhs(x: float) -> str:
    return format_float(0.0 if x == 0 else x)


def emit_lp(model: DomMipModel, sink) -> None:
    """Write ``model`` in CPLEX LP text format.

    ``sink`` is a path or a writable text stream. The output depends only
    on the model, so identical models produce identical bytes.
    """
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", newline="\n") as fh:
            _write_lp(model, fh)
    else:
        _write_lp(model, sink)


def _write_lp(model: DomMipModel, fh: io.TextIOBase) -> None:
    out: list[str] = ["\\ dominance move model", "Minimize"]
    expr = _linear_expr(model.objective)
    out.append(f" obj: {expr[0]}")
    out.extend(f"  {c}" for c in expr[1:])

    out.append("Subject To")
    for row in model.constraints:
        # every row carries a unit coefficient, so expr is never empty
        expr = _linear_expr(row.terms)
        tail = f" {row.sense} {_rhs(row.rhs)}"
        if len(expr) == 1:
            out.append(f" {row.name}: {expr[0]}{tail}")
        else:
            out.append(f" {row.name}: {expr[0]}")
            out.extend(f"  {c}" for c in expr[1:-1])
            out.append(f"  {expr[-1]}{tail}")

    out.append("Bounds")
    binaries = []
    for v in model.variables:
        if v.kind == BINARY:
            binaries.append(v.name)
        elif v.upper == float("inf"):
            out.append(f" {v.name} >= {_rhs(v.lower)}")
        else:
            out.append(f" {_rhs(v.lower)} <= {v.name} <= {_rhs(v.upper)}")

    out.append("Binaries")
    for k in range(0, len(binaries), _TERMS_PER_LINE):
        out.append(" " + " ".join(binaries[k:k + _TERMS_PER_LINE]))
    out.append("End")
    fh.write("\n".join(out) + "\n")
