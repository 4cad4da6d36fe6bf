import io
import time

import numpy as np
import pytest

from mipdom import InvalidInputError, build_model, emit_lp, model_size
from mipdom.mip_model import BINARY, DomMipModel

from conftest import WORKED_P, WORKED_Q


def _lp_text(model):
    buf = io.StringIO()
    emit_lp(model, buf)
    return buf.getvalue()


def test_small_counts():
    assert model_size(2, 2, 2) == (16, 22, 60)
    assert build_model(WORKED_P, WORKED_Q).counts() == (16, 22, 60)


def test_formula_counts_large():
    # 202,000 continuous by the formula; see the notes for the stated 202,002
    assert model_size(200, 200, 5) == (202000, 440200, 923400)


@pytest.mark.parametrize("bad", [(0, 1, 1), (1, -2, 1), (1, 1, 1.5)])
def test_model_size_rejects(bad):
    with pytest.raises(InvalidInputError):
        model_size(*bad)


def test_counts_match_formula_on_random_triples(rng):
    for _ in range(100):
        n_p, n_q, m = rng.integers(1, 31), rng.integers(1, 31), rng.integers(1, 11)
        # small grids keep this fast; the counts only depend on the shape
        model = build_model(rng.random((n_p, m)), rng.random((n_q, m)))
        assert model.counts() == model_size(n_p, n_q, m)


@pytest.mark.slow
def test_large_build_under_ten_seconds(rng):
    t0 = time.perf_counter()
    model = build_model(rng.random((200, 5)), rng.random((200, 5)))
    assert model.counts() == (202000, 440200, 923400)
    assert time.perf_counter() - t0 < 10


def test_build_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        build_model([[1.0, -0.1]], [[0.0, 0.0]])
    with pytest.raises(InvalidInputError):
        build_model([[1.0, 1.0]], [[0.0, 0.0, 0.0]])


def test_big_m_zero_where_p_already_better():
    p = np.array([[1.0, 3.0]])
    q = np.array([[2.0, 1.0]])
    model = build_model(p, q)
    assert model.big_m[0, 0].tolist() == [0.0, 2.0]
    cap = [c for c in model.constraints if c.name == "zpq_cap_1_1_1"][0]
    # zpq <= 0 * xpqd forces the residual to zero
    assert dict((v, a) for a, v in cap.terms)["xpqd_1_1_1"] == 0.0


def test_lp_is_deterministic_and_has_assignment_row():
    a = _lp_text(build_model(WORKED_P, WORKED_Q))
    b = _lp_text(build_model(WORKED_P, WORKED_Q))
    assert a == b
    assert "xpq_1_1 + xpq_2_1 = 1" in a
    for section in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
        assert section in a
    assert a.index("Minimize") < a.index("Subject To") < a.index("Bounds") < a.index("Binaries")


def test_lp_row_order_follows_insertion():
    model = build_model(WORKED_P, WORKED_Q)
    text = _lp_text(model)
    pos = [text.index(f" {c.name}:") for c in model.constraints]
    assert pos == sorted(pos)


def test_lp_coefficients_round_trip():
    p = [[0.1 + 0.2, 1 / 3]]
    q = [[0.0, 0.0]]
    text = _lp_text(build_model(p, q))
    assert repr(0.1 + 0.2) in text


def test_identity_valuation_is_feasible_with_zero_objective():
    p = np.array([[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]])
    q = p + np.array([[0.5, 0.0], [0.0, 0.0], [0.0, 0.25]])
    model = build_model(p, q)
    n = len(p)
    val = {}
    for i in range(n):
        val[DomMipModel.xp(i)] = 1.0
        val[DomMipModel.xpq(i, i)] = 1.0
        for m in range(2):
            val[DomMipModel.phat(i, m)] = p[i, m]
            val[DomMipModel.xpqn(i, i, m)] = 1.0
    assert model.violations(val) == []
    assert model.evaluate(val) == 0.0


def test_solver_valuation_satisfies_every_row(rng, highs_opts):
    from mipdom.core import PointSet, translate_nonnegative
    from mipdom.solver import solve_external

    for _ in range(5):
        P, Q = rng.random((4, 3)), rng.random((4, 3))
        pt, qt, _ = translate_nonnegative(PointSet(P), PointSet(Q))
        model = build_model(pt, qt)
        raw = solve_external(model, highs_opts)
        val = {k: (round(v) if k.startswith("x") else v) for k, v in raw.valuation.items()}
        assert model.violations(val, tol=1e-6) == []
        for j in range(len(Q)):
            assert sum(val.get(DomMipModel.xpq(i, j), 0) for i in range(len(P))) == 1


def test_variable_kinds_and_names():
    model = build_model(WORKED_P, WORKED_Q)
    names = model.variable_names()
    assert {"zp_1_1", "phat_2_2", "zpq_1_2_1", "xp_2", "xpq_2_1", "xpqd_1_1_2"} <= names
    binaries = {v.name for v in model.variables if v.kind == BINARY}
    assert all(n.startswith("x") for n in binaries)
