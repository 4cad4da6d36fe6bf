"""Acceptance criteria 1-10, one verdict each.

Every test records a PASS/FAIL line (printed in the terminal summary) and
then asserts, so a failing criterion also fails the run.
"""

import math
import time

import numpy as np
import pytest

from mipdom import (
    PointSet,
    SolveOptions,
    SolveStatus,
    additive_epsilon,
    build_model,
    dom,
    dom_2d,
    hypervolume,
    igd_plus,
    model_size,
    nondominated_filter,
    running_matrix,
    solve_dp_exact,
)
from mipdom.harness import RunSeries

from conftest import ACCEPTANCE, WORKED_P, WORKED_Q, random_pair

pytestmark = pytest.mark.acceptance

DP = SolveOptions(backend="exact-dp")


def verdict(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    assert ok, f"criterion {n}: {detail}"


def d(a, b):
    return dom(PointSet(a), PointSet(b), DP).value


def test_criterion_01_worked_example(highs_opts):
    # warm the JIT caches on another instance so only the solve is timed
    solve_dp_exact([[1.0, 1.0]], [[0.0, 2.0]])
    dom_2d([[1.0, 1.0]], [[0.0, 2.0]])
    p, q = PointSet(WORKED_P), PointSet(WORKED_Q)
    errs, times = {}, {}
    ok = True
    for name, opts in (("exact-dp", DP), ("exact-2d", SolveOptions(backend="exact-2d")),
                       ("external", highs_opts)):
        t0 = time.perf_counter()
        sol = dom(p, q, opts)
        times[name] = time.perf_counter() - t0
        errs[name] = abs(sol.value - 0.9)
        dec = sol.move_decomposition["zp"].sum() + sol.move_decomposition["zpq"].sum()
        covers = all(np.all(sol.moved_points[i] <= q.points[j]) for j, i in sol.assignment.items())
        ok &= errs[name] <= 1e-9 and abs(dec - 0.9) <= 1e-9 and covers and times[name] < 1.0
    worst = max(errs.values())
    verdict(1, ok, f"two-point worked example: DoM = 0.9 on 3 backends, max |err| {worst:.1e}, "
                   f"slowest {max(times.values()):.2f}s")


def test_criterion_02_model_size():
    small = build_model(WORKED_P, WORKED_Q).counts()
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    large = build_model(rng.random((200, 5)), rng.random((200, 5))).counts()
    took = time.perf_counter() - t0
    ok = (small == (16, 22, 60) and model_size(2, 2, 2) == small
          and large == (202000, 440200, 923400) and took < 10)
    verdict(2, ok, f"(2,2,2) -> {small}; (200,200,5) -> {large} built in {took:.1f}s "
                   "(continuous count follows the formula, 202000)")


@pytest.mark.slow
def test_criterion_03_oracle_equivalence(highs_opts):
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    worst_ext = 0.0
    for k in range(200):
        m = (2, 3, 4)[k % 3]
        P, Q = 10 * rng.random((rng.integers(1, 7), m)), 10 * rng.random((rng.integers(1, 7), m))
        p, q = PointSet(P), PointSet(Q)
        worst_ext = max(worst_ext, abs(dom(p, q, highs_opts).value - solve_dp_exact(p, q).value))
    t_ext = time.perf_counter() - t0
    t0 = time.perf_counter()
    worst_2d = 0.0
    for k in range(200):
        kind = ("uniform", "grid", "front")[k % 3]
        P, Q = random_pair(rng, int(rng.integers(1, 9)), int(rng.integers(1, 9)), 2, kind)
        p, q = PointSet(P), PointSet(Q)
        worst_2d = max(worst_2d, abs(dom_2d(p, q).value - solve_dp_exact(p, q).value))
    t_2d = time.perf_counter() - t0
    ok = worst_ext <= 1e-6 and worst_2d <= 1e-9 and t_2d < 600
    verdict(3, ok, f"external vs DP max diff {worst_ext:.1e} on 200 ({t_ext:.0f}s); "
                   f"2-D vs DP max diff {worst_2d:.1e} on 200 ({t_2d:.1f}s)")


def test_criterion_04_set_properties():
    rng = np.random.default_rng(4)
    fails = []
    for _ in range(100):
        m = int(rng.integers(2, 5))
        P = rng.random((int(rng.integers(1, 6)), m))
        if not (d(P, P) == 0 and d(P[::-1], P) == 0):
            fails.append("a")
        Q = P + 0.01 + rng.random(P.shape) * 0.2
        if not (d(P, Q) == 0 and d(Q, P) > 0):
            fails.append("b")
    for _ in range(100):
        m = int(rng.integers(2, 4))
        P = rng.random((int(rng.integers(1, 4)), m))
        Q = np.vstack([P + rng.random(P.shape) * 0.3, P[:1] + rng.random((2, m))])
        R = rng.random((int(rng.integers(1, 5)), m))
        if not (d(P, R) <= d(Q, R) + 1e-9 and d(R, Q) <= d(R, P) + 1e-9):
            fails.append("c")
    for _ in range(100):
        m = int(rng.integers(2, 4))
        P, Q = random_pair(rng, int(rng.integers(1, 5)), int(rng.integers(1, 5)), m)
        R = rng.random((int(rng.integers(1, 5)), m))
        both = np.vstack([Q, R])
        if not (d(P, Q) + d(Q, R) >= d(P, both) - 1e-9 and d(P, Q) + d(P, R) >= d(P, both) - 1e-9):
            fails.append("d")
    verdict(4, not fails, f"(a)-(d) on 100 random cases each, violations: {sorted(set(fails)) or 'none'}")


def test_criterion_05_epsilon_information_loss():
    p = [[0.0] * 9 + [1.0]]
    q = [[1.0] * 9 + [0.0]]
    got = (additive_epsilon(p, q), additive_epsilon(q, p), d(p, q), d(q, p))
    verdict(5, got == (1.0, 1.0, 1.0, 9.0),
            f"eps(P,Q), eps(Q,P), DoM(P,Q), DoM(Q,P) = {got}")


def test_criterion_06_invariances():
    rng = np.random.default_rng(6)
    worst = {"translation": 0.0, "scaling": 0.0, "permutation": 0.0}
    for _ in range(100):
        m = int(rng.integers(2, 5))
        P, Q = random_pair(rng, int(rng.integers(1, 6)), int(rng.integers(1, 7)), m)
        base = d(P, Q)
        shift = rng.normal(0, 10, m)
        c = float(rng.uniform(0.1, 20))
        worst["translation"] = max(worst["translation"], abs(d(P + shift, Q + shift) - base))
        worst["scaling"] = max(worst["scaling"], abs(d(c * P, c * Q) - c * base))
        worst["permutation"] = max(worst["permutation"], abs(
            d(P[rng.permutation(len(P))], Q[rng.permutation(len(Q))]) - base))
    ok = all(v <= 1e-9 for v in worst.values())
    verdict(6, ok, "max deviation over 100 instances: "
                   + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_criterion_07_gap_semantics(highs_opts):
    rng = np.random.default_rng(7)
    opts = SolveOptions(backend="external", external_command=highs_opts.external_command,
                        relative_gap_target=0.10)
    gap_stops, bad = 0, []
    for k in range(15):
        P, Q = rng.random((10, 3)), rng.random((12, 3))
        sol = dom(PointSet(P), PointSet(Q), opts)
        true = solve_dp_exact(P, Q).value
        lo, hi = sol.interval
        gap_def = (hi - lo) / max(hi, 1e-12)
        if not (lo <= true + 1e-9 and true <= hi + 1e-9 and abs(gap_def - sol.gap) <= 1e-12
                and sol.gap <= 0.10 + 1e-9):
            bad.append(k)
        if sol.gap > 1e-8:
            gap_stops += 1
            if sol.status is not SolveStatus.WITHIN_GAP:
                bad.append(k)
        elif sol.status is not SolveStatus.OPTIMAL:
            bad.append(k)
    ok = not bad and gap_stops > 0
    verdict(7, ok, f"15 gap-0.10 solves bracket the DP optimum; {gap_stops} stopped on the gap "
                   f"with status within-gap; bad cases {bad or 'none'}")


def test_criterion_08_running_indicator():
    worst_diag, worst_rise = 0.0, 0.0
    for seed in range(10):
        rng = np.random.default_rng(80 + seed)
        arch, gens, centre = None, [], np.ones(3)
        for g in range(6):
            centre = centre * 0.85
            pts = PointSet(centre + rng.random((3, 3)) * 0.6)
            arch = pts if arch is None else nondominated_filter(arch.union(pts))
            gens.append(((g + 1) * 10, arch))
        pivots = tuple(g for g, _ in gens)
        table = {(c.generation, c.pivot): c.dom
                 for c in running_matrix(RunSeries(tuple(gens), pivots), DP)}
        for pv in pivots:
            worst_diag = max(worst_diag, abs(table[(pv, pv)]))
            col = [table[(g, pv)] for g in pivots]
            worst_rise = max([worst_rise] + [b - a for a, b in zip(col, col[1:])])
    ok = worst_diag <= 1e-9 and worst_rise <= 1e-9
    verdict(8, ok, f"10 cumulative-archive runs: max |diagonal| {worst_diag:.1e}, "
                   f"max rise along a pivot column {worst_rise:.1e}")


def _eps_loops(P, Q):
    return max(min(max(p[m] - q[m] for m in range(len(q))) for p in P) for q in Q)


def _igd_loops(A, R):
    return sum(min(math.sqrt(sum(max(a[m] - r[m], 0.0) ** 2 for m in range(len(r)))) for a in A)
               for r in R) / len(R)


def test_criterion_09_indicator_oracles():
    rng = np.random.default_rng(9)
    e_err = i_err = 0.0
    for _ in range(50):
        P, Q = rng.random((6, 3)), rng.random((6, 3))
        e_err = max(e_err, abs(additive_epsilon(P, Q) - _eps_loops(P, Q)))
        i_err = max(i_err, abs(igd_plus(P, Q) - _igd_loops(P, Q)))
    z_worst = 0.0
    n_mc = 10**6
    for _ in range(5):
        S = rng.random((int(rng.integers(2, 9)), 3))
        x = rng.random((n_mc, 3))
        hit = np.zeros(n_mc, dtype=bool)
        for s in S:
            hit |= np.all(x >= s, axis=1)
        est = hit.mean()
        sigma = math.sqrt(est * (1 - est) / n_mc)
        z_worst = max(z_worst, abs(hypervolume(S, np.ones(3)) - est) / sigma)
    ok = e_err <= 1e-12 and i_err <= 1e-12 and z_worst <= 3
    verdict(9, ok, f"eps max err {e_err:.1e}, IGD+ max err {i_err:.1e}, "
                   f"HV vs Monte Carlo worst {z_worst:.2f} sigma")


def _front(t):
    t = np.asarray(t, dtype=float)
    return np.column_stack([t, 1 - t])


def test_criterion_10_scope_and_facets():
    uniform = _front(np.linspace(0, 1, 9))
    clustered = _front(np.r_[np.linspace(0, 0.15, 4), np.linspace(0.85, 1, 5)])
    wide, narrow = _front(np.linspace(0, 1, 8)), _front(np.linspace(0.3, 0.7, 8))
    many, few = _front(np.linspace(0, 1, 15)), _front(np.linspace(0, 1, 5))
    checks = {
        "uniformity": d(uniform, clustered) < d(clustered, uniform),
        "spread": d(wide, narrow) < d(narrow, wide),
        "cardinality": d(many, few) < d(few, many),
    }
    verdict(10, all(checks.values()),
            "benchmark tables and wall-clock curves from stochastic runs are out of scope; "
            "facet orderings hold: " + ", ".join(f"{k} {'ok' if v else 'broken'}"
                                                 for k, v in checks.items()))
