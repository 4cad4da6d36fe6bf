import itertools

import numpy as np
import pytest

from mipdom import SolveOptions, highs_command

WORKED_P = [[2.0, 2.5], [3.0, 1.9]]
WORKED_Q = [[2.2, 2.0], [3.0, 1.5]]


def brute_dom(P, Q):
    """Dominance move by trying every map q -> p (|P|^|Q| of them)."""
    P, Q = np.asarray(P, float), np.asarray(Q, float)
    best = np.inf
    for owner in itertools.product(range(len(P)), repeat=len(Q)):
        total = 0.0
        for i in range(len(P)):
            mine = [Q[j] for j in range(len(Q)) if owner[j] == i]
            if mine:
                low = np.min(mine, axis=0)
                total += sum(max(0.0, P[i, m] - low[m]) for m in range(P.shape[1]))
        best = min(best, total)
    return best


def random_pair(rng, n_p, n_q, m, kind="uniform"):
    if kind == "grid":
        # few distinct coordinates: lots of ties and duplicates
        return rng.integers(0, 4, (n_p, m)) / 2.0, rng.integers(0, 4, (n_q, m)) / 2.0
    if kind == "front":
        def front(n):
            x = rng.random((n, m)) + 0.05
            return x / x.sum(axis=1, keepdims=True) + 0.02 * rng.random((n, m))
        return front(n_p), front(n_q)
    return rng.random((n_p, m)), rng.random((n_q, m))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def highs_opts():
    pytest.importorskip("highspy")
    return SolveOptions(backend="external", external_command=highs_command())


@pytest.fixture
def worked_files(tmp_path):
    p, q = tmp_path / "P.csv", tmp_path / "Q.csv"
    p.write_text("2.0,2.5\n3.0,1.9\n")
    q.write_text("2.2,2.0\n3.0,1.5\n")
    return p, q


# acceptance verdicts, printed once at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
