import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mipdom import (
    CsvFormatError,
    InvalidInputError,
    PointSet,
    dominates,
    minmax_normalize,
    nondominated_filter,
    nondominated_indices,
    prefilter_pair,
    read_csv,
    translate_nonnegative,
    weakly_leq,
    write_csv,
)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def test_pointset_drops_duplicates_keeping_first():
    s = PointSet([[1, 2], [0, 0], [1, 2]], labels=["a", "b", "c"])
    assert len(s) == 2
    assert s.labels == ("a", "b")
    assert s.points.flags.writeable is False


@pytest.mark.parametrize("bad", [[], [[np.nan, 1.0]], [[np.inf, 0.0]], [[]]])
def test_pointset_rejects_bad_input(bad):
    with pytest.raises(InvalidInputError):
        PointSet(bad)


def test_label_count_must_match():
    with pytest.raises(InvalidInputError):
        PointSet([[1, 2]], labels=["a", "b"])


def test_weak_dominance_is_componentwise_leq():
    assert weakly_leq([1, 2], [1, 2])
    assert not dominates([1, 2], [1, 2])
    assert dominates([1, 1], [1, 2])
    assert not weakly_leq([0, 3], [1, 2])
    with pytest.raises(InvalidInputError):
        weakly_leq([1, 2], [1, 2, 3])


def _nd_scan(a):
    keep = []
    for i in range(len(a)):
        ok = True
        for j in range(len(a)):
            if j == i:
                continue
            if np.all(a[j] <= a[i]) and (np.any(a[j] < a[i]) or j < i):
                ok = False
                break
        if ok:
            keep.append(i)
    return keep


@settings(max_examples=200, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 12), st.integers(1, 4)),
              elements=st.integers(0, 3).map(float)))
def test_nondominated_matches_pairwise_scan(a):
    assert list(nondominated_indices(a)) == _nd_scan(a)


def test_nondominated_filter_keeps_order():
    s = PointSet([[3, 1], [2, 2], [3, 3], [1, 3]])
    assert nondominated_filter(s).points.tolist() == [[3, 1], [2, 2], [1, 3]]


def test_prefilter_removes_covered_and_shadowed():
    p = PointSet([[0, 5], [5, 5]])
    q = PointSet([[1, 6], [3, 3], [4, 4], [1, 4]])
    pre = prefilter_pair(p, q)
    assert pre.p_index.tolist() == [0]
    assert dict(pre.zero_cost_covers) == {0: 0}
    assert pre.q_index.tolist() == [1, 3]
    assert dict(pre.shadowed) == {2: 1}
    assert not pre.fully_covered


def test_prefilter_fully_covered():
    pre = prefilter_pair(PointSet([[0, 0]]), PointSet([[1, 1], [0, 2]]))
    assert pre.fully_covered and pre.q_reduced is None


def test_translation_makes_nonnegative_and_reverts():
    p, q = PointSet([[-1, 2]]), PointSet([[0.5, -3]])
    pt, qt, t = translate_nonnegative(p, q)
    assert t.offset.tolist() == [1, 3]
    assert pt.points.min() >= 0 and qt.points.min() >= 0
    assert np.array_equal(t.revert(pt.points), p.points)


def test_translation_identity_when_already_nonnegative():
    p, q = PointSet([[1, 2]]), PointSet([[0, 0]])
    pt, _, t = translate_nonnegative(p, q)
    assert t.is_identity and pt is p


def test_minmax_normalize():
    assert minmax_normalize([2, 4, 3]).tolist() == [0, 1, 0.5]
    assert minmax_normalize([5, 5, 5]).tolist() == [0, 0, 0]
    with pytest.raises(InvalidInputError):
        minmax_normalize([1])


@settings(max_examples=100, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 8), st.integers(1, 5)), elements=finite))
def test_csv_round_trip_is_bit_exact(a):
    s = PointSet(a)
    buf = io.StringIO()
    write_csv(s, buf)
    buf.seek(0)
    back = read_csv(buf)
    assert back.points.tobytes() == s.points.tobytes()


def test_csv_skips_comments_and_blank_lines(tmp_path):
    f = tmp_path / "a.csv"
    f.write_text("# f1,f2\n\n1,2\n  # note\n3, 4\n")
    assert read_csv(f).points.tolist() == [[1, 2], [3, 4]]


def test_csv_error_names_file_line_column(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("1,2\n3,x\n")
    with pytest.raises(CsvFormatError) as err:
        read_csv(f)
    assert (err.value.line, err.value.column) == (2, 2)
    assert f"{f}:2:2" in str(err.value)


def test_csv_ragged_rows(tmp_path):
    f = tmp_path / "ragged.csv"
    f.write_text("1,2\n3\n")
    with pytest.raises(CsvFormatError, match=":2"):
        read_csv(f)


def test_csv_empty(tmp_path):
    f = tmp_path / "empty.csv"
    f.write_text("# nothing\n")
    with pytest.raises(CsvFormatError):
        read_csv(f)
