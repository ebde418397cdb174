import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzyid3.fuzzy_core import (LEFT, RIGHT, TRIANGLE, ConstantTargetError, ConstantVariableError,
                                 FuzzyPartition, MembershipFunction, TNorm, build_uniform_partition,
                                 fuzzify_output, membership, tnorm_apply)


def test_triangle_peak_and_midpoint():
    tri = MembershipFunction(TRIANGLE, (0, 5, 10))
    assert membership(tri, 5) == 1.0
    assert membership(tri, 2.5) == 0.5
    assert membership(tri, 7.5) == 0.5
    assert membership(tri, -1) == 0.0
    assert membership(tri, 11) == 0.0


def test_shoulders_saturate():
    left = MembershipFunction(LEFT, (0, 5))
    right = MembershipFunction(RIGHT, (0, 5))
    assert membership(left, -100) == 1.0
    assert membership(left, 100) == 0.0
    assert membership(right, 100) == 1.0
    assert membership(right, -100) == 0.0


def test_membership_vectorised_matches_scalar():
    tri = MembershipFunction(TRIANGLE, (1, 2, 4))
    xs = np.linspace(-1, 6, 29)
    assert np.array_equal(membership(tri, xs), [membership(tri, x) for x in xs])


@pytest.mark.parametrize("kind,bp", [(TRIANGLE, (0, 5)), (LEFT, (0, 1, 2)), (TRIANGLE, (0, 5, 5)),
                                     (RIGHT, (3, 1)), ("gauss", (0, 1))])
def test_malformed_membership_functions_rejected(kind, bp):
    with pytest.raises(ValueError):
        MembershipFunction(kind, bp)


def test_two_set_partition_crosses_at_half():
    p = build_uniform_partition(0, 10, 2)
    assert list(p.degrees(5)) == [0.5, 0.5]


def test_three_set_partition_sum_at_3_7():
    p = build_uniform_partition(0, 10, 3)
    assert p.peaks == (0.0, 5.0, 10.0)
    # left (5-3.7)/5, middle 3.7/5, right 0
    assert p.degrees(3.7) == pytest.approx([0.26, 0.74, 0.0], abs=1e-15)
    assert sum(p.degrees(3.7)) == pytest.approx(1.0, abs=1e-12)


def test_constant_domain_is_error():
    with pytest.raises(ConstantVariableError, match="constant variable"):
        build_uniform_partition(4, 4, 3)


@pytest.mark.parametrize("m", [1, 8])
def test_set_count_bounds(m):
    with pytest.raises(ValueError):
        build_uniform_partition(0, 1, m)


def test_partition_requires_shoulders():
    tri = MembershipFunction(TRIANGLE, (0, 1, 2))
    with pytest.raises(ValueError):
        FuzzyPartition("x", (tri, tri), (0, 2))


def test_crisp_index_ties_go_low():
    p = build_uniform_partition(0, 10, 2)
    assert p.crisp_index(5.0) == 0
    assert p.crisp_index(5.0001) == 1
    assert p.crisp_matrix([5.0, 9.0]).tolist() == [[1.0, 0.0], [0.0, 1.0]]


def test_partition_dict_roundtrip():
    p = build_uniform_partition(0.1, 0.7, 7, "v")
    assert FuzzyPartition.from_dict(p.to_dict()) == p


def test_tnorm_definitions():
    assert tnorm_apply(TNorm.MINIMUM, 0.3, 0.7) == 0.3
    assert tnorm_apply(TNorm.PRODUCT, 0.3, 0.7) == pytest.approx(0.21, abs=1e-15)
    for t in TNorm:
        assert tnorm_apply(t, 0.42, 1.0) == 0.42
        assert tnorm_apply(t, 0.42, 0.0) == 0.0


@pytest.mark.parametrize("a,b", [(-0.1, 0.5), (0.5, 1.2), (float("nan"), 0.5)])
def test_tnorm_rejects_out_of_range(a, b):
    with pytest.raises(ValueError):
        tnorm_apply(TNorm.PRODUCT, a, b)


def test_tnorm_parse():
    assert TNorm.parse("MIN") is TNorm.MINIMUM
    assert TNorm.parse("product") is TNorm.PRODUCT
    with pytest.raises(ValueError):
        TNorm.parse("yager")


def test_fuzzify_output_peaks():
    p = fuzzify_output(np.linspace(10, 110, 17), 5)
    assert p.peaks == (10.0, 35.0, 60.0, 85.0, 110.0)
    assert p.representatives == p.peaks


def test_fuzzify_output_midpoint_two_classes():
    p = fuzzify_output([10, 30], 2)
    assert list(p.degrees(20.0)) == [0.5, 0.5]


def test_fuzzify_output_constant():
    with pytest.raises(ConstantTargetError, match="constant target"):
        fuzzify_output([42, 42, 42], 3)


domains = st.tuples(st.floats(-1e6, 1e6), st.floats(1e-3, 1e6)).map(lambda t: (t[0], t[0] + t[1]))


@settings(max_examples=200, deadline=None)
@given(domains, st.integers(2, 7), st.lists(st.floats(0, 1), min_size=1, max_size=20))
def test_uniform_partition_is_strong(dom, m, fracs):
    lo, hi = dom
    p = build_uniform_partition(lo, hi, m)
    assert p.sets[0].kind == LEFT and p.sets[-1].kind == RIGHT
    assert all(s.kind == TRIANGLE for s in p.sets[1:-1])
    assert all(b > a for a, b in zip(p.peaks, p.peaks[1:]))
    for f in fracs:
        x = lo + f * (hi - lo)
        d = p.degrees(x)
        assert np.all((d >= 0) & (d <= 1))
        assert abs(d.sum() - 1.0) <= 1e-9


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_tnorm_algebra(a, b, c):
    for t in TNorm:
        ab = tnorm_apply(t, a, b)
        assert 0.0 <= ab <= 1.0
        assert ab == tnorm_apply(t, b, a)
        if b <= c:
            assert ab <= tnorm_apply(t, a, c)
    assert tnorm_apply(TNorm.PRODUCT, a, b) <= tnorm_apply(TNorm.MINIMUM, a, b)


@given(st.floats(-1e9, 1e9))
def test_membership_total_and_bounded(x):
    for mf in build_uniform_partition(-10, 10, 5).sets:
        assert 0.0 <= mf(x) <= 1.0
