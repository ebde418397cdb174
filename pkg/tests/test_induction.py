import json
import math

import numpy as np
import pytest

from fuzzyid3 import data
from fuzzyid3.data import ProjectRecord
from fuzzyid3.fuzzy_core import TNorm, build_uniform_partition
from fuzzyid3.induction import (FuzzyTree, InductionConfig, InductionError, NodeStatistics, WeightedExample,
                                class_proportions, fit, fuzzy_entropy, grow_crisp_tree, grow_fuzzy_tree,
                                information_gain, load_tree, save_tree)


def rec(effort, **attrs):
    return ProjectRecord({k: float(v) for k, v in attrs.items()}, float(effort))


def binary_parts(*names):
    return {n: build_uniform_partition(0, 1, 2, n) for n in names}


# --- proportions, entropy and gain building blocks ------------------------------

@pytest.mark.parametrize("t", list(TNorm))
def test_proportions_symmetric_crisp(t):
    ex = [WeightedExample(0, 1.0, (1.0, 0.0)), WeightedExample(1, 1.0, (0.0, 1.0))]
    props, empty = class_proportions(ex, t, 2)
    assert props == (0.5, 0.5) and not empty


def test_proportions_product():
    # numerators 0.15 and 0.35
    props, _ = class_proportions([WeightedExample(0, 0.5, (0.3, 0.7))], TNorm.PRODUCT, 2)
    assert props == pytest.approx((0.3, 0.7), abs=1e-15)


def test_proportions_minimum():
    # numerators min(0.3, 0.5)=0.3 and min(0.7, 0.5)=0.5
    props, _ = class_proportions([WeightedExample(0, 0.5, (0.3, 0.7))], TNorm.MINIMUM, 2)
    assert props == pytest.approx((0.375, 0.625), abs=1e-15)


def test_proportions_empty_node_is_uniform():
    props, empty = class_proportions([WeightedExample(0, 0.0, (0.2, 0.8))], TNorm.PRODUCT, 2)
    assert empty and props == (0.5, 0.5)


@pytest.mark.parametrize("p,h", [((1.0, 0.0), 0.0), ((0.5, 0.5), 1.0), ((0.25,) * 4, 2.0)])
def test_entropy_values(p, h):
    assert fuzzy_entropy(p) == h


def _ns(h, w):
    return NodeStatistics((), h, w)


def test_gain_examples():
    assert information_gain(_ns(1.0, 2), [_ns(0.0, 1), _ns(0.0, 1)]) == 1.0
    assert information_gain(_ns(1.0, 2), [_ns(1.0, 2)]) == 0.0
    # 1 - (0.75 * 0.8 + 0.25 * 0.2)
    assert information_gain(_ns(1.0, 4), [_ns(0.8, 3), _ns(0.2, 1)]) == pytest.approx(0.35, abs=1e-15)
    assert information_gain(_ns(1.0, 0), [_ns(0.3, 0), _ns(0.9, 0)]) == 0.0


# --- growth ------------------------------------------------------------------

XOR = [rec(10, a=0, b=0), rec(20, a=0, b=1), rec(20, a=1, b=0), rec(10, a=1, b=1)]


@pytest.mark.parametrize("t", list(TNorm))
def test_xor_needs_both_variables(t):
    out = build_uniform_partition(10, 20, 2, "effort")
    tree = grow_fuzzy_tree(XOR, binary_parts("a", "b"), out, InductionConfig(tnorm=t))
    root = tree.root
    # both root splits have zero gain; the tie goes to the first variable
    assert root.split_variable == 0 and root.gain == pytest.approx(0.0, abs=1e-12)
    assert tree.depth == 2
    for child in root.children:
        assert child.split_variable == 1
        assert child.gain == pytest.approx(1.0)
        assert all(g.is_leaf and g.stats.entropy == 0 for g in child.children)
    assert sorted(l.representative for l in tree.leaves()) == [10, 10, 20, 20]


def test_beta_one_keeps_only_peak_examples():
    recs = [rec(10, a=0.0), rec(15, a=0.25), rec(20, a=0.5), rec(30, a=1.0)]
    parts = {"a": build_uniform_partition(0, 1, 3, "a")}
    out = build_uniform_partition(10, 30, 3, "effort")
    tree = grow_fuzzy_tree(recs, parts, out, InductionConfig(beta=1.0))
    assert tree.root.n_retained == 4
    assert [c.n_retained for c in tree.root.children] == [1, 1, 1]
    assert [c.representative for c in tree.root.children] == [10, 20, 30]


def test_pure_dataset_single_leaf():
    # every effort sits on the saturated part of the first class
    recs = [rec(10, a=0), rec(10.5, a=1), rec(40, a=0.5)]
    out = build_uniform_partition(50, 1000, 5, "effort")
    tree = grow_fuzzy_tree(recs, binary_parts("a"), out, InductionConfig())
    assert tree.root.is_leaf and tree.root.stats.entropy == 0.0
    assert tree.root.representative == pytest.approx((10 + 10.5 + 40) / 3)


def test_empty_dataset_rejected():
    with pytest.raises(InductionError):
        grow_fuzzy_tree([], binary_parts("a"), build_uniform_partition(0, 1, 2), InductionConfig())


def test_crisp_tie_goes_to_lower_set():
    recs = [rec(10, a=0.5), rec(20, a=1.0), rec(20, a=0.0)]
    out = build_uniform_partition(10, 20, 2, "effort")
    tree = grow_crisp_tree(recs, binary_parts("a"), out, InductionConfig())
    low, high = tree.root.children
    assert low.n_retained == 2 and high.n_retained == 1
    assert high.representative == 20.0 and low.representative == 15.0


def test_crisp_single_example():
    out = build_uniform_partition(0, 50, 2, "effort")
    tree = grow_crisp_tree([rec(42, a=0.3)], binary_parts("a"), out, InductionConfig())
    assert tree.root.is_leaf and tree.root.representative == 42.0
    assert tree.crisp


def test_empty_child_inherits_parent_representative():
    recs = [rec(10, a=0), rec(20, a=1)]
    parts = {"a": build_uniform_partition(0, 2, 3, "a")}
    tree = grow_fuzzy_tree(recs, parts, build_uniform_partition(10, 20, 2), InductionConfig())
    assert tree.root.split_variable == 0
    empty = tree.root.children[2]
    assert empty.is_leaf and empty.n_retained == 0 and empty.stats.empty
    assert empty.representative == tree.root.representative == 15.0


def test_invariants_on_synthetic(tukutuku53):
    for t in TNorm:
        for beta in (0.0, 0.3, 0.8):
            tree = fit(tukutuku53, data.TUKUTUKU.attributes, InductionConfig(tnorm=t, beta=beta))
            lo = min(r.effort for r in tukutuku53)
            hi = max(r.effort for r in tukutuku53)
            K = len(tree.output_partition)
            for node in tree.nodes():
                vars_on_path = [j for j, _ in node.path]
                assert len(vars_on_path) == len(set(vars_on_path))
                if not node.is_leaf:
                    assert len(node.children) == len(tree.partitions[node.split_variable])
                    assert node.split_variable not in vars_on_path
                if not node.stats.empty:
                    assert abs(sum(node.stats.proportions) - 1) <= 1e-9
                assert 0.0 <= node.stats.entropy <= math.log2(K)
                assert lo <= node.representative <= hi


def test_growth_is_deterministic_and_roundtrips(tukutuku53, tmp_path):
    cfg = InductionConfig(tnorm=TNorm.MINIMUM, beta=0.4)
    a = fit(tukutuku53, data.TUKUTUKU.attributes, cfg)
    b = fit(tukutuku53, data.TUKUTUKU.attributes, cfg)
    assert a.to_json() == b.to_json()
    save_tree(a, tmp_path / "m.json")
    back = load_tree(tmp_path / "m.json")
    assert back == a
    assert back.to_json() == a.to_json()


def test_model_file_is_stable_structured_text(tukutuku53):
    tree = fit(tukutuku53[:10], data.TUKUTUKU.attributes, InductionConfig(beta=0.5))
    d = json.loads(tree.to_json())
    assert list(d) == ["format", "version", "config", "variables", "partitions",
                       "output_partition", "fallback_effort", "root"]
    assert d["format"] == "fuzzyid3-tree"


def test_bad_model_file_rejected():
    with pytest.raises(ValueError):
        FuzzyTree.from_json('{"format": "something-else"}')


@pytest.mark.parametrize("kw", [dict(beta=1.2), dict(beta=-0.1), dict(num_output_classes=8),
                                dict(default_sets=1), dict(min_node_weight=0), dict(set_counts={"x": 9})])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        InductionConfig(**kw)


def test_fit_drops_constant_variables():
    recs = [rec(10, a=0, k=3), rec(20, a=1, k=3), rec(30, a=2, k=3)]
    tree = fit(recs, ["a", "k"], InductionConfig())
    assert tree.variables == ("a",)
