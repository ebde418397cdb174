"""Fuzzy ID3 tree growth and the crisp ID3 baseline."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import kernels
from .data import ProjectRecord, to_arrays
from .fuzzy_core import (MAX_SETS, MIN_SETS, ConstantVariableError, FuzzyPartition, TNorm,
                         build_uniform_partition, fuzzify_output, tnorm_apply, tnorm_array)

log = logging.getLogger(__name__)

PURE_TOL = 1e-12
# gains closer than this count as tied; the lower variable index wins
GAIN_TIE_TOL = 1e-12

FORMAT_NAME = "fuzzyid3-tree"
FORMAT_VERSION = 1


class InductionError(ValueError):
    pass


@dataclass(frozen=True)
class InductionConfig:
    tnorm: TNorm = TNorm.PRODUCT
    beta: float = 0.0
    min_node_weight: float = 1e-6
    num_output_classes: int = 5
    default_sets: int = 7
    set_counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.tnorm, str):
            object.__setattr__(self, "tnorm", TNorm.parse(self.tnorm))
        if not (0.0 <= self.beta <= 1.0):
            raise ValueError(f"significance level beta must be in [0, 1], got {self.beta}")
        if not self.min_node_weight > 0:
            raise ValueError("min_node_weight must be positive")
        if not MIN_SETS <= self.num_output_classes <= MAX_SETS:
            raise ValueError(f"number of output classes must be in {MIN_SETS}..{MAX_SETS}")
        for name, m in [("default", self.default_sets), *self.set_counts.items()]:
            if not MIN_SETS <= m <= MAX_SETS:
                raise ValueError(f"fuzzy set count for {name} must be in {MIN_SETS}..{MAX_SETS}, got {m}")

    def sets_for(self, variable: str) -> int:
        return self.set_counts.get(variable, self.default_sets)


@dataclass(frozen=True)
class WeightedExample:
    record_index: int
    node_membership: float
    class_memberships: tuple[float, ...]


@dataclass(frozen=True)
class NodeStatistics:
    proportions: tuple[float, ...]
    entropy: float
    total_weight: float
    empty: bool = False


def class_proportions(examples: Sequence[WeightedExample], t: TNorm, K: int) -> tuple[tuple[float, ...], bool]:
    """Membership-weighted class proportions at a node.

    Returns ``(proportions, empty)``; an empty node (zero class mass) gets the
    uniform vector.
    """
    mass = [0.0] * K
    for ex in examples:
        for k in range(K):
            mass[k] += tnorm_apply(t, ex.class_memberships[k], ex.node_membership)
    total = math.fsum(mass)
    if total <= 0:
        return tuple([1.0 / K] * K), True
    return tuple(m / total for m in mass), False


def fuzzy_entropy(proportions: Sequence[float]) -> float:
    """Base-2 entropy with 0 * log 0 taken as 0, clamped to [0, log2 K]."""
    h = -math.fsum(p * math.log2(p) for p in proportions if p > 0)
    return min(max(h, 0.0), math.log2(len(proportions)))


def node_statistics(examples: Sequence[WeightedExample], t: TNorm, K: int) -> NodeStatistics:
    props, empty = class_proportions(examples, t, K)
    return NodeStatistics(props, fuzzy_entropy(props), math.fsum(ex.node_membership for ex in examples), empty)


def information_gain(node: NodeStatistics, children: Sequence[NodeStatistics]) -> float:
    """Parent entropy minus the weight-averaged child entropy.

    Child weights are membership masses normalised over the children.
    """
    total = math.fsum(c.total_weight for c in children)
    if total <= 0:
        return 0.0
    return node.entropy - math.fsum(c.total_weight / total * c.entropy
                                    for c in children if c.total_weight > 0)


@dataclass(frozen=True)
class TreeNode:
    node_id: int
    path: tuple[tuple[int, int], ...]
    stats: NodeStatistics
    n_retained: int
    representative: float
    split_variable: int | None = None
    gain: float | None = None
    children: tuple["TreeNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.split_variable is None

    def to_dict(self, variables: Sequence[str]) -> dict:
        d = {
            "id": self.node_id,
            "path": [[variables[j], l] for j, l in self.path],
            "n_retained": self.n_retained,
            "total_weight": self.stats.total_weight,
            "entropy": self.stats.entropy,
            "proportions": list(self.stats.proportions),
            "empty": self.stats.empty,
            "representative": self.representative,
        }
        if not self.is_leaf:
            d["split"] = variables[self.split_variable]
            d["gain"] = self.gain
            d["children"] = [c.to_dict(variables) for c in self.children]
        return d

    @classmethod
    def from_dict(cls, d: dict, index: Mapping[str, int]) -> "TreeNode":
        stats = NodeStatistics(tuple(d["proportions"]), d["entropy"], d["total_weight"], d["empty"])
        split = d.get("split")
        return cls(
            node_id=d["id"],
            path=tuple((index[v], l) for v, l in d["path"]),
            stats=stats,
            n_retained=d["n_retained"],
            representative=d["representative"],
            split_variable=None if split is None else index[split],
            gain=d.get("gain"),
            children=tuple(cls.from_dict(c, index) for c in d.get("children", ())),
        )


@dataclass(frozen=True)
class FuzzyTree:
    variables: tuple[str, ...]
    partitions: tuple[FuzzyPartition, ...]
    output_partition: FuzzyPartition
    tnorm: TNorm
    beta: float
    min_node_weight: float
    crisp: bool
    fallback_effort: float
    root: TreeNode

    def nodes(self) -> Iterator[TreeNode]:
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def leaves(self) -> list[TreeNode]:
        return [n for n in self.nodes() if n.is_leaf]

    @property
    def n_nodes(self) -> int:
        return sum(1 for _ in self.nodes())

    @property
    def depth(self) -> int:
        return max(len(n.path) for n in self.nodes())

    def variable_usage(self) -> dict[str, int]:
        """Number of internal nodes splitting on each variable."""
        usage = {v: 0 for v in self.variables}
        for n in self.nodes():
            if not n.is_leaf:
                usage[self.variables[n.split_variable]] += 1
        return usage

    def split_variables(self) -> set[str]:
        return {self.variables[n.split_variable] for n in self.nodes() if not n.is_leaf}

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "config": {
                "tnorm": self.tnorm.value,
                "beta": self.beta,
                "min_node_weight": self.min_node_weight,
                "crisp": self.crisp,
            },
            "variables": list(self.variables),
            "partitions": [p.to_dict() for p in self.partitions],
            "output_partition": self.output_partition.to_dict(),
            "fallback_effort": self.fallback_effort,
            "root": self.root.to_dict(self.variables),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "FuzzyTree":
        if d.get("format") != FORMAT_NAME:
            raise ValueError("not a fuzzyid3 tree model file")
        if d.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported model version {d.get('version')!r}")
        variables = tuple(d["variables"])
        index = {v: i for i, v in enumerate(variables)}
        cfg = d["config"]
        return cls(
            variables=variables,
            partitions=tuple(FuzzyPartition.from_dict(p) for p in d["partitions"]),
            output_partition=FuzzyPartition.from_dict(d["output_partition"]),
            tnorm=TNorm(cfg["tnorm"]),
            beta=cfg["beta"],
            min_node_weight=cfg["min_node_weight"],
            crisp=cfg["crisp"],
            fallback_effort=d["fallback_effort"],
            root=TreeNode.from_dict(d["root"], index),
        )

    @classmethod
    def from_json(cls, text: str) -> "FuzzyTree":
        return cls.from_dict(json.loads(text))


def save_tree(tree: FuzzyTree, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(tree.to_json())


def load_tree(path) -> FuzzyTree:
    with open(path, encoding="utf-8") as fh:
        return FuzzyTree.from_json(fh.read())


def make_partitions(records: Sequence[ProjectRecord], variables: Sequence[str], cfg: InductionConfig,
                    drop_constant: bool = False) -> dict[str, FuzzyPartition]:
    """Uniform partitions spanning each variable's observed range.

    Constant variables raise unless ``drop_constant`` is set, in which case
    they are skipped.
    """
    X, _ = to_arrays(records, variables)
    parts = {}
    for j, name in enumerate(variables):
        try:
            parts[name] = build_uniform_partition(X[:, j].min(), X[:, j].max(), cfg.sets_for(name), name)
        except ConstantVariableError:
            if not drop_constant:
                raise
            log.info("dropping constant variable %s", name)
    return parts


def make_output_partition(records: Sequence[ProjectRecord], cfg: InductionConfig) -> FuzzyPartition:
    return fuzzify_output([r.effort for r in records], cfg.num_output_classes)


class _Grower:
    def __init__(self, X, y, partitions, output_partition, cfg, crisp):
        self.cfg = cfg
        self.t = cfg.tnorm
        self.tcode = cfg.tnorm.code
        self.beta = float(cfg.beta)
        self.y = y
        n, V = X.shape
        self.V = V
        self.set_counts = np.array([len(p) for p in partitions], dtype=np.int64)
        self.var_u = np.zeros((n, V, MAX_SETS))
        for j, p in enumerate(partitions):
            mat = p.crisp_matrix(X[:, j]) if crisp else p.matrix(X[:, j])
            self.var_u[:, j, :len(p)] = mat
        self.class_u = np.ascontiguousarray(
            output_partition.crisp_matrix(y) if crisp else output_partition.matrix(y))
        K = self.class_u.shape[1]
        self.empty_stats = NodeStatistics(tuple([1.0 / K] * K), math.log2(K), 0.0, True)
        self.next_id = 0
        self.negative_gains = 0

    def grow(self, idx, u, path, used, parent_rep) -> TreeNode:
        node_id = self.next_id
        self.next_id += 1
        if len(idx) == 0:
            return TreeNode(node_id, path, self.empty_stats, 0, parent_rep)
        props, h, _, total_m = kernels.node_statistics(idx, u, self.class_u, self.tcode)
        # exact sum, so the stored weight does not depend on the backend's summation order
        total_w = math.fsum(u)
        empty = total_m <= 0
        stats = NodeStatistics(tuple(float(p) for p in props), float(h), total_w, bool(empty))
        if total_w > 0:
            ys = self.y[idx]
            # convex combination; clip the last-ulp rounding back into range
            rep = min(max(math.fsum(u * ys) / total_w, float(ys.min())), float(ys.max()))
        else:
            rep = parent_rep
        candidates = np.array([j for j in range(self.V) if j not in used], dtype=np.int64)
        if (len(idx) == 0 or total_w < self.cfg.min_node_weight
                or h <= PURE_TOL or len(candidates) == 0):
            return TreeNode(node_id, path, stats, len(idx), rep)

        gains = kernels.candidate_gains(idx, u, self.class_u, self.var_u, self.set_counts,
                                        candidates, self.tcode, self.beta, h)
        best = float(np.max(gains))
        pick = int(np.argmax(gains >= best - GAIN_TIE_TOL))
        j, gain = int(candidates[pick]), float(gains[pick])
        if gain < 0:
            self.negative_gains += 1
            log.debug("negative gain %.3g chosen at node %d (variable %d)", gain, node_id, j)

        M = int(self.set_counts[j])
        uc_all = tnorm_array(self.t, u[:, None], self.var_u[idx, j, :M]).T.copy()
        keep_all = (uc_all > 0) & (uc_all >= self.beta)
        used_j = used | {j}
        children = []
        for l in range(M):
            keep = keep_all[l]
            children.append(self.grow(idx[keep], uc_all[l][keep], path + ((j, l),), used_j, rep))
        return TreeNode(node_id, path, stats, len(idx), rep, j, gain, tuple(children))


def _grow(dataset, partitions, output_partition, cfg, crisp) -> FuzzyTree:
    if not dataset:
        raise InductionError("cannot grow a tree from an empty dataset")
    if isinstance(partitions, Mapping):
        variables = tuple(partitions)
        parts = tuple(partitions[v] for v in variables)
    else:
        parts = tuple(partitions)
        variables = tuple(p.variable_name for p in parts)
    for v in variables:
        if v not in dataset[0].attributes:
            raise InductionError(f"variable {v!r} not present in the dataset")
    X, y = to_arrays(dataset, variables)
    for p in parts:
        lo, hi = p.domain
        if not hi > lo:
            raise InductionError(f"degenerate partition for variable {p.variable_name!r}")
    g = _Grower(X, y, parts, output_partition, cfg, crisp)
    n = len(dataset)
    idx = np.arange(n, dtype=np.int64)
    u = np.ones(n)
    fallback = math.fsum(y) / n
    root = g.grow(idx, u, (), frozenset(), fallback)
    if g.negative_gains:
        log.info("%d split(s) chosen with negative gain", g.negative_gains)
    return FuzzyTree(variables, parts, output_partition, cfg.tnorm, float(cfg.beta),
                     float(cfg.min_node_weight), crisp, fallback, root)


def grow_fuzzy_tree(dataset: Sequence[ProjectRecord], partitions, output_partition: FuzzyPartition,
                    cfg: InductionConfig) -> FuzzyTree:
    """Grow a fuzzy ID3 tree.

    ``partitions`` is a mapping variable -> partition (its order fixes the
    variable indices used for tie-breaking) or a sequence of partitions.
    Examples whose membership at a node drops below ``cfg.beta`` (or to zero)
    are removed from that node and its whole subtree.
    """
    return _grow(dataset, partitions, output_partition, cfg, crisp=False)


def grow_crisp_tree(dataset: Sequence[ProjectRecord], partitions, output_partition: FuzzyPartition,
                    cfg: InductionConfig) -> FuzzyTree:
    """Classical ID3 baseline over the same partitions.

    Inputs and effort are mapped to their maximum-membership set (ties to the
    lower index) and the same growth procedure runs on the 0/1 memberships.
    """
    return _grow(dataset, partitions, output_partition, cfg, crisp=True)


def fit(dataset: Sequence[ProjectRecord], variables: Sequence[str], cfg: InductionConfig,
        crisp: bool = False, drop_constant: bool = True) -> FuzzyTree:
    """Build partitions from ``dataset`` and grow a tree on it."""
    parts = make_partitions(dataset, variables, cfg, drop_constant=drop_constant)
    if not parts:
        raise InductionError("every variable is constant on the training data")
    out = make_output_partition(dataset, cfg)
    grow = grow_crisp_tree if crisp else grow_fuzzy_tree
    return grow(dataset, parts, out, cfg)
