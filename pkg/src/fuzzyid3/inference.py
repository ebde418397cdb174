"""Effort prediction from a grown tree."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .induction import FuzzyTree, TreeNode
from .data import DataError, parse_cell


class MissingAttributeError(DataError, KeyError):
    def __str__(self):
        return self.args[0]


@dataclass(frozen=True)
class FiringAssignment:
    leaf_id: int
    strength: float


def _vector(tree: FuzzyTree, x) -> list[float | None]:
    """Values in tree-variable order; ``None`` for variables the tree never splits on."""
    needed = tree.split_variables()
    if isinstance(x, Mapping):
        missing = sorted(v for v in needed if v not in x)
        if missing:
            raise MissingAttributeError(f"missing attribute value(s): {', '.join(missing)}")
        return [float(x[v]) if v in x else None for v in tree.variables]
    x = list(x)
    if len(x) != len(tree.variables):
        raise MissingAttributeError(
            f"expected {len(tree.variables)} attribute values in order {tree.variables}, got {len(x)}")
    return [float(v) for v in x]


def _degree(tree: FuzzyTree, j: int, l: int, value: float) -> float:
    part = tree.partitions[j]
    if tree.crisp:
        return 1.0 if part.crisp_index(value) == l else 0.0
    return part.sets[l](value)


def fire(tree: FuzzyTree, x) -> list[FiringAssignment]:
    """Leaves reached by ``x`` with their nonzero firing strengths.

    ``x`` is a mapping of variable name to value or a sequence in
    ``tree.variables`` order.
    """
    values = _vector(tree, x)
    t = tree.tnorm
    out = []

    def walk(node: TreeNode, s: float):
        if node.is_leaf:
            out.append(FiringAssignment(node.node_id, s))
            return
        v = values[node.split_variable]
        for l, child in enumerate(node.children):
            d = _degree(tree, node.split_variable, l, v)
            if d > 0:
                walk(child, t(s, d))

    walk(tree.root, 1.0)
    return [f for f in out if f.strength > 0]


def predict(tree: FuzzyTree, x) -> float:
    """Firing-strength weighted average of leaf representative efforts."""
    firing = fire(tree, x)
    reps = _leaf_reps(tree)
    total = math.fsum(f.strength for f in firing)
    if total <= 0:
        return tree.fallback_effort
    vals = [reps[f.leaf_id] for f in firing]
    est = math.fsum(f.strength * v for f, v in zip(firing, vals)) / total
    # convex combination; clip the last-ulp rounding back into range
    return min(max(est, min(vals)), max(vals))


def _leaf_reps(tree: FuzzyTree) -> dict[int, float]:
    cache = getattr(tree, "_leaf_reps", None)
    if cache is None:
        cache = {n.node_id: n.representative for n in tree.leaves()}
        object.__setattr__(tree, "_leaf_reps", cache)
    return cache


def predict_many(tree: FuzzyTree, rows: Sequence) -> list[float]:
    return [predict(tree, x) for x in rows]


def predict_csv(tree: FuzzyTree, in_path, out_path, column: str = "predicted_effort") -> int:
    """Copy ``in_path`` to ``out_path`` with a predicted-effort column appended.

    Only the columns the tree splits on must be present and numeric; other
    columns pass through untouched. Returns the number of rows predicted.
    """
    with open(in_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or not any(h.strip() for h in rows[0]):
        raise DataError(f"{in_path}: file is empty")
    header = [h.strip() for h in rows[0]]
    needed = sorted(tree.split_variables())
    missing = [v for v in needed if v not in header]
    if missing:
        raise MissingAttributeError(f"missing attribute column(s): {', '.join(missing)}")
    pos = {v: header.index(v) for v in needed}
    preds = []
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]
    for rownum, cells in enumerate(body, start=1):
        x = {v: parse_cell(cells[i] if i < len(cells) else "", rownum, v) for v, i in pos.items()}
        preds.append(predict(tree, x))
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(rows[0] + [column])
        for cells, p in zip(body, preds):
            w.writerow(cells + [repr(p)])
    return len(preds)
