"""Independent reference implementations used as test oracles.

Nothing here imports fuzzyid3 internals: classical ID3 works on integer
category codes and plain counts, and the metrics are naive loops.
"""

import math

TIE_TOL = 1e-12


def shannon(counts):
    n = sum(counts)
    h = 0.0
    for c in counts:
        if c:
            h -= (c / n) * math.log2(c / n)
    return max(h, 0.0)


def classic_id3(rows, classes, efforts, n_values, n_classes, used=frozenset(), parent_mean=None):
    """Multiway classical ID3 over categorical codes.

    Returns nested tuples: ``("leaf", mean_effort)`` or
    ``("split", attribute, [child, ...])`` with one child per category value.
    Empty branches inherit the parent's mean effort.
    """
    if not rows:
        return ("leaf", parent_mean)
    mean = sum(efforts) / len(efforts)
    counts = [0] * n_classes
    for c in classes:
        counts[c] += 1
    h = shannon(counts)
    free = [a for a in range(len(n_values)) if a not in used]
    if h <= 1e-12 or not free:
        return ("leaf", mean)
    best_a, best_g = None, None
    gains = []
    for a in free:
        rem = 0.0
        for v in range(n_values[a]):
            sub = [classes[i] for i, r in enumerate(rows) if r[a] == v]
            if sub:
                cc = [0] * n_classes
                for c in sub:
                    cc[c] += 1
                rem += len(sub) / len(rows) * shannon(cc)
        gains.append((a, h - rem))
    top = max(g for _, g in gains)
    best_a = next(a for a, g in gains if g >= top - TIE_TOL)
    children = []
    for v in range(n_values[best_a]):
        keep = [i for i, r in enumerate(rows) if r[best_a] == v]
        children.append(classic_id3([rows[i] for i in keep], [classes[i] for i in keep],
                                    [efforts[i] for i in keep], n_values, n_classes,
                                    used | {best_a}, mean))
    return ("split", best_a, children)


def classic_descend(tree, codes):
    while tree[0] == "split":
        tree = tree[2][codes[tree[1]]]
    return tree[1]


def naive_mmre(actuals, estimates):
    total = 0.0
    for a, e in zip(actuals, estimates):
        d = a - e
        if d < 0:
            d = -d
        total += d / a
    return total / len(actuals) * 100


def naive_pred25(actuals, estimates):
    hits = 0
    for a, e in zip(actuals, estimates):
        d = a - e
        if d < 0:
            d = -d
        if 4 * d <= a:  # |a - e| / a <= 1/4
            hits += 1
    return hits * 100 / len(actuals)
