"""Pure numpy implementation of the node-statistics kernels.

Used when the compiled extension is unavailable, or forced with
``FUZZYID3_BACKEND=python``.
"""

import numpy as np


def _tn(tcode, a, b):
    return np.minimum(a, b) if tcode == 0 else a * b


def _entropy_rows(mass):
    """Base-2 entropy of each row of a class-mass matrix; empty rows get log2(K)."""
    K = mass.shape[-1]
    total = mass.sum(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(total > 0, mass / np.where(total > 0, total, 1.0), 1.0 / K)
        terms = np.where(p > 0, -p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return np.clip(terms.sum(axis=-1), 0.0, np.log2(K)), total[..., 0]


def node_statistics(idx, u, class_u, tcode):
    cu = class_u[idx]
    mass = _tn(tcode, cu, u[:, None]).sum(axis=0)
    h, total_m = _entropy_rows(mass[None, :])
    total_m = float(total_m[0])
    K = class_u.shape[1]
    props = mass / total_m if total_m > 0 else np.full(K, 1.0 / K)
    return props, float(h[0]), float(u.sum()), total_m


def candidate_gains(idx, u, class_u, var_u, set_counts, candidates, tcode, beta, parent_entropy):
    cu = class_u[idx]
    gains = np.zeros(len(candidates))
    for c, j in enumerate(candidates):
        M = int(set_counts[j])
        uc = _tn(tcode, u[:, None], var_u[idx, j, :M])
        uc = np.where((uc > 0) & (uc >= beta), uc, 0.0)
        weight = uc.sum(axis=0)
        wsum = weight.sum()
        if wsum <= 0:
            continue
        # (M, K) membership-weighted class mass of each child
        mass = _tn(tcode, uc.T[:, :, None], cu[None, :, :]).sum(axis=1)
        h, _ = _entropy_rows(mass)
        gains[c] = parent_entropy - float(np.sum(np.where(weight > 0, weight / wsum * h, 0.0)))
    return gains
