"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--records 53] [--repeat 5]

Times the two hot kernels on a root-sized node and a full tree growth per
backend, and checks that both backends agree on the results.
"""

import argparse
import statistics
import time

import numpy as np

from fuzzyid3 import data, kernels
from fuzzyid3.fuzzy_core import TNorm
from fuzzyid3.induction import InductionConfig, fit, make_output_partition, make_partitions


def _inputs(records, cfg):
    names = data.TUKUTUKU.attributes
    parts = list(make_partitions(records, names, cfg).values())
    out = make_output_partition(records, cfg)
    X, y = data.to_arrays(records, [p.variable_name for p in parts])
    n, V = X.shape
    var_u = np.zeros((n, V, 7))
    for j, p in enumerate(parts):
        var_u[:, j, :len(p)] = p.matrix(X[:, j])
    class_u = np.ascontiguousarray(out.matrix(y))
    counts = np.array([len(p) for p in parts], dtype=np.int64)
    return class_u, var_u, counts


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--records", type=int, default=53)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    records = data.generate_synthetic(data.TUKUTUKU, args.records, seed=args.seed)
    cfg = InductionConfig(tnorm=TNorm.PRODUCT, beta=0.0)
    class_u, var_u, counts = _inputs(records, cfg)
    n = len(records)
    idx = np.arange(n, dtype=np.int64)
    u = np.random.default_rng(args.seed).uniform(0.2, 1.0, n)
    cands = np.arange(var_u.shape[1], dtype=np.int64)

    backends = kernels.available_backends()
    print(f"records={n} variables={var_u.shape[1]} active backend={kernels.BACKEND}")
    print(f"{'backend':<8} {'node_statistics':>16} {'candidate_gains':>16} {'grow tree':>12}")
    results = {}
    for name, mod in backends.items():
        t_ns, _, ns = _best(lambda: mod.node_statistics(idx, u, class_u, 1), args.repeat * 200)
        t_cg, _, cg = _best(lambda: mod.candidate_gains(idx, u, class_u, var_u, counts, cands, 1, 0.0, ns[1]),
                            args.repeat * 20)
        # swap the dispatcher's functions so the whole grower runs on this backend
        saved = kernels.node_statistics, kernels.candidate_gains
        kernels.node_statistics, kernels.candidate_gains = mod.node_statistics, mod.candidate_gains
        try:
            t_tree, _, tree = _best(lambda: fit(records, data.TUKUTUKU.attributes, cfg), max(1, args.repeat // 2))
        finally:
            kernels.node_statistics, kernels.candidate_gains = saved
        results[name] = (ns, cg, tree)
        print(f"{name:<8} {t_ns * 1e6:>13.1f} us {t_cg * 1e6:>13.1f} us {t_tree:>10.2f} s"
              f"   ({tree.n_nodes} nodes)")

    if len(results) == 2:
        (ns_a, cg_a, tree_a), (ns_b, cg_b, tree_b) = results.values()
        dev = max(float(np.max(np.abs(ns_a[0] - ns_b[0]))), abs(ns_a[1] - ns_b[1]),
                  float(np.max(np.abs(cg_a - cg_b))))
        print(f"max kernel deviation: {dev:.3e}")
        print(f"trees identical: {tree_a.to_json() == tree_b.to_json()}")
    else:
        print("compiled extension not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
