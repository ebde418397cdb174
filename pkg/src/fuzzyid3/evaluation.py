"""Accuracy metrics, holdout splits, the beta x t-norm sweep and model comparison."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .data import ProjectRecord
from .fuzzy_core import TNorm
from .induction import FuzzyTree, InductionConfig, fit
from .inference import predict

MMRE_ACCEPTABLE = 25.0
PRED25_ACCEPTABLE = 75.0

DEFAULT_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))
DEFAULT_TNORMS = (TNorm.PRODUCT, TNorm.MINIMUM)
MODEL_LABELS = {TNorm.PRODUCT: "Model 1", TNorm.MINIMUM: "Model 2"}


def mre(actual: float, estimated: float) -> float:
    if not actual > 0:
        raise ValueError(f"non-positive actual effort: {actual!r}")
    return abs(actual - estimated) / actual


def _mres(pairs) -> list[float]:
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one (actual, estimated) pair")
    return [mre(a, e) for a, e in pairs]


def mmre(pairs: Iterable[tuple[float, float]]) -> float:
    """Mean magnitude of relative error, in percent."""
    m = _mres(pairs)
    return math.fsum(m) / len(m) * 100.0


def pred(pairs: Iterable[tuple[float, float]], p: float = 25.0) -> float:
    """Percentage of estimates whose MRE is at most ``p`` percent."""
    if p < 0:
        raise ValueError("p must be non-negative")
    m = _mres(pairs)
    return 100.0 * sum(1 for v in m if v <= p / 100.0) / len(m)


def mmre_acceptable(value: float) -> bool:
    return value <= MMRE_ACCEPTABLE


def pred25_acceptable(value: float) -> bool:
    return value >= PRED25_ACCEPTABLE


@dataclass(frozen=True)
class ProjectError:
    record_index: int
    actual: float
    estimated: float
    mre: float


@dataclass(frozen=True)
class EvaluationReport:
    per_project: tuple[ProjectError, ...]
    mmre: float
    pred25: float
    config: dict = field(default_factory=dict)

    @property
    def mmre_acceptable(self) -> bool:
        return mmre_acceptable(self.mmre)

    @property
    def pred25_acceptable(self) -> bool:
        return pred25_acceptable(self.pred25)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "mmre": self.mmre,
            "pred25": self.pred25,
            "mmre_acceptable": self.mmre_acceptable,
            "pred25_acceptable": self.pred25_acceptable,
            "per_project": [vars(p) for p in self.per_project],
        }

    def render_text(self) -> str:
        lines = [f"# {k}: {v}" for k, v in self.config.items()]
        lines.append(f"N         {len(self.per_project)}")
        lines.append(f"MMRE      {self.mmre:.2f}  ({'acceptable' if self.mmre_acceptable else 'not acceptable'}, target <= 25)")
        lines.append(f"Pred(25)  {self.pred25:.2f}  ({'acceptable' if self.pred25_acceptable else 'not acceptable'}, target >= 75)")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["record", "actual_effort", "estimated_effort", "mre"])
        for p in self.per_project:
            w.writerow([p.record_index, repr(p.actual), repr(p.estimated), repr(p.mre)])
        return buf.getvalue()


def report_from_pairs(pairs: Sequence[tuple[float, float]], indices: Sequence[int] | None = None,
                      config: dict | None = None) -> EvaluationReport:
    pairs = list(pairs)
    if indices is None:
        indices = range(1, len(pairs) + 1)
    per = tuple(ProjectError(int(i), float(a), float(e), mre(a, e)) for i, (a, e) in zip(indices, pairs))
    return EvaluationReport(per, mmre(pairs), pred(pairs, 25.0), dict(config or {}))


def evaluate(tree: FuzzyTree, records: Sequence[ProjectRecord], config: dict | None = None) -> EvaluationReport:
    pairs = [(r.effort, predict(tree, r.attributes)) for r in records]
    indices = [r.row if r.row is not None else i + 1 for i, r in enumerate(records)]
    return report_from_pairs(pairs, indices, config)


# --- holdout -----------------------------------------------------------------

def records_fingerprint(train: Sequence[ProjectRecord], test: Sequence[ProjectRecord]) -> str:
    h = hashlib.sha256()
    for tag, part in (("train", train), ("test", test)):
        h.update(tag.encode())
        for r in part:
            h.update(repr((r.row, r.effort, sorted(r.attributes.items()))).encode())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class Split:
    train: tuple[ProjectRecord, ...]
    test: tuple[ProjectRecord, ...]
    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]
    train_fraction: float
    seed: int

    def __iter__(self):
        # unpacks as (train, test)
        return iter((list(self.train), list(self.test)))

    @property
    def fingerprint(self) -> str:
        """Digest of the train/test record assignment; equal fingerprints mean equal splits."""
        return records_fingerprint(self.train, self.test)

    def describe(self) -> str:
        return f"holdout {self.train_fraction:g} seed={self.seed} ({len(self.train)} train / {len(self.test)} test)"


def holdout_split(dataset: Sequence[ProjectRecord], train_fraction: float = 0.7, seed: int = 0) -> Split:
    """Seeded permutation of the dataset, cut into train and test prefixes."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(dataset)
    n_train = int(math.floor(n * train_fraction + 0.5))
    if n < 2 or n_train < 1 or n_train > n - 1:
        raise ValueError(f"a {train_fraction:g} split of {n} record(s) leaves an empty train or test set")
    perm = np.random.default_rng(np.random.PCG64(seed)).permutation(n)
    tr, te = sorted(perm[:n_train].tolist()), sorted(perm[n_train:].tolist())
    return Split(tuple(dataset[i] for i in tr), tuple(dataset[i] for i in te),
                 tuple(tr), tuple(te), float(train_fraction), int(seed))


# --- sweep -------------------------------------------------------------------

@dataclass(frozen=True)
class CellResult:
    beta: float
    tnorm: TNorm
    mmre: float | None = None
    pred25: float | None = None
    error: str | None = None
    n_leaves: int | None = None
    split_fingerprint: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_cell(args) -> CellResult:
    train, test, variables, cfg, crisp = args
    fp = records_fingerprint(train, test)
    try:
        tree = fit(train, variables, cfg, crisp=crisp)
        rep = evaluate(tree, test)
    except Exception as exc:  # noqa: BLE001 - a failed cell must not abort the sweep
        return CellResult(cfg.beta, cfg.tnorm, error=f"{type(exc).__name__}: {exc}", split_fingerprint=fp)
    return CellResult(cfg.beta, cfg.tnorm, rep.mmre, rep.pred25, n_leaves=len(tree.leaves()), split_fingerprint=fp)


def _eval_sets(split: Split, eval_on: str):
    if eval_on == "test":
        return list(split.train), list(split.test)
    if eval_on == "train":
        return list(split.train), list(split.train)
    raise ValueError(f"eval_on must be 'test' or 'train', got {eval_on!r}")


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


@dataclass(frozen=True)
class SweepTable:
    betas: tuple[float, ...]
    tnorms: tuple[TNorm, ...]
    cells: dict
    meta: dict

    def cell(self, beta: float, tnorm: TNorm) -> CellResult:
        return self.cells[(beta, tnorm)]

    def render_text(self) -> str:
        head = [f"# {k}: {v}" for k, v in self.meta.items()]
        groups = [f"{MODEL_LABELS.get(t, t.label)}: T-norm = {t.label}" for t in self.tnorms]
        w0, wg = 22, 30
        lines = head + [
            "Significant level (β)".ljust(w0) + "".join(g.ljust(wg) for g in groups),
            "".ljust(w0) + "".join(("MMRE".rjust(10) + "Pred(25)".rjust(10)).ljust(wg) for _ in groups),
        ]
        failures = []
        for b in self.betas:
            row = f"{b:g}".ljust(w0)
            for t in self.tnorms:
                c = self.cells[(b, t)]
                if c.ok:
                    row += (f"{c.mmre:10.2f}" + f"{c.pred25:10.2f}").ljust(wg)
                else:
                    row += ("FAILED".rjust(10) + "FAILED".rjust(10)).ljust(wg)
                    failures.append(f"# failed beta={b:g} {t.label}: {c.error}")
            lines.append(row.rstrip())
        return "\n".join(lines + failures) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["beta"]
        for t in self.tnorms:
            tag = f"{MODEL_LABELS.get(t, t.label).replace(' ', '').lower()}_{t.label.lower()}"
            header += [f"{tag}_mmre", f"{tag}_pred25"]
        w.writerow(header + ["errors"])
        for b in self.betas:
            row, errs = [repr(b)], []
            for t in self.tnorms:
                c = self.cells[(b, t)]
                if c.ok:
                    row += [repr(c.mmre), repr(c.pred25)]
                else:
                    row += ["FAILED", "FAILED"]
                    errs.append(f"{t.label}: {c.error}")
            w.writerow(row + ["; ".join(errs)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "meta": self.meta,
            "rows": [
                {"beta": b, **{t.label.lower(): {"model": MODEL_LABELS.get(t, t.label),
                                                   "mmre": self.cells[(b, t)].mmre,
                                                   "pred25": self.cells[(b, t)].pred25,
                                                   "error": self.cells[(b, t)].error}
                               for t in self.tnorms}}
                for b in self.betas
            ],
        }


def run_sweep(dataset: Sequence[ProjectRecord], variables: Sequence[str], grid: Sequence[float] = DEFAULT_GRID,
              tnorms: Sequence[TNorm] = DEFAULT_TNORMS, cfg: InductionConfig | None = None,
              split: Split | None = None, eval_on: str = "test", workers: int = 1) -> SweepTable:
    """Grow and score one tree per (beta, t-norm) cell on a shared split.

    Rows come out in ascending beta; columns keep the order of ``tnorms``.
    A cell whose induction fails records the reason and the sweep goes on.
    """
    cfg = cfg or InductionConfig()
    grid = sorted(float(b) for b in grid)
    if not grid:
        raise ValueError("beta grid is empty")
    for b in grid:
        if not 0.0 <= b <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {b}")
    tnorms = tuple(tnorms)
    if split is None:
        split = holdout_split(dataset, 0.7, 0)
    train, test = _eval_sets(split, eval_on)
    jobs = [(train, test, tuple(variables), replace(cfg, beta=b, tnorm=t), False) for b in grid for t in tnorms]
    results = _map(_run_cell, jobs, workers)
    cells = {(r.beta, r.tnorm): r for r in results}
    meta = {
        "split": split.describe(),
        "split_fingerprint": split.fingerprint,
        "seed": split.seed,
        "evaluated_on": eval_on,
        "classes": cfg.num_output_classes,
        "sets": cfg.default_sets,
    }
    if cfg.set_counts:
        meta["set_overrides"] = ",".join(f"{k}={v}" for k, v in cfg.set_counts.items())
    return SweepTable(tuple(grid), tnorms, cells, meta)


# --- crisp vs fuzzy ----------------------------------------------------------

def improvement(crisp_mmre: float, fuzzy_mmre: float) -> float:
    """Relative MMRE reduction of a fuzzy model over the crisp one, in percent."""
    if crisp_mmre == 0:
        return 0.0 if fuzzy_mmre == 0 else -math.inf
    return 100.0 * (crisp_mmre - fuzzy_mmre) / crisp_mmre


@dataclass(frozen=True)
class ModelRow:
    name: str
    mmre: float | None
    pred25: float | None
    beta: float | None
    improvement: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ModelRow, ...]
    meta: dict

    def best(self, column: str) -> str | None:
        ok = [r for r in self.rows if r.error is None]
        if not ok:
            return None
        if column == "mmre":
            return min(ok, key=lambda r: r.mmre).name
        return max(ok, key=lambda r: r.pred25).name

    def render_text(self) -> str:
        best_m, best_p = self.best("mmre"), self.best("pred25")
        lines = [f"# {k}: {v}" for k, v in self.meta.items()]
        lines.append(f"{'Model':<20}{'MMRE':>12}{'Pred(25)':>12}{'beta':>8}{'Improvement %':>16}")
        for r in self.rows:
            if r.error is not None:
                lines.append(f"{r.name:<20}{'FAILED':>12}{'FAILED':>12}    # {r.error}")
                continue
            m = f"{r.mmre:.2f}" + ("*" if r.name == best_m else " ")
            p = f"{r.pred25:.2f}" + ("*" if r.name == best_p else " ")
            b = "-" if r.beta is None else f"{r.beta:g}"
            imp = "-" if r.improvement is None else f"{r.improvement:.2f}"
            lines.append(f"{r.name:<20}{m:>12}{p:>12}{b:>8}{imp:>16}")
        lines.append("# * best per column; improvement = 100 * (MMRE_crisp - MMRE_model) / MMRE_crisp")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        best_m, best_p = self.best("mmre"), self.best("pred25")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "mmre", "pred25", "beta", "improvement", "best_mmre", "best_pred25", "error"])
        for r in self.rows:
            w.writerow([r.name, "" if r.mmre is None else repr(r.mmre), "" if r.pred25 is None else repr(r.pred25),
                        "" if r.beta is None else repr(r.beta),
                        "" if r.improvement is None else repr(r.improvement),
                        int(r.name == best_m), int(r.name == best_p), r.error or ""])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"meta": self.meta, "best": {"mmre": self.best("mmre"), "pred25": self.best("pred25")},
                "rows": [vars(r) for r in self.rows]}


CRISP_LABEL = "Crisp ID3"


def comparison_from_scores(crisp: tuple[float, float], model1: tuple[float, float], model2: tuple[float, float],
                           meta: dict | None = None) -> ComparisonReport:
    """Assemble a comparison from known (MMRE, Pred25) scores."""
    rows = [ModelRow(CRISP_LABEL, crisp[0], crisp[1], None)]
    for name, (m, p) in (("Model 1 (Product)", model1), ("Model 2 (Minimum)", model2)):
        rows.append(ModelRow(name, m, p, None, improvement(crisp[0], m)))
    return ComparisonReport(tuple(rows), dict(meta or {}))


def compare_models(dataset: Sequence[ProjectRecord], variables: Sequence[str], cfg: InductionConfig | None = None,
                   split: Split | None = None, grid: Sequence[float] | None = None,
                   eval_on: str = "test", workers: int = 1) -> ComparisonReport:
    """Crisp ID3 against the Product and Minimum fuzzy models.

    Each fuzzy model is scored at every beta in ``grid`` (default: just
    ``cfg.beta``) and reported at its lowest-MMRE beta, ties to the smaller
    beta. The crisp tree uses ``cfg.beta``, which cannot filter 0/1 memberships.
    """
    cfg = cfg or InductionConfig()
    grid = sorted(float(b) for b in (grid if grid else [cfg.beta]))
    if split is None:
        split = holdout_split(dataset, 0.7, 0)
    train, test = _eval_sets(split, eval_on)
    v = tuple(variables)
    jobs = [(train, test, v, cfg, True)]
    jobs += [(train, test, v, replace(cfg, beta=b, tnorm=t), False) for t in DEFAULT_TNORMS for b in grid]
    results = _map(_run_cell, jobs, workers)
    crisp = results[0]
    rows = [ModelRow(CRISP_LABEL, crisp.mmre, crisp.pred25, None, error=crisp.error)]
    for i, t in enumerate(DEFAULT_TNORMS):
        cells = results[1 + i * len(grid): 1 + (i + 1) * len(grid)]
        ok = [c for c in cells if c.ok]
        name = f"{MODEL_LABELS[t]} ({t.label})"
        if not ok:
            rows.append(ModelRow(name, None, None, None, error=cells[0].error))
            continue
        best = min(ok, key=lambda c: (c.mmre, c.beta))
        imp = improvement(crisp.mmre, best.mmre) if crisp.ok else None
        if imp is not None and not math.isfinite(imp):
            imp = None
        rows.append(ModelRow(name, best.mmre, best.pred25, best.beta, imp))
    meta = {
        "split": split.describe(),
        "split_fingerprint": split.fingerprint,
        "seed": split.seed,
        "evaluated_on": eval_on,
        "beta_grid": ",".join(f"{b:g}" for b in grid),
        "classes": cfg.num_output_classes,
        "sets": cfg.default_sets,
    }
    return ComparisonReport(tuple(rows), meta)


def dumps_structured(obj) -> str:
    return json.dumps(obj.to_dict(), indent=2, allow_nan=False, default=str) + "\n"
