"""Command-line interface: generate | train | predict | evaluate | sweep | compare.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal error.
Errors are reported on stderr as a single ``fuzzyid3: error[<kind>]: <message>`` line.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile

from . import data, evaluation, inference
from .fuzzy_core import MAX_SETS, MIN_SETS, TNorm
from .induction import InductionConfig, fit, load_tree

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _fail("usage", message, EXIT_CONFIG)


def _fail(kind: str, message: str, code: int):
    message = " ".join(str(message).split())
    print(f"fuzzyid3: error[{kind}]: {message}", file=sys.stderr)
    raise SystemExit(code)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _tnorms(text: str) -> list[TNorm]:
    try:
        return [TNorm.parse(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _sets(text: str | None, schema: data.DatasetSchema) -> tuple[int, dict]:
    """Parse ``--sets``: a default count and/or ``NAME=COUNT`` overrides."""
    default, overrides = 7, dict(schema.set_counts)
    if not text:
        return default, overrides
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            if "=" in item:
                name, count = item.split("=", 1)
                name = name.strip()
                if name not in schema.attributes:
                    raise ConfigError(f"--sets names unknown attribute {name!r}")
                overrides[name] = int(count)
            else:
                default = int(item)
        except ValueError:
            raise ConfigError(f"bad --sets item {item!r}") from None
    for name, m in [("default", default), *overrides.items()]:
        if not MIN_SETS <= m <= MAX_SETS:
            raise ConfigError(f"fuzzy set count for {name} must be in {MIN_SETS}..{MAX_SETS}, got {m}")
    return default, overrides


def _schema(args) -> data.DatasetSchema:
    try:
        return data.resolve_schema(args.schema)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _config(args, schema, single: bool = True) -> tuple[InductionConfig, list[float], list[TNorm]]:
    betas = _floats(args.beta) if args.beta else []
    tnorms = _tnorms(args.tnorm) if args.tnorm else []
    for b in betas:
        if not 0.0 <= b <= 1.0:
            raise ConfigError(f"beta must be in [0, 1], got {b:g}")
    if single and (len(betas) > 1 or len(tnorms) > 1):
        raise ConfigError(f"{args.command} takes a single --beta and --tnorm")
    if not 2 <= args.classes <= 7:
        raise ConfigError(f"--classes must be in 2..7, got {args.classes}")
    if not 0.0 < args.split < 1.0:
        raise ConfigError(f"--split must be in (0, 1), got {args.split:g}")
    default_sets, overrides = _sets(args.sets, schema)
    try:
        cfg = InductionConfig(tnorm=tnorms[0] if tnorms else TNorm.PRODUCT,
                              beta=betas[0] if betas else 0.0,
                              num_output_classes=args.classes,
                              default_sets=default_sets, set_counts=overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg, betas, tnorms


def _check_format(args):
    if args.format not in ("text", "csv", "json"):
        raise ConfigError(f"unknown --format {args.format!r}")


def _emit(text: str, out: str | None):
    """Write ``text`` to ``out`` in one step (or stdout when ``out`` is None)."""
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    _atomic_write(out, text)


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".fuzzyid3-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _render(report, fmt: str) -> str:
    if fmt == "csv":
        return report.to_csv()
    if fmt == "json":
        return evaluation.dumps_structured(report)
    return report.render_text()


# --- commands ----------------------------------------------------------------

def cmd_generate(args) -> int:
    schema = _schema(args)
    if args.n < 2:
        raise ConfigError(f"-n must be at least 2, got {args.n}")
    if args.noise < 0:
        raise ConfigError("--noise must be non-negative")
    if args.effort_model not in ("auto", *data.EFFORT_MODELS):
        raise ConfigError(f"unknown --effort-model {args.effort_model!r}")
    records = data.generate_synthetic(schema, args.n, args.seed, args.effort_model, args.noise)
    _emit(data.format_csv(records, schema), args.out)
    return EXIT_OK


def _summary(tree) -> str:
    lines = [
        f"tree: {'crisp' if tree.crisp else 'fuzzy'} ID3, t-norm={tree.tnorm.label}, beta={tree.beta:g}",
        f"nodes: {tree.n_nodes}",
        f"leaves: {len(tree.leaves())}",
        f"depth: {tree.depth}",
        "variable usage:",
    ]
    lines += [f"  {v}: {c}" for v, c in tree.variable_usage().items()]
    return "\n".join(lines) + "\n"


def cmd_train(args) -> int:
    schema = _schema(args)
    cfg, _, _ = _config(args, schema)
    if not args.out:
        raise ConfigError("train needs --out for the model file")
    records = data.load_csv(args.dataset, schema)
    tree = fit(records, schema.attributes, cfg, crisp=args.crisp)
    _atomic_write(args.out, tree.to_json())
    sys.stdout.write(_summary(tree))
    return EXIT_OK


def cmd_predict(args) -> int:
    tree = load_tree(args.model)
    if args.out in (None, "-"):
        with tempfile.TemporaryDirectory() as d:
            tmp = os.path.join(d, "pred.csv")
            inference.predict_csv(tree, args.input, tmp)
            with open(tmp, encoding="utf-8") as fh:
                sys.stdout.write(fh.read())
        return EXIT_OK
    d = os.path.dirname(os.path.abspath(args.out))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".fuzzyid3-", suffix=".tmp")
    os.close(fd)
    try:
        inference.predict_csv(tree, args.input, tmp)
        os.replace(tmp, args.out)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    schema = _schema(args)
    cfg, _, _ = _config(args, schema)
    _check_format(args)
    records = data.load_csv(args.dataset, schema)
    if args.model:
        tree = load_tree(args.model)
        meta = {"model": args.model, "dataset": args.dataset, "tnorm": tree.tnorm.label, "beta": tree.beta}
        report = evaluation.evaluate(tree, records, meta)
    else:
        split = evaluation.holdout_split(records, args.split, args.seed)
        train, test = split
        tree = fit(train, schema.attributes, cfg, crisp=args.crisp)
        target = test if args.on == "test" else train
        meta = {"dataset": args.dataset, "model": "crisp ID3" if args.crisp else "fuzzy ID3",
                "tnorm": cfg.tnorm.label, "beta": cfg.beta, "split": split.describe(),
                "split_fingerprint": split.fingerprint, "seed": args.seed, "evaluated_on": args.on}
        report = evaluation.evaluate(tree, target, meta)
    _emit(_render(report, args.format), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    schema = _schema(args)
    cfg, betas, tnorms = _config(args, schema, single=False)
    _check_format(args)
    records = data.load_csv(args.dataset, schema)
    split = evaluation.holdout_split(records, args.split, args.seed)
    table = evaluation.run_sweep(records, schema.attributes, betas or evaluation.DEFAULT_GRID,
                                 tnorms or evaluation.DEFAULT_TNORMS, cfg, split, args.on, args.workers)
    _emit(_render(table, args.format), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    schema = _schema(args)
    cfg, betas, _ = _config(args, schema, single=False)
    _check_format(args)
    records = data.load_csv(args.dataset, schema)
    split = evaluation.holdout_split(records, args.split, args.seed)
    report = evaluation.compare_models(records, schema.attributes, cfg, split,
                                       betas or evaluation.DEFAULT_GRID, args.on, args.workers)
    _emit(_render(report, args.format), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--schema", default="tukutuku", help="tukutuku, cocomo81, or a JSON schema file")
    g.add_argument("--tnorm", default=None, help="min or product (comma list for sweep)")
    g.add_argument("--beta", default=None, help="significance level; comma list for sweep/compare")
    g.add_argument("--classes", type=int, default=5, help="number of output effort classes (2..7)")
    g.add_argument("--sets", default=None, help="fuzzy sets per variable, e.g. '7' or '5,TotWP=3'")
    g.add_argument("--split", type=float, default=0.7, help="training fraction of the holdout split")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", default="text", help="text, csv or json")
    g.add_argument("--out", default=None, help="output path (default stdout)")
    g.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="fuzzyid3", description="Fuzzy ID3 decision trees for software effort estimation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("generate", parents=[common], help="write a synthetic dataset")
    s.add_argument("-n", type=int, default=53)
    s.add_argument("--noise", type=float, default=0.1)
    s.add_argument("--effort-model", default="auto")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("train", parents=[common], help="grow a tree and write the model file")
    s.add_argument("dataset")
    s.add_argument("--crisp", action="store_true", help="grow the crisp ID3 baseline")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", parents=[common], help="append predicted_effort to a CSV")
    s.add_argument("input")
    s.add_argument("--model", required=True)
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("evaluate", parents=[common], help="MMRE / Pred(25) report")
    s.add_argument("dataset")
    s.add_argument("--model", default=None, help="score this model on the whole dataset")
    s.add_argument("--crisp", action="store_true")
    s.add_argument("--on", choices=("test", "train"), default="test")
    s.set_defaults(func=cmd_evaluate)

    for name, func, helptext in (("sweep", cmd_sweep, "beta x t-norm accuracy table"),
                                 ("compare", cmd_compare, "crisp ID3 vs the two fuzzy models")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("dataset")
        s.add_argument("--on", choices=("test", "train"), default="test")
        s.add_argument("--workers", type=int, default=1)
        s.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        _fail("config", exc, EXIT_CONFIG)
    except (data.DataError, ValueError, KeyError, OSError) as exc:
        _fail("data", exc, EXIT_DATA)
    except Exception as exc:  # noqa: BLE001
        _fail("internal", f"{type(exc).__name__}: {exc}", EXIT_INTERNAL)


if __name__ == "__main__":
    sys.exit(main())
