"""Command-line interface.

Subcommands: ``train``, ``cv``, ``learning-curve`` and ``importance``.
Options resolve with flag > config file > built-in default precedence; the
value set actually used is written to ``resolved_config`` next to the other
outputs, in the same ``key = value`` format the ``--config`` file uses.

Exit codes: 0 success, 2 input or usage problem, 3 model-file problem,
4 configuration problem.  Output files contain no wall-clock data, so a
rerun with identical inputs reproduces them byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .anchors import AnchorConfig
from .boosting import (
    BoostConfig,
    ConfigError,
    LoadError,
    ModelError,
    importance,
    predict_prepared,
    prepare,
    save_model,
    load_model,
    sigmoid,
    train_prepared,
)
from .evaluation import CVPlan, GridSpec, learning_curve, run_cv
from .features import feature_row_names
from .tudata import load_dataset

log = logging.getLogger(__name__)


# ---------------------------------------------------------------- options


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_ints(text: str) -> tuple[int, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("expected a comma-separated list of integers")
    return tuple(int(p) for p in parts)


def _parse_floats(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("expected a comma-separated list of numbers")
    return tuple(float(p) for p in parts)


def parse_fractions(text: str) -> tuple[float, ...]:
    """Training-set fractions: "start:stop:step" or a comma list, all in (0, 1]."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("range form is start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0.0 or start > stop:
            raise ValueError("range needs start <= stop and a positive step")
        vals = []
        i = 0
        v = start
        while v <= stop + 1e-9:
            vals.append(round(v, 10))
            i += 1
            v = start + i * step
    else:
        vals = [float(p) for p in text.split(",") if p.strip()]
    if not vals:
        raise ValueError("no fractions given")
    for v in vals:
        if not 0.0 < v <= 1.0:
            raise ValueError(f"fraction {v} outside (0, 1]")
    return tuple(vals)


_CONVERTERS = {
    "int": int,
    "float": float,
    "str": str,
    "bool": _parse_bool,
    "ints": _parse_ints,
    "floats": _parse_floats,
    "fractions": parse_fractions,
}


@dataclass(frozen=True)
class _Opt:
    name: str
    kind: str
    default: object
    choices: tuple | None = None
    help: str = ""

    @property
    def pyname(self) -> str:
        return self.name.replace("-", "_")


_DATA = (
    _Opt("name", "str", None, help="dataset name (default: directory basename)"),
    _Opt("task", "str", "classification", ("classification", "regression")),
    _Opt("target-index", "int", 0, help="regression target column"),
    _Opt("limit", "int", None, help="use only the first N graphs"),
)
_MODEL = (
    _Opt("m-stop", "int", 300, help="boosting iterations"),
    _Opt("eta", "float", 0.1, help="shrinkage"),
    _Opt("max-depth", "int", 3),
    _Opt("min-leaf", "int", 5),
    _Opt("attribute-mode", "str", "complete", ("complete", "restricted")),
    _Opt("max-path-length", "int", 10),
    _Opt("seed", "int", 0),
)
_ANCHOR = (
    _Opt("anchor-mode", "str", "automatic", ("automatic", "user")),
    _Opt("anchor-labels", "ints", None, help="label ids allowed to anchor (user mode)"),
    _Opt("categorical-threshold", "int", 200),
    _Opt("rare-top-k", "int", None, help="anchor only the k rarest labels"),
)
_CV = (
    _Opt("folds", "int", 10),
    _Opt("repetitions", "int", 10),
    _Opt("stratified", "bool", True),
    _Opt("grid", "bool", False, help="tune on an inner validation split"),
    _Opt("grid-m-stop", "ints", (100, 300, 600)),
    _Opt("grid-eta", "floats", (0.05, 0.1, 0.3)),
    _Opt("grid-max-depth", "ints", (2, 3)),
    _Opt("validation-fraction", "float", 0.1),
    _Opt("threads", "int", 1, help="worker processes for fold jobs"),
)
_OUT = (_Opt("out", "str", "."),)

_COMMAND_OPTS: dict[str, tuple[_Opt, ...]] = {
    "train": _DATA
    + _MODEL
    + _ANCHOR
    + _OUT
    + (
        _Opt("dump-features", "bool", False, help="write features.csv for selected paths"),
        _Opt("dump-predictions", "bool", False, help="write predictions.csv"),
    ),
    "cv": _DATA
    + _MODEL
    + _ANCHOR
    + _CV
    + _OUT
    + (_Opt("dump-predictions", "bool", False, help="write held-out predictions.csv"),),
    "learning-curve": _DATA
    + _MODEL
    + _ANCHOR
    + _CV
    + _OUT
    + (_Opt("fractions", "fractions", parse_fractions("0.1:1.0:0.1")),),
    "importance": _OUT,
}

_ALL_OPT_NAMES = {o.name for opts in _COMMAND_OPTS.values() for o in opts}


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a ``key = value`` file; '#' starts a comment."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"([A-Za-z][A-Za-z0-9_-]*)\s*=\s*(.*)", line)
        if m is None:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key = m.group(1).replace("_", "-")
        if key not in _ALL_OPT_NAMES:
            raise ConfigError(f"{path}:{lineno}: unknown option {key!r}")
        values[key] = m.group(2).strip()
    return values


def _resolve_options(opts: tuple[_Opt, ...], args: argparse.Namespace) -> dict[str, object]:
    """Apply flag > file > default precedence for one subcommand."""
    file_vals = read_config_file(args.config) if getattr(args, "config", None) else {}
    resolved: dict[str, object] = {}
    for o in opts:
        flag = getattr(args, o.pyname, None)
        if flag is not None:
            resolved[o.pyname] = flag
            continue
        if o.name in file_vals:
            try:
                value = _CONVERTERS[o.kind](file_vals[o.name])
            except ValueError as exc:
                raise ConfigError(f"bad value for {o.name!r} in config file: {exc}") from exc
            if o.choices and value not in o.choices:
                raise ConfigError(
                    f"bad value for {o.name!r} in config file: expected one of {o.choices}"
                )
            resolved[o.pyname] = value
            continue
        resolved[o.pyname] = o.default
    return resolved


def _render(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_render(v) for v in value)
    return str(value)


def _write_resolved_config(
    outdir: Path, command: str, data: str | None, opts: tuple[_Opt, ...], values: dict
) -> None:
    lines = [f"# pathgbm {command}" + (f" {data}" if data else "")]
    for o in opts:
        v = values[o.pyname]
        if v is None:
            continue
        lines.append(f"{o.name} = {_render(v)}")
    (outdir / "resolved_config").write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------- output


def _cell(value: object) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(c) for c in row])


def _write_json(path: Path, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _outdir(values: dict) -> Path:
    out = Path(values["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- commands


def _load(args: argparse.Namespace, values: dict):
    ds = load_dataset(
        args.data,
        name=values["name"],
        task=values["task"],
        target_index=values["target_index"],
    )
    limit = values["limit"]
    if limit is not None:
        if limit < 1:
            raise ConfigError("limit must be positive")
        ds = ds.subset(np.arange(min(limit, ds.graph_count)))
    return ds


def _anchor_config(values: dict) -> AnchorConfig:
    labels = values["anchor_labels"]
    return AnchorConfig(
        mode=values["anchor_mode"],
        user_labels=frozenset(labels) if labels is not None else None,
        categorical_threshold=values["categorical_threshold"],
        rare_top_k=values["rare_top_k"],
    )


def _boost_config(values: dict) -> BoostConfig:
    return BoostConfig(
        task=values["task"],
        m_stop=values["m_stop"],
        eta=values["eta"],
        max_depth=values["max_depth"],
        min_leaf=values["min_leaf"],
        attribute_mode=values["attribute_mode"],
        max_path_length=values["max_path_length"],
        seed=values["seed"],
    )


def _cv_plan(values: dict) -> CVPlan:
    return CVPlan(
        folds=values["folds"],
        repetitions=values["repetitions"],
        seed=values["seed"],
        stratified=values["stratified"],
    )


def _grid_spec(values: dict) -> GridSpec | None:
    if not values["grid"]:
        return None
    return GridSpec(
        m_stop=values["grid_m_stop"],
        eta=values["grid_eta"],
        max_depth=values["grid_max_depth"],
        validation_fraction=values["validation_fraction"],
    )


def _dump_train_features(out: Path, model, prep) -> None:
    seen: list = []
    for st in model.stages:
        if st.path not in seen:
            seen.append(st.path)
    header = ["graph"]
    blocks = []
    for path in seen:
        names = [model.alphabet[lab] for lab in path]
        if model.config.restricted:
            header.extend(feature_row_names(names, 0, 0))
        else:
            header.extend(
                feature_row_names(names, model.node_attr_dim, model.edge_attr_dim)
            )
        blocks.append(prep.cache.phi(path, restricted=model.config.restricted))
    rows = []
    for i in range(prep.ds.graph_count):
        row: list = [i]
        for block in blocks:
            row.extend(float(v) for v in block[i])
        rows.append(row)
    _write_csv(out / "features.csv", header, rows)


def _dump_predictions(out: Path, task: str, rows) -> None:
    if task == "classification":
        header = ["graph", "logit", "probability", "label", "target"]
    else:
        header = ["graph", "prediction", "target"]
    _write_csv(out / "predictions.csv", header, rows)


def cmd_train(args: argparse.Namespace) -> int:
    opts = _COMMAND_OPTS["train"]
    values = _resolve_options(opts, args)
    ds = _load(args, values)
    anchor = _anchor_config(values)
    config = _boost_config(values)
    prep = prepare(ds, anchor)
    model = train_prepared(prep, np.arange(ds.graph_count), config)
    out = _outdir(values)
    save_model(model, out / "model.json")
    _write_csv(
        out / "train_log.csv",
        ["iteration", "path", "train_loss", "loss_reduction", "relative_reduction", "pool_size"],
        [
            [r.iteration, model.path_name(r.path), r.train_loss, r.loss_reduction,
             r.relative_reduction, r.pool_size]
            for r in model.log
        ],
    )
    if values["dump_features"]:
        _dump_train_features(out, model, prep)
    if values["dump_predictions"]:
        idx = np.arange(ds.graph_count)
        logits = predict_prepared(model, prep, idx)
        if config.task == "classification":
            rows = [
                [int(i), float(f), float(sigmoid(f)), int(float(sigmoid(f)) > 0.5),
                 int(ds.targets[i])]
                for i, f in zip(idx, logits)
            ]
        else:
            rows = [[int(i), float(f), float(ds.targets[i])] for i, f in zip(idx, logits)]
        _dump_predictions(out, config.task, rows)
    _write_resolved_config(out, "train", args.data, opts, values)
    final = model.log[-1].train_loss if model.log else model.initial_loss
    print(f"trained {len(model.stages)} stages on {ds.graph_count} graphs")
    print(f"mean training loss {model.initial_loss:.6f} -> {final:.6f}")
    print(f"wrote {out / 'model.json'}")
    return 0


def _metric_lines(names, mean, std) -> list[str]:
    return [f"{name}: {mean[name]:.2f} +/- {std[name]:.2f}" for name in names]


def cmd_cv(args: argparse.Namespace) -> int:
    opts = _COMMAND_OPTS["cv"]
    values = _resolve_options(opts, args)
    ds = _load(args, values)
    report = run_cv(
        ds,
        _boost_config(values),
        anchor=_anchor_config(values),
        plan=_cv_plan(values),
        grid=_grid_spec(values),
        threads=values["threads"],
        collect_predictions=values["dump_predictions"],
    )
    out = _outdir(values)
    doc = {
        "dataset": report.dataset,
        "task": report.task,
        "plan": {
            "folds": report.plan.folds,
            "repetitions": report.plan.repetitions,
            "seed": report.plan.seed,
            "stratified": report.plan.stratified,
        },
        "grid_used": report.grid_used,
        "layout_hashes": list(report.layout_hashes),
        "metrics": {
            name: {
                "mean": report.mean[name],
                "std": report.std[name],
                "per_repetition": list(report.rep_values[name]),
            }
            for name in report.metric_names
        },
        "folds": [
            {
                "repetition": r.repetition,
                "fold": r.fold,
                "n_train": r.n_train,
                "n_test": r.n_test,
                "stages": r.stages,
                "m_stop": r.config.m_stop,
                "eta": r.config.eta,
                "max_depth": r.config.max_depth,
                **{name: r.metrics[name] for name in report.metric_names},
            }
            for r in report.folds
        ],
    }
    _write_json(out / "cv_report.json", doc)
    _write_csv(
        out / "cv_report.csv",
        ["repetition", "fold", "n_train", "n_test", "stages", "m_stop", "eta", "max_depth"]
        + list(report.metric_names),
        [
            [r.repetition, r.fold, r.n_train, r.n_test, r.stages, r.config.m_stop,
             r.config.eta, r.config.max_depth]
            + [r.metrics[name] for name in report.metric_names]
            for r in report.folds
        ],
    )
    if values["dump_predictions"]:
        rows = [
            [r.repetition, r.fold, *p]
            for r in report.folds
            for p in (r.predictions or ())
        ]
        if report.task == "classification":
            header = ["repetition", "fold", "graph", "logit", "probability", "label", "target"]
        else:
            header = ["repetition", "fold", "graph", "prediction", "target"]
        _write_csv(out / "predictions.csv", header, rows)
    _write_resolved_config(out, "cv", args.data, opts, values)
    for line in _metric_lines(report.metric_names, report.mean, report.std):
        print(line)
    print(f"wrote {out / 'cv_report.json'}")
    return 0


def cmd_learning_curve(args: argparse.Namespace) -> int:
    opts = _COMMAND_OPTS["learning-curve"]
    values = _resolve_options(opts, args)
    ds = _load(args, values)
    curve = learning_curve(
        ds,
        list(values["fractions"]),
        _boost_config(values),
        anchor=_anchor_config(values),
        plan=_cv_plan(values),
        grid=_grid_spec(values),
        threads=values["threads"],
    )
    out = _outdir(values)
    header = ["fraction"]
    for name in curve.metric_names:
        header.extend([f"{name}_mean", f"{name}_std"])
    rows = []
    for f in curve.fractions:
        row: list = [f]
        for name in curve.metric_names:
            row.extend([curve.mean[f][name], curve.std[f][name]])
        rows.append(row)
    _write_csv(out / "learning_curve.csv", header, rows)
    _write_resolved_config(out, "learning-curve", args.data, opts, values)
    for f in curve.fractions:
        parts = ", ".join(
            f"{name} {curve.mean[f][name]:.2f} +/- {curve.std[f][name]:.2f}"
            for name in curve.metric_names
        )
        print(f"fraction {f}: {parts}")
    if curve.skipped:
        print("skipped fractions:", ", ".join(str(f) for f in curve.skipped))
    print(f"wrote {out / 'learning_curve.csv'}")
    return 0


def cmd_importance(args: argparse.Namespace) -> int:
    opts = _COMMAND_OPTS["importance"]
    values = _resolve_options(opts, args)
    model = load_model(args.model)
    rows = importance(model)
    out = _outdir(values)
    _write_csv(
        out / "importance.csv",
        ["path", "absolute", "relative"],
        [[r.path_name, r.absolute, r.relative] for r in rows],
    )
    _write_resolved_config(out, "importance", args.model, opts, values)
    for r in rows[:10]:
        print(f"{r.path_name}  absolute={r.absolute:.2f}  relative={r.relative:.2f}")
    print(f"wrote {out / 'importance.csv'}")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "cv": cmd_cv,
    "learning-curve": cmd_learning_curve,
    "importance": cmd_importance,
}


# ---------------------------------------------------------------- parser


def _add_opts(parser: argparse.ArgumentParser, opts: tuple[_Opt, ...]) -> None:
    for o in opts:
        flag = "--" + o.name
        if o.kind == "bool":
            parser.add_argument(
                flag, action=argparse.BooleanOptionalAction, default=None, help=o.help
            )
        else:
            parser.add_argument(
                flag,
                type=_CONVERTERS[o.kind],
                choices=o.choices,
                default=None,
                help=o.help or None,
            )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathgbm",
        description="Gradient boosting on labelled-path counts for graph-level prediction.",
    )
    parser.add_argument("--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    for command in ("train", "cv", "learning-curve"):
        p = sub.add_parser(command)
        p.add_argument("data", help="directory with the dataset's text files")
        p.add_argument("--config", default=None, help="key = value option file")
        _add_opts(p, _COMMAND_OPTS[command])

    p = sub.add_parser("importance")
    p.add_argument("model", help="model.json written by train")
    p.add_argument("--config", default=None, help="key = value option file")
    _add_opts(p, _COMMAND_OPTS["importance"])
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _COMMANDS[args.command](args)
    except LoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
