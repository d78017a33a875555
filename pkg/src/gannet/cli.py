"""Command-line front end: train, predict, summary, partial-effects, simulate.

Fit-related flags mirror FitConfig field names (dashes for underscores)
and take their defaults straight from the dataclass, so the two surfaces
cannot disagree. Every error path prints one `gannet: error: ...` line to
stderr and exits 2 for configuration/input problems or 1 for runtime
failures.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import MISSING, fields

import numpy as np

from .config import FitConfig
from .data import Dataset, write_csv
from .exceptions import (
    ConfigError,
    DataValidationError,
    FormulaError,
    GannetError,
    ModelFileError,
)
from .formula import parse_formula
from .model import fit, load_model, save_model, summarize
from .simulation import ScenarioSpec, generate_scenario
from .svg import line_chart

_CONFIG_DEFAULTS = {
    f.name: (None if f.default is MISSING else f.default) for f in fields(FitConfig)
}


def _parse_num_units(text: str) -> tuple[int, ...]:
    try:
        units = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ConfigError(f"--num-units expects integers like '1024' or '256,128', got {text!r}")
    if not units:
        raise ConfigError("--num-units must name at least one hidden width")
    return units


def _parse_name_list(text: str) -> list[str]:
    names = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not names:
        raise ConfigError("expected a comma-separated list of term names")
    return names


def _add_fit_flags(p: argparse.ArgumentParser) -> None:
    d = _CONFIG_DEFAULTS
    p.add_argument("--num-units", required=True,
                   help="hidden widths per subnetwork, e.g. 1024 or 256,128")
    p.add_argument("--family", default=d["family"], choices=("gaussian", "binomial"))
    p.add_argument("--learning-rate", type=float, default=d["learning_rate"])
    p.add_argument("--activation", default=d["activation"])
    p.add_argument("--loss", default=d["loss"])
    p.add_argument("--kernel-initializer", default=d["kernel_initializer"])
    p.add_argument("--bias-initializer", default=d["bias_initializer"])
    p.add_argument("--l2-penalty", type=float, default=d["l2_penalty"])
    p.add_argument("--bias-regularizer", default=None)
    p.add_argument("--activity-regularizer", default=None)
    p.add_argument("--w-train", default=d["w_train"],
                   help="name of an optional sample-weight column")
    p.add_argument("--bf-threshold", type=float, default=d["bf_threshold"])
    p.add_argument("--ls-threshold", type=float, default=d["ls_threshold"])
    p.add_argument("--max-iter-backfitting", type=int, default=d["max_iter_backfitting"])
    p.add_argument("--max-iter-ls", type=int, default=d["max_iter_ls"])
    p.add_argument("--batch-size", type=int, default=d["batch_size"])
    p.add_argument("--epochs-per-sweep", type=int, default=d["epochs_per_sweep"])
    p.add_argument("--seed", type=int, default=d["seed"])
    p.add_argument("--verbose", type=int, default=d["verbose"], choices=(0, 1))
    p.add_argument("--mu-clamp", type=float, default=d["mu_clamp"])
    p.add_argument("--beta1", type=float, default=d["beta1"])
    p.add_argument("--beta2", type=float, default=d["beta2"])
    p.add_argument("--epsilon", type=float, default=d["epsilon"])


def _config_from_args(args) -> FitConfig:
    return FitConfig(
        num_units=_parse_num_units(args.num_units),
        family=args.family,
        learning_rate=args.learning_rate,
        activation=args.activation,
        loss=args.loss,
        kernel_initializer=args.kernel_initializer,
        bias_initializer=args.bias_initializer,
        l2_penalty=args.l2_penalty,
        bias_regularizer=args.bias_regularizer,
        activity_regularizer=args.activity_regularizer,
        w_train=args.w_train,
        bf_threshold=args.bf_threshold,
        ls_threshold=args.ls_threshold,
        max_iter_backfitting=args.max_iter_backfitting,
        max_iter_ls=args.max_iter_ls,
        batch_size=args.batch_size,
        epochs_per_sweep=args.epochs_per_sweep,
        seed=args.seed,
        verbose=args.verbose,
        mu_clamp=args.mu_clamp,
        beta1=args.beta1,
        beta2=args.beta2,
        epsilon=args.epsilon,
    )


def cmd_train(args) -> int:
    config = _config_from_args(args)
    formula = parse_formula(args.formula)
    needed = [formula.response, *formula.term_names]
    if config.w_train is not None:
        needed.append(config.w_train)
    data = Dataset.from_csv(args.data, columns=needed)
    model = fit(data, formula, config)
    save_model(model, args.model_out)
    if args.history_out:
        rows = model.trace.history_rows()
        write_csv(
            args.history_out,
            ["timestamp", "model", "epoch", "train_loss"],
            [
                [ts.strftime("%Y-%m-%d %H:%M:%S") if ts else "" for ts, *_ in rows],
                [term for _, term, *_ in rows],
                [str(epoch) for *_, epoch, _ in rows],
                [loss for *_, loss in rows],
            ],
        )
    print(model)
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    terms = _parse_name_list(args.terms) if args.terms else None
    if args.type == "terms":
        names = terms if terms is not None else list(model.terms)
        unknown = [t for t in names if t not in model.terms]
        if unknown:
            raise DataValidationError(f"unknown term(s) in subset: {', '.join(unknown)}")
        needed = names
    else:
        needed = list(model.formula.term_names)
    newdata = Dataset.from_csv(args.data, columns=needed)
    result = model.predict(newdata, type=args.type, terms=terms)
    if args.type == "terms":
        header = list(terms) if terms is not None else list(model.terms)
        cols = [result[:, j] for j in range(result.shape[1])] if result.size else [
            np.empty(0) for _ in header
        ]
    else:
        header = ["prediction"]
        cols = [result]
    write_csv(args.out, header, cols)
    return 0


def cmd_summary(args) -> int:
    model = load_model(args.model)
    print(summarize(model))
    return 0


def cmd_partial_effects(args) -> int:
    model = load_model(args.model)
    names = _parse_name_list(args.terms) if args.terms else list(model.terms)
    unknown = [t for t in names if t not in model.terms]
    if unknown:
        raise DataValidationError(f"unknown term(s): {', '.join(unknown)}")
    if args.grid_size < 2:
        raise ConfigError("--grid-size must be >= 2")
    ranges = {}
    if args.data:
        ds = Dataset.from_csv(args.data, columns=names)
        for name in names:
            col = ds.column(name)
            if col.size == 0:
                raise DataValidationError(f"{args.data}: no rows for term {name!r}")
            ranges[name] = (float(np.min(col)), float(np.max(col)))
    else:
        ranges = {name: model.term_ranges[name] for name in names}

    term_col: list[str] = []
    x_col: list[float] = []
    f_col: list[float] = []
    for name in names:
        lo, hi = ranges[name]
        grid = np.linspace(lo, hi, args.grid_size)
        fhat = model.terms[name].predict(grid)
        term_col += [name] * args.grid_size
        x_col += [float(v) for v in grid]
        f_col += [float(v) for v in fhat]
        if args.svg_dir:
            os.makedirs(args.svg_dir, exist_ok=True)
            chart = line_chart(grid, fhat, title=f"partial effect of {name}", xlabel=name)
            with open(os.path.join(args.svg_dir, f"{name}.svg"), "w", encoding="utf-8") as fh:
                fh.write(chart)
    write_csv(args.out, ["term", "x", "f_hat"], [term_col, x_col, f_col])
    return 0


def cmd_simulate(args) -> int:
    spec = ScenarioSpec(
        n=args.n,
        covariate_low=args.low,
        covariate_high=args.high,
        true_functions=tuple(_parse_name_list(args.functions)),
        alpha0=args.alpha,
        noise_mean=args.noise_mean,
        noise_sd=args.noise_sd,
        train_fraction=args.train_fraction,
        seed=args.seed,
    )
    train, test, fs_train, fs_test = generate_scenario(spec)
    os.makedirs(args.out_dir, exist_ok=True)
    train.to_csv(os.path.join(args.out_dir, "train.csv"))
    test.to_csv(os.path.join(args.out_dir, "test.csv"))
    fs_train.to_csv(os.path.join(args.out_dir, "true_terms_train.csv"))
    fs_test.to_csv(os.path.join(args.out_dir, "true_terms_test.csv"))
    print(f"wrote {train.n} train and {test.n} test rows to {args.out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gannet",
        description="fit and inspect interpretable additive neural models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model from a CSV file")
    p.add_argument("--data", required=True, help="training CSV with a header row")
    p.add_argument("--formula", required=True, help='e.g. "y ~ s(x1) + x2"')
    p.add_argument("--model-out", required=True, help="path for the model file")
    p.add_argument("--history-out", default=None, help="optional training-history CSV")
    _add_fit_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict from a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="CSV of new covariate values")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--type", default="link", choices=("link", "response", "terms"))
    p.add_argument("--terms", default=None, help="comma list for type=terms")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("summary", help="print the summary of a saved model")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("partial-effects", help="export fitted per-term curves")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="output CSV (term,x,f_hat)")
    p.add_argument("--terms", default=None, help="comma list (default: all terms)")
    p.add_argument("--grid-size", type=int, default=200)
    p.add_argument("--data", default=None,
                   help="optional CSV whose min/max set the grid range")
    p.add_argument("--svg-dir", default=None, help="also write one SVG chart per term")
    p.set_defaults(func=cmd_partial_effects)

    p = sub.add_parser("simulate", help="generate the synthetic benchmark data")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n", type=int, default=30625)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--low", type=float, default=-2.5)
    p.add_argument("--high", type=float, default=2.5)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--noise-mean", type=float, default=0.25)
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--functions", default="square,double,sine")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(message)s", level=logging.INFO)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FormulaError, DataValidationError, ModelFileError) as exc:
        print(f"gannet: error: {exc}", file=sys.stderr)
        return 2
    except (GannetError, OSError) as exc:
        print(f"gannet: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
