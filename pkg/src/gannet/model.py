"""User-facing model object: fitting, prediction, summaries, persistence.

A fitted model stores the intercept, one estimator per formula term
(subnetwork or linear slope, each with its centering offset), the
training trace, and enough training metadata (per-term ranges, fitted
values, final additive predictor) to reproduce predictions exactly.

Model files are self-describing JSON with a content checksum. Floats are
written with full round-trip precision, so predictions from a loaded
model are bit-identical to the original. Optimizer state is not saved; a
loaded model predicts but does not resume training.
"""

from __future__ import annotations

import hashlib
import json
import warnings

import numpy as np

from . import nn_core
from .backfitting import (
    BackfitState,
    LinearTermEstimator,
    SmoothTermEstimator,
)
from .config import FitConfig
from .data import Dataset
from .exceptions import ConfigError, DataValidationError, ModelFileError
from .families import GAUSSIAN, Binomial, Family, Gaussian, make_family
from .formula import LINEAR, SMOOTH, Formula, format_formula, parse_formula
from .local_scoring import IterationRecord, LocalScoringTrace, local_scoring

FILE_FORMAT = "gannet-model"
FILE_VERSION = 1

PREDICT_TYPES = ("link", "response", "terms")


class FittedModel:
    """Result of :func:`fit`; immutable once constructed."""

    def __init__(
        self,
        formula: Formula,
        family: Family,
        alpha: float,
        estimators: list,
        trace: LocalScoringTrace,
        config: FitConfig,
        n: int,
        training_mse: float,
        training_eta: np.ndarray,
        term_ranges: dict[str, tuple[float, float]],
    ):
        self.formula = formula
        self.family = family
        self.alpha = alpha
        self.estimators = estimators
        self.terms = {est.name: est for est in estimators}
        self.trace = trace
        self.config = config
        self.n = n
        self.training_mse = training_mse
        self.training_eta = training_eta
        self.term_ranges = term_ranges

    # ------------------------------------------------------------------
    # prediction
    # ------------------------------------------------------------------

    def predict(self, newdata: Dataset | None = None, type: str = "link",
                terms=None) -> np.ndarray:
        """Predict on new data (or the training rows when newdata is None).

        type='terms' returns one column per requested term, in request
        order, including each term's training centering offset;
        type='link' returns the additive predictor (intercept plus all
        term columns); type='response' maps the link through the inverse
        link function.
        """
        if type not in PREDICT_TYPES:
            raise ConfigError(f"predict type must be one of {PREDICT_TYPES}, got {type!r}")
        if type != "terms" and terms is not None:
            raise ConfigError("a terms subset is only valid with type='terms'")

        if type == "terms":
            names = list(terms) if terms is not None else list(self.terms)
            unknown = [t for t in names if t not in self.terms]
            if unknown:
                raise DataValidationError(
                    f"unknown term(s) in subset: {', '.join(unknown)}"
                )
            cols = [self._term_column(name, newdata) for name in names]
            return np.column_stack(cols) if cols else np.empty((0, 0))

        cols = [self._term_column(name, newdata) for name in self.terms]
        eta = self.alpha + np.sum(np.column_stack(cols), axis=1)
        if type == "link":
            return eta
        return self.family.inverse_link(eta)

    def _term_column(self, name: str, newdata: Dataset | None) -> np.ndarray:
        est = self.terms[name]
        if newdata is None:
            return est.fitted_values
        x = newdata.column(name)
        if not np.all(np.isfinite(x)):
            raise DataValidationError(f"covariate {name!r} contains non-finite values")
        lo, hi = self.term_ranges[name]
        if x.size and (np.min(x) < lo or np.max(x) > hi):
            warnings.warn(
                f"term {name!r}: values outside the training range "
                f"[{lo:.6g}, {hi:.6g}]; network extrapolation is unreliable",
                stacklevel=3,
            )
        return est.predict(x)

    # ------------------------------------------------------------------
    # reporting
    # ------------------------------------------------------------------

    def __str__(self) -> str:
        return "\n".join(
            [
                "Class: GANN",
                "",
                f"Distribution Family:  {self.family.kind}",
                f"Formula:  {format_formula(self.formula)}",
                f"Intercept: {self.alpha:.4f}",
                f"MSE: {self.training_mse:.4f}",
                f"Sample size: {self.n}",
            ]
        )

    def summary(self) -> str:
        return summarize(self)

    def architecture_lines(self) -> list[str]:
        """Per-term layer shapes and parameter counts."""
        lines = []
        for est in self.estimators:
            if est.kind == SMOOTH:
                lines.append(f"{est.name}:")
                for layer in est.net.layers:
                    desc = f"dense ({layer.fan_in} -> {layer.fan_out}, {layer.activation})"
                    lines.append(f"  {desc:<34s} {layer.n_params} params")
                lines.append(f"  Total params: {est.net.parameter_count()}")
            else:
                lines.append(f"{est.name}: linear(slope={est.slope:.4f})")
            lines.append("")
        return lines[:-1] if lines else lines


def summarize(model: FittedModel) -> str:
    """Full text summary: header, training history, per-term architecture."""
    out = [str(model), "", "Training History:", ""]
    rows = model.trace.history_rows()
    have_ts = any(ts is not None for ts, *_ in rows)
    if have_ts:
        out.append(f"  {'Timestamp':<20s} {'Model':<10s} {'Epoch':>5s} {'TrainLoss':>12s}")
    else:
        out.append(f"  {'Model':<10s} {'Epoch':>5s} {'TrainLoss':>12s}")
    for ts, term, epoch, loss in rows:
        cells = f"{term:<10s} {epoch:>5d} {loss:>12.4f}"
        if have_ts:
            stamp = ts.strftime("%Y-%m-%d %H:%M:%S") if ts is not None else ""
            out.append(f"  {stamp:<20s} {cells}")
        else:
            out.append(f"  {cells}")
    out += ["", "Model architecture:", ""]
    out += model.architecture_lines()
    return "\n".join(out)


def fit(data, formula, config: FitConfig) -> FittedModel:
    """Fit an additive neural model to the dataset.

    `data` may be a Dataset or a mapping of column names to vectors;
    `formula` a Formula or its string form. Deterministic given
    config.seed.
    """
    if not isinstance(data, Dataset):
        data = Dataset(data)
    if isinstance(formula, str):
        formula = parse_formula(formula)

    needed = [formula.response, *formula.term_names]
    if config.w_train is not None:
        needed.append(config.w_train)
    data.require(needed)

    family = make_family(config.family, config.mu_clamp)
    state, trace = local_scoring(data, formula, family, config)

    y = data.column(formula.response)
    term_ranges = {
        name: (float(np.min(data.column(name))), float(np.max(data.column(name))))
        for name in formula.term_names
    }
    cols = [est.fitted_values for est in state.estimators]
    training_eta = state.alpha + np.sum(np.column_stack(cols), axis=1)
    mu = family.inverse_link(training_eta)
    training_mse = float(np.mean((y - mu) ** 2))

    return FittedModel(
        formula=formula,
        family=family,
        alpha=state.alpha,
        estimators=state.estimators,
        trace=trace,
        config=config,
        n=data.n,
        training_mse=training_mse,
        training_eta=training_eta,
        term_ranges=term_ranges,
    )


# ----------------------------------------------------------------------
# persistence
# ----------------------------------------------------------------------


def _floats(arr) -> list:
    return np.asarray(arr, dtype=np.float64).tolist()


def _estimator_payload(est, lo: float, hi: float) -> dict:
    base = {
        "name": est.name,
        "kind": est.kind,
        "offset": float(est.offset),
        "train_min": lo,
        "train_max": hi,
        "fitted_values": _floats(est.fitted_values),
    }
    if est.kind == SMOOTH:
        base["num_units"] = list(est.net.num_units)
        base["activation"] = est.net.activation
        base["layers"] = [
            {
                "activation": layer.activation,
                "shape": [layer.fan_out, layer.fan_in],
                "weights": _floats(layer.weights),
                "biases": _floats(layer.biases),
            }
            for layer in est.net.layers
        ]
    else:
        base["slope"] = float(est.slope)
        base["x_center"] = float(est.x_center)
    return base


def _trace_payload(trace: LocalScoringTrace) -> list:
    # timestamps and working arrays are runtime diagnostics; excluding them
    # keeps model files byte-identical across same-seed runs
    return [
        {
            "iteration": rec.iteration,
            "deviance": rec.deviance,
            "deviance_ratio": rec.deviance_ratio,
            "per_term_epoch_losses": rec.per_term_epoch_losses,
        }
        for rec in trace.iterations
    ]


def _model_payload(model: FittedModel) -> dict:
    return {
        "formula": format_formula(model.formula),
        "family": {
            "kind": model.family.kind,
            "mu_clamp": getattr(model.family, "mu_clamp", None),
        },
        "alpha": float(model.alpha),
        "n": model.n,
        "training_mse": float(model.training_mse),
        "training_eta": _floats(model.training_eta),
        "config": model.config.to_dict(),
        "terms": [
            _estimator_payload(est, *model.term_ranges[est.name])
            for est in model.estimators
        ],
        "trace": _trace_payload(model.trace),
    }


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def save_model(model: FittedModel, path) -> None:
    """Write the model as checksummed JSON."""
    payload = _model_payload(model)
    digest = hashlib.sha256(_canonical(payload).encode("utf-8")).hexdigest()
    doc = {
        "format": FILE_FORMAT,
        "version": FILE_VERSION,
        "sha256": digest,
        "model": payload,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_model(path) -> FittedModel:
    """Read a model file, verifying version and content checksum."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFileError(f"{path}: corrupt model file ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != FILE_FORMAT:
        raise ModelFileError(f"{path}: not a {FILE_FORMAT} file")
    if doc.get("version") != FILE_VERSION:
        raise ModelFileError(
            f"{path}: unsupported model file version {doc.get('version')!r}; "
            f"expected {FILE_VERSION}"
        )
    payload = doc.get("model")
    digest = hashlib.sha256(_canonical(payload).encode("utf-8")).hexdigest()
    if digest != doc.get("sha256"):
        raise ModelFileError(f"{path}: checksum mismatch; file is corrupt")

    config = FitConfig.from_dict(payload["config"])
    formula = parse_formula(payload["formula"])
    fam = payload["family"]
    if fam["kind"] == GAUSSIAN:
        family: Family = Gaussian()
    else:
        family = Binomial(mu_clamp=fam["mu_clamp"])

    estimators = []
    term_ranges = {}
    for tp in payload["terms"]:
        term_ranges[tp["name"]] = (tp["train_min"], tp["train_max"])
        if tp["kind"] == SMOOTH:
            layers = [
                nn_core.DenseLayer(
                    weights=np.asarray(lp["weights"], dtype=np.float64).reshape(lp["shape"]),
                    biases=np.asarray(lp["biases"], dtype=np.float64),
                    activation=lp["activation"],
                )
                for lp in tp["layers"]
            ]
            net = nn_core.SubNetwork(
                layers=layers,
                num_units=tuple(tp["num_units"]),
                activation=tp["activation"],
            )
            est = SmoothTermEstimator.from_parts(tp["name"], net)
        elif tp["kind"] == LINEAR:
            est = LinearTermEstimator.from_parts(tp["name"], tp["slope"], tp["x_center"])
        else:
            raise ModelFileError(f"{path}: unknown term kind {tp['kind']!r}")
        est.offset = float(tp["offset"])
        est.fitted_values = np.asarray(tp["fitted_values"], dtype=np.float64)
        estimators.append(est)

    trace = LocalScoringTrace(
        iterations=[
            IterationRecord(
                iteration=rp["iteration"],
                deviance=rp["deviance"],
                deviance_ratio=rp["deviance_ratio"],
                per_term_epoch_losses=rp["per_term_epoch_losses"],
                timestamps=[],
            )
            for rp in payload["trace"]
        ]
    )
    return FittedModel(
        formula=formula,
        family=family,
        alpha=float(payload["alpha"]),
        estimators=estimators,
        trace=trace,
        config=config,
        n=int(payload["n"]),
        training_mse=float(payload["training_mse"]),
        training_eta=np.asarray(payload["training_eta"], dtype=np.float64),
        term_ranges=term_ranges,
    )
