"""Local scoring: the outer IRLS loop around backfitting.

Each iteration linearizes the likelihood at the current fit, producing a
working response and weights from the family tables, re-estimates the
intercept as the weighted mean of the working response, and delegates the
additive fit to backfitting. Convergence is judged by the relative drop
in deviance; the identity-link Gaussian case needs no relinearization, so
it runs exactly one iteration.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field

import numpy as np

from .backfitting import BackfitState, backfit, make_estimator
from .config import FitConfig
from .exceptions import DataValidationError, DegenerateDataError
from .families import GAUSSIAN, Family
from .formula import Formula


@dataclass
class IterationRecord:
    """One local-scoring iteration: deviance bookkeeping plus the per-sweep
    training losses of every term (one entry per backfitting sweep)."""

    iteration: int
    deviance: float
    deviance_ratio: float | None
    per_term_epoch_losses: dict[str, list[float]]
    timestamps: list[_dt.datetime]
    # working quantities kept for diagnostics; not serialized
    eta: np.ndarray | None = None
    mu: np.ndarray | None = None
    z: np.ndarray | None = None
    w: np.ndarray | None = None


@dataclass
class LocalScoringTrace:
    iterations: list[IterationRecord] = field(default_factory=list)

    def history_rows(self):
        """Flat (timestamp, term, epoch, loss) rows; the epoch counter runs
        across sweeps of all local-scoring iterations, one epoch per sweep."""
        rows = []
        epoch = 0
        for rec in self.iterations:
            n_sweeps = max((len(v) for v in rec.per_term_epoch_losses.values()), default=0)
            for m in range(n_sweeps):
                ts = rec.timestamps[m] if m < len(rec.timestamps) else None
                for term, losses in rec.per_term_epoch_losses.items():
                    if m < len(losses):
                        rows.append((ts, term, epoch + m + 1, losses[m]))
            epoch += n_sweeps
        return rows


def deviance_ratio(prev: float, curr: float) -> float:
    """Relative deviance drop (prev - curr) / prev; zero prev counts as
    converged. Negative when the fit worsened, which still stops the loop."""
    if prev == 0.0:
        return 0.0
    return (prev - curr) / prev


def local_scoring(
    data,
    formula: Formula,
    family: Family,
    config: FitConfig,
) -> tuple[BackfitState, LocalScoringTrace]:
    """Fit the additive predictor by IRLS over backfitting rounds.

    Returns the final backfit state (intercept and term estimators) and
    the per-iteration trace.
    """
    y = data.column(formula.response)
    if data.n < 2:
        raise DataValidationError("need at least 2 rows to fit")
    family.validate_response(y)
    if np.all(y == y[0]):
        raise DegenerateDataError(
            f"response {formula.response!r} is constant; nothing to fit"
        )

    covariates = {}
    for term in formula.terms:
        col = data.column(term.name)
        if not np.all(np.isfinite(col)):
            raise DataValidationError(f"covariate {term.name!r} contains non-finite values")
        covariates[term.name] = col

    if config.w_train is not None:
        w_ext = data.column(config.w_train)
        if np.any(w_ext < 0) or not np.all(np.isfinite(w_ext)) or not np.sum(w_ext) > 0:
            raise DataValidationError(
                f"sample weights {config.w_train!r} must be finite, nonnegative, "
                "and not all zero"
            )
    else:
        w_ext = np.ones_like(y)

    alpha0 = float(family.link(np.array([float(np.mean(y))]))[0])
    estimators = [
        make_estimator(term, config, j, data.n) for j, term in enumerate(formula.terms)
    ]
    state = BackfitState(alpha=alpha0, estimators=estimators)
    trace = LocalScoringTrace()

    for l in range(1, config.max_iter_ls + 1):
        eta = state.alpha + state.fitted_sum()
        mu = family.inverse_link(eta)
        z = family.adjusted_dependent(y, eta, mu)
        w = family.irls_weights(mu) * w_ext
        dev_before = family.deviance(y, mu)

        state.alpha = float(np.sum(w * z) / np.sum(w))
        backfit(state, z, w, covariates, config)

        mu_new = family.inverse_link(state.alpha + state.fitted_sum())
        dev = family.deviance(y, mu_new)
        ratio = deviance_ratio(dev_before, dev)
        trace.iterations.append(
            IterationRecord(
                iteration=l,
                deviance=dev,
                deviance_ratio=ratio,
                per_term_epoch_losses=_transpose_losses(state),
                timestamps=list(state.sweep_timestamps),
                eta=eta,
                mu=mu,
                z=z,
                w=w,
            )
        )
        if config.verbose:
            print(
                f"[gannet] local scoring iteration {l}: deviance={dev:.6g} "
                f"ratio={ratio:.6g} sweeps={state.sweep_count}"
            )
        if family.kind == GAUSSIAN:
            break
        if ratio < config.ls_threshold:
            break
    return state, trace


def _transpose_losses(state: BackfitState) -> dict[str, list[float]]:
    per_term: dict[str, list[float]] = {est.name: [] for est in state.estimators}
    for sweep in state.sweep_losses:
        for term, loss in sweep.items():
            per_term[term].append(loss)
    return per_term
