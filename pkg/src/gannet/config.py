"""Fit configuration: every user-facing hyperparameter in one place.

CLI flag defaults are generated from this dataclass so the two surfaces
cannot drift apart.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .exceptions import ConfigError
from .families import FAMILY_NAMES
from .nn_core import ACTIVATIONS


@dataclass
class FitConfig:
    """Hyperparameters for fitting an additive neural model.

    num_units defines each subnetwork's hidden widths: a scalar gives one
    hidden layer, a sequence one layer per entry. Everything else has the
    documented default.
    """

    num_units: tuple[int, ...]
    family: str = "gaussian"
    learning_rate: float = 0.001
    activation: str = "relu"
    loss: str = "mse"
    kernel_initializer: str = "glorot_normal"
    bias_initializer: str = "zeros"
    l2_penalty: float = 0.0
    bias_regularizer: str | None = None
    activity_regularizer: str | None = None
    w_train: str | None = None
    bf_threshold: float = 0.001
    ls_threshold: float = 0.1
    max_iter_backfitting: int = 10
    max_iter_ls: int = 10
    batch_size: int = 128
    epochs_per_sweep: int = 1
    seed: int | None = None
    verbose: int = 1
    mu_clamp: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-7

    def __post_init__(self):
        if isinstance(self.num_units, (int, float)):
            self.num_units = (int(self.num_units),)
        else:
            self.num_units = tuple(int(u) for u in self.num_units)
        if not self.num_units or any(u < 1 for u in self.num_units):
            raise ConfigError("num_units must be positive integer(s)")
        if self.family not in FAMILY_NAMES:
            raise ConfigError(f"family must be one of {FAMILY_NAMES}, got {self.family!r}")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")
        if self.loss != "mse":
            raise ConfigError(f"only loss='mse' is supported, got {self.loss!r}")
        if self.l2_penalty < 0:
            raise ConfigError("l2_penalty must be nonnegative")
        if self.bias_regularizer is not None:
            raise ConfigError("bias_regularizer is not implemented; only the L2 "
                              "kernel penalty (l2_penalty) is supported")
        if self.activity_regularizer is not None:
            raise ConfigError("activity_regularizer is not implemented; only the L2 "
                              "kernel penalty (l2_penalty) is supported")
        if self.bf_threshold <= 0 or self.ls_threshold <= 0:
            raise ConfigError("convergence thresholds must be positive")
        if self.max_iter_backfitting < 1 or self.max_iter_ls < 1:
            raise ConfigError("iteration limits must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.epochs_per_sweep < 1:
            raise ConfigError("epochs_per_sweep must be >= 1")
        if self.verbose not in (0, 1):
            raise ConfigError("verbose must be 0 or 1")
        if not 0.0 < self.mu_clamp < 0.5:
            raise ConfigError("mu_clamp must lie in (0, 0.5)")

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "FitConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        return cls(**d)
