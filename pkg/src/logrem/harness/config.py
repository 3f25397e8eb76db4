"""Experiment configuration: JSON file plus CLI overrides (flags win)."""

from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass, field, fields

EXPERIMENTS = (
    "covariance-check",
    "sample",
    "free-energy",
    "overlap-cdf",
    "high-points",
    "perturbed-free-energy",
    "bk-check",
    "gg-check",
    "ultrametricity",
    "pd-moments",
    "pd-bridge",
    "slepian-check",
)

# JSON/CLI key -> dataclass attribute
_KEY_MAP = {
    "experiment": "experiment",
    "n": "n_list",
    "beta": "beta_list",
    "sigma": "sigma",
    "sigma1": "sigma1",
    "sigma2": "sigma2",
    "alpha": "alpha",
    "u": "u",
    "gammas": "gammas",
    "qGrid": "q_grid",
    "s": "s",
    "ggFunctional": "gg_functional",
    "fieldBudget": "field_budget",
    "replicaBudget": "replica_budget",
    "pdSampleBudget": "pd_sample_budget",
    "momentMaxTotal": "moment_max_total",
    "rootSeed": "root_seed",
    "workers": "workers",
    "outputPath": "output_path",
    "outputFormat": "output_format",
    "verifyFirst": "verify_first",
    "timing": "timing",
}


class ConfigError(ValueError):
    """Invalid configuration; carries a machine-readable payload."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.payload = {"error": "invalid-config", "message": message}
        if key is not None:
            self.payload["key"] = key


def _default_workers() -> int:
    raw = os.environ.get("LOGREM_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class ExperimentConfig:
    experiment: str = ""
    n_list: list = field(default_factory=lambda: [1024])
    beta_list: list = field(default_factory=lambda: [1.0])
    sigma: float = 1.0
    sigma1: float = 1.0
    sigma2: float = 1.0
    alpha: float = 0.5
    u: float = 0.0
    gammas: list = field(default_factory=lambda: [0.5])
    q_grid: list = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    s: int = 2
    gg_functional: str = "q12"
    field_budget: int = 200
    replica_budget: int = 256
    pd_sample_budget: int = 100_000
    moment_max_total: int = 4
    root_seed: int | None = None
    workers: int = field(default_factory=_default_workers)
    output_path: str = ""
    output_format: str = "csv"
    verify_first: bool = True
    timing: bool = False

    @property
    def beta(self) -> float:
        return float(self.beta_list[0])

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; choose one of {', '.join(EXPERIMENTS)}",
                key="experiment",
            )
        if self.root_seed is None:
            raise ConfigError("rootSeed is mandatory for reproducibility", key="rootSeed")
        if int(self.root_seed) < 0:
            raise ConfigError("rootSeed must be nonnegative", key="rootSeed")
        self.root_seed = int(self.root_seed)
        if not self.n_list:
            raise ConfigError("need at least one n", key="n")
        self.n_list = [int(n) for n in self.n_list]
        for n in self.n_list:
            if n < 4:
                raise ConfigError(f"n must be >= 4, got {n}", key="n")
            if n & (n - 1):
                warnings.warn(f"n = {n} is not a power of two; powers of two are recommended")
        self.beta_list = [float(b) for b in self.beta_list]
        if any(b <= 0 for b in self.beta_list):
            raise ConfigError("beta values must be positive", key="beta")
        for key, value in (
            ("fieldBudget", self.field_budget),
            ("replicaBudget", self.replica_budget),
            ("pdSampleBudget", self.pd_sample_budget),
        ):
            if int(value) < 1:
                raise ConfigError(f"{key} must be >= 1", key=key)
        self.field_budget = int(self.field_budget)
        self.replica_budget = int(self.replica_budget)
        self.pd_sample_budget = int(self.pd_sample_budget)
        if self.workers < 1:
            raise ConfigError("workers must be >= 1", key="workers")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("outputFormat must be 'csv' or 'json'", key="outputFormat")
        if not (self.sigma > 0 and self.sigma1 > 0 and self.sigma2 > 0):
            raise ConfigError("sigma parameters must be positive", key="sigma")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)", key="alpha")
        if self.s < 2:
            raise ConfigError("s must be >= 2", key="s")
        if self.gg_functional not in ("q12", "one"):
            raise ConfigError("ggFunctional must be 'q12' or 'one'", key="ggFunctional")
        if any(not 0 <= q <= 1 for q in self.q_grid):
            raise ConfigError("qGrid values must lie in [0, 1]", key="qGrid")
        return self


def _assign(cfg: ExperimentConfig, key: str, value):
    if key not in _KEY_MAP:
        raise ConfigError(f"unknown config key {key!r}", key=key)
    attr = _KEY_MAP[key]
    if attr in ("n_list", "beta_list", "gammas", "q_grid") and not isinstance(value, list):
        value = [value]
    setattr(cfg, attr, value)


def load_config(path: str | None, overrides: dict) -> ExperimentConfig:
    """Build a config from an optional JSON file plus overrides (flags win)."""
    cfg = ExperimentConfig()
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in data.items():
            _assign(cfg, key, value)
    for key, value in overrides.items():
        if value is not None:
            _assign(cfg, key, value)
    return cfg.validate()


def config_echo(cfg: ExperimentConfig) -> dict:
    """JSON-ready dump of the full configuration."""
    out = {}
    for f in fields(cfg):
        out[f.name] = getattr(cfg, f.name)
    return out
