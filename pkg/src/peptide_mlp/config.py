"""Pipeline configuration and its JSON (de)serialization."""
from __future__ import annotations

import copy
import math
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .ga import GaConfig
from .mlp import TrainConfig
from .resample import SmoteConfig
from .synth import SynthConfig

BALANCE_METHODS = ("smote", "replicate", "none")
PLACEMENTS = ("before_cv", "within_fold")


class ConfigError(ValueError):
    """Configuration problems, all collected before raising."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


@dataclass(frozen=True)
class PipelineConfig:
    input: Optional[str] = None
    output_dir: Optional[str] = None
    master_seed: int = 0
    balance: str = "smote"
    placement: str = "before_cv"
    smote: SmoteConfig = field(default_factory=SmoteConfig)
    select_features: bool = True
    ga: GaConfig = field(default_factory=GaConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    hidden_layers: tuple = (60, 60, 60)
    k_folds: int = 10
    validation_fraction: float = 0.2
    synth: Optional[SynthConfig] = None

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["hidden_layers"] = list(self.hidden_layers)
        return d

    @property
    def train_config(self) -> TrainConfig:
        return dataclasses.replace(self.train, validation_fraction=self.validation_fraction)


_SECTIONS = {"smote": SmoteConfig, "ga": GaConfig, "train": TrainConfig, "synth": SynthConfig}


def _build_section(name, cls, values, problems):
    if values is None:
        return None
    if not isinstance(values, dict):
        problems.append(f"{name}: must be an object")
        return None
    known = {f.name for f in dataclasses.fields(cls)}
    for key in sorted(set(values) - known):
        problems.append(f"{name}.{key}: unknown field")
    kwargs = {k: v for k, v in values.items() if k in known}
    # validate on an unchecked copy first so every bad field is reported
    probe = copy.copy(cls())
    for key, value in kwargs.items():
        object.__setattr__(probe, key, value)
    try:
        found = probe.problems()
    except TypeError as exc:
        found = [f"wrong value type ({exc})"]
    if found:
        problems.extend(f"{name}.{p}" for p in found)
        return None
    return cls(**kwargs)


def config_from_dict(raw: dict) -> PipelineConfig:
    """Build and validate a :class:`PipelineConfig`; report every bad field."""
    problems = []
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    for key in sorted(set(raw) - known):
        problems.append(f"{key}: unknown field")
    kwargs = {}
    for key in known & set(raw):
        if key in _SECTIONS:
            obj = _build_section(key, _SECTIONS[key], raw[key], problems)
            if obj is not None:
                kwargs[key] = obj
        else:
            kwargs[key] = raw[key]

    if kwargs.get("balance", "smote") not in BALANCE_METHODS:
        problems.append(f"balance: must be one of {', '.join(BALANCE_METHODS)}")
    if kwargs.get("placement", "before_cv") not in PLACEMENTS:
        problems.append(f"placement: must be one of {', '.join(PLACEMENTS)}")
    k = kwargs.get("k_folds", 10)
    if not isinstance(k, int) or k < 2:
        problems.append("k_folds: must be an integer >= 2")
    vf = kwargs.get("validation_fraction", 0.2)
    if not isinstance(vf, (int, float)) or not 0 < vf < 1:
        problems.append("validation_fraction: must lie in (0, 1)")
    hl = kwargs.get("hidden_layers", (60, 60, 60))
    if not isinstance(hl, (list, tuple)) or not hl or any(not isinstance(h, int) or h < 1 for h in hl):
        problems.append("hidden_layers: must be a non-empty list of positive integers")
    else:
        kwargs["hidden_layers"] = tuple(hl)
    train = kwargs.get("train")
    if train is not None and not math.isfinite(train.max_fail):
        problems.append("train.max_fail: must be finite in a pipeline config (reports are strict JSON)")
    inp = kwargs.get("input")
    if inp is not None and not Path(str(inp)).is_file():
        problems.append(f"input: no such file: {inp}")
    seed = kwargs.get("master_seed", 0)
    if not isinstance(seed, int) or seed < 0:
        problems.append("master_seed: must be a nonnegative integer")

    if problems:
        raise ConfigError(problems)
    return PipelineConfig(**kwargs)


def merge(base: dict, overrides: dict) -> dict:
    """Recursively overlay ``overrides`` on ``base`` (dicts only)."""
    out = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], value)
        else:
            out[key] = value
    return out
