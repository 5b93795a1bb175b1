"""Flat key-value experiment configuration.

A config file is plain text: one ``key = value`` per line, ``#`` comments,
blank lines ignored. Values are typed by the dataclass field they target.
Presets provide the two standard settings: ``paper`` mirrors the reference
hyperparameter table (3 layers, 8 heads, hidden 128, FFN 256, lr 3e-4,
batch 128, 200 epochs, weight decay 1e-4, warm-up 10) and ``desk`` is the
small CI-scale setting (2 layers, 4 heads, hidden 32, 50 epochs).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import InvalidConfig


@dataclass
class ExperimentConfig:
    # transformer
    layers: int = 2
    heads: int = 4
    hidden_dim: int = 32
    ffn_dim: int = 64
    dropout: float = 0.05
    learning_rate: float = 1e-3
    batch_size: int = 16
    epochs: int = 50
    weight_decay: float = 1e-4
    warmup_steps: int = 10
    readout: str = "mean"
    bucket_count: int = 8
    # graph construction
    threshold: float = 0.3
    # entanglement
    gamma: float = 0.05
    mode: str = "ground"
    mode_delta: float = 1.0
    mode_weight: float = 1.0
    ne_method: str = "exact"
    # augmentation + contrastive extractor
    drop_fraction: float = 0.2
    temperature: float = 1.0
    negatives: int = 16
    extractor_hidden: int = 64
    extractor_depth: int = 1
    extractor_epochs: int = 5
    extractor_lr: float = 1e-2
    # community detection
    resolution: float = 1.0
    shared_partition: bool = False
    # synthetic data
    synth_family: str = "hub-strength"
    synth_nodes: int = 30
    synth_modules: int = 3
    synth_graphs_per_class: int = 100
    # orchestration
    data_dir: str = ""
    seed: int = 0
    workers: int = 1
    ablate: str = "none"

    def __post_init__(self):
        if self.readout != "mean":
            raise InvalidConfig("readout must be 'mean'")
        if self.mode not in ("ground", "isolate", "attach"):
            raise InvalidConfig("mode must be ground, isolate, or attach")
        if self.ablate not in ("none", "ne", "fm-attn"):
            raise InvalidConfig("ablate must be none, ne, or fm-attn")
        if self.ne_method not in ("exact", "approx"):
            raise InvalidConfig("ne_method must be exact or approx")
        if self.synth_family not in ("hub-strength", "two-module", "planted"):
            raise InvalidConfig("unknown synth_family")
        for name in ("gamma", "learning_rate", "temperature"):
            if not getattr(self, name) > 0:
                raise InvalidConfig(f"{name} must be positive")
        if not 0 <= self.drop_fraction < 1:
            raise InvalidConfig("drop_fraction must be in [0, 1)")


PRESETS: dict[str, dict] = {
    "paper": {
        "layers": 3, "heads": 8, "hidden_dim": 128, "ffn_dim": 256,
        "dropout": 0.1, "learning_rate": 3e-4, "batch_size": 128,
        "epochs": 200, "weight_decay": 1e-4, "warmup_steps": 10,
    },
    "desk": {
        "layers": 2, "heads": 4, "hidden_dim": 32, "ffn_dim": 64,
        "dropout": 0.05, "learning_rate": 1e-3, "batch_size": 16,
        "epochs": 50, "weight_decay": 1e-4, "warmup_steps": 10,
    },
}

_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _parse_value(name: str, raw: str):
    if name not in _FIELDS:
        raise InvalidConfig(f"unknown config key {name!r}")
    target = _FIELDS[name].type
    raw = raw.strip()
    if target in ("bool", bool):
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise InvalidConfig(f"{name} expects a boolean, got {raw!r}")
    if target in ("int", int):
        try:
            return int(raw)
        except ValueError as exc:
            raise InvalidConfig(f"{name} expects an integer, got {raw!r}") from exc
    if target in ("float", float):
        try:
            return float(raw)
        except ValueError as exc:
            raise InvalidConfig(f"{name} expects a number, got {raw!r}") from exc
    return raw


def parse_config_text(text: str) -> dict:
    """Key-value pairs from config text; types follow the target fields."""
    out: dict = {}
    for ln, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise InvalidConfig(f"line {ln}: expected 'key = value'")
        name, raw = stripped.split("=", 1)
        out[name.strip()] = _parse_value(name.strip(), raw)
    return out


def load_config(path=None, preset: str | None = None,
                overrides: dict | None = None) -> ExperimentConfig:
    """Defaults <- preset <- file <- explicit overrides, in that order."""
    values: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise InvalidConfig(f"unknown preset {preset!r}")
        values.update(PRESETS[preset])
    if path is not None:
        with open(path, encoding="utf-8") as f:
            values.update(parse_config_text(f.read()))
    if overrides:
        for k, v in overrides.items():
            if k not in _FIELDS:
                raise InvalidConfig(f"unknown config key {k!r}")
            values[k] = v
    return ExperimentConfig(**values)


def config_to_text(cfg: ExperimentConfig) -> str:
    lines = [f"{f.name} = {getattr(cfg, f.name)}"
             for f in dataclasses.fields(ExperimentConfig)]
    return "\n".join(lines) + "\n"
