"""Run configuration: an INI document with typed sections and defaults.

Every key has a documented default; unknown sections or keys are hard
errors so typos cannot silently fall back to defaults.  The canonical
rendering (sorted ``section.key=value`` lines) feeds the config hash that
training logs into model bundles.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .features import TfidfConfig
from .models import GbdtConfig, SgdConfig

DEFAULTS: dict[str, dict] = {
    "run": {
        "seed": 42,
        "threads": 0,          # 0 = machine parallelism
    },
    "tokenizer": {
        "vocab_size": 5000,
        "vocab_path": "",      # trained vocabulary consumed by train/predict
    },
    "features": {
        "token_source": "bpe",  # or "whitespace"
        "ngram_min": 1,
        "ngram_max": 3,
        "min_df": 2,
        "sublinear_tf": False,
        "l2_normalize": True,
    },
    "naive_bayes": {
        "alpha": 1.0,
    },
    "sgd": {
        "eta0": 0.5,
        "l2": 1e-4,
        "epochs": 10,
    },
    "gbdt": {
        "variant": "leaf_wise",
        "n_trees": 200,
        "learning_rate": 0.1,
        "max_leaves": 31,
        "depth": 6,
        "n_bins": 255,
        "min_data_in_leaf": 20,
        "lambda_l2": 1.0,
    },
    "ensemble": {
        "combine": "probability_mean",
        "voters": "",          # comma-separated bundle/score-file paths
        "weights": "",         # comma-separated reals, parallel to voters
        "grid_step": 0.1,      # step for --tune-weights
    },
}

_BOOL_VALUES = {"true": True, "1": True, "yes": True,
                "false": False, "0": False, "no": False}


def _coerce(section: str, key: str, raw: str, default):
    path = f"{section}.{key}"
    if isinstance(default, bool):
        value = _BOOL_VALUES.get(raw.strip().lower())
        if value is None:
            raise ConfigError(f"{path}: expected a boolean, got {raw!r}")
        return value
    if isinstance(default, int):
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{path}: expected an integer, got {raw!r}")
    if isinstance(default, float):
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{path}: expected a number, got {raw!r}")
    return raw


@dataclass
class RunConfig:
    sections: dict[str, dict]

    def get(self, section: str, key: str):
        return self.sections[section][key]

    @property
    def seed(self) -> int:
        return self.sections["run"]["seed"]

    def with_seed(self, seed: int) -> "RunConfig":
        sections = {name: dict(values) for name, values in self.sections.items()}
        sections["run"]["seed"] = seed
        return RunConfig(sections=sections)

    def tfidf_config(self) -> TfidfConfig:
        f = self.sections["features"]
        return TfidfConfig(ngram_min=f["ngram_min"], ngram_max=f["ngram_max"],
                           min_df=f["min_df"], sublinear_tf=f["sublinear_tf"],
                           l2_normalize=f["l2_normalize"])

    def sgd_config(self) -> SgdConfig:
        s = self.sections["sgd"]
        return SgdConfig(eta0=s["eta0"], l2=s["l2"], epochs=s["epochs"],
                         seed=self.seed)

    def gbdt_config(self) -> GbdtConfig:
        g = self.sections["gbdt"]
        return GbdtConfig(variant=g["variant"], n_trees=g["n_trees"],
                          learning_rate=g["learning_rate"],
                          max_leaves=g["max_leaves"], depth=g["depth"],
                          n_bins=g["n_bins"],
                          min_data_in_leaf=g["min_data_in_leaf"],
                          lambda_l2=g["lambda_l2"])

    def canonical(self) -> str:
        lines = []
        for section in sorted(self.sections):
            for key in sorted(self.sections[section]):
                lines.append(f"{section}.{key}={self.sections[section][key]!r}")
        return "\n".join(lines) + "\n"

    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()


def default_config() -> RunConfig:
    return RunConfig(sections={name: dict(values)
                               for name, values in DEFAULTS.items()})


def load_run_config(path=None) -> RunConfig:
    """Parse an INI run config, or return pure defaults when path is None."""
    if path is None:
        return default_config()
    parser = configparser.ConfigParser(interpolation=None)
    try:
        text = Path(path).read_bytes().decode("utf-8", errors="strict")
    except FileNotFoundError:
        raise ConfigError(f"no such config file: {path}")
    except UnicodeDecodeError as exc:
        raise ConfigError(f"undecodable bytes in {path}: {exc}")
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}")

    config = default_config()
    for section in parser.sections():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown section [{section}] "
                              f"(expected one of {sorted(DEFAULTS)})")
        for key, raw in parser.items(section):
            if key not in DEFAULTS[section]:
                raise ConfigError(
                    f"unknown key {section}.{key} (expected one of "
                    f"{sorted(DEFAULTS[section])})")
            config.sections[section][key] = _coerce(
                section, key, raw, DEFAULTS[section][key])
    return config
