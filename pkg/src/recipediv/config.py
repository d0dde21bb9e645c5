"""Run configuration: a small key=value file format plus defaults.

Lines are ``key = value``; '#' starts a comment. The co-occurrence window is
``document`` or ``sliding:K``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


class ConfigError(ValueError):
    pass


def _parse_window(value: str) -> int | None:
    value = value.strip().lower()
    if value == "document":
        return None
    if value.startswith("sliding:"):
        try:
            k = int(value.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad sliding window {value!r}") from None
        if k < 1:
            raise ConfigError("sliding window must be >= 1")
        return k
    raise ConfigError(f"cooc_window must be 'document' or 'sliding:K', got {value!r}")


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"bad boolean {value!r}")


@dataclass(frozen=True)
class Config:
    cooc_window: int | None = None  # None = document-level
    disappearance_norm: str = "variation"  # or "reference"
    newness_eps: float | None = None  # manual threshold overrides
    difference_eps: float | None = None
    aggregate: str = "mean"  # or "median" (correlation cells)
    group_by: str = "model"  # or "pooled"
    too_short_tokens: int = 50
    repetition_run: int = 3
    english_threshold: float = 0.15
    layer_pos_filter: bool = False
    jobs: int = 1

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "Config":
        cfg = cls()
        parsers = {
            "cooc_window": ("cooc_window", _parse_window),
            "disappearance_norm": ("disappearance_norm", str.strip),
            "newness_eps": ("newness_eps", float),
            "difference_eps": ("difference_eps", float),
            "aggregate": ("aggregate", str.strip),
            "group_by": ("group_by", str.strip),
            "too_short_tokens": ("too_short_tokens", int),
            "repetition_run": ("repetition_run", int),
            "english_threshold": ("english_threshold", float),
            "layer_pos_filter": ("layer_pos_filter", _parse_bool),
            "jobs": ("jobs", int),
        }
        updates = {}
        for key, raw in mapping.items():
            if key not in parsers:
                raise ConfigError(f"unknown config key {key!r}")
            attr, parse = parsers[key]
            updates[attr] = parse(raw)
        cfg = replace(cfg, **updates)
        if cfg.disappearance_norm not in ("variation", "reference"):
            raise ConfigError("disappearance_norm must be variation|reference")
        if cfg.aggregate not in ("mean", "median"):
            raise ConfigError("aggregate must be mean|median")
        if cfg.group_by not in ("model", "pooled"):
            raise ConfigError("group_by must be model|pooled")
        return cfg

    @classmethod
    def from_file(cls, path) -> "Config":
        mapping: dict[str, str] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"line {line_no}: expected key = value")
                key, value = line.split("=", 1)
                mapping[key.strip()] = value.strip()
        return cls.from_mapping(mapping)

    def fingerprint(self) -> str:
        window = "document" if self.cooc_window is None else f"sliding:{self.cooc_window}"
        parts = [window, self.disappearance_norm, str(self.newness_eps),
                 str(self.difference_eps), self.aggregate]
        return "|".join(parts)
