"""Run configuration files (JSON) for the command line."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .consistency import DEFAULT_ALPHA
from .core import StedConfig
from .embeddings import Embedder, EmbeddingCache, EmbeddingProviderSpec
from .errors import ConfigError
from .similarity import ScalarComparisonPolicy


def load_schema() -> dict:
    return json.loads(resources.files("sted").joinpath("run_config.schema.json").read_text(encoding="utf-8"))


@dataclass(frozen=True)
class RunConfig:
    mode: str = "hybrid"
    w_s: float | None = None
    w_c: float | None = None
    lam: float = 0.1
    alpha: float = DEFAULT_ALPHA
    insert_cost: float = 1.0
    delete_cost: float = 1.0
    padding: str = "subtree"
    coercion_enabled: bool = True
    coercion_penalty: float = 0.2
    string_threshold_chars: int = 300
    chunk_overlap_chars: int = 50
    provider: EmbeddingProviderSpec = field(default_factory=EmbeddingProviderSpec)
    cache_path: str | None = None
    seed: int = 0

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunConfig:
        try:
            jsonschema.validate(data, load_schema())
        except jsonschema.ValidationError as exc:
            where = "/".join(map(str, exc.absolute_path)) or "<root>"
            raise ConfigError(f"invalid run config at {where}: {exc.message}") from exc
        weights = data.get("weights") or {}
        coercion = data.get("coercion") or {}
        cfg = cls(
            mode=data.get("mode", "hybrid"),
            w_s=weights.get("w_s"),
            w_c=weights.get("w_c"),
            lam=data.get("lambda", 0.1),
            alpha=data.get("alpha", DEFAULT_ALPHA),
            insert_cost=data.get("insert_cost", 1.0),
            delete_cost=data.get("delete_cost", 1.0),
            padding=data.get("padding", "subtree"),
            coercion_enabled=coercion.get("enabled", True),
            coercion_penalty=coercion.get("penalty", 0.2),
            string_threshold_chars=data.get("string_threshold_chars", 300),
            chunk_overlap_chars=data.get("chunk_overlap_chars", 50),
            provider=EmbeddingProviderSpec.from_dict(data.get("provider") or {}),
            cache_path=data.get("cache_path"),
            seed=data.get("seed", 0),
        )
        cfg.sted_config()  # surface cross-field errors at load time
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc.msg} at offset {exc.pos}") from exc
        return cls.from_dict(data)

    def scalar_policy(self) -> ScalarComparisonPolicy:
        return ScalarComparisonPolicy(
            coercion_enabled=self.coercion_enabled,
            coercion_penalty=self.coercion_penalty,
            string_threshold_chars=self.string_threshold_chars,
            chunk_overlap_chars=self.chunk_overlap_chars,
        )

    def sted_config(self, mode: str | None = None) -> StedConfig:
        cfg = StedConfig(
            mode=self.mode,
            w_s=self.w_s,
            w_c=self.w_c,
            lam=self.lam,
            insert_cost=self.insert_cost,
            delete_cost=self.delete_cost,
            padding=self.padding,
            scalar_policy=self.scalar_policy(),
        )
        return cfg.with_mode(mode) if mode else cfg

    def embedder(self) -> Embedder:
        cache = EmbeddingCache(self.cache_path) if self.cache_path else None
        return Embedder(self.provider, cache)
