"""Embedding providers and the persistent embedding cache.

Two provider kinds exist:

* ``deterministic-local`` -- a hashed bag of features, fully specified so
  that any implementation reproduces it bit for bit:

  1. lowercase the text and split it into word tokens with the regex ``\\w+``
     (Unicode aware);
  2. for every token emit the feature ``"w:" + token`` and, for every
     character trigram of ``"#" + token + "#"``, the feature ``"t:" + trigram``;
  3. if the text has no word tokens, emit ``"c:" + ch`` for every character;
  4. bucket each feature by the first four bytes of its UTF-8 SHA-256 digest
     read as a little-endian unsigned integer, modulo the dimension (256);
  5. add 1.0 to the bucket per occurrence, L2-normalize, store as float32.

* ``remote-http`` -- ``POST {endpoint}`` with ``{"model": ..., "texts": [...]}``,
  answered by ``{"vectors": [[...], ...]}`` in request order.

Vectors are always returned as unit-norm float32 arrays so that a cache hit
is bit-identical to the original response.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import struct
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, DimensionMismatch, InputError, ProviderUnavailable

log = logging.getLogger(__name__)

LOCAL = "deterministic-local"
REMOTE = "remote-http"
TOKEN_ENV = "STED_EMBEDDING_TOKEN"

_WORD = re.compile(r"\w+")


@dataclass(frozen=True)
class EmbeddingProviderSpec:
    provider_id: str = "local-hash-256"
    kind: str = LOCAL
    endpoint: str | None = None
    model_id: str | None = None
    dimension: int = 256
    timeout_ms: int = 10_000
    max_batch: int = 64
    max_in_flight: int = 8
    retries: int = 2

    def __post_init__(self):
        if self.kind not in (LOCAL, REMOTE):
            raise ConfigError(f"unknown provider kind {self.kind!r}")
        if self.kind == LOCAL and self.endpoint:
            raise ConfigError("deterministic-local provider takes no endpoint")
        if self.kind == REMOTE and not self.endpoint:
            raise ConfigError("remote-http provider requires an endpoint")
        for name in ("dimension", "timeout_ms", "max_batch", "max_in_flight"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.retries < 0:
            raise ConfigError("retries must be non-negative")

    @classmethod
    def from_dict(cls, data: dict) -> EmbeddingProviderSpec:
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown provider fields: {sorted(unknown)}")
        return cls(**data)


def _unit(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.float64)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0 or not np.isfinite(norm):
        raise DimensionMismatch("embedding has zero or non-finite norm")
    return (vec / norm).astype(np.float32)


def local_features(text: str) -> list[str]:
    lowered = text.lower()
    tokens = _WORD.findall(lowered)
    if not tokens:
        return ["c:" + ch for ch in lowered]
    feats = []
    for tok in tokens:
        feats.append("w:" + tok)
        padded = f"#{tok}#"
        feats.extend("t:" + padded[i : i + 3] for i in range(len(padded) - 2))
    return feats


def feature_bucket(feature: str, dimension: int) -> int:
    digest = hashlib.sha256(feature.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little") % dimension


class LocalHashProvider:
    def __init__(self, spec: EmbeddingProviderSpec | None = None):
        self.spec = spec or EmbeddingProviderSpec()

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        out = []
        dim = self.spec.dimension
        for text in texts:
            vec = np.zeros(dim, dtype=np.float64)
            for feat in local_features(text):
                vec[feature_bucket(feat, dim)] += 1.0
            out.append(_unit(vec))
        return out


class RemoteHttpProvider:
    def __init__(self, spec: EmbeddingProviderSpec):
        self.spec = spec
        self._slots = threading.BoundedSemaphore(spec.max_in_flight)

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for start in range(0, len(texts), self.spec.max_batch):
            out.extend(self._request(list(texts[start : start + self.spec.max_batch])))
        return out

    def _request(self, texts: list[str]) -> list[np.ndarray]:
        body = json.dumps({"model": self.spec.model_id, "texts": texts}).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(TOKEN_ENV)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        last: Exception | None = None
        for attempt in range(self.spec.retries + 1):
            if attempt:
                time.sleep(min(0.05 * 2**attempt, 1.0))
            req = urllib.request.Request(self.spec.endpoint, data=body, headers=headers, method="POST")
            try:
                with self._slots, urllib.request.urlopen(req, timeout=self.spec.timeout_ms / 1000) as resp:
                    payload = json.loads(resp.read().decode("utf-8"))
                break
            except (urllib.error.URLError, OSError, TimeoutError, ValueError) as exc:
                last = exc
                log.warning("embedding request failed (attempt %d): %s", attempt + 1, exc)
        else:
            raise ProviderUnavailable(f"{self.spec.endpoint}: {last}")
        vectors = payload.get("vectors") if isinstance(payload, dict) else None
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProviderUnavailable("malformed provider response")
        out = []
        for vec in vectors:
            if not isinstance(vec, list):
                raise ProviderUnavailable("malformed provider response")
            if len(vec) != self.spec.dimension:
                raise DimensionMismatch(f"expected dimension {self.spec.dimension}, got {len(vec)}")
            out.append(_unit(np.asarray(vec, dtype=np.float64)))
        return out


def make_provider(spec: EmbeddingProviderSpec):
    return LocalHashProvider(spec) if spec.kind == LOCAL else RemoteHttpProvider(spec)


class EmbeddingCache:
    """Append-only on-disk cache: one record file per (provider, model, text).

    Record layout: a JSON header line ``{"provider_id", "model_id",
    "input_hash"}`` followed by a little-endian uint32 dimension and that many
    little-endian float32 components.
    """

    SUFFIX = ".rec"

    def __init__(self, storage_path: str | os.PathLike):
        self.storage_path = Path(storage_path).expanduser()
        self.storage_path.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()

    @staticmethod
    def input_hash(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def _record_path(self, provider_id: str, model_id: str | None, ihash: str) -> Path:
        key = hashlib.sha256(f"{provider_id}\0{model_id or ''}\0{ihash}".encode()).hexdigest()
        return self.storage_path / (key + self.SUFFIX)

    def get(self, provider_id: str, model_id: str | None, text: str) -> np.ndarray | None:
        path = self._record_path(provider_id, model_id, self.input_hash(text))
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            return None
        newline = data.index(b"\n")
        (dim,) = struct.unpack_from("<I", data, newline + 1)
        return np.frombuffer(data, dtype="<f4", count=dim, offset=newline + 5).astype(np.float32)

    def put(self, provider_id: str, model_id: str | None, text: str, vector: np.ndarray) -> None:
        ihash = self.input_hash(text)
        path = self._record_path(provider_id, model_id, ihash)
        vec = np.asarray(vector, dtype="<f4")
        header = json.dumps({"provider_id": provider_id, "model_id": model_id, "input_hash": ihash})
        blob = header.encode("utf-8") + b"\n" + struct.pack("<I", vec.size) + vec.tobytes()
        with self._write_lock:
            if path.exists():
                return
            tmp = path.with_suffix(f".tmp{os.getpid()}.{threading.get_ident()}")
            tmp.write_bytes(blob)
            os.replace(tmp, path)

    def records(self) -> list[Path]:
        return sorted(self.storage_path.glob("*" + self.SUFFIX))

    def stats(self) -> dict:
        recs = self.records()
        return {
            "path": str(self.storage_path),
            "entries": len(recs),
            "bytes": sum(p.stat().st_size for p in recs),
        }

    def clear(self) -> int:
        recs = self.records()
        with self._write_lock:
            for p in recs:
                p.unlink(missing_ok=True)
        return len(recs)


class Embedder:
    """Provider + optional persistent cache + in-process memo.

    This is the ``providers`` bundle the comparators take.
    """

    def __init__(
        self,
        spec: EmbeddingProviderSpec | None = None,
        cache: EmbeddingCache | None = None,
        memo_size: int = 200_000,
    ):
        self.spec = spec or EmbeddingProviderSpec()
        self.provider = make_provider(self.spec)
        self.cache = cache
        self._memo: dict[str, np.ndarray] = {}
        self._sims: dict[tuple[str, str], float] = {}
        self._memo_size = memo_size
        self._lock = threading.Lock()

    def __getstate__(self):
        # Worker processes rebuild memo state from scratch.
        return {"spec": self.spec, "cache_path": self.cache.storage_path if self.cache else None, "memo_size": self._memo_size}

    def __setstate__(self, state):
        cache = EmbeddingCache(state["cache_path"]) if state["cache_path"] else None
        self.__init__(state["spec"], cache, state["memo_size"])

    def embed(self, text: str) -> np.ndarray:
        return self.embed_many([text])[0]

    def embed_many(self, texts: Sequence[str]) -> list[np.ndarray]:
        for t in texts:
            if not t:
                raise InputError("cannot embed empty text")
        result: dict[str, np.ndarray] = {}
        missing: list[str] = []
        for t in texts:
            hit = self._memo.get(t)
            if hit is None and self.cache is not None:
                hit = self.cache.get(self.spec.provider_id, self.spec.model_id, t)
            if hit is None:
                if t not in result:
                    missing.append(t)
                    result[t] = None  # placeholder keeps dedupe
            else:
                result[t] = hit
        missing = list(dict.fromkeys(missing))
        if missing:
            fresh = self.provider.embed_batch(missing)
            for t, vec in zip(missing, fresh):
                if vec.shape != (self.spec.dimension,):
                    raise DimensionMismatch(f"expected dimension {self.spec.dimension}, got {vec.shape}")
                if self.cache is not None:
                    self.cache.put(self.spec.provider_id, self.spec.model_id, t, vec)
                result[t] = vec
        with self._lock:
            if len(self._memo) > self._memo_size:
                self._memo.clear()
            for t in texts:
                self._memo[t] = result[t]
        return [result[t] for t in texts]


def embed_text(text: str, provider: EmbeddingProviderSpec | None = None, cache: EmbeddingCache | None = None) -> np.ndarray:
    """Embed one text; a fresh, memo-less route through provider and cache."""
    return Embedder(provider, cache).embed(text)


_DEFAULT: Embedder | None = None


def default_embedder() -> Embedder:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = Embedder()
    return _DEFAULT
