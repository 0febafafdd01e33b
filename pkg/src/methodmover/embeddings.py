"""Embedding providers, cosine similarity, and misplacement scoring.

Two providers share one interface: a deterministic local hashed-bag encoder
for offline runs and tests, and a remote HTTP provider speaking the common
embeddings wire shape ({model, input} in, {data: [{embedding}]} out). Remote
results are cached on disk keyed by (model, content hash) so re-runs never
re-bill the same text.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import requests

from .errors import (
    DimensionMismatch,
    EmptyContent,
    ProviderUnavailable,
    ZeroVector,
)
from .model import ClassInfo, MethodInfo, ProjectIndex

LOCAL_DIMENSION = 512
LOCAL_MODEL_ID = "local-hash-tf-512"

_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z0-9]+|[A-Z]+")


@dataclass
class EmbeddingVector:
    values: list[float]
    model_id: str

    @property
    def dimension(self) -> int:
        return len(self.values)

    def to_doc(self) -> dict:
        return {"model_id": self.model_id, "dimension": self.dimension, "values": self.values}


class Embedder(Protocol):
    model_id: str

    def embed(self, content: str) -> EmbeddingVector: ...


def split_identifier(word: str) -> list[str]:
    """Split camelCase and snake_case into lowercased parts."""
    parts: list[str] = []
    for chunk in word.split("_"):
        if not chunk:
            continue
        parts.extend(m.group(0).lower() for m in _CAMEL_RE.finditer(chunk))
    return parts


def content_tokens(content: str) -> list[str]:
    tokens: list[str] = []
    for w in _WORD_RE.findall(content):
        tokens.extend(split_identifier(w))
    return tokens


def content_hash(content: str) -> str:
    return hashlib.sha256(content.encode()).hexdigest()


def _bucket(token: str) -> int:
    return int.from_bytes(hashlib.md5(token.encode()).digest()[:4], "big") % LOCAL_DIMENSION


class LocalEmbedder:
    """Deterministic offline encoder: hashed term frequencies, L2-normalized.

    Counts are damped (1 + ln c) so one repeated identifier cannot dominate
    a method body. All weights are non-negative, which keeps any two encoded
    texts at cosine >= 0 and guarantees a non-zero vector for non-empty input.
    """

    model_id = LOCAL_MODEL_ID

    def __init__(self) -> None:
        self._memo: dict[str, EmbeddingVector] = {}

    def embed(self, content: str) -> EmbeddingVector:
        stripped = content.strip()
        if not stripped:
            raise EmptyContent("cannot embed empty content")
        key = content_hash(stripped)
        if key in self._memo:
            return self._memo[key]
        tokens = content_tokens(stripped)
        if not tokens:
            tokens = [stripped]
        counts: dict[int, int] = {}
        for tok in tokens:
            b = _bucket(tok)
            counts[b] = counts.get(b, 0) + 1
        values = [0.0] * LOCAL_DIMENSION
        for b, c in counts.items():
            values[b] = 1.0 + math.log(c)
        norm = math.sqrt(math.fsum(v * v for v in values))
        values = [v / norm for v in values]
        vec = EmbeddingVector(values=values, model_id=self.model_id)
        self._memo[key] = vec
        return vec


class EmbeddingCache:
    """Append-only JSONL store keyed by (model_id, content hash)."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: dict[tuple[str, str], EmbeddingVector] = {}
        if self.path.is_file():
            for line in self.path.read_text().splitlines():
                if not line.strip():
                    continue
                doc = json.loads(line)
                vec = EmbeddingVector(values=doc["values"], model_id=doc["model"])
                self._entries[(doc["model"], doc["hash"])] = vec

    def get(self, model_id: str, key: str) -> EmbeddingVector | None:
        return self._entries.get((model_id, key))

    def put(self, model_id: str, key: str, vec: EmbeddingVector) -> None:
        if (model_id, key) in self._entries:
            return
        self._entries[(model_id, key)] = vec
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as f:
            f.write(
                json.dumps({"model": model_id, "hash": key, "values": vec.values}) + "\n"
            )


class RemoteEmbedder:
    """HTTP embeddings provider; request/response in the common wire shape."""

    def __init__(
        self,
        url: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        cache: EmbeddingCache | None = None,
        timeout: float = 30.0,
    ):
        self.url = url or os.environ.get("EMBEDDING_API_URL", "")
        self.api_key = api_key if api_key is not None else os.environ.get("EMBEDDING_API_KEY", "")
        self.model_id = model or os.environ.get("EMBEDDING_MODEL", "code-embed-1")
        self.cache = cache
        self.timeout = timeout
        if not self.url:
            raise ProviderUnavailable("no embeddings endpoint configured (EMBEDDING_API_URL)")

    def embed(self, content: str) -> EmbeddingVector:
        stripped = content.strip()
        if not stripped:
            raise EmptyContent("cannot embed empty content")
        key = content_hash(stripped)
        if self.cache is not None:
            hit = self.cache.get(self.model_id, key)
            if hit is not None:
                return hit
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = requests.post(
                self.url,
                json={"model": self.model_id, "input": [stripped]},
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"embeddings endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(
                f"embeddings endpoint returned {resp.status_code}: {resp.text[:200]}"
            )
        try:
            values = resp.json()["data"][0]["embedding"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderUnavailable(f"malformed embeddings response: {exc}") from exc
        vec = EmbeddingVector(values=[float(v) for v in values], model_id=self.model_id)
        if self.cache is not None:
            self.cache.put(self.model_id, key, vec)
        return vec


def embed(provider: Embedder, content: str) -> EmbeddingVector:
    if not content.strip():
        raise EmptyContent("cannot embed empty content")
    return provider.embed(content)


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"{a.dimension} vs {b.dimension}")
    if a.dimension == 0:
        raise ZeroVector("cosine undefined for an empty vector")
    # Pre-scale each vector by its own max magnitude. The factors cancel in
    # the quotient, but squaring raw components underflows for tiny values.
    max_a = max(abs(x) for x in a.values)
    max_b = max(abs(y) for y in b.values)
    if max_a == 0.0 or max_b == 0.0:
        raise ZeroVector("cosine undefined for an all-zero vector")
    xs = [x / max_a for x in a.values]
    ys = [y / max_b for y in b.values]
    norm_a = math.sqrt(math.fsum(x * x for x in xs))
    norm_b = math.sqrt(math.fsum(y * y for y in ys))
    dot = math.fsum(x * y for x, y in zip(xs, ys))
    return dot / (norm_a * norm_b)


@dataclass
class MoveCandidate:
    method: MethodInfo
    host: str  # qualified class name
    similarity: float

    @property
    def qualified_method(self) -> str:
        return f"{self.host}.{self.method.signature}"

    def to_doc(self) -> dict:
        return {
            "method": self.method.signature,
            "host": self.host,
            "similarity": self.similarity,
        }


def misplacement_scores(
    index: ProjectIndex,
    cls: ClassInfo,
    surviving: list[MethodInfo],
    embedder: Embedder,
) -> list[MoveCandidate]:
    """Score how weakly each method aligns with the rest of its class.

    Embeds each method body against the class text with that method spliced
    out; lower similarity means more misplaced. Sorted ascending, ties broken
    by qualified method name.
    """
    scored: list[MoveCandidate] = []
    for m in surviving:
        body = index.method_source(cls, m)
        shell = index.class_text_without_method(cls, m)
        sim = cosine_similarity(embed(embedder, body), embed(embedder, shell))
        scored.append(MoveCandidate(method=m, host=cls.qualified_name, similarity=sim))
    scored.sort(key=lambda c: (c.similarity, c.qualified_method))
    return scored
