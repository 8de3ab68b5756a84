"""Embedding-based tool shortlisting: top-k retrieval by cosine similarity.

The built-in embedder is a hashing term-frequency vectorizer (FNV-1a buckets,
D=1024, L2-normalized) so indexes are bit-stable with no model downloads. Any
backend exposing ``embed(text) -> float array`` and an ``embedder_id`` can be
swapped in; query-time embedders must match the index's recorded id.
"""

from __future__ import annotations

import base64
import json
import re
from dataclasses import dataclass

import numpy as np
import requests

from ._util import atomic_write_text, fnv1a64
from .catalog import CatalogEntry
from .enrichment import level_rank
from .toolgen import py_literal

DIMS = 1024

_TOKEN_RE = re.compile(r"[0-9a-z]+")


class EmbedderMismatch(Exception):
    pass


class HashingEmbedder:
    """Deterministic hashing TF embedder; pure function of the input text."""

    embedder_id = f"hash-tf-fnv1a-{DIMS}/v1"
    dims = DIMS

    def embed(self, text: str) -> np.ndarray:
        counts = np.zeros(DIMS, dtype=np.float64)
        for token in _TOKEN_RE.findall(text.lower()):
            bucket = fnv1a64(token.encode("utf-8")) % DIMS
            counts[bucket] += 1.0
        norm = float(np.linalg.norm(counts))
        if norm > 0.0:
            counts /= norm
        return counts.astype(np.float32)


@dataclass
class HttpEmbedder:
    """Remote sentence-encoder backend: HTTP POST text -> float array."""

    base_url: str
    embedder_id: str
    dims: int = DIMS
    timeout: float = 60.0

    def embed(self, text: str) -> np.ndarray:
        resp = requests.post(self.base_url, json={"text": text}, timeout=self.timeout)
        resp.raise_for_status()
        vec = np.asarray(resp.json()["embedding"], dtype=np.float64)
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec.astype(np.float32)


def embed_text(text: str) -> np.ndarray:
    return HashingEmbedder().embed(text)


@dataclass(frozen=True)
class IndexEntry:
    tool_id: str
    vector: np.ndarray
    indexed_text: str


@dataclass
class ToolIndex:
    entries: list  # of IndexEntry, sorted by tool_id
    embedder_id: str
    level: str
    dims: int = DIMS

    def save(self, path: str) -> None:
        doc = {
            "embedder_id": self.embedder_id,
            "level": self.level,
            "dims": self.dims,
            "entries": [
                {
                    "tool_id": e.tool_id,
                    "vector": base64.b64encode(e.vector.astype("<f4").tobytes()).decode("ascii"),
                    "indexed_text": e.indexed_text,
                }
                for e in self.entries
            ],
        }
        atomic_write_text(path, json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n")

    @classmethod
    def load(cls, path: str) -> "ToolIndex":
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
        entries = [
            IndexEntry(
                tool_id=e["tool_id"],
                vector=np.frombuffer(base64.b64decode(e["vector"]), dtype="<f4").copy(),
                indexed_text=e["indexed_text"],
            )
            for e in doc["entries"]
        ]
        return cls(entries=entries, embedder_id=doc["embedder_id"], level=doc["level"], dims=doc["dims"])


@dataclass(frozen=True)
class ShortlistResult:
    ranked: tuple  # of (tool_id, score)
    k: int


def index_text_for(entry: CatalogEntry, level: str) -> str:
    """Concatenated retrieval text; each level strictly extends the previous."""
    if level_rank(entry.level) < level_rank(level):
        raise ValueError(f"entry {entry.tool_id} enriched at {entry.level}, below requested {level}")
    enriched = entry.enriched
    parts = [entry.tool_id, enriched.base.summary_description or ""]
    if level_rank(level) >= level_rank("e1"):
        parts.append(enriched.tool_description)
    if level_rank(level) >= level_rank("e2"):
        for name in sorted(enriched.param_descriptions):
            parts.append(f"{name}: {enriched.param_descriptions[name]}")
    if level_rank(level) >= level_rank("e3"):
        for name in sorted(enriched.param_examples):
            parts.append(f"{name} = {py_literal(enriched.param_examples[name])}")
    return "\n".join(parts)


def build_index(catalog: list, level: str, embedder=None) -> ToolIndex:
    """One vector per tool, sorted by tool_id so entry order never matters."""
    embedder = embedder or HashingEmbedder()
    entries = []
    for entry in sorted(catalog, key=lambda e: e.tool_id):
        text = index_text_for(entry, level)
        entries.append(IndexEntry(tool_id=entry.tool_id, vector=embedder.embed(text), indexed_text=text))
    return ToolIndex(entries=entries, embedder_id=embedder.embedder_id, level=level)


def _check_embedder(index: ToolIndex, embedder) -> None:
    if embedder.embedder_id != index.embedder_id:
        raise EmbedderMismatch(
            f"index built with {index.embedder_id!r}, queried with {embedder.embedder_id!r}"
        )


def shortlist(index: ToolIndex, query: str, k: int, embedder=None) -> ShortlistResult:
    """Exact top-k by cosine; ties broken by ascending tool_id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    embedder = embedder or HashingEmbedder()
    _check_embedder(index, embedder)
    if not index.entries:
        return ShortlistResult(ranked=(), k=k)
    q = embedder.embed(query).astype(np.float64)
    matrix = np.stack([e.vector.astype(np.float64) for e in index.entries])
    scores = matrix @ q
    pairs = sorted(
        ((index.entries[i].tool_id, float(np.float32(scores[i]))) for i in range(len(index.entries))),
        key=lambda p: (-p[1], p[0]),
    )
    return ShortlistResult(ranked=tuple(pairs[:k]), k=k)


def brute_force_topk(index: ToolIndex, query: str, k: int, embedder=None) -> ShortlistResult:
    """Reference semantics for shortlist: naive per-entry dot products."""
    if k < 1:
        raise ValueError("k must be >= 1")
    embedder = embedder or HashingEmbedder()
    _check_embedder(index, embedder)
    q = [float(x) for x in embedder.embed(query)]
    pairs = []
    for entry in index.entries:
        vec = [float(x) for x in entry.vector]
        score = 0.0
        for a, b in zip(vec, q):
            score += a * b
        pairs.append((entry.tool_id, float(np.float32(score))))
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return ShortlistResult(ranked=tuple(pairs[:k]), k=k)
