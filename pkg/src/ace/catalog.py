"""Persisted tool catalog: line-delimited JSON, one entry per tool."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import json

from ._util import atomic_write_text, canonical_json, fnv1a64
from .enrichment import EnrichedEndpoint
from .toolgen import ToolPlan

CATALOG_VERSION = 1


class CorruptEntry(Exception):
    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"corrupt catalog entry at line {line_number}: {reason}")


@dataclass(frozen=True)
class CatalogEntry:
    tool_id: str
    level: str
    plan: ToolPlan
    enriched: EnrichedEndpoint
    content_hash: int

    @classmethod
    def create(cls, plan: ToolPlan, enriched: EnrichedEndpoint) -> "CatalogEntry":
        content_hash = _content_hash(plan, enriched)
        return cls(plan.function_name, enriched.level, plan, enriched, content_hash)

    def to_dict(self) -> dict:
        return {
            "ace_catalog_version": CATALOG_VERSION,
            "tool_id": self.tool_id,
            "level": self.level,
            "plan": self.plan.to_dict(),
            "enriched": self.enriched.to_dict(),
            "content_hash": self.content_hash,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CatalogEntry":
        return cls(
            tool_id=d["tool_id"],
            level=d["level"],
            plan=ToolPlan.from_dict(d["plan"]),
            enriched=EnrichedEndpoint.from_dict(d["enriched"]),
            content_hash=d["content_hash"],
        )


def _content_hash(plan: ToolPlan, enriched: EnrichedEndpoint) -> int:
    payload = canonical_json({"plan": plan.to_dict(), "enriched": enriched.to_dict()})
    return fnv1a64(payload.encode("utf-8"))


def save_catalog(entries: Iterable[CatalogEntry], path: str) -> None:
    """One canonical-JSON line per entry, sorted by tool_id; whole-file atomic."""
    lines = [canonical_json(e.to_dict()) for e in sorted(entries, key=lambda e: e.tool_id)]
    atomic_write_text(path, "".join(line + "\n" for line in lines))


def load_catalog(path: str, lenient: bool = False, warn=None) -> list:
    entries: list = []
    with open(path, encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            entry = _parse_line(line, number, lenient, warn)
            if entry is not None:
                entries.append(entry)
    return entries


def _parse_line(line: str, number: int, lenient: bool, warn) -> Optional[CatalogEntry]:
    try:
        d = json.loads(line)
        if d.get("ace_catalog_version") != CATALOG_VERSION:
            raise ValueError(f"unsupported catalog version: {d.get('ace_catalog_version')!r}")
        entry = CatalogEntry.from_dict(d)
        if _content_hash(entry.plan, entry.enriched) != entry.content_hash:
            raise ValueError("content hash mismatch")
        return entry
    except (ValueError, KeyError, TypeError) as e:
        reason = getattr(e, "msg", None) or str(e)
        if lenient:
            if warn:
                warn(f"skipping corrupt entry at line {number}: {reason}")
            return None
        raise CorruptEntry(number, reason) from e


def build_entries(plans: list, enriched: list) -> list:
    """Pair plans with their enriched endpoints (same order) into entries."""
    return [CatalogEntry.create(p, e) for p, e in zip(plans, enriched)]
