"""Scoring of transcripts against gold calls (S/T/M/I) and shortlist accuracy.

All counting is exact integer arithmetic; division happens once per metric.
Conventions the underlying counts make recomputable under other choices:
null-valued predicted params are treated as omitted; numeric values compare by
value (1 == 1.0); a param counted as a type mismatch is exempt from the
incorrect-parameter count so one mistake is not double-penalized.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .agent import GoldCall, Transcript
from .shortlist import ToolIndex, shortlist


class MissingTranscript(Exception):
    pass


class DuplicateTranscript(Exception):
    pass


@dataclass
class MetricsReport:
    S: float
    T: float
    M: float
    I: float
    counts: dict  # n_utterances, n_qualifying, numerators and denominators
    per_utterance: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "S": self.S,
            "T": self.T,
            "M": self.M,
            "I": self.I,
            "counts": self.counts,
            "per_utterance": self.per_utterance,
            "flags": self.flags,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(d["S"], d["T"], d["M"], d["I"], dict(d["counts"]), list(d.get("per_utterance", [])), list(d.get("flags", [])))


@dataclass
class ShortlistReport:
    per_k: dict  # k -> accuracy fraction
    ks: list

    def to_dict(self) -> dict:
        return {"per_k": {str(k): v for k, v in self.per_k.items()}, "ks": self.ks}

    @classmethod
    def from_dict(cls, d: dict) -> "ShortlistReport":
        return cls({int(k): v for k, v in d["per_k"].items()}, list(d["ks"]))


def _pair_transcripts(transcripts: list, gold: list) -> list:
    by_id: dict = {}
    for t in transcripts:
        if t.utterance_id in by_id:
            raise DuplicateTranscript(t.utterance_id)
        by_id[t.utterance_id] = t
    pairs = []
    for g in gold:
        if g.utterance_id not in by_id:
            raise MissingTranscript(g.utterance_id)
        pairs.append((by_id[g.utterance_id], g))
    return pairs


def score_selection(transcripts: list, gold: list) -> float:
    """Fraction of utterances whose transcript selected the gold tool."""
    pairs = _pair_transcripts(transcripts, gold)
    if not pairs:
        return 0.0
    correct = sum(1 for t, g in pairs if t.selected_tool == g.tool)
    return float(Fraction(correct, len(pairs)))


def _kind_matches(kind: str, value) -> bool:
    if kind == "untyped":
        return True
    if kind == "string":
        return isinstance(value, str)
    if kind == "boolean":
        return isinstance(value, bool)
    if kind == "integer":
        if isinstance(value, bool):
            return False
        # JSON has one number type, so an integral float satisfies an
        # integer-kind param (the 1 == 1.0 normalization).
        return isinstance(value, int) or (isinstance(value, float) and value.is_integer())
    if kind == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind == "object":
        return isinstance(value, dict)
    if kind == "array":
        return isinstance(value, list)
    return True


def _values_equal(a, b) -> bool:
    """Deep equality with numeric normalization (1 == 1.0, never bool == 1)."""
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b if isinstance(a, bool) and isinstance(b, bool) else False
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return float(a) == float(b)
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(_values_equal(a[k], b[k]) for k in a)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(_values_equal(x, y) for x, y in zip(a, b))
    return a == b


def _param_kinds(entry) -> dict:
    kinds = {p.name: p.schema.kind for p in entry.enriched.base.parameters}
    if entry.enriched.base.request_body is not None:
        kinds["requestBody"] = "object"
    return kinds


class UnknownTool(Exception):
    pass


def score_inputs(transcripts: list, gold: list, catalog: list) -> MetricsReport:
    """Compute S plus the T/M/I input-error fractions over qualifying calls."""
    pairs = _pair_transcripts(transcripts, gold)
    schema_by_tool = {entry.tool_id: _param_kinds(entry) for entry in catalog}

    n = len(pairs)
    n_qualifying = 0
    t_num = m_num = i_num = 0
    gold_param_total = 0
    predicted_total = 0
    per_utterance: list = []
    flags: list = []

    for transcript, gold_call in pairs:
        qualifying = transcript.selected_tool == gold_call.tool
        diag = {"utterance_id": gold_call.utterance_id, "qualifying": qualifying,
                "t": 0, "m": 0, "i": 0}
        if not qualifying:
            per_utterance.append(diag)
            continue
        if gold_call.tool not in schema_by_tool:
            flags.append(f"unknown tool {gold_call.tool!r} for {gold_call.utterance_id}; excluded")
            diag["excluded"] = True
            per_utterance.append(diag)
            continue
        n_qualifying += 1
        kinds = schema_by_tool[gold_call.tool]
        # Null-valued predictions count as omitted.
        predicted = {k: v for k, v in transcript.arguments.items() if v is not None}
        gold_args = {k: v for k, v in gold_call.arguments.items() if v is not None}

        gold_param_total += len(gold_args)
        predicted_total += len(predicted)

        for name in gold_args:
            if name not in predicted:
                m_num += 1
                diag["m"] += 1

        type_errors = set()
        for name, value in predicted.items():
            kind = kinds.get(name, "untyped")
            if not _kind_matches(kind, value):
                t_num += 1
                type_errors.add(name)
                diag["t"] += 1
        for name, value in predicted.items():
            if name in type_errors:
                continue  # already penalized as a type mismatch
            if name not in gold_args or not _values_equal(value, gold_args[name]):
                i_num += 1
                diag["i"] += 1
        per_utterance.append(diag)

    s = Fraction(sum(1 for t, g in pairs if t.selected_tool == g.tool), n) if n else Fraction(0)
    if gold_param_total == 0:
        flags.append("M denominator is zero; metric reported as 0")
    if predicted_total == 0:
        flags.append("T/I denominator is zero; metrics reported as 0")
    t = Fraction(t_num, predicted_total) if predicted_total else Fraction(0)
    m = Fraction(m_num, gold_param_total) if gold_param_total else Fraction(0)
    i = Fraction(i_num, predicted_total) if predicted_total else Fraction(0)
    counts = {
        "n_utterances": n,
        "n_qualifying": n_qualifying,
        "t_numerator": t_num,
        "m_numerator": m_num,
        "i_numerator": i_num,
        "denom_T": predicted_total,
        "denom_M": gold_param_total,
        "denom_I": predicted_total,
    }
    return MetricsReport(
        S=float(s), T=float(t), M=float(m), I=float(i),
        counts=counts, per_utterance=per_utterance, flags=flags,
    )


def shortlist_accuracy(gold: list, index: ToolIndex, ks: list, embedder=None) -> ShortlistReport:
    """Fraction of utterances whose gold tool lands in the top-k shortlist."""
    ks = sorted(set(ks))
    if not gold:
        return ShortlistReport(per_k={k: 0.0 for k in ks}, ks=ks)
    max_k = max(ks)
    hits = {k: 0 for k in ks}
    for g in gold:
        result = shortlist(index, g.utterance, max_k, embedder=embedder)
        ranked_ids = [tool_id for tool_id, _ in result.ranked]
        position = ranked_ids.index(g.tool) + 1 if g.tool in ranked_ids else None
        for k in ks:
            if position is not None and position <= k:
                hits[k] += 1
    return ShortlistReport(per_k={k: float(Fraction(hits[k], len(gold))) for k in ks}, ks=ks)


def _pct(x: float) -> str:
    return f"{x * 100:.1f}"


def render_report(reports: list, format: str = "text-table") -> bytes:
    """Render labeled reports; ``reports`` is a list of (label, report) pairs."""
    metrics = [(label, r) for label, r in reports if isinstance(r, MetricsReport)]
    shortlists = [(label, r) for label, r in reports if isinstance(r, ShortlistReport)]

    if format == "json":
        doc = {
            "metrics": {label: r.to_dict() for label, r in metrics},
            "shortlist": {label: r.to_dict() for label, r in shortlists},
        }
        return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")

    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["variant", "S%", "T%", "M%", "I%"])
        for label, r in metrics:
            writer.writerow([label, _pct(r.S), _pct(r.T), _pct(r.M), _pct(r.I)])
        if shortlists:
            ks = shortlists[0][1].ks
            writer.writerow([])
            writer.writerow(["variant"] + [f"Top {k}" for k in ks])
            for label, r in shortlists:
                writer.writerow([label] + [_pct(r.per_k[k]) for k in ks])
        return buf.getvalue().encode("utf-8")

    if format == "text-table":
        lines = []
        header = f"{'variant':<16} {'S%':>7} {'T%':>7} {'M%':>7} {'I%':>7}"
        lines.append(header)
        lines.append("-" * len(header))
        for label, r in metrics:
            lines.append(f"{label:<16} {_pct(r.S):>7} {_pct(r.T):>7} {_pct(r.M):>7} {_pct(r.I):>7}")
        if shortlists:
            ks = shortlists[0][1].ks
            if metrics:
                lines.append("")
            header2 = f"{'variant':<16}" + "".join(f" {'Top ' + str(k):>8}" for k in ks)
            lines.append(header2)
            lines.append("-" * len(header2))
            for label, r in shortlists:
                lines.append(f"{label:<16}" + "".join(f" {_pct(r.per_k[k]):>8}" for k in ks))
        return ("\n".join(lines) + "\n").encode("utf-8")

    raise ValueError(f"unknown report format: {format}")


def check_gates(report: MetricsReport, gates: dict) -> list:
    """Return violation messages for gates like {"S": (">=", 0.9)}."""
    violations = []
    for metric, (op, threshold) in gates.items():
        value = getattr(report, metric)
        ok = value >= threshold if op == ">=" else value <= threshold
        if not ok:
            violations.append(f"{metric}={value:.4f} violates gate {metric}{op}{threshold}")
    return violations
