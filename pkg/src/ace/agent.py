"""Transcript producers: ReAct-style episodes plus deterministic test agents.

Episodes replay tool invocations against a stub executor; metric computation
needs the call, not the side effect. The action grammar is:

    Action: <tool_id>
    Action Input: {...json object...}

with final answers marked by a line starting ``Final Answer:``.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from typing import Any, Optional

from .llm import ChatClient

TERMINALS = ("completed", "no_tool_selected", "step_limit", "error")

CORRUPTION_KINDS = ("wrong_tool", "drop_param", "stringify_param", "add_param", "wrong_value")


class UnparseableAction(Exception):
    pass


class UnknownParam(Exception):
    pass


@dataclass(frozen=True)
class GoldCall:
    utterance_id: str
    utterance: str
    tool: str
    arguments: dict

    def to_dict(self) -> dict:
        return {
            "utterance_id": self.utterance_id,
            "utterance": self.utterance,
            "tool": self.tool,
            "arguments": self.arguments,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GoldCall":
        return cls(d["utterance_id"], d["utterance"], d["tool"], dict(d["arguments"]))


@dataclass(frozen=True)
class Step:
    kind: str  # thought | action | observation
    content: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "content": self.content}


@dataclass
class Transcript:
    utterance_id: str
    selected_tool: Optional[str]
    arguments: dict
    steps: list  # of Step
    terminal: str

    def to_dict(self) -> dict:
        return {
            "utterance_id": self.utterance_id,
            "selected_tool": self.selected_tool,
            "arguments": self.arguments,
            "steps": [s.to_dict() for s in self.steps],
            "terminal": self.terminal,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Transcript":
        return cls(
            utterance_id=d["utterance_id"],
            selected_tool=d.get("selected_tool"),
            arguments=dict(d.get("arguments") or {}),
            steps=[Step(s["kind"], s["content"]) for s in d.get("steps", [])],
            terminal=d["terminal"],
        )


@dataclass(frozen=True)
class EpisodeLimits:
    max_steps: int = 6


_ACTION_RE = re.compile(r"^Action:[ \t]*(\S+)[ \t]*$", re.MULTILINE)
_ACTION_INPUT_RE = re.compile(
    r"^Action Input:[ \t]*(?:```[a-zA-Z0-9]*\n?)?(\{.*?\})(?:\n?```)?[ \t]*$",
    re.MULTILINE | re.DOTALL,
)
_FINAL_RE = re.compile(r"^Final Answer:", re.MULTILINE)


def parse_action(text: str):
    """Parse one model turn: ('final', answer) | ('action', tool, args dict).

    Raises UnparseableAction for anything outside the documented grammar.
    """
    final = _FINAL_RE.search(text)
    action = _ACTION_RE.search(text)
    if final and (not action or final.start() < action.start()):
        return ("final", text[final.end():].split("\n", 1)[0].strip())
    if not action:
        raise UnparseableAction("no Action or Final Answer line found")
    tool_id = action.group(1)
    input_match = _ACTION_INPUT_RE.search(text, action.end())
    if not input_match:
        raise UnparseableAction("Action line without an Action Input JSON object")
    try:
        args = json.loads(input_match.group(1))
    except json.JSONDecodeError as e:
        raise UnparseableAction(f"Action Input is not valid JSON: {e}") from e
    if not isinstance(args, dict):
        raise UnparseableAction("Action Input must be a JSON object")
    return ("action", tool_id, args)


def _system_prompt(tools: list) -> str:
    from .toolgen import render_docstring

    blocks = []
    for entry in tools:
        doc = render_docstring(entry.plan, entry.level)
        blocks.append(f"Tool: {entry.tool_id}\n{doc}")
    tool_list = "\n\n".join(blocks)
    return (
        "You are an agent that answers user requests by calling exactly one tool.\n"
        "Respond with:\n"
        "Action: <tool name>\n"
        "Action Input: {...json arguments...}\n"
        "or, if no tool applies, a line starting with 'Final Answer:'.\n\n"
        f"Available tools:\n\n{tool_list}"
    )


def _stub_observation(tool_id: str, args: dict) -> str:
    return json.dumps({"status_code": 200, "response": {"tool": tool_id, "ok": True}}, sort_keys=True)


def run_episode(
    utterance_id: str,
    utterance: str,
    tools: list,
    client: ChatClient,
    limits: EpisodeLimits = EpisodeLimits(),
) -> Transcript:
    """Drive one reason/act/observe loop; ends on a valid action, a final
    answer, or the step limit."""
    if not tools:
        raise ValueError("tools must be non-empty")
    if limits.max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    known = {t.tool_id for t in tools}
    messages = [
        {"role": "system", "content": _system_prompt(tools)},
        {"role": "user", "content": utterance},
    ]
    steps: list = []
    for _ in range(limits.max_steps):
        reply = client.complete(messages)
        thought = reply.split("Action:")[0].split("Final Answer:")[0].strip()
        if thought:
            steps.append(Step("thought", thought))
        try:
            parsed = parse_action(reply)
        except UnparseableAction as e:
            steps.append(Step("observation", f"unparseable action: {e}"))
            messages.append({"role": "assistant", "content": reply})
            messages.append({"role": "user", "content": "That was not a valid action. Use the documented format."})
            continue
        if parsed[0] == "final":
            return Transcript(utterance_id, None, {}, steps, "no_tool_selected")
        _, tool_id, args = parsed
        if tool_id not in known:
            steps.append(Step("observation", f"unknown tool: {tool_id}"))
            messages.append({"role": "assistant", "content": reply})
            messages.append({"role": "user", "content": f"Tool {tool_id} does not exist. Pick a listed tool."})
            continue
        steps.append(Step("action", json.dumps({"tool": tool_id, "arguments": args}, sort_keys=True)))
        steps.append(Step("observation", _stub_observation(tool_id, args)))
        return Transcript(utterance_id, tool_id, args, steps, "completed")
    return Transcript(utterance_id, None, {}, steps, "step_limit")


def oracle_agent(gold: GoldCall) -> Transcript:
    """Emit the gold call verbatim as a completed transcript."""
    steps = [
        Step("thought", f"The request maps to tool {gold.tool}."),
        Step("action", json.dumps({"tool": gold.tool, "arguments": gold.arguments}, sort_keys=True)),
        Step("observation", _stub_observation(gold.tool, gold.arguments)),
    ]
    return Transcript(gold.utterance_id, gold.tool, dict(gold.arguments), steps, "completed")


@dataclass(frozen=True)
class Corruption:
    kind: str
    param: Optional[str] = None
    value: Any = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "param": self.param, "value": self.value}

    @classmethod
    def from_dict(cls, d: dict) -> "Corruption":
        return cls(d["kind"], d.get("param"), d.get("value"))


def corrupting_agent(
    gold: GoldCall,
    corruptions: list,
    seed: int = 0,
    tool_pool: Optional[list] = None,
) -> Transcript:
    """Apply exactly the listed corruptions to the gold call, deterministically."""
    rng = random.Random(seed)
    tool = gold.tool
    args = dict(gold.arguments)
    for c in corruptions:
        if c.kind not in CORRUPTION_KINDS:
            raise ValueError(f"unknown corruption kind: {c.kind}")
        if c.kind == "wrong_tool":
            alternatives = sorted(set(tool_pool or ()) - {gold.tool})
            tool = rng.choice(alternatives) if alternatives else gold.tool + "_wrong"
        elif c.kind == "add_param":
            args[c.param] = c.value
        else:
            if c.param not in args:
                raise UnknownParam(f"corruption {c.kind} targets unknown param {c.param!r}")
            if c.kind == "drop_param":
                del args[c.param]
            elif c.kind == "stringify_param":
                value = args[c.param]
                args[c.param] = value if isinstance(value, str) else json.dumps(value)
            elif c.kind == "wrong_value":
                args[c.param] = c.value
    steps = [
        Step("thought", "Corrupted replay of the gold call."),
        Step("action", json.dumps({"tool": tool, "arguments": args}, sort_keys=True)),
        Step("observation", _stub_observation(tool, args)),
    ]
    return Transcript(gold.utterance_id, tool, args, steps, "completed")


def save_transcripts(transcripts: list, path: str) -> None:
    from ._util import atomic_write_text, canonical_json

    atomic_write_text(path, "".join(canonical_json(t.to_dict()) + "\n" for t in transcripts))


def load_transcripts(path: str) -> list:
    with open(path, encoding="utf-8") as f:
        return [Transcript.from_dict(json.loads(line)) for line in f if line.strip()]


def save_gold(gold: list, path: str) -> None:
    from ._util import atomic_write_text, canonical_json

    atomic_write_text(path, "".join(canonical_json(g.to_dict()) + "\n" for g in gold))


def load_gold(path: str) -> list:
    with open(path, encoding="utf-8") as f:
        return [GoldCall.from_dict(json.loads(line)) for line in f if line.strip()]
