"""Metadata enrichment: endpoint descriptions, parameter descriptions, examples.

Three generation tasks run in a fixed order (description, then parameter
descriptions, then examples that consume the fresh descriptions). Backends are
pluggable: a deterministic heuristic backend that needs no network, and an LLM
backend speaking the chat-completions protocol.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Optional

from .llm import ChatClient
from .oas import EndpointSpec, ParamSpec, SchemaNode

LEVELS = ("none", "e1", "e2", "e3")

TASKS = ("method_desc", "param_desc", "param_examples")

TEMPLATE_VERSION = "1"

BODY_PARAM = "requestBody"

VERB_MAP = {
    "get": "Retrieve",
    "post": "Create",
    "put": "Replace",
    "patch": "Update",
    "delete": "Delete",
    "head": "Inspect",
    "options": "Describe",
}


class MissingContext(Exception):
    """A parameter task was requested without a parameter."""


class ConstraintViolation(Exception):
    """A generated example does not satisfy its schema."""


class UnparseableExample(Exception):
    """The backend returned a non-JSON example payload."""


class BackendFailure(Exception):
    pass


def level_rank(level: str) -> int:
    return LEVELS.index(level)


@dataclass(frozen=True)
class PromptBundle:
    task: str
    rendered_prompt: str
    context_fields: dict


@dataclass
class EnrichedEndpoint:
    base: EndpointSpec
    tool_description: str
    param_descriptions: dict  # name -> text
    param_examples: dict  # name -> JSON literal
    body_example: Any
    level: str
    provenance: dict  # field -> origin tag
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "tool_description": self.tool_description,
            "param_descriptions": self.param_descriptions,
            "param_examples": self.param_examples,
            "body_example": self.body_example,
            "level": self.level,
            "provenance": self.provenance,
            "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnrichedEndpoint":
        return cls(
            base=EndpointSpec.from_dict(d["base"]),
            tool_description=d["tool_description"],
            param_descriptions=dict(d["param_descriptions"]),
            param_examples=dict(d["param_examples"]),
            body_example=d.get("body_example"),
            level=d["level"],
            provenance=dict(d["provenance"]),
            warnings=list(d.get("warnings", [])),
        )


def _load_template(task: str) -> str:
    name = {"method_desc": "method_desc.txt", "param_desc": "param_desc.txt", "param_examples": "param_examples.txt"}[task]
    return resources.files("ace.prompts").joinpath(name).read_text(encoding="utf-8")


def build_prompt(
    endpoint: EndpointSpec,
    task: str,
    param: Optional[ParamSpec] = None,
    updated_desc: Optional[str] = None,
) -> PromptBundle:
    """Deterministically fill the task template with the endpoint's context."""
    if task not in TASKS:
        raise ValueError(f"unknown task: {task}")
    if (task != "method_desc") != (param is not None):
        raise MissingContext(f"task {task} requires a parameter" if param is None else "method_desc takes no parameter")
    if updated_desc is not None and task != "param_examples":
        raise MissingContext("updated_desc is only valid for param_examples")

    context: dict = {
        "api_title": endpoint.api_title,
        "operation_id": endpoint.operation_id,
        "method": endpoint.method.upper(),
        "path": endpoint.path,
    }
    template = _load_template(task)
    if task == "method_desc":
        lines = [
            f"- {p.name} ({p.schema.kind}, {p.location}, {'required' if p.required else 'optional'})"
            for p in endpoint.parameters
        ]
        if endpoint.request_body is not None:
            lines.append(f"- {BODY_PARAM} (object, body, optional)")
        rendered = template.format(
            summary=endpoint.summary_description or "(none)",
            parameters="\n".join(lines) or "(none)",
            **context,
        )
    else:
        schema_text = json.dumps(param.schema.to_dict(), sort_keys=True)
        context["param_name"] = param.name
        context["param_schema"] = schema_text
        context["param_required"] = "required" if param.required else "optional"
        if task == "param_examples":
            context["updated_param_desc"] = updated_desc or param.description or "(none)"
            rendered = template.format(updated_param_desc=context["updated_param_desc"], **{k: v for k, v in context.items() if k != "updated_param_desc"})
        else:
            rendered = template.format(**context)
    return PromptBundle(task=task, rendered_prompt=rendered, context_fields=context)


# --- heuristic backend -------------------------------------------------------

def _camel_tokens(identifier: str) -> list:
    return re.findall(r"[A-Z]+(?![a-z])|[A-Z][a-z0-9]*|[a-z0-9]+", identifier)


def _singularize(segment: str) -> str:
    if segment.endswith("ss") or not segment.endswith("s"):
        return segment
    return segment[:-1]


def _display_noun(noun: str, operation_id: str) -> str:
    """Prefer the operationId's casing of the resource noun when it has one."""
    target = re.sub(r"[^0-9a-z]", "", noun.lower())
    tokens = _camel_tokens(operation_id)
    for i in range(len(tokens)):
        candidate = "".join(tokens[i:])
        if candidate.lower() == target:
            return candidate
    return noun[:1].upper() + noun[1:]


def _title_case_name(name: str) -> str:
    parts = re.split(r"[_\-\s]+", name)
    tokens: list = []
    for part in parts:
        tokens.extend(_camel_tokens(part))
    return " ".join(t[:1].upper() + t[1:] for t in tokens if t)


def heuristic_method_desc(context: dict) -> str:
    method = context["method"].lower()
    path = context["path"]
    verb = VERB_MAP.get(method, method.capitalize())
    segments = [s for s in path.split("/") if s]
    placeholders = [m[1:-1] for m in re.findall(r"\{[^{}]*\}", path)]
    non_placeholder = [s for s in segments if not s.startswith("{")]
    noun_segment = non_placeholder[-1] if non_placeholder else "resource"
    noun = _display_noun(_singularize(noun_segment), context["operation_id"])
    if segments and segments[-1].startswith("{"):
        last = segments[-1][1:-1]
        rest = [p for p in placeholders if p != last]
        clause = f"{verb} a {noun} identified by {last}"
        for p in reversed(rest):
            clause += f" in the given {p}"
        return clause + "."
    clause = f"{verb} {noun_segment}"
    for p in reversed(placeholders):
        clause += f" in the given {p}"
    return clause + "."


def heuristic_param_desc(name: str, schema: SchemaNode, required: bool) -> str:
    text = _title_case_name(name) + "."
    if schema.enum_values:
        text += " Allowed values: " + ", ".join(str(v) for v in schema.enum_values) + "."
    if schema.format:
        text += f" Format: {schema.format}."
    text += " Required." if required else " Optional."
    return text


def heuristic_example(name: str, schema: SchemaNode) -> Any:
    if schema.enum_values:
        return schema.enum_values[0]
    kind = schema.kind
    if kind == "boolean":
        return True
    if kind == "integer":
        return 1
    if kind == "number":
        return 1.0
    if kind == "string":
        if schema.format == "date-time":
            return "2024-01-01T00:00:00Z"
        return f"sample-{name}"
    if kind == "object":
        return {f: heuristic_example(f, schema.properties[f]) for f in schema.required_fields}
    if kind == "array":
        return [heuristic_example(name, schema.items or SchemaNode())]
    return {}


def heuristic_enrich(bundle: PromptBundle) -> Any:
    """Deterministic stand-in for the LLM backend; pure function of the bundle."""
    ctx = bundle.context_fields
    if bundle.task == "method_desc":
        return heuristic_method_desc(ctx)
    schema = SchemaNode.from_dict(json.loads(ctx["param_schema"]))
    if bundle.task == "param_desc":
        required = "required" in ctx.get("param_required", "")
        return heuristic_param_desc(ctx["param_name"], schema, required)
    return heuristic_example(ctx["param_name"], schema)


_FENCE_RE = re.compile(r"^```[a-zA-Z0-9]*\n(.*)\n```$", re.DOTALL)


def llm_enrich(bundle: PromptBundle, client: ChatClient) -> Any:
    """One temperature-0 completion; examples are parsed as JSON literals."""
    raw = client.complete(
        [{"role": "user", "content": bundle.rendered_prompt}],
        temperature=0.0,
    ).strip()
    fenced = _FENCE_RE.match(raw)
    if fenced:
        raw = fenced.group(1).strip()
    if bundle.task == "param_examples":
        try:
            return json.loads(raw)
        except json.JSONDecodeError as e:
            raise UnparseableExample(f"backend returned non-JSON example: {raw!r}") from e
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        raw = raw[1:-1]
    return raw


# --- backends ----------------------------------------------------------------

class HeuristicEnricher:
    backend_id = "heuristic"

    def generate(self, bundle: PromptBundle) -> Any:
        return heuristic_enrich(bundle)


@dataclass
class LlmEnricher:
    client: ChatClient
    model_id: str = "unknown"

    @property
    def backend_id(self) -> str:
        return f"llm:{self.model_id}"

    def generate(self, bundle: PromptBundle) -> Any:
        return llm_enrich(bundle, self.client)


def example_conforms(value: Any, schema: SchemaNode) -> bool:
    """Kind and enum membership check; recurses into known object/array structure."""
    if schema.enum_values is not None:
        return value in schema.enum_values
    kind = schema.kind
    if kind == "untyped":
        return value is not None
    if kind == "string":
        return isinstance(value, str)
    if kind == "boolean":
        return isinstance(value, bool)
    if kind == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind == "object":
        if not isinstance(value, dict):
            return False
        return all(
            example_conforms(v, schema.properties[k]) for k, v in value.items() if k in schema.properties
        )
    if kind == "array":
        if not isinstance(value, list):
            return False
        return all(example_conforms(v, schema.items) for v in value) if schema.items else True
    return False


def _pseudo_body_param(endpoint: EndpointSpec) -> ParamSpec:
    return ParamSpec(name=BODY_PARAM, location="body-field", required=False, schema=endpoint.request_body or SchemaNode())


def _generate_example(endpoint, param, desc, backend, provenance, warnings):
    """Generate a schema-valid example: one retry, then heuristic fallback."""
    bundle = build_prompt(endpoint, "param_examples", param=param, updated_desc=desc)
    for _ in range(2):
        value = backend.generate(bundle)
        if example_conforms(value, param.schema):
            provenance[f"param_examples.{param.name}"] = f"{backend.backend_id}/tmpl{TEMPLATE_VERSION}"
            return value
    warnings.append(f"example for {param.name!r} violated its schema twice; heuristic fallback used")
    provenance[f"param_examples.{param.name}"] = f"heuristic-fallback/tmpl{TEMPLATE_VERSION}"
    return heuristic_example(param.name, param.schema)


def enrich_endpoint(endpoint: EndpointSpec, level: str, backend) -> EnrichedEndpoint:
    """Run the task phases required by ``level`` over one endpoint."""
    if level not in LEVELS:
        raise ValueError(f"unknown level: {level}")
    provenance: dict = {}
    warnings: list = []
    tool_description = endpoint.summary_description or ""
    provenance["tool_description"] = "original"
    param_descriptions: dict = {}
    param_examples: dict = {}
    body_example: Any = None

    params = list(endpoint.parameters)
    if endpoint.request_body is not None:
        params.append(_pseudo_body_param(endpoint))

    if level_rank(level) >= level_rank("e1"):
        bundle = build_prompt(endpoint, "method_desc")
        tool_description = str(backend.generate(bundle))
        provenance["tool_description"] = f"{backend.backend_id}/tmpl{TEMPLATE_VERSION}"

    if level_rank(level) >= level_rank("e2"):
        for param in params:
            text = str(backend.generate(build_prompt(endpoint, "param_desc", param=param)))
            param_descriptions[param.name] = text
            provenance[f"param_descriptions.{param.name}"] = f"{backend.backend_id}/tmpl{TEMPLATE_VERSION}"

    if level_rank(level) >= level_rank("e3"):
        for param in params:
            value = _generate_example(
                endpoint, param, param_descriptions.get(param.name), backend, provenance, warnings
            )
            if param.name == BODY_PARAM:
                body_example = value
            param_examples[param.name] = value

    return EnrichedEndpoint(
        base=endpoint,
        tool_description=tool_description,
        param_descriptions=param_descriptions,
        param_examples=param_examples,
        body_example=body_example,
        level=level,
        provenance=provenance,
        warnings=warnings,
    )


def enrich_catalog(endpoints: list, level: str, backend, workers: int = 4) -> list:
    """Enrich endpoints concurrently; result order matches input order."""
    if workers <= 1 or len(endpoints) <= 1:
        return [enrich_endpoint(e, level, backend) for e in endpoints]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda e: enrich_endpoint(e, level, backend), endpoints))


def save_enriched(enriched: list, path: str) -> None:
    from ._util import atomic_write_text

    atomic_write_text(path, json.dumps([e.to_dict() for e in enriched], ensure_ascii=False, indent=2) + "\n")


def load_enriched(path: str) -> list:
    with open(path, encoding="utf-8") as f:
        return [EnrichedEndpoint.from_dict(d) for d in json.load(f)]
