"""Compile enriched endpoints into tool plans and render tool source artifacts.

Two render targets ship: ``langchain-react-py`` (one Python tool function per
file, byte-stable) and ``manifest-json`` (a neutral descriptor that round-trips
the plan's arguments and request mapping).
"""

from __future__ import annotations

import json
import keyword
import os
import re
from dataclasses import dataclass, field
from typing import Any, Optional

from ._util import atomic_write_text
from .enrichment import BODY_PARAM, EnrichedEndpoint, level_rank

KIND_TO_SEMANTIC = {
    "string": "text",
    "integer": "integer",
    "number": "real",
    "boolean": "flag",
    "object": "object",
    "array": "array",
    "untyped": "untyped",
}

SEMANTIC_TO_PY = {
    "text": "str",
    "integer": "int",
    "real": "float",
    "flag": "bool",
    "object": "dict",
    "array": "list",
    "untyped": "Any",
}

# Names the generated function body uses internally; colliding args get renamed.
RESERVED_NAMES = frozenset(
    {"json", "os", "requests", "tool", "config", "header", "queryParam", "bodyParam",
     "api_url", "response", "payload", "auth", "token", "Optional", "Any"}
) | frozenset(keyword.kwlist)

RETURN_LINE = ":return: The JSON response from the API."


class UnknownTarget(Exception):
    pass


@dataclass(frozen=True)
class SemanticParamType:
    kind: str  # text | integer | real | flag | object | array | untyped
    optional: bool


@dataclass(frozen=True)
class ArgSpec:
    name: str
    type: SemanticParamType
    source: str  # original parameter name (pre-rename)
    location: str  # path | query | header | body-field | body

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.type.kind,
            "optional": self.type.optional,
            "source": self.source,
            "location": self.location,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArgSpec":
        return cls(d["name"], SemanticParamType(d["kind"], d["optional"]), d["source"], d["location"])


@dataclass(frozen=True)
class DocstringBlocks:
    description: str
    param_lines: tuple  # of (name, text)
    return_line: str
    input_example: tuple  # of (name, literal)

    def to_dict(self) -> dict:
        return {
            "description": self.description,
            "param_lines": [list(p) for p in self.param_lines],
            "return_line": self.return_line,
            "input_example": [list(p) for p in self.input_example],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DocstringBlocks":
        return cls(
            description=d["description"],
            param_lines=tuple((n, t) for n, t in d["param_lines"]),
            return_line=d["return_line"],
            input_example=tuple((n, v) for n, v in d["input_example"]),
        )


@dataclass(frozen=True)
class RequestMapping:
    method: str
    url_template: str
    path_args: tuple
    query_args: tuple
    header_entries: tuple  # of (name, value)
    body_arg: Optional[str]
    body_field_args: tuple = ()

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "url_template": self.url_template,
            "path_args": list(self.path_args),
            "query_args": list(self.query_args),
            "header_entries": [list(h) for h in self.header_entries],
            "body_arg": self.body_arg,
            "body_field_args": list(self.body_field_args),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RequestMapping":
        return cls(
            method=d["method"],
            url_template=d["url_template"],
            path_args=tuple(d["path_args"]),
            query_args=tuple(d["query_args"]),
            header_entries=tuple((n, v) for n, v in d["header_entries"]),
            body_arg=d.get("body_arg"),
            body_field_args=tuple(d.get("body_field_args", ())),
        )


@dataclass
class ToolPlan:
    function_name: str
    ordered_args: list  # of ArgSpec
    docstring: DocstringBlocks
    request: RequestMapping
    response_codes: tuple
    auth: bool
    level: str
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "function_name": self.function_name,
            "ordered_args": [a.to_dict() for a in self.ordered_args],
            "docstring": self.docstring.to_dict(),
            "request": self.request.to_dict(),
            "response_codes": list(self.response_codes),
            "auth": self.auth,
            "level": self.level,
            "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ToolPlan":
        return cls(
            function_name=d["function_name"],
            ordered_args=[ArgSpec.from_dict(a) for a in d["ordered_args"]],
            docstring=DocstringBlocks.from_dict(d["docstring"]),
            request=RequestMapping.from_dict(d["request"]),
            response_codes=tuple(d["response_codes"]),
            auth=d["auth"],
            level=d["level"],
            warnings=list(d.get("warnings", [])),
        )


@dataclass(frozen=True)
class SourceArtifact:
    filename: str
    content: str


def map_schema_type(schema) -> str:
    """SchemaNode kind -> semantic parameter kind."""
    return KIND_TO_SEMANTIC.get(schema.kind if schema is not None else "untyped", "untyped")


def _safe_arg_name(name: str, warnings: list) -> str:
    candidate = re.sub(r"\W", "_", name)
    if candidate and candidate[0].isdigit():
        candidate = "_" + candidate
    if candidate in RESERVED_NAMES:
        warnings.append(f"argument {name!r} collides with a reserved name; renamed to {candidate}_param")
        candidate = candidate + "_param"
    elif candidate != name:
        warnings.append(f"argument {name!r} is not a valid identifier; renamed to {candidate}")
    return candidate


def py_literal(value: Any) -> str:
    """Python-source literal with sorted object keys and single-quoted strings."""
    if isinstance(value, dict):
        inner = ", ".join(f"{py_literal(k)}: {py_literal(v)}" for k, v in sorted(value.items(), key=lambda kv: str(kv[0])))
        return "{" + inner + "}"
    if isinstance(value, list):
        return "[" + ", ".join(py_literal(v) for v in value) + "]"
    return repr(value)


def plan_tool(enriched: EnrichedEndpoint) -> ToolPlan:
    """Deterministic compilation of one enriched endpoint into a ToolPlan."""
    base = enriched.base
    warnings: list = []

    placeholders = re.findall(r"\{([^{}]*)\}", base.path)
    by_name = {p.name: p for p in base.parameters}
    path_params = [by_name[ph] for ph in placeholders if ph in by_name and by_name[ph].location == "path"]
    non_path = [p for p in base.parameters if p.location != "path"]
    required = [p for p in non_path if p.required]
    optional = [p for p in non_path if not p.required]

    args: list = []
    renames: dict = {}
    for param in path_params + required + optional:
        arg_name = _safe_arg_name(param.name, warnings)
        renames[param.name] = arg_name
        args.append(
            ArgSpec(
                name=arg_name,
                type=SemanticParamType(map_schema_type(param.schema), optional=not param.required),
                source=param.name,
                location=param.location if param.location != "body-field" else "body-field",
            )
        )
    if base.request_body is not None:
        args.append(ArgSpec(name=BODY_PARAM, type=SemanticParamType("object", optional=True), source=BODY_PARAM, location="body"))

    url_template = base.path
    for original, renamed in renames.items():
        if original != renamed:
            url_template = url_template.replace("{" + original + "}", "{" + renamed + "}")

    path_args = tuple(a.name for a in args if a.location == "path")
    query_args = tuple(a.name for a in args if a.location == "query")
    body_field_args = tuple(a.name for a in args if a.location == "body-field")
    body_arg = BODY_PARAM if base.request_body is not None else None
    has_body = body_arg is not None or bool(body_field_args)
    header_entries = (
        ("accept", "application/json"),
        ("content-type", "application/json" if has_body else "application/x-www-form-urlencoded"),
    )

    examples = dict(enriched.param_examples)
    param_lines = tuple(
        (a.name, enriched.param_descriptions[a.source])
        for a in args
        if a.source in enriched.param_descriptions
    )
    input_example = tuple((a.name, examples[a.source]) for a in args if a.source in examples)

    function_name = re.sub(r"\W", "_", base.operation_id)
    docstring = DocstringBlocks(
        description=enriched.tool_description,
        param_lines=param_lines,
        return_line=RETURN_LINE,
        input_example=input_example,
    )
    request = RequestMapping(
        method=base.method,
        url_template=url_template,
        path_args=path_args,
        query_args=query_args,
        header_entries=header_entries,
        body_arg=body_arg,
        body_field_args=body_field_args,
    )
    return ToolPlan(
        function_name=function_name,
        ordered_args=args,
        docstring=docstring,
        request=request,
        response_codes=tuple(code for code, _ in base.response_codes),
        auth=base.requires_auth,
        level=enriched.level,
        warnings=warnings,
    )


def render_docstring(plan: ToolPlan, level: str) -> str:
    """Docstring text exactly as embedded in the generated tool (tab indented)."""
    lines = [f'\t""" {plan.docstring.description}']
    if level_rank(level) >= level_rank("e2"):
        lines.append("")
        for name, text in plan.docstring.param_lines:
            lines.append(f"\t:param {name}: {text}")
        lines.append(f"\t{plan.docstring.return_line}")
    if level_rank(level) >= level_rank("e3") and plan.docstring.input_example:
        lines.append("")
        lines.append("\tInput Example:")
        for name, value in plan.docstring.input_example:
            lines.append(f"\t{name} = {py_literal(value)}")
    lines.append('\t"""')
    return "\n".join(lines)


def _signature(plan: ToolPlan) -> str:
    parts = []
    for arg in plan.ordered_args:
        py_type = SEMANTIC_TO_PY[arg.type.kind]
        if arg.type.optional:
            parts.append(f"{arg.name}: Optional[{py_type}] = None")
        else:
            parts.append(f"{arg.name}: {py_type}")
    return ", ".join(parts)


def _render_langchain_py(plan: ToolPlan) -> SourceArtifact:
    req = plan.request
    lines = [
        "import json",
        "import os",
        "import requests",
        "from typing import *",
        "",
        "try:",
        "\tfrom langchain_core.tools import tool",
        "except ImportError:",
        "\tdef tool(func):",
        "\t\treturn func",
        "",
        "",
        "def _config():",
        '\tpath = os.environ.get("ACE_TOOLS_CONFIG") or os.path.join(os.path.dirname(__file__), "config.json")',
        "\twith open(path) as f:",
        "\t\treturn json.load(f)",
        "",
        "",
        "@tool",
        f"def {plan.function_name}({_signature(plan)}):",
        render_docstring(plan, plan.level),
        "",
        "\tconfig = _config()",
        "\theader = {",
    ]
    for i, (name, value) in enumerate(req.header_entries):
        comma = "," if i < len(req.header_entries) - 1 else ""
        lines.append(f"\t\t'{name}': '{value}'{comma}")
    lines.append("\t}")
    if plan.auth:
        lines += [
            "\tauth = config.get('auth') or {}",
            "\ttoken = os.environ.get(auth.get('value_env', ''), '')",
            "\tif auth.get('scheme') == 'bearer':",
            '\t\theader[\'Authorization\'] = f"Bearer {token}"',
            "\telif auth:",
            "\t\theader[auth.get('name', 'X-API-Key')] = token",
        ]
    query_items = ", ".join(f"'{a}' : {a}" for a in req.query_args)
    lines.append("\tqueryParam = {" + query_items + "}")
    body_expr = None
    if req.body_field_args:
        body_items = ", ".join(f"'{a}' : {a}" for a in req.body_field_args)
        lines.append("\tbodyParam = {" + body_items + "}")
        body_expr = "bodyParam"
    if req.body_arg:
        body_expr = req.body_arg
    lines += [
        "",
        f'\tapi_url = f"{{config[\'base_url\']}}{req.url_template}"',
    ]
    call_args = "api_url, headers=header, params=queryParam"
    if body_expr:
        call_args += f", json={body_expr}"
    lines += [
        f"\tresponse = requests.{req.method}({call_args})",
        "\ttry:",
        "\t\tpayload = response.json()",
        "\texcept ValueError:",
        "\t\tpayload = response.text",
        '\treturn {"status_code": response.status_code, "response": payload}',
        "",
    ]
    return SourceArtifact(f"{plan.function_name}.py", "\n".join(lines))


def _args_json_schema(plan: ToolPlan) -> dict:
    kind_to_json = {"text": "string", "integer": "integer", "real": "number",
                    "flag": "boolean", "object": "object", "array": "array", "untyped": "object"}
    properties = {
        a.name: {"type": kind_to_json[a.type.kind]} for a in plan.ordered_args
    }
    required = [a.name for a in plan.ordered_args if not a.type.optional]
    return {"type": "object", "properties": properties, "required": required}


def _render_manifest_json(plan: ToolPlan) -> SourceArtifact:
    descriptor = manifest_descriptor(plan)
    return SourceArtifact(f"{plan.function_name}.json", json.dumps(descriptor, indent=2, sort_keys=True) + "\n")


def manifest_descriptor(plan: ToolPlan) -> dict:
    return {
        "name": plan.function_name,
        "description": plan.docstring.description,
        "level": plan.level,
        "args": [a.to_dict() for a in plan.ordered_args],
        "args_schema": _args_json_schema(plan),
        "request": plan.request.to_dict(),
        "response_codes": list(plan.response_codes),
        "auth": plan.auth,
    }


def plan_from_manifest(descriptor: dict) -> ToolPlan:
    """Rebuild the structural parts of a plan from its manifest descriptor."""
    return ToolPlan(
        function_name=descriptor["name"],
        ordered_args=[ArgSpec.from_dict(a) for a in descriptor["args"]],
        docstring=DocstringBlocks(descriptor["description"], (), RETURN_LINE, ()),
        request=RequestMapping.from_dict(descriptor["request"]),
        response_codes=tuple(descriptor["response_codes"]),
        auth=descriptor["auth"],
        level=descriptor["level"],
    )


TARGETS = {
    "langchain-react-py": _render_langchain_py,
    "manifest-json": _render_manifest_json,
}


def emit_tool_source(plan: ToolPlan, target: str) -> SourceArtifact:
    if target not in TARGETS:
        raise UnknownTarget(f"unknown render target: {target} (registered: {sorted(TARGETS)})")
    return TARGETS[target](plan)


def write_tools(plans: list, outdir: str, target: str, config: Optional[dict] = None) -> list:
    """Emit one artifact per plan plus catalog.json; returns written paths."""
    os.makedirs(outdir, exist_ok=True)
    written = []
    for plan in plans:
        artifact = emit_tool_source(plan, target)
        path = os.path.join(outdir, artifact.filename)
        atomic_write_text(path, artifact.content)
        written.append(path)
    manifest = {"tools": [manifest_descriptor(p) for p in plans]}
    manifest_path = os.path.join(outdir, "catalog.json")
    atomic_write_text(manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    written.append(manifest_path)
    if config is not None:
        config_path = os.path.join(outdir, "config.json")
        atomic_write_text(config_path, json.dumps(config, indent=2, sort_keys=True) + "\n")
        written.append(config_path)
    return written


def strip_docstring(source: str) -> str:
    """Remove the tool function's docstring block (for code/doc comparison)."""
    lines = source.split("\n")
    out = []
    in_doc = False
    for line in lines:
        if not in_doc and line.startswith('\t"""'):
            in_doc = True
            if line.count('"""') >= 2:
                in_doc = False
            continue
        if in_doc:
            if line.strip().endswith('"""'):
                in_doc = False
            continue
        out.append(line)
    return "\n".join(out)
