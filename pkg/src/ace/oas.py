"""OpenAPI document parsing, $ref resolution, validation, and endpoint extraction.

Accepts OAS 3.x natively and OAS 2 (swagger) by mapping ``definitions`` to
components and ``in: body`` parameters to a request body. All operations here
are pure functions over immutable inputs.
"""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass, field
from typing import Any, Optional

import yaml

HTTP_METHODS = ("get", "put", "post", "delete", "patch", "head", "options")

SCHEMA_KINDS = ("string", "integer", "number", "boolean", "object", "array", "untyped")

REF_DEPTH_LIMIT = 16

_PLACEHOLDER_RE = re.compile(r"\{([^{}]*)\}")


class OasError(Exception):
    """Base class for document-level failures."""


class MalformedInput(OasError):
    """Input bytes are not well-formed JSON/YAML."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{loc}")


class UnsupportedOasVersion(OasError):
    pass


class DanglingRef(OasError):
    pass


class ExternalRefUnsupported(OasError):
    pass


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    path_pointer: str
    message: str

    def to_dict(self) -> dict:
        return {"severity": self.severity, "path_pointer": self.path_pointer, "message": self.message}

    @classmethod
    def from_dict(cls, d: dict) -> "ValidationIssue":
        return cls(d["severity"], d["path_pointer"], d["message"])


@dataclass(frozen=True)
class SchemaNode:
    kind: str = "untyped"
    description: Optional[str] = None
    enum_values: Optional[tuple] = None
    format: Optional[str] = None
    required_fields: tuple = ()
    properties: dict = field(default_factory=dict)  # name -> SchemaNode
    items: Optional["SchemaNode"] = None
    example: Any = None

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.description is not None:
            d["description"] = self.description
        if self.enum_values is not None:
            d["enum_values"] = list(self.enum_values)
        if self.format is not None:
            d["format"] = self.format
        if self.required_fields:
            d["required_fields"] = list(self.required_fields)
        if self.properties:
            d["properties"] = {k: v.to_dict() for k, v in self.properties.items()}
        if self.items is not None:
            d["items"] = self.items.to_dict()
        if self.example is not None:
            d["example"] = self.example
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SchemaNode":
        return cls(
            kind=d.get("kind", "untyped"),
            description=d.get("description"),
            enum_values=tuple(d["enum_values"]) if "enum_values" in d else None,
            format=d.get("format"),
            required_fields=tuple(d.get("required_fields", ())),
            properties={k: cls.from_dict(v) for k, v in d.get("properties", {}).items()},
            items=cls.from_dict(d["items"]) if "items" in d else None,
            example=d.get("example"),
        )


UNTYPED = SchemaNode(kind="untyped")


@dataclass(frozen=True)
class ParamSpec:
    name: str
    location: str  # path | query | header | body-field
    required: bool
    schema: SchemaNode
    description: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "location": self.location,
            "required": self.required,
            "schema": self.schema.to_dict(),
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ParamSpec":
        return cls(
            name=d["name"],
            location=d["location"],
            required=d["required"],
            schema=SchemaNode.from_dict(d["schema"]),
            description=d.get("description"),
        )


@dataclass(frozen=True)
class EndpointSpec:
    operation_id: str
    method: str
    path: str
    summary_description: Optional[str]
    parameters: tuple  # of ParamSpec
    request_body: Optional[SchemaNode]
    response_codes: tuple  # of (status, description)
    api_title: str
    requires_auth: bool = False

    @property
    def path_placeholders(self) -> list:
        return _PLACEHOLDER_RE.findall(self.path)

    def to_dict(self) -> dict:
        return {
            "operation_id": self.operation_id,
            "method": self.method,
            "path": self.path,
            "summary_description": self.summary_description,
            "parameters": [p.to_dict() for p in self.parameters],
            "request_body": self.request_body.to_dict() if self.request_body else None,
            "response_codes": [list(rc) for rc in self.response_codes],
            "api_title": self.api_title,
            "requires_auth": self.requires_auth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EndpointSpec":
        return cls(
            operation_id=d["operation_id"],
            method=d["method"],
            path=d["path"],
            summary_description=d.get("summary_description"),
            parameters=tuple(ParamSpec.from_dict(p) for p in d["parameters"]),
            request_body=SchemaNode.from_dict(d["request_body"]) if d.get("request_body") else None,
            response_codes=tuple((str(c), desc) for c, desc in d.get("response_codes", [])),
            api_title=d.get("api_title", ""),
            requires_auth=d.get("requires_auth", False),
        )


@dataclass
class OasDocument:
    title: str
    version: str
    servers: list
    paths: dict  # path template -> {method: raw operation dict}
    components: dict  # schema name -> raw schema dict
    raw: dict  # the full original document (lossless round-trip)
    oas_major: int
    issues: list = field(default_factory=list)

    def serialize(self) -> str:
        return json.dumps(self.raw, ensure_ascii=False, indent=2)


@dataclass
class ExtractionResult:
    endpoints: list  # of EndpointSpec
    issues: list  # of ValidationIssue

    def __iter__(self):
        return iter(self.endpoints)

    def __len__(self):
        return len(self.endpoints)


def parse_document(raw, format: str = "auto") -> OasDocument:
    """Parse JSON or YAML bytes/text into an OasDocument.

    ``format="auto"`` sniffs by the first non-whitespace byte: ``{`` means JSON.
    Unknown fields stay in ``raw`` untouched so descriptions round-trip losslessly.
    """
    if isinstance(raw, bytes):
        text = raw.decode("utf-8")
    else:
        text = raw
    fmt = format
    if fmt == "auto":
        stripped = text.lstrip()
        fmt = "json" if stripped.startswith("{") else "yaml"
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise MalformedInput(e.msg, e.lineno, e.colno) from e
    elif fmt == "yaml":
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark else None
            col = mark.column + 1 if mark else None
            raise MalformedInput(str(getattr(e, "problem", e)), line, col) from e
    else:
        raise ValueError(f"unknown format: {format}")
    if not isinstance(data, dict):
        raise MalformedInput("document root is not an object")
    return _build_document(data)


def _build_document(data: dict) -> OasDocument:
    if "openapi" in data:
        version_str = str(data["openapi"])
        major = int(version_str.split(".")[0]) if version_str[:1].isdigit() else 0
    elif "swagger" in data:
        version_str = str(data["swagger"])
        major = int(version_str.split(".")[0]) if version_str[:1].isdigit() else 0
    else:
        raise UnsupportedOasVersion("document declares neither 'openapi' nor 'swagger'")
    if major not in (2, 3):
        raise UnsupportedOasVersion(f"unsupported OAS major version: {version_str}")

    info = data.get("info", {})
    if major == 2:
        components = data.get("definitions", {})
        scheme = (data.get("schemes") or ["https"])[0]
        host = data.get("host", "")
        servers = [f"{scheme}://{host}{data.get('basePath', '')}"] if host else []
    else:
        components = data.get("components", {}).get("schemas", {})
        servers = [s.get("url", "") for s in data.get("servers", [])]

    paths = {}
    for tmpl, item in (data.get("paths") or {}).items():
        if not isinstance(item, dict):
            continue
        ops = {m: op for m, op in item.items() if m in HTTP_METHODS}
        shared = item.get("parameters", [])
        paths[tmpl] = {"__shared_parameters__": shared, **ops}

    return OasDocument(
        title=info.get("title", ""),
        version=str(info.get("version", "")),
        servers=servers,
        paths=paths,
        components=components,
        raw=data,
        oas_major=major,
    )


def _ref_name(ref: str) -> str:
    for prefix in ("#/components/schemas/", "#/definitions/"):
        if ref.startswith(prefix):
            return ref[len(prefix):]
    if ref.startswith("#/"):
        return ref.rsplit("/", 1)[-1]
    raise ExternalRefUnsupported(f"non-local $ref not supported: {ref}")


def resolve_refs(doc: OasDocument) -> OasDocument:
    """Return a copy of the document with every local $ref inlined.

    Cycles and chains deeper than REF_DEPTH_LIMIT degrade to an untyped node
    plus a warning issue; a missing target raises DanglingRef.
    """
    issues: list = list(doc.issues)

    def resolve(node, depth, stack, pointer):
        if depth > REF_DEPTH_LIMIT:
            issues.append(ValidationIssue("warning", pointer, "ref depth limit reached; degraded to untyped"))
            return {}
        if isinstance(node, dict):
            if "$ref" in node:
                ref = node["$ref"]
                if not ref.startswith("#/"):
                    raise ExternalRefUnsupported(f"external $ref not supported: {ref}")
                name = _ref_name(ref)
                if name not in doc.components:
                    raise DanglingRef(f"$ref target missing: {ref} (at {pointer})")
                if name in stack:
                    issues.append(ValidationIssue("warning", pointer, f"cyclic $ref {ref}; degraded to untyped"))
                    return {}
                return resolve(doc.components[name], depth + 1, stack | {name}, pointer)
            return {k: resolve(v, depth, stack, f"{pointer}/{k}") for k, v in node.items()}
        if isinstance(node, list):
            return [resolve(v, depth, stack, f"{pointer}/{i}") for i, v in enumerate(node)]
        return node

    resolved_paths = {
        tmpl: resolve(item, 0, frozenset(), f"#/paths/{tmpl}") for tmpl, item in doc.paths.items()
    }
    resolved_components = {
        name: resolve(schema, 0, frozenset({name}), f"#/components/schemas/{name}")
        for name, schema in doc.components.items()
    }
    out = copy.copy(doc)
    out.paths = resolved_paths
    out.components = resolved_components
    out.issues = issues
    return out


def schema_from_raw(raw: Any) -> SchemaNode:
    """Convert a resolved raw schema dict into a SchemaNode."""
    if not isinstance(raw, dict) or not raw:
        return UNTYPED
    kind = raw.get("type")
    if kind not in ("string", "integer", "number", "boolean", "object", "array"):
        kind = "object" if "properties" in raw else ("array" if "items" in raw else "untyped")
    properties = {}
    items = None
    if kind == "object":
        properties = {k: schema_from_raw(v) for k, v in raw.get("properties", {}).items()}
    if kind == "array":
        items = schema_from_raw(raw.get("items", {}))
    required = tuple(n for n in raw.get("required", ()) if n in properties) if kind == "object" else ()
    enum = raw.get("enum")
    return SchemaNode(
        kind=kind,
        description=raw.get("description"),
        enum_values=tuple(enum) if enum else None,
        format=raw.get("format"),
        required_fields=required,
        properties=properties,
        items=items,
        example=raw.get("example"),
    )


def _camelize_segment(segment: str) -> str:
    parts = re.split(r"[^0-9a-zA-Z]+", segment)
    return "".join(p[:1].upper() + p[1:] for p in parts if p)


def synthesize_operation_id(method: str, path: str) -> str:
    segments = [_PLACEHOLDER_RE.sub(lambda m: m.group(1), s) for s in path.split("/") if s]
    return method.lower() + "".join(_camelize_segment(s) for s in segments)


def _extract_parameters(op: dict, shared: list, oas_major: int):
    """Return (params, body_schema) for one operation."""
    params: list = []
    body_schema: Optional[SchemaNode] = None
    seen = set()
    for raw_p in list(shared) + list(op.get("parameters", [])):
        if not isinstance(raw_p, dict) or "name" not in raw_p and raw_p.get("in") != "body":
            continue
        loc = raw_p.get("in")
        if loc == "body":  # OAS 2 body parameter
            body_schema = schema_from_raw(raw_p.get("schema", {}))
            continue
        if loc not in ("path", "query", "header"):
            continue
        key = (raw_p["name"], loc)
        if key in seen:  # operation-level params override shared ones
            params = [p for p in params if not (p.name == raw_p["name"] and p.location == loc)]
        seen.add(key)
        if oas_major == 2 and "schema" not in raw_p:
            schema = schema_from_raw({k: v for k, v in raw_p.items() if k in ("type", "format", "enum", "items", "description")})
        else:
            schema = schema_from_raw(raw_p.get("schema", {}))
        required = bool(raw_p.get("required", False)) or loc == "path"
        params.append(
            ParamSpec(
                name=raw_p["name"],
                location=loc,
                required=required,
                schema=schema,
                description=raw_p.get("description") or schema.description,
            )
        )
    if body_schema is None and "requestBody" in op:
        content = op["requestBody"].get("content", {})
        if content:
            media = content.get("application/json") or content[next(iter(content))]
            body_schema = schema_from_raw(media.get("schema", {}))
        else:
            body_schema = UNTYPED
    return params, body_schema


def extract_endpoints(doc: OasDocument) -> ExtractionResult:
    """One EndpointSpec per (path, method), in document order.

    Per-endpoint problems become ValidationIssues on the result; nothing is
    silently dropped.
    """
    endpoints: list = []
    issues: list = []
    seen_ids: dict = {}
    doc_security = bool(doc.raw.get("security"))
    for tmpl, item in doc.paths.items():
        shared = item.get("__shared_parameters__", [])
        for method in HTTP_METHODS:
            if method not in item:
                continue
            op = item[method]
            pointer = f"#/paths/{tmpl}/{method}"
            op_id = op.get("operationId") or synthesize_operation_id(method, tmpl)
            if op_id in seen_ids:
                seen_ids[op_id] += 1
                renamed = f"{op_id}_{seen_ids[op_id]}"
                issues.append(ValidationIssue("warning", pointer, f"duplicate operationId {op_id!r}; renamed to {renamed!r}"))
                op_id = renamed
            else:
                seen_ids[op_id] = 1
            params, body_schema = _extract_parameters(op, shared, doc.oas_major)
            placeholders = _PLACEHOLDER_RE.findall(tmpl)
            declared_path = [p.name for p in params if p.location == "path"]
            for ph in placeholders:
                if declared_path.count(ph) != 1:
                    issues.append(
                        ValidationIssue("error", pointer, f"path placeholder {{{ph}}} not declared exactly once in parameters")
                    )
            responses = tuple(
                (str(code), (r or {}).get("description", "") if isinstance(r, dict) else "")
                for code, r in (op.get("responses") or {}).items()
            )
            endpoints.append(
                EndpointSpec(
                    operation_id=op_id,
                    method=method,
                    path=tmpl,
                    summary_description=op.get("description") or op.get("summary"),
                    parameters=tuple(params),
                    request_body=body_schema,
                    response_codes=responses,
                    api_title=doc.title,
                    requires_auth=bool(op.get("security")) or doc_security,
                )
            )
    return ExtractionResult(endpoints, issues)


def _validate_schema(raw: Any, pointer: str, issues: list) -> None:
    if not isinstance(raw, dict):
        return
    enum = raw.get("enum")
    if enum is not None:
        if not enum:
            issues.append(ValidationIssue("error", pointer, "enum present but empty"))
        else:
            kind = raw.get("type")
            expected = {"string": str, "integer": int, "number": (int, float), "boolean": bool}.get(kind)
            if expected and not all(isinstance(v, expected) and not (expected is int and isinstance(v, bool)) for v in enum):
                issues.append(ValidationIssue("error", pointer, "enum members do not all match schema type"))
    props = raw.get("properties", {})
    for name in raw.get("required", []):
        if props and name not in props:
            issues.append(ValidationIssue("error", pointer, f"required field {name!r} not in properties"))
    for k, v in props.items():
        _validate_schema(v, f"{pointer}/properties/{k}", issues)
    if "items" in raw:
        _validate_schema(raw["items"], f"{pointer}/items", issues)


def validate_document(doc: OasDocument) -> list:
    """All invariant violations in the document; empty list means clean."""
    issues: list = []
    for tmpl, item in doc.paths.items():
        placeholders = _PLACEHOLDER_RE.findall(tmpl)
        if len(placeholders) != len(set(placeholders)):
            issues.append(ValidationIssue("error", f"#/paths/{tmpl}", "duplicate placeholder names in path template"))
        shared = item.get("__shared_parameters__", [])
        for method, op in item.items():
            if method == "__shared_parameters__":
                continue
            pointer = f"#/paths/{tmpl}/{method}"
            declared = [
                p.get("name")
                for p in list(shared) + list(op.get("parameters", []))
                if isinstance(p, dict) and p.get("in") == "path"
            ]
            for ph in placeholders:
                if declared.count(ph) != 1:
                    issues.append(
                        ValidationIssue("error", pointer, f"path placeholder {{{ph}}} not declared exactly once in parameters")
                    )
            for p in op.get("parameters", []):
                if isinstance(p, dict) and "schema" in p:
                    _validate_schema(p["schema"], f"{pointer}/parameters/{p.get('name')}", issues)
    for name, schema in doc.components.items():
        _validate_schema(schema, f"#/components/schemas/{name}", issues)
    return issues
