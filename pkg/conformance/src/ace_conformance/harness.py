"""Load generated tool modules and replay scripted calls against the stub.

The harness consumes only a tool output directory: one ``<toolname>.py`` per
tool plus a ``catalog.json`` manifest describing each tool's request mapping.
Tools locate their runtime config through the ``ACE_TOOLS_CONFIG`` environment
variable, which the harness points at a temporary file naming the stub server
as ``base_url``.
"""

from __future__ import annotations

import importlib.util
import json
import os
import tempfile
import traceback
from dataclasses import dataclass, field
from typing import Any, Optional
from xml.etree import ElementTree as ET

from .stub import StubServer


@dataclass(frozen=True)
class ConformanceCase:
    name: str
    tool: str
    arguments: dict
    expect_method: str
    expect_path: str
    expect_query: dict  # name -> serialized value; exact match, no extras
    expect_body: Any = None  # parsed JSON, or None for "no body sent"
    respond_status: int = 200
    respond_body: Any = None

    @classmethod
    def from_dict(cls, d: dict) -> "ConformanceCase":
        return cls(
            name=d["name"],
            tool=d["tool"],
            arguments=dict(d["arguments"]),
            expect_method=d["expect_method"],
            expect_path=d["expect_path"],
            expect_query=dict(d.get("expect_query", {})),
            expect_body=d.get("expect_body"),
            respond_status=int(d.get("respond_status", 200)),
            respond_body=d.get("respond_body"),
        )


@dataclass
class CaseResult:
    name: str
    tool: str
    passed: bool
    failures: list = field(default_factory=list)


@dataclass
class ConformanceReport:
    import_errors: dict  # module stem -> traceback text
    results: list  # of CaseResult

    @property
    def ok(self) -> bool:
        return not self.import_errors and all(r.passed for r in self.results)

    def summary_text(self) -> str:
        lines = []
        n_pass = sum(1 for r in self.results if r.passed)
        lines.append(f"imports: {'ok' if not self.import_errors else f'{len(self.import_errors)} failed'}")
        for stem, tb in sorted(self.import_errors.items()):
            lines.append(f"  FAIL import {stem}: {tb.strip().splitlines()[-1]}")
        lines.append(f"cases: {n_pass}/{len(self.results)} passed")
        for r in self.results:
            if r.passed:
                lines.append(f"  PASS {r.name}")
            else:
                lines.append(f"  FAIL {r.name}")
                for f in r.failures:
                    lines.append(f"       - {f}")
        return "\n".join(lines) + "\n"

    def junit_xml(self) -> bytes:
        n_failures = len([r for r in self.results if not r.passed]) + len(self.import_errors)
        suite = ET.Element(
            "testsuite",
            name="ace-conformance",
            tests=str(len(self.results) + len(self.import_errors)),
            failures=str(n_failures),
            errors="0",
        )
        for stem, tb in sorted(self.import_errors.items()):
            case = ET.SubElement(suite, "testcase", classname="import", name=stem)
            failure = ET.SubElement(case, "failure", message="import failed")
            failure.text = tb
        for r in self.results:
            case = ET.SubElement(suite, "testcase", classname=r.tool, name=r.name)
            if not r.passed:
                failure = ET.SubElement(case, "failure", message="conformance mismatch")
                failure.text = "\n".join(r.failures)
        return ET.tostring(suite, encoding="utf-8", xml_declaration=True)


def load_tool_modules(tool_dir: str) -> tuple:
    """Import every tool file in the directory.

    Returns (modules, errors): a dict of module stem -> module object and a
    dict of stem -> traceback text for files that failed to import.
    """
    modules: dict = {}
    errors: dict = {}
    for entry in sorted(os.listdir(tool_dir)):
        if not entry.endswith(".py"):
            continue
        stem = entry[: -len(".py")]
        path = os.path.join(tool_dir, entry)
        try:
            spec = importlib.util.spec_from_file_location(f"ace_conformance_tools.{stem}", path)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            modules[stem] = module
        except Exception:
            errors[stem] = traceback.format_exc()
    return modules, errors


def load_manifest(tool_dir: str) -> dict:
    with open(os.path.join(tool_dir, "catalog.json"), encoding="utf-8") as f:
        manifest = json.load(f)
    return {t["name"]: t for t in manifest["tools"]}


def _resolve_callable(module, name: str):
    fn = getattr(module, name)
    # Unwrap a structured-tool wrapper if the tool decorator library is present.
    return getattr(fn, "func", fn)


def _check_case(case: ConformanceCase, record, returned) -> list:
    failures = []
    if record.method.upper() != case.expect_method.upper():
        failures.append(f"method: expected {case.expect_method}, got {record.method}")
    if record.path != case.expect_path:
        failures.append(f"path: expected {case.expect_path!r}, got {record.path!r}")
    if record.query != case.expect_query:
        failures.append(f"query: expected {case.expect_query!r}, got {record.query!r}")
    if record.body != case.expect_body:
        failures.append(f"body: expected {case.expect_body!r}, got {record.body!r}")
    if not isinstance(returned, dict) or returned.get("status_code") != case.respond_status:
        failures.append(f"status: expected {case.respond_status}, returned {returned!r}")
    return failures


def run_conformance(
    tool_dir: str,
    cases: list,
    junit_path: Optional[str] = None,
    summary_path: Optional[str] = None,
) -> ConformanceReport:
    """Import every tool in ``tool_dir`` and replay ``cases`` against a stub.

    Each case is executed against a fresh scripted response; requests are
    recorded by the stub and compared field by field against the expectation.
    """
    manifest = load_manifest(tool_dir)
    modules, import_errors = load_tool_modules(tool_dir)
    results: list = []

    with StubServer() as server, tempfile.TemporaryDirectory() as tmp:
        config_path = os.path.join(tmp, "config.json")
        with open(config_path, "w", encoding="utf-8") as f:
            json.dump({"base_url": server.base_url}, f)
        previous = os.environ.get("ACE_TOOLS_CONFIG")
        os.environ["ACE_TOOLS_CONFIG"] = config_path
        try:
            for case in cases:
                if case.tool not in manifest:
                    results.append(CaseResult(case.name, case.tool, False,
                                              [f"tool {case.tool!r} not in catalog.json"]))
                    continue
                if case.tool not in modules:
                    results.append(CaseResult(case.name, case.tool, False,
                                              [f"tool module {case.tool!r} failed to import"]))
                    continue
                server.script(case.respond_status, case.respond_body)
                before = len(server.records)
                try:
                    returned = _resolve_callable(modules[case.tool], case.tool)(**case.arguments)
                except Exception:
                    results.append(CaseResult(case.name, case.tool, False,
                                              [f"call raised:\n{traceback.format_exc()}"]))
                    continue
                new_records = server.records[before:]
                if len(new_records) != 1:
                    results.append(CaseResult(case.name, case.tool, False,
                                              [f"expected exactly 1 request, saw {len(new_records)}"]))
                    continue
                failures = _check_case(case, new_records[0], returned)
                results.append(CaseResult(case.name, case.tool, not failures, failures))
        finally:
            if previous is None:
                os.environ.pop("ACE_TOOLS_CONFIG", None)
            else:
                os.environ["ACE_TOOLS_CONFIG"] = previous

    report = ConformanceReport(import_errors=import_errors, results=results)
    if junit_path:
        with open(junit_path, "wb") as f:
            f.write(report.junit_xml())
    if summary_path:
        with open(summary_path, "w", encoding="utf-8") as f:
            f.write(report.summary_text())
    return report
