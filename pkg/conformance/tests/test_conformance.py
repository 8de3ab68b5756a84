import json
import subprocess
import sys
import time
from xml.etree import ElementTree as ET

import pytest
import requests

from ace_conformance import (
    ConformanceCase,
    StubServer,
    load_tool_modules,
    run_conformance,
)


def fill_path(descriptor, values):
    path = descriptor["request"]["url_template"]
    for name, value in values.items():
        path = path.replace("{" + name + "}", str(value))
    return path


def test_all_generated_tools_import_cleanly(tool_dir, manifest):
    modules, errors = load_tool_modules(str(tool_dir))
    assert errors == {}
    assert len(modules) >= 86
    for name in manifest:
        assert name in modules
        assert callable(getattr(modules[name], name))


def test_stub_server_records_and_scripts():
    with StubServer() as server:
        server.script(404, {"message": "nope"})
        response = requests.get(f"{server.base_url}/a/b?x=1&flag=True", json={"k": [1, 2]})
        assert response.status_code == 404
        assert response.json() == {"message": "nope"}
        record = server.records[-1]
        assert record.method == "GET"
        assert record.path == "/a/b"
        assert record.query == {"x": "1", "flag": "True"}
        assert record.body == {"k": [1, 2]}
        # Unscripted requests default to 200 {}.
        assert requests.get(f"{server.base_url}/other").status_code == 200


def replay_cases(manifest):
    """10 endpoints mixing GET/POST/DELETE, with and without bodies."""
    cases = []

    def case(name, tool, arguments, query=None, body=None, status=200, respond=None):
        d = manifest[tool]
        path_args = d["request"]["path_args"]
        cases.append(ConformanceCase(
            name=name,
            tool=tool,
            arguments=arguments,
            expect_method=d["request"]["method"],
            expect_path=fill_path(d, {k: arguments[k] for k in path_args}),
            expect_query=query or {},
            expect_body=body,
            respond_status=status,
            respond_body=respond,
        ))

    case("get-list-pods", "listCoreV1NamespacedPod",
         {"namespace": "dev-1", "limit": 5, "watch": True},
         query={"limit": "5", "watch": "True"})
    case("get-read-configmap", "readCoreV1NamespacedConfigMap",
         {"namespace": "dev-1", "name": "cm-1"})
    case("get-list-all-services", "listCoreV1ServiceForAllNamespaces", {})
    case("get-read-namespace", "readCoreV1Namespace", {"name": "prod"})
    body = {"apiVersion": "v1", "kind": "Service", "metadata": {"name": "svc-1"}}
    case("post-create-service", "createCoreV1NamespacedService",
         {"namespace": "dev-1", "requestBody": body}, body=body)
    case("post-create-pod-dryrun", "createCoreV1NamespacedPod",
         {"namespace": "dev-1", "dryRun": "All",
          "requestBody": {"kind": "Pod"}},
         query={"dryRun": "All"}, body={"kind": "Pod"})
    case("post-create-namespace", "createCoreV1Namespace",
         {"requestBody": {"kind": "Namespace"}}, body={"kind": "Namespace"})
    case("delete-limitrange-full", "deleteCoreV1NamespacedLimitRange",
         {"namespace": "dev-1", "name": "lr-1",
          "gracePeriodSeconds": 0, "propagationPolicy": "Orphan",
          "requestBody": {"kind": "DeleteOptions"}},
         query={"gracePeriodSeconds": "0", "propagationPolicy": "Orphan"},
         body={"kind": "DeleteOptions"})
    case("delete-secret-no-body", "deleteCoreV1NamespacedSecret",
         {"namespace": "dev-1", "name": "s-1"})
    case("put-replace-configmap", "replaceCoreV1NamespacedConfigMap",
         {"namespace": "dev-1", "name": "cm-1", "requestBody": {"data": {"a": "1"}}},
         body={"data": {"a": "1"}})
    return cases


def test_ten_endpoint_replay(tool_dir, manifest):
    start = time.monotonic()
    cases = replay_cases(manifest)
    assert len(cases) == 10
    methods = {c.expect_method.lower() for c in cases}
    assert {"get", "post", "delete"} <= methods
    report = run_conformance(str(tool_dir), cases)
    assert report.import_errors == {}
    for result in report.results:
        assert result.passed, (result.name, result.failures)
    assert time.monotonic() - start < 30


@pytest.mark.parametrize("status", [200, 404, 500])
def test_status_codes_propagate(tool_dir, manifest, status):
    d = manifest["readCoreV1NamespacedConfigMap"]
    case = ConformanceCase(
        name=f"status-{status}",
        tool="readCoreV1NamespacedConfigMap",
        arguments={"namespace": "dev-1", "name": "cm"},
        expect_method=d["request"]["method"],
        expect_path=fill_path(d, {"namespace": "dev-1", "name": "cm"}),
        expect_query={},
        respond_status=status,
        respond_body={"code": status},
    )
    report = run_conformance(str(tool_dir), [case])
    result = report.results[0]
    assert result.passed, result.failures


def test_omitted_optional_args_produce_no_query_keys(tool_dir, manifest):
    # deleteCoreV1NamespacedLimitRange has four optional query params; calling
    # with none of them must leave the query string empty (no null keys).
    d = manifest["deleteCoreV1NamespacedLimitRange"]
    case = ConformanceCase(
        name="optionals-omitted",
        tool="deleteCoreV1NamespacedLimitRange",
        arguments={"namespace": "dev-1", "name": "lr-1"},
        expect_method=d["request"]["method"],
        expect_path=fill_path(d, {"namespace": "dev-1", "name": "lr-1"}),
        expect_query={},
        expect_body=None,
    )
    report = run_conformance(str(tool_dir), [case])
    assert report.results[0].passed, report.results[0].failures


def test_mismatch_is_reported_not_hidden(tool_dir, manifest):
    d = manifest["readCoreV1Namespace"]
    case = ConformanceCase(
        name="deliberate-mismatch",
        tool="readCoreV1Namespace",
        arguments={"name": "prod"},
        expect_method=d["request"]["method"],
        expect_path="/api/v1/namespaces/other",
        expect_query={},
    )
    report = run_conformance(str(tool_dir), [case])
    assert not report.ok
    assert any("path:" in f for f in report.results[0].failures)


def test_reports_junit_and_summary(tool_dir, manifest, tmp_path):
    cases = replay_cases(manifest)
    junit = tmp_path / "junit.xml"
    summary = tmp_path / "summary.txt"
    report = run_conformance(str(tool_dir), cases, junit_path=str(junit), summary_path=str(summary))
    assert report.ok
    suite = ET.parse(junit).getroot()
    assert suite.tag == "testsuite"
    assert suite.get("tests") == str(len(cases))
    assert suite.get("failures") == "0"
    text = summary.read_text()
    assert f"cases: {len(cases)}/{len(cases)} passed" in text
    assert "imports: ok" in text


def test_cli_exit_codes(tool_dir, manifest, tmp_path):
    cases_path = tmp_path / "cases.json"
    good = replay_cases(manifest)[:2]
    cases_path.write_text(json.dumps([{
        "name": c.name, "tool": c.tool, "arguments": c.arguments,
        "expect_method": c.expect_method, "expect_path": c.expect_path,
        "expect_query": c.expect_query, "expect_body": c.expect_body,
        "respond_status": c.respond_status, "respond_body": c.respond_body,
    } for c in good]))
    junit = tmp_path / "out.xml"
    proc = subprocess.run(
        [sys.executable, "-m", "ace_conformance.cli", str(tool_dir), str(cases_path), "--junit", str(junit)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "passed" in proc.stdout
    assert junit.exists()

    bad = dict(json.loads(cases_path.read_text())[0])
    bad["expect_path"] = "/wrong"
    cases_path.write_text(json.dumps([bad]))
    proc = subprocess.run(
        [sys.executable, "-m", "ace_conformance.cli", str(tool_dir), str(cases_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
