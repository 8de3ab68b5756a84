import json

import pytest

from ace import oas

MINIMAL = '{"openapi":"3.0.0","info":{"title":"T","version":"1"},"paths":{}}'


def make_doc(paths, schemas=None):
    return oas.parse_document(json.dumps({
        "openapi": "3.0.0",
        "info": {"title": "Fixture", "version": "1"},
        "paths": paths,
        "components": {"schemas": schemas or {}},
    }))


class TestParseDocument:
    def test_kubernetes_fixture_has_at_least_86_operations(self, k8s_doc):
        n = sum(1 for item in k8s_doc.paths.values() for m in item if m in oas.HTTP_METHODS)
        assert n >= 86

    def test_empty_paths(self):
        doc = oas.parse_document(MINIMAL)
        assert oas.extract_endpoints(doc).endpoints == []

    def test_three_endpoint_fixture(self):
        doc = make_doc({
            "/a": {"get": {"operationId": "getA", "responses": {}}},
            "/b": {"get": {"operationId": "getB", "responses": {}},
                    "post": {"operationId": "postB", "responses": {}}},
        })
        assert len(oas.extract_endpoints(doc).endpoints) == 3

    def test_format_sniffing_yaml(self):
        doc = oas.parse_document("openapi: 3.0.0\ninfo: {title: Y, version: '1'}\npaths: {}\n")
        assert doc.title == "Y"

    def test_malformed_json_reports_location(self):
        with pytest.raises(oas.MalformedInput) as exc:
            oas.parse_document('{"openapi": "3.0.0",,}', format="json")
        assert exc.value.line == 1

    def test_unsupported_version(self):
        with pytest.raises(oas.UnsupportedOasVersion):
            oas.parse_document('{"openapi":"4.0.0","info":{},"paths":{}}')

    def test_swagger_2_accepted(self):
        doc = oas.parse_document(json.dumps({
            "swagger": "2.0",
            "info": {"title": "Old", "version": "1"},
            "paths": {"/x": {"post": {
                "operationId": "createX",
                "parameters": [{"name": "payload", "in": "body",
                                "schema": {"$ref": "#/definitions/X"}}],
                "responses": {},
            }}},
            "definitions": {"X": {"type": "object", "properties": {"n": {"type": "string"}}}},
        }))
        resolved = oas.resolve_refs(doc)
        ep = oas.extract_endpoints(resolved).endpoints[0]
        assert ep.request_body.kind == "object"
        assert "n" in ep.request_body.properties

    def test_round_trip(self, k8s_doc):
        again = oas.parse_document(k8s_doc.serialize())
        assert again.raw == k8s_doc.raw


class TestResolveRefs:
    def test_one_hop_substitution(self):
        doc = make_doc(
            {"/x": {"get": {"operationId": "getX", "responses": {}}}},
            schemas={"X": {"type": "string"}, "Y": {"$ref": "#/components/schemas/X"}},
        )
        resolved = oas.resolve_refs(doc)
        assert resolved.components["Y"] == {"type": "string"}

    def test_cycle_degrades_to_untyped_with_warning(self):
        doc = make_doc({}, schemas={"X": {"type": "object", "properties": {"self": {"$ref": "#/components/schemas/X"}}}})
        resolved = oas.resolve_refs(doc)
        node = oas.schema_from_raw(resolved.components["X"]["properties"]["self"])
        assert node.kind == "untyped"
        assert any("cyclic" in i.message for i in resolved.issues)

    def test_dangling_ref(self):
        doc = make_doc({}, schemas={"X": {"$ref": "#/components/schemas/Missing"}})
        with pytest.raises(oas.DanglingRef):
            oas.resolve_refs(doc)

    def test_external_ref_unsupported(self):
        doc = make_doc({}, schemas={"X": {"$ref": "https://example.com/x.json#/X"}})
        with pytest.raises(oas.ExternalRefUnsupported):
            oas.resolve_refs(doc)

    def test_kubernetes_limitrange_resolves_cleanly(self, k8s_doc):
        # resolve_refs already ran in the fixture; a dangling ref would have raised
        raw = k8s_doc.components["io.k8s.api.core.v1.LimitRange"]
        node = oas.schema_from_raw(raw)
        assert node.kind == "object"
        assert node.properties["spec"].properties["limits"].kind == "array"


class TestExtractEndpoints:
    def test_limitrange_delete(self, limitrange_delete):
        ep = limitrange_delete
        assert ep.method == "delete"
        assert [p.name for p in ep.parameters if p.location == "path"] == ["namespace", "name"]
        assert [p.name for p in ep.parameters if p.location == "query"] == [
            "dryRun", "gracePeriodSeconds", "orphanDependents", "propagationPolicy",
        ]
        assert ep.request_body is not None

    def test_no_parameters(self):
        doc = make_doc({"/health": {"get": {"operationId": "getHealth", "responses": {}}}})
        ep = oas.extract_endpoints(doc).endpoints[0]
        assert ep.parameters == ()

    def test_missing_operation_id_synthesized(self):
        doc = make_doc({"/api/v1/namespaces/{namespace}/limitranges": {"get": {
            "parameters": [{"name": "namespace", "in": "path", "required": True, "schema": {"type": "string"}}],
            "responses": {},
        }}})
        ep = oas.extract_endpoints(doc).endpoints[0]
        assert ep.operation_id == "getApiV1NamespacesNamespaceLimitranges"

    def test_duplicate_operation_id_renamed(self):
        doc = make_doc({
            "/a": {"get": {"operationId": "dup", "responses": {}}},
            "/b": {"get": {"operationId": "dup", "responses": {}}},
        })
        result = oas.extract_endpoints(doc)
        assert [e.operation_id for e in result.endpoints] == ["dup", "dup_2"]
        assert any(i.severity == "warning" for i in result.issues)

    def test_deterministic_and_order_stable(self, k8s_doc):
        a = [e.operation_id for e in oas.extract_endpoints(k8s_doc).endpoints]
        b = [e.operation_id for e in oas.extract_endpoints(k8s_doc).endpoints]
        assert a == b

    def test_undeclared_path_placeholder_flagged(self):
        doc = make_doc({"/items/{name}": {"get": {"operationId": "getItem", "responses": {}}}})
        result = oas.extract_endpoints(doc)
        assert len(result.endpoints) == 1  # no silent drop
        assert any(i.severity == "error" and "{name}" in i.message for i in result.issues)


class TestValidateDocument:
    def test_clean_fixture(self):
        doc = make_doc({"/a": {"get": {"operationId": "getA", "responses": {}}}})
        assert oas.validate_document(doc) == []

    def test_missing_path_param(self):
        doc = make_doc({"/items/{name}": {"get": {"operationId": "getItem", "responses": {}}}})
        issues = oas.validate_document(doc)
        assert len([i for i in issues if i.severity == "error"]) == 1

    def test_kubernetes_fixture_clean(self, k8s_doc):
        assert [i for i in oas.validate_document(k8s_doc) if i.severity == "error"] == []

    def test_empty_enum_flagged(self):
        doc = make_doc({}, schemas={"X": {"type": "string", "enum": []}})
        assert any("enum" in i.message for i in oas.validate_document(doc))

    def test_mixed_enum_flagged(self):
        doc = make_doc({}, schemas={"X": {"type": "string", "enum": ["a", 1]}})
        assert any(i.severity == "error" for i in oas.validate_document(doc))

    def test_required_not_in_properties(self):
        doc = make_doc({}, schemas={"X": {"type": "object", "required": ["missing"], "properties": {"a": {"type": "string"}}}})
        assert any("missing" in i.message for i in oas.validate_document(doc))
