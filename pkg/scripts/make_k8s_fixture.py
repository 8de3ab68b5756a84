#!/usr/bin/env python3
"""Build the Kubernetes core/v1 OAS fixture used across the test suite.

Covers the core v1 resource group with realistic operationIds, query
parameters, and nested request-body schemas (>= 86 path operations). Checked
in at tests/fixtures/kubernetes_core_v1.json; rerun this script to regenerate.
"""

import json
import os

NAMESPACED_RESOURCES = [
    ("pods", "Pod"),
    ("services", "Service"),
    ("configmaps", "ConfigMap"),
    ("secrets", "Secret"),
    ("endpoints", "Endpoints"),
    ("events", "Event"),
    ("limitranges", "LimitRange"),
    ("resourcequotas", "ResourceQuota"),
    ("serviceaccounts", "ServiceAccount"),
    ("persistentvolumeclaims", "PersistentVolumeClaim"),
    ("replicationcontrollers", "ReplicationController"),
    ("podtemplates", "PodTemplate"),
]

SCHEMA_PREFIX = "io.k8s.api.core.v1"
META_PREFIX = "io.k8s.apimachinery.pkg.apis.meta.v1"


def ref(name):
    return {"$ref": f"#/components/schemas/{name}"}


def qp(name, schema, description, required=False):
    return {"name": name, "in": "query", "required": required, "schema": schema, "description": description}


def path_param(name, description):
    return {"name": name, "in": "path", "required": True, "schema": {"type": "string"}, "description": description}


DRY_RUN = qp(
    "dryRun",
    {"type": "string"},
    "When present, indicates that modifications should not be persisted. "
    "An invalid or unrecognized dryRun directive will result in an error response "
    "and no further processing of the request. Valid values are: - All: all dry run stages will be processed",
)
FIELD_MANAGER = qp("fieldManager", {"type": "string"}, "fieldManager is a name associated with the actor or entity that is making these changes.")
FIELD_VALIDATION = qp(
    "fieldValidation",
    {"type": "string", "enum": ["Ignore", "Warn", "Strict"]},
    "fieldValidation instructs the server on how to handle objects in the request containing unknown or duplicate fields.",
)
GRACE_PERIOD = qp(
    "gracePeriodSeconds",
    {"type": "integer"},
    "The duration in seconds before the object should be deleted. The value zero indicates delete immediately.",
)
ORPHAN_DEPENDENTS = qp(
    "orphanDependents",
    {"type": "boolean"},
    "Deprecated: please use the PropagationPolicy. Should the dependent objects be orphaned.",
)
PROPAGATION_POLICY = qp(
    "propagationPolicy",
    {"type": "string", "enum": ["Orphan", "Background", "Foreground"]},
    "Whether and how garbage collection will be performed. Acceptable values are: "
    "'Orphan' - orphan the dependents; 'Background' - allow the garbage collector to delete the dependents in the background; "
    "'Foreground' - a cascading policy that deletes all dependents in the foreground.",
)
LIST_PARAMS = [
    qp("fieldSelector", {"type": "string"}, "A selector to restrict the list of returned objects by their fields."),
    qp("labelSelector", {"type": "string"}, "A selector to restrict the list of returned objects by their labels."),
    qp("limit", {"type": "integer"}, "limit is a maximum number of responses to return for a list call."),
    qp("continue", {"type": "string"}, "The continue option should be set when retrieving more results from the server."),
    qp("watch", {"type": "boolean"}, "Watch for changes to the described resources."),
]
PRETTY = qp("pretty", {"type": "string"}, "If 'true', then the output is pretty printed.")


def responses(kind_schema):
    return {
        "200": {"description": "OK", "content": {"application/json": {"schema": kind_schema}}},
        "401": {"description": "Unauthorized"},
    }


def body(schema_name, required=False):
    return {"required": required, "content": {"application/json": {"schema": ref(schema_name)}}}


def resource_paths(plural, kind):
    k = f"{SCHEMA_PREFIX}.{kind}"
    klist = f"{SCHEMA_PREFIX}.{kind}List"
    collection = f"/api/v1/namespaces/{{namespace}}/{plural}"
    item = collection + "/{name}"
    all_ns = f"/api/v1/{plural}"
    ns = path_param("namespace", "object name and auth scope, such as for teams and projects")
    name = path_param("name", f"name of the {kind}")
    return {
        all_ns: {
            "get": {
                "operationId": f"listCoreV1{kind}ForAllNamespaces",
                "description": f"list or watch objects of kind {kind}",
                "parameters": LIST_PARAMS,
                "responses": responses(ref(klist)),
            },
        },
        collection: {
            "get": {
                "operationId": f"listCoreV1Namespaced{kind}",
                "description": f"list or watch objects of kind {kind}",
                "parameters": [ns] + LIST_PARAMS,
                "responses": responses(ref(klist)),
            },
            "post": {
                "operationId": f"createCoreV1Namespaced{kind}",
                "description": f"create a {kind}",
                "parameters": [ns, DRY_RUN, FIELD_MANAGER, FIELD_VALIDATION],
                "requestBody": body(k, required=True),
                "responses": responses(ref(k)),
            },
            "delete": {
                "operationId": f"deleteCoreV1CollectionNamespaced{kind}",
                "description": f"delete collection of {kind}",
                "parameters": [ns, DRY_RUN, GRACE_PERIOD, ORPHAN_DEPENDENTS, PROPAGATION_POLICY],
                "requestBody": body(f"{META_PREFIX}.DeleteOptions"),
                "responses": responses(ref(f"{META_PREFIX}.Status")),
            },
        },
        item: {
            "get": {
                "operationId": f"readCoreV1Namespaced{kind}",
                "description": f"read the specified {kind}",
                "parameters": [ns, name, PRETTY],
                "responses": responses(ref(k)),
            },
            "put": {
                "operationId": f"replaceCoreV1Namespaced{kind}",
                "description": f"replace the specified {kind}",
                "parameters": [ns, name, DRY_RUN, FIELD_MANAGER, FIELD_VALIDATION],
                "requestBody": body(k, required=True),
                "responses": responses(ref(k)),
            },
            "patch": {
                "operationId": f"patchCoreV1Namespaced{kind}",
                "description": f"partially update the specified {kind}",
                "parameters": [ns, name, DRY_RUN, FIELD_MANAGER],
                "requestBody": body(f"{META_PREFIX}.Patch"),
                "responses": responses(ref(k)),
            },
            "delete": {
                "operationId": f"deleteCoreV1Namespaced{kind}",
                "description": f"delete a {kind}",
                "parameters": [ns, name, DRY_RUN, GRACE_PERIOD, ORPHAN_DEPENDENTS, PROPAGATION_POLICY],
                "requestBody": body(f"{META_PREFIX}.DeleteOptions"),
                "responses": responses(ref(f"{META_PREFIX}.Status")),
            },
        },
    }


def namespace_paths():
    k = f"{SCHEMA_PREFIX}.Namespace"
    return {
        "/api/v1/namespaces": {
            "get": {
                "operationId": "listCoreV1Namespace",
                "description": "list or watch objects of kind Namespace",
                "parameters": LIST_PARAMS,
                "responses": responses(ref(f"{SCHEMA_PREFIX}.NamespaceList")),
            },
            "post": {
                "operationId": "createCoreV1Namespace",
                "description": "create a Namespace",
                "parameters": [DRY_RUN, FIELD_MANAGER, FIELD_VALIDATION],
                "requestBody": body(k, required=True),
                "responses": responses(ref(k)),
            },
        },
        "/api/v1/namespaces/{name}": {
            "get": {
                "operationId": "readCoreV1Namespace",
                "description": "read the specified Namespace",
                "parameters": [path_param("name", "name of the Namespace"), PRETTY],
                "responses": responses(ref(k)),
            },
            "put": {
                "operationId": "replaceCoreV1Namespace",
                "description": "replace the specified Namespace",
                "parameters": [path_param("name", "name of the Namespace"), DRY_RUN, FIELD_MANAGER, FIELD_VALIDATION],
                "requestBody": body(k, required=True),
                "responses": responses(ref(k)),
            },
            "delete": {
                "operationId": "deleteCoreV1Namespace",
                "description": "delete a Namespace",
                "parameters": [path_param("name", "name of the Namespace"), DRY_RUN, GRACE_PERIOD, ORPHAN_DEPENDENTS, PROPAGATION_POLICY],
                "requestBody": body(f"{META_PREFIX}.DeleteOptions"),
                "responses": responses(ref(f"{META_PREFIX}.Status")),
            },
        },
    }


def schemas():
    out = {
        f"{META_PREFIX}.ObjectMeta": {
            "type": "object",
            "description": "Standard object's metadata.",
            "properties": {
                "name": {"type": "string", "description": "Name must be unique within a namespace."},
                "namespace": {"type": "string", "description": "Namespace defines the space within which each name must be unique."},
                "labels": {"type": "object", "properties": {}, "description": "Map of string keys and values."},
                "annotations": {"type": "object", "properties": {}, "description": "Unstructured key value map."},
                "ownerReferences": {"type": "array", "items": ref(f"{META_PREFIX}.OwnerReference")},
            },
        },
        f"{META_PREFIX}.OwnerReference": {
            "type": "object",
            "required": ["apiVersion", "kind", "name", "uid"],
            "properties": {
                "apiVersion": {"type": "string"},
                "kind": {"type": "string"},
                "name": {"type": "string"},
                "uid": {"type": "string"},
                "controller": {"type": "boolean"},
            },
        },
        f"{META_PREFIX}.Preconditions": {
            "type": "object",
            "properties": {
                "resourceVersion": {"type": "string"},
                "uid": {"type": "string"},
            },
        },
        f"{META_PREFIX}.DeleteOptions": {
            "type": "object",
            "description": "DeleteOptions may be provided when deleting an API object.",
            "properties": {
                "apiVersion": {"type": "string"},
                "kind": {"type": "string"},
                "dryRun": {"type": "array", "items": {"type": "string"}},
                "gracePeriodSeconds": {"type": "integer"},
                "orphanDependents": {"type": "boolean"},
                "preconditions": ref(f"{META_PREFIX}.Preconditions"),
                "propagationPolicy": {"type": "string"},
            },
        },
        f"{META_PREFIX}.Status": {
            "type": "object",
            "properties": {
                "apiVersion": {"type": "string"},
                "code": {"type": "integer"},
                "kind": {"type": "string"},
                "message": {"type": "string"},
                "reason": {"type": "string"},
                "status": {"type": "string"},
            },
        },
        f"{META_PREFIX}.Patch": {"type": "object", "description": "Patch is provided to give a concrete name and type to the Kubernetes PATCH request body.", "properties": {}},
        f"{SCHEMA_PREFIX}.LimitRangeItem": {
            "type": "object",
            "required": ["type"],
            "properties": {
                "type": {"type": "string", "description": "Type of resource that this limit applies to."},
                "default": {"type": "object", "properties": {}},
                "defaultRequest": {"type": "object", "properties": {}},
                "max": {"type": "object", "properties": {}},
                "min": {"type": "object", "properties": {}},
            },
        },
        f"{SCHEMA_PREFIX}.LimitRangeSpec": {
            "type": "object",
            "required": ["limits"],
            "properties": {
                "limits": {"type": "array", "items": ref(f"{SCHEMA_PREFIX}.LimitRangeItem"),
                           "description": "Limits is the list of LimitRangeItem objects that are enforced."},
            },
        },
    }
    for plural, kind in NAMESPACED_RESOURCES + [("namespaces", "Namespace")]:
        k = f"{SCHEMA_PREFIX}.{kind}"
        spec_schema = ref(f"{SCHEMA_PREFIX}.LimitRangeSpec") if kind == "LimitRange" else {"type": "object", "properties": {}}
        out[k] = {
            "type": "object",
            "description": f"{kind} is a core v1 API object.",
            "properties": {
                "apiVersion": {"type": "string"},
                "kind": {"type": "string"},
                "metadata": ref(f"{META_PREFIX}.ObjectMeta"),
                "spec": spec_schema,
            },
        }
        out[f"{k}List"] = {
            "type": "object",
            "required": ["items"],
            "properties": {
                "apiVersion": {"type": "string"},
                "items": {"type": "array", "items": ref(k)},
                "kind": {"type": "string"},
            },
        }
    return out


def build():
    paths = {}
    for plural, kind in NAMESPACED_RESOURCES:
        paths.update(resource_paths(plural, kind))
    paths.update(namespace_paths())
    return {
        "openapi": "3.0.0",
        "info": {"title": "Kubernetes", "version": "v1.30.0"},
        "servers": [{"url": "http://localhost:8080"}],
        "paths": paths,
        "components": {"schemas": schemas()},
    }


def main():
    doc = build()
    n_ops = sum(1 for item in doc["paths"].values() for m in item if m in ("get", "put", "post", "delete", "patch"))
    out = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures", "kubernetes_core_v1.json")
    out = os.path.abspath(out)
    with open(out, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote {out} with {n_ops} path operations")


if __name__ == "__main__":
    main()
