#!/usr/bin/env python3
"""Regenerate the checked-in golden tool sources for the LimitRange delete endpoint.

Run only when an intentional generator change needs new goldens; review the
diff before committing.
"""

import os

from ace import enrichment, oas, toolgen

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURE = os.path.join(HERE, "..", "tests", "fixtures", "kubernetes_core_v1.json")
GOLDENS = os.path.join(HERE, "..", "tests", "goldens")


def main():
    with open(FIXTURE, "rb") as f:
        doc = oas.resolve_refs(oas.parse_document(f.read()))
    endpoints = oas.extract_endpoints(doc).endpoints
    target = next(e for e in endpoints if e.operation_id == "deleteCoreV1NamespacedLimitRange")
    backend = enrichment.HeuristicEnricher()
    os.makedirs(GOLDENS, exist_ok=True)
    for level in enrichment.LEVELS:
        enriched = enrichment.enrich_endpoint(target, level, backend)
        plan = toolgen.plan_tool(enriched)
        artifact = toolgen.emit_tool_source(plan, "langchain-react-py")
        path = os.path.join(GOLDENS, f"deleteCoreV1NamespacedLimitRange.{level}.py.golden")
        with open(path, "w", encoding="utf-8") as f:
            f.write(artifact.content)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
