#!/usr/bin/env python3
"""Run the full pipeline on the bundled Kubernetes core/v1 fixture.

parse -> enrich (heuristic) -> generate -> index -> shortlist demo ->
oracle transcripts -> metric + shortlist reports. Everything lands under the
chosen output directory; rerunning produces byte-identical artifacts.
"""

import argparse
import json
import os
import sys

from ace import agent as agent_mod
from ace import catalog as catalog_mod
from ace import enrichment, evalharness, oas, shortlist as shortlist_mod, toolgen

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURE = os.path.join(HERE, "..", "tests", "fixtures", "kubernetes_core_v1.json")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--spec", default=FIXTURE, help="OpenAPI document (default: bundled fixture)")
    parser.add_argument("--level", default="e3", choices=enrichment.LEVELS)
    parser.add_argument("--outdir", default="pipeline_out")
    parser.add_argument("--query", default="delete limitrange")
    args = parser.parse_args()

    os.makedirs(args.outdir, exist_ok=True)

    with open(args.spec, "rb") as f:
        doc = oas.resolve_refs(oas.parse_document(f.read()))
    endpoints = oas.extract_endpoints(doc).endpoints
    print(f"parsed {len(endpoints)} endpoints")

    enriched = enrichment.enrich_catalog(endpoints, args.level, enrichment.HeuristicEnricher())
    enrichment.save_enriched(enriched, os.path.join(args.outdir, "enriched.json"))

    plans = [toolgen.plan_tool(e) for e in enriched]
    tools_dir = os.path.join(args.outdir, "tools")
    toolgen.write_tools(plans, tools_dir, "langchain-react-py")
    print(f"generated {len(plans)} tools -> {tools_dir}")

    entries = catalog_mod.build_entries(plans, enriched)
    catalog_path = os.path.join(args.outdir, "catalog.jsonl")
    catalog_mod.save_catalog(entries, catalog_path)

    index = shortlist_mod.build_index(entries, args.level)
    index.save(os.path.join(args.outdir, "index.json"))

    print(f"\ntop 5 for query {args.query!r}:")
    for tool_id, score in shortlist_mod.shortlist(index, args.query, 5).ranked:
        print(f"  {score:.4f}  {tool_id}")

    gold = [
        agent_mod.GoldCall("u1", "Delete the limit range lr-1 in namespace dev-1.",
                           "deleteCoreV1NamespacedLimitRange",
                           {"namespace": "dev-1", "name": "lr-1"}),
        agent_mod.GoldCall("u2", "List every pod in namespace prod.",
                           "listCoreV1NamespacedPod", {"namespace": "prod"}),
    ]
    transcripts = [agent_mod.oracle_agent(g) for g in gold]
    report = evalharness.score_inputs(transcripts, gold, entries)
    sl_report = evalharness.shortlist_accuracy(gold, index, [3, 5, 10, 15, 20])
    rendered = evalharness.render_report([("oracle", report), ("oracle", sl_report)])
    print("\n" + rendered.decode("utf-8"))
    with open(os.path.join(args.outdir, "report.json"), "wb") as f:
        f.write(evalharness.render_report([("oracle", report), ("oracle", sl_report)], format="json"))
    print(f"artifacts in {args.outdir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
