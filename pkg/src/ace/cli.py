"""Command-line entry point wiring the pipeline end to end.

Exit codes: 0 success, 1 validation/usage failure (or a violated --gate),
2 runtime error.
"""

from __future__ import annotations

import json
import sys

import click

from . import agent as agent_mod
from . import catalog as catalog_mod
from . import enrichment, evalharness, llm, oas, shortlist as shortlist_mod
from . import toolgen

LEVEL_FLAGS = {"0": "none", "1": "e1", "2": "e2", "3": "e3"}


def _read_spec(path: str) -> oas.OasDocument:
    with open(path, "rb") as f:
        raw = f.read()
    fmt = "yaml" if path.endswith((".yaml", ".yml")) else "json" if path.endswith(".json") else "auto"
    return oas.parse_document(raw, format=fmt)


def _endpoints_from_spec(path: str):
    doc = oas.resolve_refs(_read_spec(path))
    result = oas.extract_endpoints(doc)
    return result.endpoints, doc.issues + result.issues


def _backend(name: str):
    if name == "heuristic":
        return enrichment.HeuristicEnricher()
    client = llm.HttpChatClient.from_env()
    return enrichment.LlmEnricher(client=client, model_id=client.model)


@click.group()
def cli():
    """Compile OpenAPI documents into enriched, agent-ready tools."""


@cli.command()
@click.argument("spec_path", type=click.Path(exists=True))
@click.option("-o", "--output", type=click.Path(), help="Write extracted endpoints as JSON.")
@click.option("--report", "report_format", type=click.Choice(["text", "json"]), default="text")
def parse(spec_path, output, report_format):
    """Parse and validate an OAS document; print a validation report."""
    doc = oas.resolve_refs(_read_spec(spec_path))
    issues = oas.validate_document(doc) + doc.issues
    result = oas.extract_endpoints(doc)
    issues += result.issues
    if report_format == "json":
        click.echo(json.dumps({"endpoints": len(result.endpoints), "issues": [i.to_dict() for i in issues]}, indent=2))
    else:
        click.echo(f"{len(result.endpoints)} endpoints, {len(issues)} issues")
        for issue in issues:
            click.echo(f"{issue.severity}: {issue.path_pointer}: {issue.message}")
    if output:
        from ._util import atomic_write_text

        atomic_write_text(output, json.dumps([e.to_dict() for e in result.endpoints], indent=2) + "\n")
    if any(i.severity == "error" for i in issues):
        raise SystemExit(1)


@cli.command()
@click.argument("spec_path", type=click.Path(exists=True))
@click.option("--level", type=click.Choice(list(LEVEL_FLAGS)), required=True)
@click.option("--backend", type=click.Choice(["heuristic", "llm"]), default="heuristic")
@click.option("--workers", type=int, default=4)
@click.option("-o", "--output", type=click.Path(), required=True)
def enrich(spec_path, level, backend, workers, output):
    """Enrich every endpoint of an OAS document at the given level."""
    endpoints, _ = _endpoints_from_spec(spec_path)
    enriched = enrichment.enrich_catalog(endpoints, LEVEL_FLAGS[level], _backend(backend), workers=workers)
    enrichment.save_enriched(enriched, output)
    click.echo(f"enriched {len(enriched)} endpoints at level {LEVEL_FLAGS[level]} -> {output}")


@cli.command()
@click.argument("enriched_path", type=click.Path(exists=True))
@click.option("--target", type=click.Choice(sorted(toolgen.TARGETS)), default="langchain-react-py")
@click.option("--outdir", type=click.Path(), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), help="Tool runtime config (base_url, auth).")
@click.option("--catalog", "catalog_path", type=click.Path(), help="Also write a catalog.jsonl here.")
def generate(enriched_path, target, outdir, config_path, catalog_path):
    """Compile enriched endpoints into tool source artifacts."""
    enriched = enrichment.load_enriched(enriched_path)
    plans = [toolgen.plan_tool(e) for e in enriched]
    config = None
    if config_path:
        with open(config_path, encoding="utf-8") as f:
            config = json.load(f)
    written = toolgen.write_tools(plans, outdir, target, config=config)
    if catalog_path:
        entries = catalog_mod.build_entries(plans, enriched)
        catalog_mod.save_catalog(entries, catalog_path)
        written.append(catalog_path)
    click.echo(f"wrote {len(written)} files to {outdir}")


@cli.command()
@click.argument("catalog_path", type=click.Path(exists=True))
@click.option("--level", type=click.Choice(list(LEVEL_FLAGS)), required=True)
@click.option("-o", "--output", type=click.Path(), required=True)
@click.option("--lenient", is_flag=True, default=False)
def index(catalog_path, level, output, lenient):
    """Build an embedding index over a tool catalog."""
    entries = catalog_mod.load_catalog(catalog_path, lenient=lenient, warn=lambda m: click.echo(m, err=True))
    idx = shortlist_mod.build_index(entries, LEVEL_FLAGS[level])
    idx.save(output)
    click.echo(f"indexed {len(idx.entries)} tools at level {LEVEL_FLAGS[level]} -> {output}")


@cli.command("shortlist")
@click.argument("index_path", type=click.Path(exists=True))
@click.option("--query", required=True)
@click.option("-k", type=int, default=5)
def shortlist_cmd(index_path, query, k):
    """Print the top-k tools for a query."""
    idx = shortlist_mod.ToolIndex.load(index_path)
    result = shortlist_mod.shortlist(idx, query, k)
    for tool_id, score in result.ranked:
        click.echo(f"{score:.4f}\t{tool_id}")


@cli.group()
def agent():
    """Transcript production."""


@agent.command("run")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), required=True)
@click.option("--gold", "gold_path", type=click.Path(exists=True), required=True)
@click.option("--agent", "agent_kind", type=click.Choice(["oracle", "llm"]), default="oracle")
@click.option("--max-steps", type=int, default=6)
@click.option("-o", "--output", type=click.Path(), required=True)
def agent_run(catalog_path, gold_path, agent_kind, max_steps, output):
    """Run episodes over a gold set and write transcripts."""
    entries = catalog_mod.load_catalog(catalog_path)
    gold = agent_mod.load_gold(gold_path)
    transcripts = []
    if agent_kind == "oracle":
        transcripts = [agent_mod.oracle_agent(g) for g in gold]
    else:
        client = llm.HttpChatClient.from_env()
        limits = agent_mod.EpisodeLimits(max_steps=max_steps)
        for g in gold:
            transcripts.append(agent_mod.run_episode(g.utterance_id, g.utterance, entries, client, limits))
    agent_mod.save_transcripts(transcripts, output)
    click.echo(f"wrote {len(transcripts)} transcripts -> {output}")


@cli.group("eval")
def eval_group():
    """Metric computation."""


def _parse_gates(gate_specs):
    gates = {}
    for spec in gate_specs:
        for op in (">=", "<="):
            if op in spec:
                metric, threshold = spec.split(op)
                gates[metric.strip()] = (op, float(threshold))
                break
        else:
            raise click.BadParameter(f"gate must look like S>=0.9 or T<=0.1, got {spec!r}")
    return gates


@eval_group.command("selection")
@click.option("--transcripts", "transcripts_path", type=click.Path(exists=True), required=True)
@click.option("--gold", "gold_path", type=click.Path(exists=True), required=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), required=True)
@click.option("--label", default="run")
@click.option("-o", "--output", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["text-table", "json", "csv"]), default="text-table")
@click.option("--gate", "gates", multiple=True, help="e.g. --gate 'S>=0.9' --gate 'T<=0.1'")
def eval_selection(transcripts_path, gold_path, catalog_path, label, output, fmt, gates):
    """Score transcripts against gold: S plus T/M/I input errors."""
    transcripts = agent_mod.load_transcripts(transcripts_path)
    gold = agent_mod.load_gold(gold_path)
    entries = catalog_mod.load_catalog(catalog_path)
    report = evalharness.score_inputs(transcripts, gold, entries)
    rendered = evalharness.render_report([(label, report)], format=fmt)
    if output:
        with open(output, "wb") as f:
            f.write(rendered)
    else:
        click.echo(rendered.decode("utf-8"), nl=False)
    violations = evalharness.check_gates(report, _parse_gates(gates)) if gates else []
    for violation in violations:
        click.echo(violation, err=True)
    if violations:
        raise SystemExit(1)


@eval_group.command("shortlist")
@click.option("--index", "index_path", type=click.Path(exists=True), required=True)
@click.option("--gold", "gold_path", type=click.Path(exists=True), required=True)
@click.option("-k", "ks", default="3,5,10,15,20", help="Comma-separated k grid.")
@click.option("--label", default="run")
@click.option("-o", "--output", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["text-table", "json", "csv"]), default="text-table")
def eval_shortlist(index_path, gold_path, ks, label, output, fmt):
    """Shortlist accuracy@k over a gold set."""
    idx = shortlist_mod.ToolIndex.load(index_path)
    gold = agent_mod.load_gold(gold_path)
    k_list = [int(k) for k in ks.split(",") if k.strip()]
    report = evalharness.shortlist_accuracy(gold, idx, k_list)
    rendered = evalharness.render_report([(label, report)], format=fmt)
    if output:
        with open(output, "wb") as f:
            f.write(rendered)
    else:
        click.echo(rendered.decode("utf-8"), nl=False)


@cli.command()
@click.argument("report_paths", nargs=-1, type=click.Path(exists=True))
@click.option("--format", "fmt", type=click.Choice(["text-table", "json", "csv"]), default="text-table")
def report(report_paths, fmt):
    """Merge JSON reports (from eval commands) into one rendered table."""
    pairs = []
    for path in report_paths:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
        for label, d in doc.get("metrics", {}).items():
            pairs.append((label, evalharness.MetricsReport.from_dict(d)))
        for label, d in doc.get("shortlist", {}).items():
            pairs.append((label, evalharness.ShortlistReport.from_dict(d)))
    click.echo(evalharness.render_report(pairs, format=fmt).decode("utf-8"), nl=False)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except SystemExit as e:
        return int(e.code or 0)
    except (click.UsageError, click.BadParameter) as e:
        click.echo(e.format_message(), err=True)
        click.echo(e.ctx.get_help() if e.ctx else "", err=True)
        return 1
    except (oas.OasError, catalog_mod.CorruptEntry, toolgen.UnknownTarget,
            enrichment.BackendFailure, llm.TransportError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
