"""Command-line entry point: replay a case file against a tool directory."""

from __future__ import annotations

import argparse
import json
import sys

from .harness import ConformanceCase, run_conformance


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ace-conformance",
        description="Replay generated tool modules against a recording stub server.",
    )
    parser.add_argument("tool_dir", help="Directory holding <tool>.py files and catalog.json")
    parser.add_argument("cases", help="JSON file: a list of conformance case objects")
    parser.add_argument("--junit", help="Write a JUnit XML report here")
    parser.add_argument("--summary", help="Write the text summary here (default: stdout)")
    args = parser.parse_args(argv)

    with open(args.cases, encoding="utf-8") as f:
        cases = [ConformanceCase.from_dict(d) for d in json.load(f)]
    report = run_conformance(args.tool_dir, cases, junit_path=args.junit, summary_path=args.summary)
    if not args.summary:
        sys.stdout.write(report.summary_text())
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
