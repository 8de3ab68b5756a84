"""Conformance harness for generated tool modules.

Loads emitted tool files, replays them against a recording stub HTTP server,
and verifies that each call places its arguments in the right part of the
request (method, path, query string, JSON body) and propagates the response
status code.
"""

from .stub import RecordedRequest, StubServer
from .harness import (
    CaseResult,
    ConformanceCase,
    ConformanceReport,
    load_tool_modules,
    run_conformance,
)

__all__ = [
    "RecordedRequest",
    "StubServer",
    "CaseResult",
    "ConformanceCase",
    "ConformanceReport",
    "load_tool_modules",
    "run_conformance",
]
