"""Tooling for turning OpenAPI documents into enriched, agent-ready tools."""

__version__ = "0.1.0"
