import json
import subprocess
import sys

import pytest


@pytest.fixture(scope="session")
def tool_dir(tmp_path_factory):
    """Generate a full tool directory once per session using the public CLI of
    the generator package; the harness itself never imports that package."""
    from pathlib import Path

    root = tmp_path_factory.mktemp("generated")
    fixture = Path(__file__).resolve().parents[2] / "tests" / "fixtures" / "kubernetes_core_v1.json"
    enriched = root / "enriched.json"
    tools = root / "tools"
    for args in (
        ["enrich", str(fixture), "--level", "3", "-o", str(enriched)],
        ["generate", str(enriched), "--target", "langchain-react-py", "--outdir", str(tools)],
    ):
        subprocess.run([sys.executable, "-m", "ace.cli", *args], check=True, capture_output=True)
    return tools


@pytest.fixture(scope="session")
def manifest(tool_dir):
    with open(tool_dir / "catalog.json", encoding="utf-8") as f:
        return {t["name"]: t for t in json.load(f)["tools"]}
