import pathlib

import pytest

from ace import catalog as catalog_mod
from ace import enrichment, oas, toolgen

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
GOLDENS = pathlib.Path(__file__).parent / "goldens"
K8S_SPEC = FIXTURES / "kubernetes_core_v1.json"


@pytest.fixture(scope="session")
def k8s_doc():
    doc = oas.parse_document(K8S_SPEC.read_bytes())
    return oas.resolve_refs(doc)


@pytest.fixture(scope="session")
def k8s_endpoints(k8s_doc):
    return oas.extract_endpoints(k8s_doc).endpoints


@pytest.fixture(scope="session")
def limitrange_delete(k8s_endpoints):
    return next(e for e in k8s_endpoints if e.operation_id == "deleteCoreV1NamespacedLimitRange")


def build_catalog(endpoints, level, backend=None):
    backend = backend or enrichment.HeuristicEnricher()
    enriched = [enrichment.enrich_endpoint(e, level, backend) for e in endpoints]
    plans = [toolgen.plan_tool(e) for e in enriched]
    return catalog_mod.build_entries(plans, enriched)


@pytest.fixture(scope="session")
def k8s_catalog_e3(k8s_endpoints):
    return build_catalog(k8s_endpoints, "e3")
