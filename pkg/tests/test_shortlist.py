import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ace.shortlist import (
    DIMS,
    EmbedderMismatch,
    HashingEmbedder,
    ToolIndex,
    brute_force_topk,
    build_index,
    embed_text,
    index_text_for,
    shortlist,
)

from .conftest import build_catalog
from .genutil import random_endpoint


def cosine(a, b):
    return float(np.dot(a.astype(np.float64), b.astype(np.float64)))


@pytest.fixture(scope="module")
def small_index(k8s_catalog_e3_module):
    return build_index(k8s_catalog_e3_module, "e3")


@pytest.fixture(scope="module")
def k8s_catalog_e3_module(request):
    from ace import oas

    from .conftest import K8S_SPEC

    doc = oas.resolve_refs(oas.parse_document(K8S_SPEC.read_bytes()))
    endpoints = oas.extract_endpoints(doc).endpoints
    return build_catalog(endpoints, "e3")


class TestEmbedText:
    def test_empty_is_zero_vector(self):
        vec = embed_text("")
        assert vec.shape == (DIMS,)
        assert not vec.any()

    def test_deterministic(self):
        a = embed_text("delete limit range")
        b = embed_text("delete limit range")
        assert (a == b).all()

    def test_self_similarity(self):
        vec = embed_text("delete limit range")
        assert math.isclose(cosine(vec, vec), 1.0, abs_tol=1e-6)

    def test_l2_normalized_or_zero(self):
        for text in ("", "one", "a b c d", "numbers 1 2 3"):
            norm = float(np.linalg.norm(embed_text(text).astype(np.float64)))
            assert norm == 0.0 or math.isclose(norm, 1.0, abs_tol=1e-6)


class TestIndexText:
    def test_level_none_contains_id_and_original(self, k8s_catalog_e3_module):
        entry = next(e for e in k8s_catalog_e3_module if e.tool_id == "deleteCoreV1NamespacedLimitRange")
        text = index_text_for(entry, "none")
        assert "deleteCoreV1NamespacedLimitRange" in text
        assert "delete a LimitRange" in text
        assert "propagationPolicy" not in text

    def test_levels_nest_as_substrings(self, k8s_catalog_e3_module):
        entry = k8s_catalog_e3_module[0]
        texts = [index_text_for(entry, level) for level in ("none", "e1", "e2", "e3")]
        for lower, higher in zip(texts, texts[1:]):
            assert lower in higher and lower != higher

    def test_e3_contains_enum_example(self, k8s_catalog_e3_module):
        entry = next(e for e in k8s_catalog_e3_module if e.tool_id == "deleteCoreV1NamespacedLimitRange")
        assert "Orphan" in index_text_for(entry, "e3")

    def test_below_entry_level_rejected(self, k8s_endpoints):
        entry = build_catalog(k8s_endpoints[:1], "e1")[0]
        with pytest.raises(ValueError):
            index_text_for(entry, "e3")


class TestBuildIndex:
    def test_empty_catalog(self):
        idx = build_index([], "none")
        assert idx.entries == []

    def test_kubernetes_catalog_size(self, small_index, k8s_catalog_e3_module):
        assert len(small_index.entries) == len(k8s_catalog_e3_module) >= 86

    def test_rebuild_identical_bytes(self, tmp_path, k8s_catalog_e3_module):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        build_index(k8s_catalog_e3_module, "e3").save(str(a))
        build_index(k8s_catalog_e3_module, "e3").save(str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_save_load_round_trip(self, tmp_path, small_index):
        path = tmp_path / "index.json"
        small_index.save(str(path))
        loaded = ToolIndex.load(str(path))
        assert loaded.embedder_id == small_index.embedder_id
        assert len(loaded.entries) == len(small_index.entries)
        for a, b in zip(loaded.entries, small_index.entries):
            assert a.tool_id == b.tool_id
            assert (a.vector == b.vector).all()

    def test_embedder_mismatch(self, small_index):
        class OtherEmbedder(HashingEmbedder):
            embedder_id = "other/v1"

        with pytest.raises(EmbedderMismatch):
            shortlist(small_index, "q", 3, embedder=OtherEmbedder())


class TestShortlist:
    def test_k_at_least_one(self, small_index):
        with pytest.raises(ValueError):
            shortlist(small_index, "q", 0)

    def test_k_exceeding_size_returns_all(self, small_index):
        result = shortlist(small_index, "delete a limit range", 10_000)
        assert len(result.ranked) == len(small_index.entries)

    def test_self_retrieval(self, small_index):
        for entry in small_index.entries[:10]:
            result = shortlist(small_index, entry.indexed_text, 1)
            assert result.ranked[0][0] == entry.tool_id
            assert math.isclose(result.ranked[0][1], 1.0, abs_tol=1e-6)

    def test_scores_non_increasing(self, small_index):
        result = shortlist(small_index, "create a pod in a namespace", 20)
        scores = [s for _, s in result.ranked]
        assert scores == sorted(scores, reverse=True)

    def test_empty_query_ties_broken_by_tool_id(self, small_index):
        result = shortlist(small_index, "", 3)
        assert [s for _, s in result.ranked] == [0.0, 0.0, 0.0]
        ids = [tool_id for tool_id, _ in result.ranked]
        assert ids == sorted(ids)

    def test_permutation_invariance(self, k8s_catalog_e3_module):
        shuffled = list(k8s_catalog_e3_module)
        random.Random(7).shuffle(shuffled)
        a = shortlist(build_index(k8s_catalog_e3_module, "e3"), "delete limitrange", 5)
        b = shortlist(build_index(shuffled, "e3"), "delete limitrange", 5)
        assert a == b

    def test_topk_prefix_property(self, small_index):
        query = "replace a config map"
        previous = []
        for k in (3, 5, 10, 15, 20):
            ranked = [tool_id for tool_id, _ in shortlist(small_index, query, k).ranked]
            assert ranked[: len(previous)] == previous
            previous = ranked


QUERY_WORDS = ["delete", "create", "list", "pod", "namespace", "config", "secret", "limit", "range", "watch"]


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    k=st.integers(min_value=1, max_value=30),
)
def test_shortlist_equals_brute_force(seed, k, shared_random_index):
    rng = random.Random(seed)
    query = " ".join(rng.choices(QUERY_WORDS, k=rng.randint(1, 6)))
    assert shortlist(shared_random_index, query, k) == brute_force_topk(shared_random_index, query, k)


@pytest.fixture(scope="module")
def shared_random_index():
    rng = random.Random(42)
    endpoints = [random_endpoint(rng, i) for i in range(40)]
    return build_index(build_catalog(endpoints, "e2"), "e2")
