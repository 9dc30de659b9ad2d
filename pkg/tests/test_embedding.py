import json
import math
import random
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from pivotrec import (
    BaselineEmbeddingProvider,
    EmbeddingVector,
    RemoteEmbeddingProvider,
    canonicalize,
    concat_embedding,
    load_table,
    materialize,
    pairwise_distance,
    set_diversity,
    transpose,
)
from pivotrec.embedding import EmbeddingConfigError
from pivotrec._util import fnv1a64

from gen import grid_from_cells, random_dataset, random_grid

PROVIDER = BaselineEmbeddingProvider()


def test_fnv_constants_frozen():
    # Reference values of 64-bit FNV-1a; pins cross-run reproducibility.
    assert fnv1a64("") == 0xCBF29CE484222325
    assert fnv1a64("a") == 0xAF63DC4C8601EC8C


class TestQueryEmbedding:
    def test_content_independent_across_datasets(self):
        spec = canonicalize("AVG", "Salary", ["Degree", "Department"])
        rng = random.Random(3)
        vecs = set()
        for _ in range(5):
            d = random_dataset(rng)  # embed_query never touches the data
            vec = PROVIDER.embed_query(spec)
            vecs.add(vec.values.tobytes())
        assert len(vecs) == 1

    def test_group_order_irrelevant(self):
        a = PROVIDER.embed_query(canonicalize("AVG", "Salary", ["Degree", "Department"]))
        b = PROVIDER.embed_query(canonicalize("AVG", "Salary", ["Department", "Degree"]))
        assert np.array_equal(a.values, b.values)

    def test_different_attributes_differ(self):
        a = PROVIDER.embed_query(canonicalize("AVG", "Salary", ["A", "B"]))
        b = PROVIDER.embed_query(canonicalize("AVG", "Income", ["A", "B"]))
        assert not np.array_equal(a.values, b.values)

    def test_unit_norm_and_dim(self):
        vec = PROVIDER.embed_query(canonicalize("AVG", "Salary", ["A", "B"]))
        assert vec.dim == 64
        assert float(np.linalg.norm(vec.values)) == pytest.approx(1.0)


class TestContentEmbedding:
    def test_all_null_grid_keeps_header_features_only(self):
        g = grid_from_cells([[math.nan, math.nan]])
        vec = PROVIDER.embed_content(g)
        assert float(np.linalg.norm(vec.values)) == pytest.approx(1.0)
        # statistics slots (indexes 2..7) are zero: no cells, zero density
        assert vec.values[2] == 0.0
        assert np.all(vec.values[3:8] * np.linalg.norm(vec.values) >= 0)

    def test_transpose_invariant_on_random_grids(self):
        rng = random.Random(11)
        for _ in range(200):
            g = random_grid(rng)
            a = PROVIDER.embed_content(g)
            b = PROVIDER.embed_content(transpose(g))
            assert np.array_equal(a.values, b.values)

    def test_different_grids_differ(self, employees_dataset):
        avg_by_gender_degree = materialize(
            employees_dataset, canonicalize("AVG", "Salary", ["Degree", "Gender"])
        )
        count_by_all = materialize(
            employees_dataset, canonicalize("COUNT", "ID", ["Degree", "Department", "Gender"])
        )
        a = PROVIDER.embed_content(avg_by_gender_degree)
        b = PROVIDER.embed_content(count_by_all)
        assert not np.array_equal(a.values, b.values)

    def test_deterministic_across_calls(self):
        g = grid_from_cells([[1.0, 2.0], [3.0, 4.0]])
        assert np.array_equal(PROVIDER.embed_content(g).values,
                              PROVIDER.embed_content(g).values)


class TestConcatenation:
    def test_dimension_additivity(self, employees_dataset):
        spec = canonicalize("AVG", "Salary", ["Degree", "Department"])
        g = materialize(employees_dataset, spec)
        vec = PROVIDER.embed_pivot(spec, g)
        assert vec.dim == 128

    def test_identical_inputs_identical_concat(self, employees_dataset):
        spec = canonicalize("AVG", "Salary", ["Degree", "Department"])
        g = materialize(employees_dataset, spec)
        a = PROVIDER.embed_pivot(spec, g)
        b = PROVIDER.embed_pivot(spec, g)
        assert np.array_equal(a.values, b.values)

    def test_provider_mismatch_rejected(self):
        other = BaselineEmbeddingProvider(half_dim=32)
        spec = canonicalize("AVG", "Salary", ["A", "B"])
        with pytest.raises(EmbeddingConfigError):
            concat_embedding(PROVIDER.embed_query(spec), other.embed_query(spec))

    def test_zero_content_half_distance_driven_by_query(self):
        q1 = EmbeddingVector(np.array([1.0, 0.0]), "p")
        q2 = EmbeddingVector(np.array([0.0, 1.0]), "p")
        zero = EmbeddingVector(np.array([0.0, 0.0]), "p")
        c1 = concat_embedding(q1, zero)
        c2 = concat_embedding(q2, zero)
        assert pairwise_distance(c1, c2) == pairwise_distance(q1, q2)


class TestDistance:
    def test_self_distance_zero(self):
        e = EmbeddingVector(np.array([0.3, 0.4]), "p")
        assert pairwise_distance(e, e) == 0.0

    def test_orthogonal_half(self):
        a = EmbeddingVector(np.array([1.0, 0.0]), "p")
        b = EmbeddingVector(np.array([0.0, 2.0]), "p")
        assert pairwise_distance(a, b) == 0.5

    def test_opposite_one(self):
        a = EmbeddingVector(np.array([1.0, 1.0]), "p")
        b = EmbeddingVector(np.array([-1.0, -1.0]), "p")
        assert pairwise_distance(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_zero_vector_half(self):
        a = EmbeddingVector(np.array([0.0, 0.0]), "p")
        b = EmbeddingVector(np.array([1.0, 0.0]), "p")
        assert pairwise_distance(a, b) == 0.5

    def test_dim_mismatch(self):
        a = EmbeddingVector(np.array([1.0]), "p")
        b = EmbeddingVector(np.array([1.0, 0.0]), "p")
        with pytest.raises(EmbeddingConfigError):
            pairwise_distance(a, b)

    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a = EmbeddingVector(rng.normal(size=8), "p")
            b = EmbeddingVector(rng.normal(size=8), "p")
            d1 = pairwise_distance(a, b)
            d2 = pairwise_distance(b, a)
            assert d1 == d2
            assert 0.0 <= d1 <= 1.0


class TestSetDiversity:
    def test_duplicate_dominates(self):
        e = EmbeddingVector(np.array([1.0, 0.0]), "p")
        e2 = EmbeddingVector(np.array([0.0, 1.0]), "p")
        assert set_diversity([e, e, e2]) == 0.0

    def test_singleton_and_empty_vacuous(self):
        e = EmbeddingVector(np.array([1.0, 0.0]), "p")
        assert set_diversity([e]) == 1.0
        assert set_diversity([]) == 1.0

    def test_mutually_orthogonal(self):
        vecs = [
            EmbeddingVector(np.array([1.0, 0.0, 0.0]), "p"),
            EmbeddingVector(np.array([0.0, 1.0, 0.0]), "p"),
            EmbeddingVector(np.array([0.0, 0.0, 1.0]), "p"),
        ]
        assert set_diversity(vecs) == 0.5

    def test_monotone_under_extension(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            pool = [EmbeddingVector(rng.normal(size=6), "p") for _ in range(4)]
            base = pool[:3]
            assert set_diversity(pool) <= set_diversity(base) + 1e-15


class _StubEncoderServer:
    def __init__(self, vector=None, fail=False):
        outer_vector = vector
        self.requests = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers["Content-Length"])
                outer.requests.append(json.loads(self.rfile.read(length)))
                if fail:
                    self.send_error(500)
                    return
                body = json.dumps({"vector": outer_vector}).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self.server = HTTPServer(("127.0.0.1", 0), Handler)
        threading.Thread(target=self.server.serve_forever, daemon=True).start()

    @property
    def url(self):
        return f"http://127.0.0.1:{self.server.server_port}/embed"

    def close(self):
        self.server.shutdown()
        self.server.server_close()


class TestRemoteProvider:
    def test_vector_round_trip_normalized(self):
        stub = _StubEncoderServer(vector=[3.0, 4.0])
        try:
            provider = RemoteEmbeddingProvider(stub.url, timeout=3.0)
            spec = canonicalize("AVG", "Salary", ["A", "B"])
            vec = provider.embed_query(spec)
            assert vec.values == pytest.approx([0.6, 0.8])
            assert not vec.fallback
            assert stub.requests[0]["kind"] == "query"
        finally:
            stub.close()

    def test_failure_falls_back_flagged(self):
        stub = _StubEncoderServer(fail=True)
        try:
            provider = RemoteEmbeddingProvider(stub.url, timeout=3.0)
            spec = canonicalize("AVG", "Salary", ["A", "B"])
            g = grid_from_cells([[1.0, 2.0], [3.0, 4.0]])
            vec = provider.embed_pivot(spec, g)
            assert vec.fallback
            baseline = BaselineEmbeddingProvider().embed_pivot(spec, g)
            assert np.array_equal(vec.values, baseline.values)
        finally:
            stub.close()
