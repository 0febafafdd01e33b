import json
import math
import threading
from collections import Counter
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from methodmover.embeddings import (
    EmbeddingCache,
    EmbeddingVector,
    LocalEmbedder,
    RemoteEmbedder,
    _bucket,
    content_tokens,
    cosine_similarity,
    embed,
    misplacement_scores,
    split_identifier,
)
from methodmover.errors import (
    DimensionMismatch,
    EmptyContent,
    ProviderUnavailable,
    ZeroVector,
)
from methodmover.filters import surviving_methods
from methodmover.model import build_index

from test_model import write_project


def oracle_token_cosine(a: str, b: str) -> float:
    # Independent reference: raw term-frequency cosine in token space,
    # no hashing and no damping. Exact for the overlap-free and
    # identical-text cases the hashed encoder must reproduce.
    ca, cb = Counter(content_tokens(a)), Counter(content_tokens(b))
    dot = sum(ca[t] * cb[t] for t in ca)
    na = math.sqrt(sum(v * v for v in ca.values()))
    nb = math.sqrt(sum(v * v for v in cb.values()))
    return dot / (na * nb)


def vec(*values: float) -> EmbeddingVector:
    return EmbeddingVector(values=list(values), model_id="test")


class TestCosine:
    def test_identical_axis(self):
        assert cosine_similarity(vec(1, 0), vec(1, 0)) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_axes(self):
        assert cosine_similarity(vec(1, 0), vec(0, 1)) == pytest.approx(0.0, abs=1e-9)

    def test_hand_computed_diagonal(self):
        # (1,1) vs (1,0): 1 / sqrt(2)
        assert cosine_similarity(vec(1, 1), vec(1, 0)) == pytest.approx(
            0.7071067811865475, abs=1e-9
        )

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            cosine_similarity(vec(1, 0), vec(1, 0, 0))

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            cosine_similarity(vec(0, 0), vec(1, 0))
        with pytest.raises(ZeroVector):
            cosine_similarity(vec(1, 0), vec(0, 0))

    @given(
        st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=2, max_size=16),
        st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=2, max_size=16),
    )
    @settings(max_examples=200)
    def test_symmetry(self, xs, ys):
        n = min(len(xs), len(ys))
        a, b = vec(*xs[:n]), vec(*ys[:n])
        try:
            left = cosine_similarity(a, b)
        except ZeroVector:
            return
        assert left == pytest.approx(cosine_similarity(b, a), abs=1e-9)

    @given(
        st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=2, max_size=16),
        st.floats(min_value=1e-3, max_value=1e3),
    )
    @settings(max_examples=200)
    def test_scale_invariance(self, xs, scale):
        a = vec(*xs)
        scaled = vec(*(x * scale for x in xs))
        # scaling a subnormal can underflow the whole vector to zero, where
        # cosine is legitimately undefined
        assume(any(x != 0.0 for x in scaled.values))
        try:
            base = cosine_similarity(a, a)
        except ZeroVector:
            return
        assert base == pytest.approx(1.0, abs=1e-9)
        assert cosine_similarity(a, scaled) == pytest.approx(base, abs=1e-9)


class TestIdentifierSplitting:
    def test_camel_case(self):
        assert split_identifier("computeInterest") == ["compute", "interest"]

    def test_acronym_boundary(self):
        assert split_identifier("HTTPServer") == ["http", "server"]

    def test_snake_case(self):
        assert split_identifier("effective_rate_basis") == ["effective", "rate", "basis"]

    def test_screaming_case(self):
        assert split_identifier("MAX_VALUE") == ["max", "value"]

    def test_digits_stick_to_word(self):
        assert split_identifier("md5Hash") == ["md5", "hash"]

    def test_content_tokens_cross_word(self):
        assert content_tokens("plan.effectiveRate(12)") == ["plan", "effective", "rate"]


class TestLocalEmbedder:
    def test_deterministic(self):
        e = LocalEmbedder()
        a = e.embed("int computeInterest(RatePlan plan)")
        b = LocalEmbedder().embed("int computeInterest(RatePlan plan)")
        assert a.values == b.values
        assert a.model_id == b.model_id

    def test_unit_norm(self):
        v = LocalEmbedder().embed("return plan.effectiveRate(12) * getBalance();")
        assert math.sqrt(sum(x * x for x in v.values)) == pytest.approx(1.0, abs=1e-9)

    def test_identical_text_full_similarity(self):
        e = LocalEmbedder()
        text = "void deposit(double amount) { balance += amount; }"
        assert oracle_token_cosine(text, text) == pytest.approx(1.0)
        sim = cosine_similarity(e.embed(text), e.embed(text))
        assert sim == pytest.approx(1.0, abs=1e-9)

    def test_disjoint_vocabulary_zero_similarity(self):
        a = "orbital flux density quasar"
        b = "ledger balance deposit withdraw"
        assert oracle_token_cosine(a, b) == 0.0
        # hash buckets must not collide for the oracle value to carry over
        buckets_a = {_bucket(t) for t in content_tokens(a)}
        buckets_b = {_bucket(t) for t in content_tokens(b)}
        assert not (buckets_a & buckets_b)
        e = LocalEmbedder()
        assert cosine_similarity(e.embed(a), e.embed(b)) == pytest.approx(0.0, abs=1e-12)

    def test_shared_vocabulary_beats_disjoint(self):
        e = LocalEmbedder()
        body = "return balance * rate;"
        near = "double balance; double rate; void deposit(double amount) {}"
        far = "String quasar; int orbital; void flux() {}"
        sim_near = cosine_similarity(e.embed(body), e.embed(near))
        sim_far = cosine_similarity(e.embed(body), e.embed(far))
        assert sim_near > sim_far

    def test_empty_content_rejected(self):
        e = LocalEmbedder()
        with pytest.raises(EmptyContent):
            e.embed("")
        with pytest.raises(EmptyContent):
            e.embed("   \n\t")
        with pytest.raises(EmptyContent):
            embed(e, " ")

    def test_symbol_only_content_still_nonzero(self):
        v = LocalEmbedder().embed("{...}")
        assert any(x != 0.0 for x in v.values)

    def test_dimension_is_fixed(self):
        e = LocalEmbedder()
        assert e.embed("a").dimension == 512
        assert e.embed("a b c d e f g").dimension == 512


class TestMisplacement:
    def test_alien_method_ranks_first(self, tmp_path):
        root = write_project(
            tmp_path,
            {
                "greet/Greeter.java": """package greet;

public class Greeter {
    private String greetingPrefix;

    public String greetPolitely() {
        return greetingPrefix + " hello there";
    }

    public String greetBriefly() {
        return greetingPrefix;
    }

    public int orbitalFluxDensity() {
        long quasar = 9;
        return (int) quasar * 7;
    }
}
""",
            },
        )
        index = build_index(root)
        cls = index.lookup("greet.Greeter")
        ranked = misplacement_scores(
            index, cls, surviving_methods(cls), LocalEmbedder()
        )
        assert ranked[0].method.name == "orbitalFluxDensity"
        sims = [c.similarity for c in ranked]
        assert sims == sorted(sims)
        # oracle agrees on the ordering decision, not just the winner
        body_far = index.method_source(cls, cls.method("orbitalFluxDensity()"))
        shell_far = index.class_text_without_method(cls, cls.method("orbitalFluxDensity()"))
        body_near = index.method_source(cls, cls.method("greetPolitely()"))
        shell_near = index.class_text_without_method(cls, cls.method("greetPolitely()"))
        assert oracle_token_cosine(body_far, shell_far) < oracle_token_cosine(
            body_near, shell_near
        )

    def test_tie_breaks_on_qualified_name(self, bank_index):
        class ConstantEmbedder:
            model_id = "const"

            def embed(self, content):
                return EmbeddingVector(values=[1.0, 0.0], model_id="const")

        cls = bank_index.lookup("bank.Account")
        ranked = misplacement_scores(
            bank_index, cls, surviving_methods(cls), ConstantEmbedder()
        )
        names = [c.qualified_method for c in ranked]
        assert names == sorted(names)

    def test_bank_interest_scored(self, bank_index):
        cls = bank_index.lookup("bank.Account")
        ranked = misplacement_scores(
            bank_index, cls, surviving_methods(cls), LocalEmbedder()
        )
        by_name = {c.method.name: c for c in ranked}
        assert "computeInterest" in by_name
        assert all(-1.0 <= c.similarity <= 1.0 for c in ranked)


class _StubHandler(BaseHTTPRequestHandler):
    requests_seen: list[dict] = []
    status = 200
    payload: dict = {}

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        type(self).requests_seen.append(
            {"path": self.path, "body": body, "auth": self.headers.get("Authorization")}
        )
        data = json.dumps(type(self).payload).encode()
        self.send_response(type(self).status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    _StubHandler.requests_seen = []
    _StubHandler.status = 200
    _StubHandler.payload = {"data": [{"embedding": [0.6, 0.8]}]}
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/v1/embeddings", _StubHandler
    server.shutdown()


class TestRemoteEmbedder:
    def test_wire_shape_and_parse(self, stub_server):
        url, handler = stub_server
        e = RemoteEmbedder(url=url, api_key="sk-test", model="code-embed-1")
        v = e.embed("double balance;")
        assert v.values == [0.6, 0.8]
        assert v.model_id == "code-embed-1"
        sent = handler.requests_seen[0]
        assert sent["body"] == {"model": "code-embed-1", "input": ["double balance;"]}
        assert sent["auth"] == "Bearer sk-test"

    def test_cache_prevents_second_call(self, stub_server, tmp_path):
        url, handler = stub_server
        cache = EmbeddingCache(tmp_path / "emb.jsonl")
        e = RemoteEmbedder(url=url, api_key="k", model="m1", cache=cache)
        first = e.embed("text under test")
        second = e.embed("text under test")
        assert first.values == second.values
        assert len(handler.requests_seen) == 1

    def test_cache_survives_restart(self, stub_server, tmp_path):
        url, handler = stub_server
        path = tmp_path / "emb.jsonl"
        RemoteEmbedder(url=url, api_key="k", model="m1", cache=EmbeddingCache(path)).embed("abc")
        reloaded = EmbeddingCache(path)
        e2 = RemoteEmbedder(url=url, api_key="k", model="m1", cache=reloaded)
        v = e2.embed("abc")
        assert v.values == [0.6, 0.8]
        assert len(handler.requests_seen) == 1

    def test_unreachable_endpoint(self):
        e = RemoteEmbedder(url="http://127.0.0.1:9", api_key="k", model="m1", timeout=0.5)
        with pytest.raises(ProviderUnavailable):
            e.embed("text")

    def test_http_error_status(self, stub_server):
        url, handler = stub_server
        handler.status = 500
        handler.payload = {"error": "overloaded"}
        e = RemoteEmbedder(url=url, api_key="k", model="m1")
        with pytest.raises(ProviderUnavailable):
            e.embed("text")

    def test_malformed_body(self, stub_server):
        url, handler = stub_server
        handler.payload = {"data": []}
        e = RemoteEmbedder(url=url, api_key="k", model="m1")
        with pytest.raises(ProviderUnavailable):
            e.embed("text")

    def test_missing_url_configuration(self, monkeypatch):
        monkeypatch.delenv("EMBEDDING_API_URL", raising=False)
        with pytest.raises(ProviderUnavailable):
            RemoteEmbedder()

    def test_empty_content_rejected_before_network(self):
        e = RemoteEmbedder(url="http://127.0.0.1:9", api_key="k", model="m1")
        with pytest.raises(EmptyContent):
            e.embed("  ")


class TestCache:
    def test_round_trip_equality(self, tmp_path):
        cache = EmbeddingCache(tmp_path / "c.jsonl")
        v = vec(0.1, 0.2, 0.3)
        cache.put("m1", "hash1", v)
        got = cache.get("m1", "hash1")
        assert got is not None
        assert got.values == v.values

    def test_miss_on_other_model(self, tmp_path):
        cache = EmbeddingCache(tmp_path / "c.jsonl")
        cache.put("m1", "hash1", vec(1.0))
        assert cache.get("m2", "hash1") is None
        assert cache.get("m1", "hash2") is None

    def test_duplicate_put_writes_once(self, tmp_path):
        path = tmp_path / "c.jsonl"
        cache = EmbeddingCache(path)
        cache.put("m1", "h", vec(1.0))
        cache.put("m1", "h", vec(1.0))
        assert len(path.read_text().splitlines()) == 1
