import json

import pytest

from assertify.llm import (
    ConfigurationError,
    InferenceResult,
    LiveBackend,
    LLMClient,
    MockBackend,
    ModelConfig,
    RateLimiter,
    RecordingBackend,
    ReplayBackend,
    ReplayMiss,
    TransportError,
    fallback_token_count,
    request_fingerprint,
)

MODEL = ModelConfig(name="m", context_limit=4096, price_in=0.03, price_out=0.06)


def client(backend, model=MODEL):
    return LLMClient(model=model, backend=backend, rate_limiter=RateLimiter(10_000))


# -- fingerprints ------------------------------------------------------------


def test_fingerprint_is_stable():
    msgs = [("user", "hello"), ("assistant", "hi"), ("user", "bye")]
    assert request_fingerprint("m", "sys", msgs) == request_fingerprint(
        "m", "sys", list(msgs)
    )


def test_fingerprint_sensitive_to_request_identity():
    base = request_fingerprint("m", "sys", [("user", "a"), ("user", "b")])
    assert base != request_fingerprint("m2", "sys", [("user", "a"), ("user", "b")])
    assert base != request_fingerprint("m", "sys2", [("user", "a"), ("user", "b")])
    assert base != request_fingerprint("m", "sys", [("user", "b"), ("user", "a")])


def test_fingerprint_ignores_sampling_params():
    # same request under models differing only in sampling settings
    hot = ModelConfig(name="m", context_limit=4096, price_in=0, price_out=0,
                      temperature=1.0)
    a = request_fingerprint(MODEL.name, "sys", [("user", "x")])
    b = request_fingerprint(hot.name, "sys", [("user", "x")])
    assert a == b


# -- mock and cost -----------------------------------------------------------


def test_mock_fixed_and_echo():
    c = client(MockBackend(fixed_text="pong"))
    assert c.infer("sys", [("user", "ping")]).raw_text == "pong"
    c = client(MockBackend(echo=True))
    assert c.infer("sys", [("user", "ping")]).raw_text == "ping"


def test_mock_rule_sees_messages():
    c = client(MockBackend(rule=lambda sys_text, msgs: msgs[-1][1].upper()))
    assert c.infer("sys", [("user", "ok")]).raw_text == "OK"


def test_cost_formula_and_accumulation():
    c = client(MockBackend(fixed_text="one two three"))
    r = c.infer("sys", [("user", "a b c d")])
    # mock reports no usage; the word-count fallback supplies token counts
    assert r.tokens_out == fallback_token_count("one two three")
    expected = r.tokens_in / 1000 * 0.03 + r.tokens_out / 1000 * 0.06
    assert r.cost == pytest.approx(expected)
    before = c.total_cost
    c.infer("sys", [("user", "a")])
    assert c.total_cost > before


def test_fallback_token_count():
    assert fallback_token_count("") == 0
    # words and individual punctuation marks each count once
    assert fallback_token_count("assert x != null ;") == 6


# -- record and replay -------------------------------------------------------


def test_record_then_replay_round_trip(tmp_path):
    cassette = tmp_path / "c.jsonl"
    rec = client(RecordingBackend(MockBackend(fixed_text="recorded"), cassette))
    rec.infer("sys", [("user", "q")])
    rep = client(ReplayBackend(cassette))
    assert rep.infer("sys", [("user", "q")]).raw_text == "recorded"
    with pytest.raises(ReplayMiss):
        rep.infer("sys", [("user", "different")])


def test_cassette_entries_are_self_describing(tmp_path):
    cassette = tmp_path / "c.jsonl"
    rec = client(RecordingBackend(MockBackend(fixed_text="r"), cassette))
    rec.infer("sys", [("user", "q")])
    entry = json.loads(cassette.read_text().splitlines()[0])
    assert entry["fingerprint"] == request_fingerprint("m", "sys", [("user", "q")])
    assert entry["messages"][0] == ["system", "sys"]
    assert entry["response"] == "r"


def test_replay_last_write_wins(tmp_path):
    cassette = tmp_path / "c.jsonl"
    fp = request_fingerprint("m", "sys", [("user", "q")])
    lines = [
        {"fingerprint": fp, "response": "old"},
        {"fingerprint": fp, "response": "new"},
    ]
    cassette.write_text("\n".join(json.dumps(e) for e in lines) + "\n")
    rep = client(ReplayBackend(cassette))
    assert rep.infer("sys", [("user", "q")]).raw_text == "new"


def test_missing_cassette_is_config_error(tmp_path):
    with pytest.raises(ConfigurationError):
        ReplayBackend(tmp_path / "absent.jsonl")


# -- rate limiting -----------------------------------------------------------


def test_rate_limiter_sleeps_when_window_full():
    now = [0.0]
    naps = []

    def clock():
        return now[0]

    def sleep(s):
        naps.append(s)
        now[0] += s

    rl = RateLimiter(2, clock=clock, sleep=sleep)
    rl.acquire()
    rl.acquire()
    assert naps == []
    rl.acquire()
    assert len(naps) == 1 and naps[0] >= 60.0


# -- live backend ------------------------------------------------------------


class _FakeResponse:
    def __init__(self, status_code, body=None):
        self.status_code = status_code
        self._body = body or {}
        self.text = json.dumps(self._body)

    def json(self):
        return self._body


class _FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = 0

    def post(self, url, json=None, timeout=None):
        self.calls += 1
        return self.responses.pop(0)


def _live_model():
    return ModelConfig(
        name="m", context_limit=4096, price_in=0, price_out=0,
        endpoint="https://example.invalid/v1/chat", backoff_seconds=0,
        max_attempts=3,
    )


def _ok_body(text):
    return {
        "choices": [{"message": {"content": text}}],
        "usage": {"prompt_tokens": 7, "completion_tokens": 3},
    }


def test_live_retries_on_429_then_succeeds():
    session = _FakeSession([
        _FakeResponse(429),
        _FakeResponse(200, _ok_body("done")),
    ])
    backend = LiveBackend(api_key="k", session=session)
    c = client(backend, model=_live_model())
    r = c.infer("sys", [("user", "q")])
    assert r.raw_text == "done"
    assert r.tokens_in == 7 and r.tokens_out == 3
    assert session.calls == 2


def test_live_gives_up_after_max_attempts():
    session = _FakeSession([_FakeResponse(503)] * 3)
    backend = LiveBackend(api_key="k", session=session)
    c = client(backend, model=_live_model())
    with pytest.raises(TransportError):
        c.infer("sys", [("user", "q")])
    assert session.calls == 3


def test_live_client_error_is_not_retried():
    session = _FakeSession([_FakeResponse(400, {"error": "bad"})])
    backend = LiveBackend(api_key="k", session=session)
    c = client(backend, model=_live_model())
    with pytest.raises(TransportError):
        c.infer("sys", [("user", "q")])
    assert session.calls == 1


def test_live_requires_api_key(monkeypatch):
    monkeypatch.delenv("ASSERTIFY_API_KEY", raising=False)
    backend = LiveBackend()
    c = client(backend, model=_live_model())
    with pytest.raises(ConfigurationError):
        c.infer("sys", [("user", "q")])
