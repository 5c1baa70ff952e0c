import json

import httpx
import pytest

from surveyloop.llm import ChatCompletionClient, ChatMessage, LlmError

MESSAGES = [
    ChatMessage(role="system", content="You run a survey."),
    ChatMessage(role="user", content="Ask a follow-up."),
]


def _client(handler, **kwargs):
    return ChatCompletionClient(
        base_url=kwargs.pop("base_url", "https://llm.test/v1"),
        model=kwargs.pop("model", "test-model"),
        transport=httpx.MockTransport(handler),
        **kwargs,
    )


def _ok(content="Sure, how was your week?"):
    return httpx.Response(200, json={"choices": [{"message": {"content": content}}]})


def test_request_shape_and_content(monkeypatch):
    monkeypatch.delenv("SURVEYLOOP_API_KEY", raising=False)
    seen = {}

    def handler(request):
        seen["url"] = str(request.url)
        seen["payload"] = json.loads(request.content)
        seen["auth"] = request.headers.get("authorization")
        return _ok("  padded reply  ")

    result = _client(handler).complete(MESSAGES, temperature=0.25)
    assert result == "padded reply"
    assert seen["url"] == "https://llm.test/v1/chat/completions"
    assert seen["payload"]["model"] == "test-model"
    assert seen["payload"]["temperature"] == 0.25
    assert seen["payload"]["messages"] == [
        {"role": "system", "content": "You run a survey."},
        {"role": "user", "content": "Ask a follow-up."},
    ]
    assert seen["auth"] is None


def test_bearer_header_only_when_env_key_present(monkeypatch):
    seen = {}

    def handler(request):
        seen["auth"] = request.headers.get("authorization")
        return _ok()

    monkeypatch.setenv("SURVEYLOOP_API_KEY", "sk-test-123")
    _client(handler).complete(MESSAGES)
    assert seen["auth"] == "Bearer sk-test-123"

    monkeypatch.setenv("CUSTOM_KEY", "other")
    _client(handler, api_key_env="CUSTOM_KEY").complete(MESSAGES)
    assert seen["auth"] == "Bearer other"


def test_base_url_trailing_slash_and_env_defaults(monkeypatch):
    seen = {}

    def handler(request):
        seen["url"] = str(request.url)
        return _ok()

    client = ChatCompletionClient(
        base_url="https://llm.test/v1/", model="m", transport=httpx.MockTransport(handler)
    )
    client.complete(MESSAGES)
    assert seen["url"] == "https://llm.test/v1/chat/completions"

    monkeypatch.setenv("SURVEYLOOP_LLM_BASE_URL", "https://env.test/api")
    monkeypatch.setenv("SURVEYLOOP_LLM_MODEL", "env-model")
    from_env = ChatCompletionClient(transport=httpx.MockTransport(handler))
    assert from_env.base_url == "https://env.test/api"
    assert from_env.model == "env-model"


def test_http_error_status_raises_llm_error():
    client = _client(lambda request: httpx.Response(500, text="boom"))
    with pytest.raises(LlmError, match="request failed"):
        client.complete(MESSAGES)


def test_network_failure_raises_llm_error():
    def handler(request):
        raise httpx.ConnectError("refused")

    with pytest.raises(LlmError, match="request failed"):
        _client(handler).complete(MESSAGES)


def test_invalid_json_raises_llm_error():
    client = _client(lambda request: httpx.Response(200, text="<html>not json</html>"))
    with pytest.raises(LlmError, match="invalid JSON"):
        client.complete(MESSAGES)


@pytest.mark.parametrize(
    "body",
    [
        {"choices": []},
        {"choices": [{"message": {}}]},
        {"choices": [{"no_message": True}]},
        {"unrelated": 1},
        {"choices": [{"message": {"content": 42}}]},
        {"choices": [{"message": {"content": "   "}}]},
        {"choices": [{"message": {"content": ""}}]},
    ],
)
def test_unusable_payload_shapes_raise_llm_error(body):
    client = _client(lambda request: httpx.Response(200, json=body))
    with pytest.raises(LlmError):
        client.complete(MESSAGES)
