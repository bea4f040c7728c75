"""Chat-completion providers: HTTP endpoints plus offline mock and replay."""

from __future__ import annotations

import logging
import os
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import httpx

from ..errors import MissingReplayResponse, ProviderError, Timeout
from ..prompts.template import InstantiatedPrompt

log = logging.getLogger(__name__)

TRANSIENT = {408, 409, 425, 429, 500, 502, 503, 504}


@dataclass(frozen=True)
class ProviderEndpoint:
    base_url: str
    api_key_ref: str | None
    model: str
    request_timeout: float = 120.0
    max_retries: int = 3

    def __repr__(self) -> str:  # the key itself is never held here
        return f"ProviderEndpoint({self.base_url!r}, key_env={self.api_key_ref!r}, model={self.model!r})"


class Provider(Protocol):
    name: str

    def complete(self, prompt: InstantiatedPrompt, cut_fqn: str) -> str: ...


def complete(
    endpoint: ProviderEndpoint,
    prompt: InstantiatedPrompt,
    *,
    client: httpx.Client | None = None,
    sleep: Callable[[float], None] = time.sleep,
    backoff: float = 1.0,
) -> str:
    """POST the prompt and return the assistant message content.

    Transient statuses and network failures are retried with exponential
    backoff up to ``endpoint.max_retries`` times.
    """
    headers = {"Content-Type": "application/json"}
    if endpoint.api_key_ref:
        key = os.environ.get(endpoint.api_key_ref)
        if key:
            headers["Authorization"] = f"Bearer {key}"
    body = {"model": endpoint.model, "temperature": prompt.temperature, "messages": prompt.as_messages()}
    url = endpoint.base_url.rstrip("/") + "/chat/completions"
    own = client is None
    client = client or httpx.Client(timeout=endpoint.request_timeout)
    try:
        for attempt in range(endpoint.max_retries + 1):
            last = attempt == endpoint.max_retries
            try:
                resp = client.post(url, json=body, headers=headers, timeout=endpoint.request_timeout)
            except httpx.TimeoutException as exc:
                if last:
                    raise Timeout(f"{endpoint.model}: no reply within {endpoint.request_timeout}s") from exc
            except httpx.TransportError as exc:
                if last:
                    raise ProviderError(0, f"transport failure: {exc}") from exc
            else:
                if resp.status_code == 200:
                    return _content(resp)
                if resp.status_code not in TRANSIENT or last:
                    raise ProviderError(resp.status_code, resp.text)
            delay = backoff * 2**attempt
            log.info("%s: transient failure, retry %d in %.1fs", endpoint.model, attempt + 1, delay)
            sleep(delay)
    finally:
        if own:
            client.close()
    raise AssertionError("unreachable")


def _content(resp: httpx.Response) -> str:
    try:
        content = resp.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise ProviderError(resp.status_code, f"unexpected response shape: {resp.text}") from exc
    return content or ""


class HttpProvider:
    name = "live"

    def __init__(self, endpoint: ProviderEndpoint, client: httpx.Client | None = None, sleep=time.sleep):
        self.endpoint = endpoint
        self.client = client
        self.sleep = sleep

    def complete(self, prompt: InstantiatedPrompt, cut_fqn: str) -> str:
        return complete(self.endpoint, prompt, client=self.client, sleep=self.sleep)


def response_path(root: Path, model: str, prompt_name: str, cut_fqn: str) -> Path:
    return Path(root) / model / prompt_name / f"{cut_fqn}.txt"


class ReplayProvider:
    """Canned responses laid out as ``{model}/{prompt_name}/{cut_fqn}.txt``."""

    name = "replay"

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def complete(self, prompt: InstantiatedPrompt, cut_fqn: str) -> str:
        path = response_path(self.root, prompt.model, prompt.prompt_name, cut_fqn)
        if not path.is_file():
            raise MissingReplayResponse(
                f"no canned response at {path}",
                model=prompt.model, prompt=prompt.prompt_name, cut_fqn=cut_fqn,
            )
        return path.read_text(encoding="utf-8")


class MockProvider:
    """Answers from a fixed reply, a responses directory, or a synthesized stub.

    The stub is a minimal JUnit 5 class named after the class under test, so
    the pipeline can run without any canned material.
    """

    name = "mock"

    def __init__(self, reply: str | None = None, responses: str | Path | None = None):
        self.reply = reply
        self.responses = Path(responses) if responses else None

    def complete(self, prompt: InstantiatedPrompt, cut_fqn: str) -> str:
        if self.reply is not None:
            return self.reply
        if self.responses is not None:
            path = response_path(self.responses, prompt.model, prompt.prompt_name, cut_fqn)
            if path.is_file():
                return path.read_text(encoding="utf-8")
        return synthesize_stub(cut_fqn)


def synthesize_stub(cut_fqn: str) -> str:
    package, _, name = cut_fqn.rpartition(".")
    field = re.sub(r"^[A-Z]", lambda m: m.group(0).lower(), name)
    header = f"package {package};\n\n" if package else ""
    return (
        f"```java\n{header}import static org.junit.jupiter.api.Assertions.assertNotNull;\n\n"
        "import org.junit.jupiter.api.Test;\n\n"
        f"class {name}Test {{\n\n"
        "    @Test\n"
        f"    void classIsLoadable() {{\n"
        f"        assertNotNull({name}.class, \"{field} type\");\n"
        "    }\n"
        "}\n```\n"
    )
