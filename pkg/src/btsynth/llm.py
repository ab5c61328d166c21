"""Chat-model gateway: one call surface over live HTTP, deterministic
replay, and scripted backends.

Replay keys are a sha256 over the canonicalized (system, user, model)
triple with line endings normalized; temperature deliberately stays out of
the key so recorded sessions survive tuning. The replay directory holds
one file per key, named by the hex digest, containing the raw response
text. RecordingBackend wraps any other backend and writes those files,
which is how fixtures get made.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence


class LlmError(Exception):
    pass


class HttpError(LlmError):
    def __init__(self, status: int, body: str):
        super().__init__(f"HTTP {status}: {body[:200]}")
        self.status = status
        self.body = body


class ReplayMiss(LlmError):
    def __init__(self, key: str):
        super().__init__(f"no recorded response for request hash {key}")
        self.key = key


class ScriptExhausted(LlmError):
    pass


class EmptyCompletion(LlmError):
    pass


@dataclass
class ChatRequest:
    system: str
    user: str
    temperature: float = 0.2
    model: str = "default"

    def __post_init__(self):
        if not self.user:
            raise ValueError("chat request needs a non-empty user message")
        if not 0.0 <= self.temperature <= 1.0:
            raise ValueError("temperature must be within [0, 1]")


@dataclass
class ChatResponse:
    text: str
    backend_id: str
    latency: float = 0.0


def replay_key(system: str, user: str, model: str) -> str:
    def norm(s: str) -> str:
        return s.replace("\r\n", "\n").replace("\r", "\n")

    payload = "\x1e".join((norm(system), norm(user), norm(model)))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class HttpBackend:
    """OpenAI-compatible chat-completions endpoint."""

    def __init__(self, endpoint: str, api_key_env: str = "", model: str = "",
                 timeout: float = 120.0):
        self.endpoint = endpoint.rstrip("/")
        self.api_key_env = api_key_env
        self.model = model
        self.timeout = timeout
        self.backend_id = f"http:{self.endpoint}"

    def complete(self, req: ChatRequest) -> ChatResponse:
        body = {
            "model": self.model or req.model,
            "messages": [
                {"role": "system", "content": req.system},
                {"role": "user", "content": req.user},
            ],
            "temperature": req.temperature,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env, "")
            if key:
                headers["Authorization"] = f"Bearer {key}"
        url = self.endpoint + "/v1/chat/completions"
        request = urllib.request.Request(
            url, data=json.dumps(body).encode("utf-8"), headers=headers
        )
        started = time.monotonic()
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            raise HttpError(exc.code, exc.read().decode("utf-8", "replace")) from None
        except (urllib.error.URLError, TimeoutError, OSError) as exc:
            raise HttpError(0, str(exc)) from None
        try:
            text = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise HttpError(0, f"malformed completion payload: {payload!r}") from None
        return ChatResponse(text, self.backend_id, time.monotonic() - started)


class ReplayBackend:
    def __init__(self, directory):
        self.directory = Path(directory)
        if not self.directory.is_dir():
            raise ValueError(f"replay directory {self.directory} does not exist")
        self.backend_id = f"replay:{self.directory}"

    def complete(self, req: ChatRequest) -> ChatResponse:
        key = replay_key(req.system, req.user, req.model)
        path = self.directory / key
        if not path.is_file():
            raise ReplayMiss(key)
        return ChatResponse(path.read_text(encoding="utf-8"), self.backend_id, 0.0)


class ScriptedBackend:
    """Canned responses consumed strictly in order."""

    def __init__(self, responses: Sequence[str]):
        self.responses = list(responses)
        self.cursor = 0
        self.backend_id = "scripted"

    def complete(self, req: ChatRequest) -> ChatResponse:
        if self.cursor >= len(self.responses):
            raise ScriptExhausted(
                f"scripted backend exhausted after {len(self.responses)} responses"
            )
        text = self.responses[self.cursor]
        self.cursor += 1
        return ChatResponse(text, self.backend_id, 0.0)


class RecordingBackend:
    """Delegates to another backend and stores each response under its
    replay key, building a replay fixture directory."""

    def __init__(self, inner, directory):
        self.inner = inner
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.backend_id = f"recording:{getattr(inner, 'backend_id', '?')}"

    def complete(self, req: ChatRequest) -> ChatResponse:
        resp = self.inner.complete(req)
        key = replay_key(req.system, req.user, req.model)
        (self.directory / key).write_text(resp.text, encoding="utf-8")
        return resp


def complete(backend, req: ChatRequest) -> ChatResponse:
    return backend.complete(req)


_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


def extract_code(resp) -> str:
    """First fenced block if any, else the whole text trimmed; the fence's
    language tag is ignored."""
    text = resp.text if isinstance(resp, ChatResponse) else resp
    m = _FENCE_RE.search(text)
    out = m.group(1) if m else text
    out = out.strip()
    if not out:
        raise EmptyCompletion("completion contained no usable text")
    return out
