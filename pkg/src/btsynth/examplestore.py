"""Similarity store of prompt/program pairs used for in-context retrieval.

Records persist as JSON Lines: {id, prompt, program, framework, embedding,
outcome, created_at}. The corpus is small (around 145 pairs), so queries
are an exact cosine scan; ties break by earlier created_at, then id.
Records tagged outcome=failure are kept but excluded from default queries.

A store can be frozen: adds become silent no-ops, which gives batch
evaluation runs independence between cases. Freezing persistently (the CLI
path) drops a `<store>.frozen` marker next to the file.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

FRAMEWORKS = ("bpftrace", "libbpf")
OUTCOMES = ("curated", "success", "failure")


class DuplicateId(Exception):
    pass


@dataclass(frozen=True)
class ExampleRecord:
    id: str
    prompt: str
    program: str
    framework: str = "bpftrace"
    embedding: tuple[float, ...] = ()
    outcome: str = "curated"
    created_at: str = ""

    def __post_init__(self):
        if self.framework not in FRAMEWORKS:
            raise ValueError(f"unknown framework {self.framework!r}")
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")


_TOKEN_RE = re.compile(r"[a-z0-9]+")


class HashedBagOfTokens:
    """Deterministic offline embedder: lowercase, split on non-alphanumerics,
    hash each token to a bucket, count, L2-normalize."""

    def __init__(self, dimension: int = 256):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension

    def embed(self, text: str) -> tuple[float, ...]:
        counts = [0.0] * self.dimension
        for token in _TOKEN_RE.findall(text.lower()):
            digest = hashlib.md5(token.encode("utf-8")).digest()
            counts[int.from_bytes(digest[:8], "big") % self.dimension] += 1.0
        norm = math.sqrt(sum(c * c for c in counts))
        if norm == 0.0:
            return tuple(counts)
        return tuple(c / norm for c in counts)


class LlmEmbedding:
    """Embedding via an OpenAI-compatible /v1/embeddings endpoint."""

    def __init__(self, endpoint: str, model: str, dimension: int,
                 api_key_env: str = "", timeout: float = 120.0):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.dimension = dimension
        self.api_key_env = api_key_env
        self.timeout = timeout

    def embed(self, text: str) -> tuple[float, ...]:
        import os
        import urllib.request

        from .llm import HttpError

        headers = {"Content-Type": "application/json"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env, "")
            if key:
                headers["Authorization"] = f"Bearer {key}"
        request = urllib.request.Request(
            self.endpoint + "/v1/embeddings",
            data=json.dumps({"model": self.model, "input": text}).encode("utf-8"),
            headers=headers,
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
            vector = tuple(float(x) for x in payload["data"][0]["embedding"])
        except Exception as exc:
            raise HttpError(0, f"embedding request failed: {exc}") from None
        if len(vector) != self.dimension:
            raise HttpError(0, f"embedding dimension {len(vector)} != {self.dimension}")
        return vector


def cosine(a, b) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class ExampleStore:
    def __init__(self, path, embedder=None):
        self.path = Path(path)
        self.embedder = embedder or HashedBagOfTokens()
        self._lock = threading.Lock()
        self._records: list[ExampleRecord] = []
        self._ids: set[str] = set()
        self._runtime_frozen = False
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                rec = _record_from_json(json.loads(line))
                self._records.append(rec)
                self._ids.add(rec.id)

    @property
    def _marker(self) -> Path:
        return self.path.with_name(self.path.name + ".frozen")

    @property
    def frozen(self) -> bool:
        return self._runtime_frozen or self._marker.exists()

    def freeze(self, persist: bool = False) -> None:
        self._runtime_frozen = True
        if persist:
            self._marker.write_text("frozen\n", encoding="utf-8")

    def thaw(self) -> None:
        self._runtime_frozen = False
        if self._marker.exists():
            self._marker.unlink()

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> tuple[ExampleRecord, ...]:
        return tuple(self._records)

    def new_record(self, prompt: str, program: str, outcome: str = "curated",
                   framework: str = "bpftrace", created_at: str = "") -> ExampleRecord:
        digest = hashlib.sha1((prompt + "\x1e" + program).encode("utf-8")).hexdigest()[:8]
        with self._lock:
            seq = len(self._records) + 1
            rid = f"r{seq:05d}-{digest}"
            while rid in self._ids:
                seq += 1
                rid = f"r{seq:05d}-{digest}"
        return ExampleRecord(
            id=rid,
            prompt=prompt,
            program=program,
            framework=framework,
            embedding=self.embedder.embed(prompt),
            outcome=outcome,
            created_at=created_at or _now(),
        )

    def add(self, record: ExampleRecord) -> bool:
        """Insert and persist; returns False without writing when the store
        is frozen."""
        if len(record.embedding) != self.embedder.dimension:
            raise ValueError(
                f"embedding length {len(record.embedding)} does not match "
                f"store dimension {self.embedder.dimension}"
            )
        with self._lock:
            if self.frozen:
                return False
            if record.id in self._ids:
                raise DuplicateId(record.id)
            self._records.append(record)
            self._ids.add(record.id)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(_record_to_json(record) + "\n")
        return True

    def query(self, prompt: str, k: int = 3, include_failures: bool = False) -> list[ExampleRecord]:
        if k <= 0:
            return []
        needle = self.embedder.embed(prompt)
        with self._lock:
            eligible = [
                r
                for r in self._records
                if include_failures or r.outcome in ("curated", "success")
            ]
        scored = sorted(
            eligible,
            key=lambda r: (-cosine(needle, r.embedding), r.created_at, r.id),
        )
        return scored[:k]

    def clear(self) -> None:
        with self._lock:
            self._records.clear()
            self._ids.clear()
            self.path.write_text("", encoding="utf-8")


def _record_to_json(rec: ExampleRecord) -> str:
    return json.dumps(
        {
            "id": rec.id,
            "prompt": rec.prompt,
            "program": rec.program,
            "framework": rec.framework,
            "embedding": list(rec.embedding),
            "outcome": rec.outcome,
            "created_at": rec.created_at,
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def _record_from_json(obj: dict) -> ExampleRecord:
    return ExampleRecord(
        id=obj["id"],
        prompt=obj["prompt"],
        program=obj["program"],
        framework=obj.get("framework", "bpftrace"),
        embedding=tuple(float(x) for x in obj.get("embedding", ())),
        outcome=obj.get("outcome", "curated"),
        created_at=obj.get("created_at", ""),
    )
