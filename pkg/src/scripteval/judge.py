"""Judge gateway: remote LLM scoring with caching, plus an offline stand-in.

The remote judge speaks the common chat-completion wire shape (single user
message, temperature 0) and expects a JSON object reply with ``similarity``
and ``reason``.  Failures retry, then degrade to the lexical judge so an
evaluation never dies mid-corpus; degradations are counted for diagnostics.
Verdicts are cached in an append-only JSONL file keyed by a content hash.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import requests

from .errors import JudgeUnavailable
from .prompts import TEMPLATE_VERSION, render_judge_prompt
from .similarity import normalized_similarity, token_jaccard

log = logging.getLogger(__name__)

DEFAULT_CACHE_PATH = "~/.cache/scripteval/judge_cache.jsonl"


@dataclass(frozen=True)
class JudgeRequest:
    field_kind: str
    gt_text: str
    pred_text: str


@dataclass(frozen=True)
class JudgeVerdict:
    similarity: float
    reason: str = ""
    source: str = "lexical"  # remote | cache | lexical


@dataclass
class JudgeConfig:
    endpoint: str = ""
    model: str = ""
    api_key_env: str = "SCRIPTEVAL_API_KEY"
    timeout: float = 60.0
    max_retries: int = 2
    retry_backoff: float = 0.5
    max_concurrent: int = 4
    cache_path: str | None = DEFAULT_CACHE_PATH
    degrade_to_lexical: bool = True


def extract_json_object(text: str) -> dict:
    """First balanced JSON object in a reply that may carry fences or prose."""
    start = text.find("{")
    while start != -1:
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, len(text)):
            ch = text[i]
            if in_string:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_string = False
            elif ch == '"':
                in_string = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    try:
                        obj = json.loads(text[start:i + 1])
                    except json.JSONDecodeError:
                        break
                    if isinstance(obj, dict):
                        return obj
                    break
        start = text.find("{", start + 1)
    raise ValueError("no JSON object found in judge reply")


def clamp_unit(value: float, what: str = "similarity") -> float:
    if value < 0.0 or value > 1.0:
        log.warning("%s %r outside [0, 1]; clamping", what, value)
        return min(1.0, max(0.0, value))
    return value


# ---------------------------------------------------------------------------
# Lexical judge (offline)
# ---------------------------------------------------------------------------

def lexical_similarity(gt_text: str, pred_text: str) -> JudgeVerdict:
    """Deterministic text-only verdict: the better of edit-distance
    similarity and token-set overlap."""
    edit = normalized_similarity(gt_text, pred_text)
    jac = token_jaccard(gt_text, pred_text)
    if jac > edit:
        return JudgeVerdict(jac, "token overlap", "lexical")
    return JudgeVerdict(edit, "edit-distance similarity", "lexical")


class LexicalJudge:
    """Offline judge; pure function of its inputs, needs no network."""

    name = "lexical"
    max_concurrent = 1

    def similarity(self, request: JudgeRequest) -> JudgeVerdict:
        return lexical_similarity(request.gt_text, request.pred_text)

    def complete(self, prompt: str) -> str:
        raise JudgeUnavailable("lexical judge cannot run free-form prompts")


# ---------------------------------------------------------------------------
# Verdict cache
# ---------------------------------------------------------------------------

class JudgeCache:
    """Append-only JSONL store; corrupt lines are skipped with a warning."""

    def __init__(self, path: str | None):
        self.path = os.path.expanduser(path) if path else None
        self._entries: dict[str, JudgeVerdict] = {}
        self._lock = threading.Lock()
        if self.path and os.path.exists(self.path):
            with open(self.path, encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, 1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                        self._entries[rec["key"]] = JudgeVerdict(
                            float(rec["similarity"]), rec.get("reason", ""), "cache"
                        )
                    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                        log.warning("%s:%d: skipping corrupt cache line", self.path, line_no)

    @staticmethod
    def key(model: str, request: JudgeRequest) -> str:
        payload = json.dumps(
            [TEMPLATE_VERSION, model, request.field_kind,
             request.gt_text, request.pred_text],
            ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def get(self, key: str) -> JudgeVerdict | None:
        with self._lock:
            return self._entries.get(key)

    def put(self, key: str, verdict: JudgeVerdict, model: str,
            request: JudgeRequest) -> None:
        record = {
            "key": key,
            "similarity": verdict.similarity,
            "reason": verdict.reason,
            "model": model,
            "template_version": TEMPLATE_VERSION,
            "field_kind": request.field_kind,
            "gt_text": request.gt_text,
            "pred_text": request.pred_text,
        }
        with self._lock:
            self._entries[key] = JudgeVerdict(verdict.similarity, verdict.reason, "cache")
            if self.path:
                os.makedirs(os.path.dirname(self.path) or ".", exist_ok=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def stats(self) -> dict:
        return {"path": self.path, "entries": len(self._entries)}

    def clear(self) -> int:
        with self._lock:
            n = len(self._entries)
            self._entries.clear()
            if self.path and os.path.exists(self.path):
                os.remove(self.path)
            return n


# ---------------------------------------------------------------------------
# Remote judge
# ---------------------------------------------------------------------------

class RemoteJudge:
    """Chat-completion client with retries, caching, and lexical degradation."""

    def __init__(self, config: JudgeConfig, session: requests.Session | None = None):
        if not config.endpoint or not config.model:
            raise JudgeUnavailable("remote judge needs an endpoint and a model id")
        self.config = config
        self.session = session or requests.Session()
        self.cache = JudgeCache(config.cache_path)
        self.fallback_count = 0
        self._lock = threading.Lock()

    @property
    def name(self) -> str:
        return self.config.model

    @property
    def max_concurrent(self) -> int:
        return self.config.max_concurrent

    def complete(self, prompt: str) -> str:
        """One chat completion; retries transport errors, then gives up."""
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0.0,
        }
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt and self.config.retry_backoff:
                time.sleep(self.config.retry_backoff * (2 ** (attempt - 1)))
            try:
                resp = self.session.post(
                    self.config.endpoint, json=payload, headers=headers,
                    timeout=self.config.timeout,
                )
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError,
                    TypeError, ValueError) as exc:
                last_error = exc
                log.warning("judge call failed (attempt %d): %s", attempt + 1, exc)
        raise JudgeUnavailable(f"remote judge failed after retries: {last_error}")

    def similarity(self, request: JudgeRequest) -> JudgeVerdict:
        key = JudgeCache.key(self.config.model, request)
        cached = self.cache.get(key)
        if cached is not None:
            return cached
        prompt = render_judge_prompt(
            request.field_kind, request.gt_text, request.pred_text
        )
        try:
            reply = self.complete(prompt)
            data = extract_json_object(reply)
            similarity = clamp_unit(float(data["similarity"]))
            verdict = JudgeVerdict(similarity, str(data.get("reason", "")), "remote")
        except (JudgeUnavailable, ValueError, KeyError, TypeError) as exc:
            if not self.config.degrade_to_lexical:
                raise JudgeUnavailable(f"judge verdict unavailable: {exc}") from exc
            log.warning("degrading to lexical judge: %s", exc)
            with self._lock:
                self.fallback_count += 1
            return lexical_similarity(request.gt_text, request.pred_text)
        self.cache.put(key, verdict, self.config.model, request)
        return verdict


def judge_many(judge, requests_list: list[JudgeRequest]) -> list[JudgeVerdict]:
    """Verdicts for independent requests, in input order.  Runs concurrently
    up to the judge's limit; the ordered reduction keeps results deterministic
    for deterministic judges."""
    workers = getattr(judge, "max_concurrent", 1)
    if workers > 1 and len(requests_list) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(judge.similarity, requests_list))
    return [judge.similarity(r) for r in requests_list]
