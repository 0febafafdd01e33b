"""Chat-provider orchestration: method ranking, target choice, hallucination
classification.

Prompts carry a fenced JSON payload describing the decision (candidates plus
scores), and the model must answer in a strict JSON envelope. Everything the
model names is pushed through classify_suggestion; only VALID items survive.
The mock providers parse the same payload, which keeps offline runs exact.
"""

from __future__ import annotations

import json
import os
import random
import re
from dataclasses import dataclass, field as dc_field
from typing import Protocol

import requests

from .embeddings import MoveCandidate
from .errors import MalformedResponse, ProviderUnavailable
from .filters import check_feasibility, sanity_filter
from .model import ClassInfo, ProjectIndex
from .retrieval import ClassSummary

METHOD_RANKING = "METHOD_RANKING"
TARGET_SELECTION = "TARGET_SELECTION"

METHOD_NOT_FOUND = "METHOD_NOT_FOUND"
TARGET_NOT_FOUND = "TARGET_NOT_FOUND"

_FENCE_RE = re.compile(r"```json\s*(.*?)```", re.DOTALL)


@dataclass
class RawSuggestion:
    method: str
    target: str | None
    rationale: str
    source: str  # METHOD_RANKING | TARGET_SELECTION

    def to_doc(self) -> dict:
        return {
            "method": self.method,
            "target": self.target,
            "rationale": self.rationale,
            "source": self.source,
        }


@dataclass
class HallucinationReport:
    counts: dict[str, int] = dc_field(
        default_factory=lambda: {"H1": 0, "H2": 0, "H3": 0, "VALID": 0}
    )
    items: list[tuple[RawSuggestion, str, list[str]]] = dc_field(default_factory=list)

    def add(self, raw: RawSuggestion, bucket: str, reasons: list[str]) -> None:
        self.counts[bucket] += 1
        self.items.append((raw, bucket, reasons))

    def merge(self, other: "HallucinationReport") -> None:
        for bucket, n in other.counts.items():
            self.counts[bucket] += n
        self.items.extend(other.items)

    def to_doc(self) -> dict:
        return {
            "counts": dict(self.counts),
            "items": [
                {"suggestion": raw.to_doc(), "bucket": bucket, "reasons": reasons}
                for raw, bucket, reasons in self.items
            ],
        }


class ChatProvider(Protocol):
    model_id: str
    temperature: float

    def chat(self, messages: list[dict]) -> str: ...


class HttpChatProvider:
    """Chat-completions wire shape over HTTP; key and model from env."""

    def __init__(
        self,
        url: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        temperature: float | None = None,
        timeout: float = 120.0,
    ):
        self.url = url or os.environ.get("CHAT_API_URL", "")
        self.api_key = api_key if api_key is not None else os.environ.get("CHAT_API_KEY", "")
        self.model_id = model or os.environ.get("CHAT_MODEL", "chat-1")
        if temperature is None:
            temperature = float(os.environ.get("CHAT_TEMPERATURE", "0"))
        self.temperature = temperature
        self.timeout = timeout
        if not self.url:
            raise ProviderUnavailable("no chat endpoint configured (CHAT_API_URL)")

    def chat(self, messages: list[dict]) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = requests.post(
                self.url,
                json={
                    "model": self.model_id,
                    "messages": messages,
                    "temperature": self.temperature,
                },
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"chat endpoint unreachable: {exc}") from exc
        if resp.status_code != 200:
            raise ProviderUnavailable(
                f"chat endpoint returned {resp.status_code}: {resp.text[:200]}"
            )
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderUnavailable(f"malformed chat response: {exc}") from exc


def extract_payload(messages: list[dict]) -> dict:
    """Pull the machine-readable payload out of a prompt (mocks use this)."""
    for msg in reversed(messages):
        m = _FENCE_RE.search(msg.get("content", ""))
        if m:
            return json.loads(m.group(1))
    raise ValueError("no fenced json payload in messages")


class EchoOrderProvider:
    """Returns candidates exactly as given. Idempotent by construction."""

    model_id = "mock-echo"
    temperature = 0.0

    def chat(self, messages: list[dict]) -> str:
        payload = extract_payload(messages)
        return _respond_in_order(payload, payload.get("candidates", []))


class SimilarityOracleProvider:
    """Sorts candidates by their payload score, descending; ties by name."""

    model_id = "mock-similarity-oracle"
    temperature = 0.0

    def chat(self, messages: list[dict]) -> str:
        payload = extract_payload(messages)
        ordered = _oracle_order(payload.get("candidates", []))
        return _respond_in_order(payload, ordered)


def _oracle_order(candidates: list[dict]) -> list[dict]:
    def key(c: dict):
        return (-(c.get("score") or 0.0), c.get("method") or c.get("class") or "")

    return sorted(candidates, key=key)


def _respond_in_order(payload: dict, ordered: list[dict]) -> str:
    kind = payload.get("kind")
    if kind == "rank_methods":
        return json.dumps(
            {
                "ranking": [
                    {"method": c["method"], "reason": "weak cohesion with the host class"}
                    for c in ordered
                ]
            }
        )
    if kind == "choose_target":
        return json.dumps(
            {
                "targets": [
                    {"class": c["class"], "reason": "closest responsibility match"}
                    for c in ordered
                ]
            }
        )
    if kind == "critique_ranking":
        return json.dumps(
            {"verdicts": [{"method": c["method"], "keep": True} for c in payload["items"]]}
        )
    raise ValueError(f"mock cannot answer payload kind {kind!r}")


class FaultInjectingProvider:
    """Similarity-oracle ordering with seeded hallucination injection.

    Each answer slot independently draws from the seeded stream: method slots
    are replaced by an invalid method at rate p_h3; target slots by a
    nonexistent class at rate p_h1, else by a known-infeasible class from
    h2_pool at rate p_h2. Every injection is recorded, so a test can demand
    the downstream report matches this ledger exactly.
    """

    model_id = "mock-fault"
    temperature = 0.0

    def __init__(
        self,
        p_h1: float,
        p_h2: float,
        p_h3: float,
        seed: int,
        h2_pool: list[str] | None = None,
        h3_pool: list[str] | None = None,
    ):
        if p_h2 > 0 and not h2_pool:
            raise ValueError("p_h2 > 0 requires h2_pool of known-infeasible classes")
        self.p_h1 = p_h1
        self.p_h2 = p_h2
        self.p_h3 = p_h3
        self.rng = random.Random(seed)
        self.h2_pool = h2_pool or []
        self.h3_pool = h3_pool or []
        self.injections: list[dict] = []
        self._serial = 0
        self._turn = 0

    def injection_counts(self) -> dict[str, int]:
        out = {"H1": 0, "H2": 0, "H3": 0}
        for inj in self.injections:
            out[inj["bucket"]] += 1
        return out

    def _next_serial(self) -> int:
        self._serial += 1
        return self._serial

    def chat(self, messages: list[dict]) -> str:
        payload = extract_payload(messages)
        kind = payload.get("kind")
        if kind == "critique_ranking":
            return _respond_in_order(payload, [])
        self._turn += 1
        ordered = _oracle_order(payload.get("candidates", []))
        if kind == "rank_methods":
            out = []
            for slot, c in enumerate(ordered):
                if self.rng.random() < self.p_h3:
                    name = self._h3_name()
                    self._record("H3", name, slot, kind)
                    out.append({"method": name})
                else:
                    out.append({"method": c["method"]})
            return json.dumps(
                {"ranking": [{"method": c["method"], "reason": "mock"} for c in out]}
            )
        if kind == "choose_target":
            out = []
            for slot, c in enumerate(ordered):
                r = self.rng.random()
                if r < self.p_h1:
                    name = f"phantom.svc.MissingService{self._next_serial()}"
                    self._record("H1", name, slot, kind)
                    out.append(name)
                elif r < self.p_h1 + self.p_h2:
                    name = self.h2_pool[self._next_serial() % len(self.h2_pool)]
                    self._record("H2", name, slot, kind)
                    out.append(name)
                else:
                    out.append(c["class"])
            return json.dumps(
                {"targets": [{"class": name, "reason": "mock"} for name in out]}
            )
        raise ValueError(f"mock cannot answer payload kind {kind!r}")

    def _record(self, bucket: str, name: str, slot: int, stage: str) -> None:
        self.injections.append(
            {"bucket": bucket, "name": name, "turn": self._turn, "slot": slot, "stage": stage}
        )

    def _h3_name(self) -> str:
        if self.h3_pool:
            return self.h3_pool[self._next_serial() % len(self.h3_pool)]
        return f"phantomHelper{self._next_serial()}()"


def classify_suggestion(
    index: ProjectIndex, raw: RawSuggestion, host: ClassInfo
) -> tuple[str, list[str]]:
    """Bucket one raw suggestion: H1, then H3, then H2, else VALID."""
    if raw.target:
        target_cls = index.lookup(raw.target)
        if target_cls is None:
            return "H1", [TARGET_NOT_FOUND]

    m = host.method(raw.method)
    if m is None:
        return "H3", [METHOD_NOT_FOUND]
    for verdict in sanity_filter(host):
        if verdict.method.signature == m.signature and not verdict.passed:
            return "H3", verdict.reasons

    if raw.target:
        feas = check_feasibility(index, m, host, raw.target)
        if not feas.feasible:
            return "H2", feas.reasons
    return "VALID", []


def _chat_with_retry(provider: ChatProvider, messages: list[dict], key: str) -> list[dict]:
    """Ask once, retry once on a malformed answer, then give up."""
    text = provider.chat(messages)
    parsed = _try_parse(text, key)
    if parsed is not None:
        return parsed
    retry = messages + [
        {"role": "assistant", "content": text},
        {
            "role": "user",
            "content": (
                "The previous answer was not valid. Reply with only a JSON object "
                f'of the form {{"{key}": [...]}} and nothing else.'
            ),
        },
    ]
    text = provider.chat(retry)
    parsed = _try_parse(text, key)
    if parsed is None:
        raise MalformedResponse(f"no parsable {key!r} envelope after retry: {text[:200]}")
    return parsed


def _try_parse(text: str, key: str) -> list[dict] | None:
    candidates = [text]
    m = _FENCE_RE.search(text)
    if m:
        candidates.insert(0, m.group(1))
    for chunk in candidates:
        try:
            doc = json.loads(chunk)
        except ValueError:
            continue
        if isinstance(doc, dict) and isinstance(doc.get(key), list):
            items = [x for x in doc[key] if isinstance(x, dict)]
            return items
    return None


def _rank_prompt(host: ClassInfo, candidates: list[MoveCandidate], max_out: int) -> list[dict]:
    payload = {
        "kind": "rank_methods",
        "class": host.qualified_name,
        "max_out": max_out,
        "candidates": [
            # ranking priority grows as cohesion falls, so invert similarity
            {"method": c.method.signature, "score": 1.0 - c.similarity}
            for c in candidates
        ],
    }
    lines = [
        f"You are reviewing class {host.qualified_name} for methods that belong elsewhere.",
        "For each candidate method below, evaluate its purpose, its cohesion with",
        "the rest of the class, and its dependencies. Then rank the candidates you",
        f"would move, strongest case first, at most {max_out}.",
        "Candidates (score is a misplacement signal, higher = more out of place):",
        "```json",
        json.dumps(payload, indent=2),
        "```",
        'Answer with only a JSON object: {"ranking": [{"method": "<signature>", "reason": "<why>"}]}.',
        "Use exact signatures from the candidate list.",
    ]
    return [
        {"role": "system", "content": "You are a careful refactoring assistant."},
        {"role": "user", "content": "\n".join(lines)},
    ]


def _critique_prompt(host: ClassInfo, ranked: list[dict]) -> list[dict]:
    payload = {"kind": "critique_ranking", "class": host.qualified_name, "items": ranked}
    lines = [
        "Review your own ranking below. Strike any method that on reflection",
        "should stay in its class; keep the rest.",
        "```json",
        json.dumps(payload, indent=2),
        "```",
        'Answer with only: {"verdicts": [{"method": "<signature>", "keep": true|false}]}.',
    ]
    return [
        {"role": "system", "content": "You are a careful refactoring assistant."},
        {"role": "user", "content": "\n".join(lines)},
    ]


def _target_prompt(m_sig: str, host: ClassInfo, packed: list[ClassSummary]) -> list[dict]:
    payload = {
        "kind": "choose_target",
        "method": m_sig,
        "host": host.qualified_name,
        "candidates": [
            {"class": s.qualified_name, "score": s.semantic_score or 0.0} for s in packed
        ],
    }
    lines = [
        f"Method {m_sig} is being moved out of {host.qualified_name}.",
        "Choose the best destination class from the candidates below, returning",
        "a prioritized list. Class summaries:",
        "",
    ]
    for s in packed:
        lines.append(s.rendered)
    lines += [
        "```json",
        json.dumps(payload, indent=2),
        "```",
        'Answer with only a JSON object: {"targets": [{"class": "<qualified name>", "reason": "<why>"}]}.',
        "Use exact qualified names from the candidate list.",
    ]
    return [
        {"role": "system", "content": "You are a careful refactoring assistant."},
        {"role": "user", "content": "\n".join(lines)},
    ]


def rank_methods(
    provider: ChatProvider,
    index: ProjectIndex,
    host: ClassInfo,
    candidates: list[MoveCandidate],
    max_out: int = 3,
    report: HallucinationReport | None = None,
    critique: bool = False,
    log: list | None = None,
) -> list[tuple[MoveCandidate, str]]:
    """LLM priority order over misplacement candidates, noise filtered out."""
    if not candidates:
        return []
    report = report if report is not None else HallucinationReport()
    messages = _rank_prompt(host, candidates, max_out)
    entries = _chat_with_retry(provider, messages, "ranking")
    if log is not None:
        log.append({"stage": "rank_methods", "messages": messages, "response": entries})

    by_sig = {c.method.signature: c for c in candidates}
    by_name: dict[str, list[MoveCandidate]] = {}
    for c in candidates:
        by_name.setdefault(c.method.name, []).append(c)

    kept: list[tuple[MoveCandidate, str]] = []
    seen: set[str] = set()
    for entry in entries:
        name = str(entry.get("method", ""))
        reason = str(entry.get("reason", ""))
        cand = by_sig.get(name)
        if cand is None:
            matches = by_name.get(name.split("(")[0], [])
            cand = matches[0] if len(matches) == 1 else None
        raw = RawSuggestion(
            method=cand.method.signature if cand else name,
            target=None,
            rationale=reason,
            source=METHOD_RANKING,
        )
        bucket, codes = classify_suggestion(index, raw, host)
        report.add(raw, bucket, codes)
        if cand is None or bucket != "VALID":
            continue
        if cand.method.signature in seen:
            continue
        seen.add(cand.method.signature)
        kept.append((cand, reason))
    kept = kept[:max_out]

    if critique and kept:
        ranked_docs = [{"method": c.method.signature, "reason": r} for c, r in kept]
        messages = _critique_prompt(host, ranked_docs)
        verdicts = _chat_with_retry(provider, messages, "verdicts")
        if log is not None:
            log.append({"stage": "critique", "messages": messages, "response": verdicts})
        struck = {
            str(v.get("method")) for v in verdicts if v.get("keep") is False
        }
        kept = [(c, r) for c, r in kept if c.method.signature not in struck]
    return kept


def choose_target(
    provider: ChatProvider,
    index: ProjectIndex,
    host: ClassInfo,
    m_sig: str,
    packed: list[ClassSummary],
    report: HallucinationReport | None = None,
    log: list | None = None,
) -> list[tuple[str, str]]:
    """LLM-prioritized destinations restricted to the packed candidates."""
    if not packed:
        return []
    report = report if report is not None else HallucinationReport()
    messages = _target_prompt(m_sig, host, packed)
    entries = _chat_with_retry(provider, messages, "targets")
    if log is not None:
        log.append({"stage": "choose_target", "messages": messages, "response": entries})

    packed_names = {s.qualified_name for s in packed}
    kept: list[tuple[str, str]] = []
    seen: set[str] = set()
    for entry in entries:
        name = str(entry.get("class", ""))
        reason = str(entry.get("reason", ""))
        raw = RawSuggestion(
            method=m_sig, target=name, rationale=reason, source=TARGET_SELECTION
        )
        bucket, codes = classify_suggestion(index, raw, host)
        report.add(raw, bucket, codes)
        # only classes actually offered in the prompt may be emitted
        if bucket != "VALID" or name not in packed_names or name in seen:
            continue
        seen.add(name)
        kept.append((name, reason))
    return kept
