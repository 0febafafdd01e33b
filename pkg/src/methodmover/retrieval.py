"""Target-class retrieval: enumeration, heuristic ranking, summary packing.

Instance moves can only land on types the method will still be able to
reach (its parameter types and the host's field types), so enumeration and
feasibility are fused here: nothing mechanically impossible leaves this
module. Static moves rank the whole project by package proximity and a
utility-name heuristic, then keep the top slice. Survivors are reordered
by semantic similarity to the method body and packed into a token budget
as prompt-ready class summaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .embeddings import Embedder, cosine_similarity, embed
from .filters import (
    FeasibilityVerdict,
    check_instance_feasibility,
    check_static_feasibility,
    instance_destination_types,
)
from .model import ClassInfo, MethodInfo, ProjectIndex

DEFAULT_STATIC_LIMIT = 50
DEFAULT_TOKEN_BUDGET = 7000


@dataclass
class TargetCandidate:
    target: str  # qualified class name
    feasibility: FeasibilityVerdict
    heuristic_score: float | None = None  # static route only
    semantic_score: float | None = None  # filled by the rerank step
    route: str | None = None  # field | param | static

    def to_doc(self) -> dict:
        return {
            "target": self.target,
            "heuristic_score": self.heuristic_score,
            "semantic_score": self.semantic_score,
            "route": self.route,
            "feasibility": self.feasibility.to_doc(),
        }


@dataclass
class ClassSummary:
    qualified_name: str
    field_declarations: list[str]
    docstring: str | None
    method_signatures: list[str]
    rendered: str = ""
    token_estimate: int = 0
    semantic_score: float | None = None

    def to_doc(self) -> dict:
        return {
            "qualified_name": self.qualified_name,
            "token_estimate": self.token_estimate,
            "rendered": self.rendered,
        }


def estimate_tokens(text: str) -> int:
    return math.ceil(len(text.encode("utf-8")) / 4)


def render_summary_text(
    qualified_name: str,
    field_declarations: list[str],
    docstring: str | None,
    method_signatures: list[str],
) -> str:
    lines = [f"class {qualified_name}"]
    for decl in field_declarations:
        lines.append(f"field: {decl}")
    if docstring:
        lines.append("doc:")
        lines.extend(docstring.splitlines())
    for sig in method_signatures:
        lines.append(f"method: {sig}")
    return "\n".join(lines) + "\n"


def _finish(summary: ClassSummary) -> ClassSummary:
    summary.rendered = render_summary_text(
        summary.qualified_name,
        summary.field_declarations,
        summary.docstring,
        summary.method_signatures,
    )
    summary.token_estimate = estimate_tokens(summary.rendered)
    return summary


def summarize_class(cls: ClassInfo) -> ClassSummary:
    decls = []
    for f in cls.fields:
        mods = " ".join(f.modifiers)
        prefix = f"{mods} " if mods else ""
        decls.append(f"{prefix}{f.type_text} {f.name};")
    sigs = [m.full_signature for m in cls.methods]
    return _finish(
        ClassSummary(
            qualified_name=cls.qualified_name,
            field_declarations=decls,
            docstring=cls.docstring,
            method_signatures=sigs,
        )
    )


def enumerate_instance_targets(
    index: ProjectIndex, m: MethodInfo, host: ClassInfo
) -> list[TargetCandidate]:
    """Feasible destinations for an instance move: param and field types."""
    routes = instance_destination_types(index, m, host)
    out: list[TargetCandidate] = []
    for qualified in sorted(routes):
        verdict = check_instance_feasibility(index, m, host, qualified)
        if verdict.feasible:
            out.append(
                TargetCandidate(
                    target=qualified, feasibility=verdict, route=routes[qualified]
                )
            )
    return out


def package_proximity(t: ClassInfo, h: ClassInfo) -> float:
    """Shared package prefix length over host package depth."""
    if not h.package_path:
        return 1.0 if not t.package_path else 0.0
    shared = 0
    for a, b in zip(t.package_path, h.package_path):
        if a != b:
            break
        shared += 1
    return shared / len(h.package_path)


def is_utility_class(t: ClassInfo) -> int:
    return 1 if "util" in t.simple_name.lower() else 0


def ranking_score(t: ClassInfo, h: ClassInfo) -> float:
    return 2.0 * package_proximity(t, h) + is_utility_class(t)


def enumerate_static_targets(
    index: ProjectIndex,
    m: MethodInfo,
    host: ClassInfo,
    limit: int = DEFAULT_STATIC_LIMIT,
) -> list[TargetCandidate]:
    """Top `limit` classes by heuristic score, then feasibility-filtered."""
    scored: list[tuple[float, str, ClassInfo]] = []
    for name, cls in index.classes.items():
        if name == host.qualified_name:
            continue
        scored.append((ranking_score(cls, host), name, cls))
    scored.sort(key=lambda item: (-item[0], item[1]))
    out: list[TargetCandidate] = []
    for score, name, cls in scored[:limit]:
        verdict = check_static_feasibility(index, m, host, cls)
        if verdict.feasible:
            out.append(
                TargetCandidate(
                    target=name,
                    feasibility=verdict,
                    heuristic_score=score,
                    route="static",
                )
            )
    return out


def enumerate_targets(
    index: ProjectIndex,
    m: MethodInfo,
    host: ClassInfo,
    static_limit: int = DEFAULT_STATIC_LIMIT,
) -> list[TargetCandidate]:
    if m.is_static:
        return enumerate_static_targets(index, m, host, limit=static_limit)
    return enumerate_instance_targets(index, m, host)


def truncate_summary(summary: ClassSummary, budget: int) -> ClassSummary:
    """Drop trailing method signatures until the summary fits the budget."""
    sigs = list(summary.method_signatures)
    while sigs:
        trial = _finish(
            ClassSummary(
                qualified_name=summary.qualified_name,
                field_declarations=summary.field_declarations,
                docstring=summary.docstring,
                method_signatures=sigs,
                semantic_score=summary.semantic_score,
            )
        )
        if trial.token_estimate <= budget:
            return trial
        sigs.pop()
    return _finish(
        ClassSummary(
            qualified_name=summary.qualified_name,
            field_declarations=summary.field_declarations,
            docstring=summary.docstring,
            method_signatures=[],
            semantic_score=summary.semantic_score,
        )
    )


def pack_summaries(
    summaries: list[ClassSummary], budget: int
) -> tuple[list[ClassSummary], list[str]]:
    """Greedy append-if-fits packing, order preserved.

    A top summary that alone exceeds the budget is emitted by itself,
    truncated at method-signature granularity, with a warning.
    """
    warnings: list[str] = []
    if summaries and summaries[0].token_estimate > budget:
        first = truncate_summary(summaries[0], budget)
        warnings.append(
            f"summary for {first.qualified_name} exceeds token budget {budget}; "
            f"truncated to {first.token_estimate} tokens and packed alone"
        )
        return [first], warnings
    packed: list[ClassSummary] = []
    total = 0
    for s in summaries:
        if total + s.token_estimate <= budget:
            packed.append(s)
            total += s.token_estimate
    return packed, warnings


def semantic_rerank_and_pack(
    index: ProjectIndex,
    m: MethodInfo,
    host: ClassInfo,
    candidates: list[TargetCandidate],
    embedder: Embedder,
    budget_tokens: int = DEFAULT_TOKEN_BUDGET,
) -> tuple[list[ClassSummary], list[str]]:
    """Order candidates by similarity to the method body, pack summaries.

    Similarity is computed against the target class full text; summaries
    are only the packed prompt payload.
    """
    if not candidates:
        return [], []
    body_vec = embed(embedder, index.method_source(host, m))
    for c in candidates:
        cls = index.lookup(c.target)
        c.semantic_score = cosine_similarity(
            body_vec, embed(embedder, index.class_source(cls))
        )
    ordered = sorted(candidates, key=lambda c: (-(c.semantic_score or 0.0), c.target))
    summaries = []
    for c in ordered:
        s = summarize_class(index.lookup(c.target))
        s.semantic_score = c.semantic_score
        summaries.append(s)
    return pack_summaries(summaries, budget_tokens)
