"""The end-to-end recommendation flow, plus per-run artifact storage.

One run walks a single host class through every stage: precondition
filtering, misplacement scoring, LLM ranking, target retrieval and
packing, LLM target choice, and a final validity gate. Whatever the
providers return, nothing leaves the pipeline unless the classifier
calls it VALID, the target was actually offered in the prompt, and the
executor can produce a concrete edit plan for it.

Run artifacts are a directory of JSON files per run: prompt exchanges,
the hallucination report, candidate scores, plans, previews, timings,
and one verdict slot per emitted recommendation. The recommendation
payload itself contains no timestamps or ids, so identical inputs give
byte-identical output.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from . import executor, filters, llm, retrieval
from .embeddings import Embedder, misplacement_scores
from .errors import (
    InfeasibleMove,
    MissingRun,
    PlanConflict,
    StaleIndex,
    UnknownClass,
)
from .llm import ChatProvider, HallucinationReport, RawSuggestion
from .model import ProjectIndex

OUTPUT_CAP = 3  # hard ceiling on emitted recommendations per class


@dataclass
class PipelineConfig:
    candidate_pool_k: int = 5
    max_recommendations: int = 3
    token_budget: int = 7000
    static_limit: int = 50
    critique_enabled: bool = False

    def effective_max(self) -> int:
        return min(self.max_recommendations, OUTPUT_CAP)

    def to_doc(self) -> dict:
        return {
            "candidate_pool_k": self.candidate_pool_k,
            "max_recommendations": self.max_recommendations,
            "token_budget": self.token_budget,
            "static_limit": self.static_limit,
            "critique_enabled": self.critique_enabled,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "PipelineConfig":
        cfg = cls()
        for key in cfg.to_doc():
            if key in doc:
                setattr(cfg, key, doc[key])
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        return cls.from_doc(json.loads(Path(path).read_text()))


@dataclass
class MoveRecommendation:
    rank: int
    method: str
    host: str
    target: str
    route: str
    new_signature: str
    rationale: str
    ranking_reason: str
    preview: str

    def to_doc(self) -> dict:
        return {
            "rank": self.rank,
            "method": self.method,
            "host": self.host,
            "target": self.target,
            "route": self.route,
            "new_signature": self.new_signature,
            "rationale": self.rationale,
            "ranking_reason": self.ranking_reason,
            "preview": self.preview,
        }


@dataclass
class RunResult:
    host: str
    recommendations: list[MoveRecommendation]
    plans: list[executor.MovePlan]
    report: HallucinationReport
    exchanges: list = field(default_factory=list)
    pool: list[dict] = field(default_factory=list)
    packed_names: dict[str, list[str]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def recommendations_doc(self) -> dict:
        """The deterministic payload: no ids, no timings."""
        return {
            "host": self.host,
            "recommendations": [r.to_doc() for r in self.recommendations],
        }


def run_recommend(
    config: PipelineConfig,
    index: ProjectIndex,
    host_name: str,
    embedder: Embedder,
    chat: ChatProvider,
) -> RunResult:
    host = index.lookup(host_name)
    if host is None:
        raise UnknownClass(host_name)

    report = HallucinationReport()
    result = RunResult(
        host=host.qualified_name, recommendations=[], plans=[], report=report
    )
    timings = result.timings
    llm_wall = 0.0

    t0 = time.perf_counter()
    surviving = filters.surviving_methods(host)
    timings["sanity_filter"] = time.perf_counter() - t0
    if not surviving:
        timings["llm_wall"] = 0.0
        return result

    t0 = time.perf_counter()
    scored = misplacement_scores(index, host, surviving, embedder)
    pool = scored[: config.candidate_pool_k]
    timings["misplacement"] = time.perf_counter() - t0
    result.pool = [
        {"method": c.method.signature, "similarity": c.similarity} for c in pool
    ]

    t0 = time.perf_counter()
    # rank the whole pool: a ranked method with no feasible destination is
    # skipped below, and the next one takes its slot. Emission is capped in
    # the loop, not here.
    ranked = llm.rank_methods(
        chat,
        index,
        host,
        pool,
        max_out=len(pool),
        report=report,
        critique=config.critique_enabled,
        log=result.exchanges,
    )
    llm_wall += time.perf_counter() - t0
    timings["rank_methods"] = time.perf_counter() - t0

    retrieval_time = 0.0
    target_time = 0.0
    plan_time = 0.0
    for cand, ranking_reason in ranked:
        if len(result.recommendations) >= config.effective_max():
            break
        m = cand.method

        t0 = time.perf_counter()
        targets = retrieval.enumerate_targets(
            index, m, host, static_limit=config.static_limit
        )
        if not targets:
            retrieval_time += time.perf_counter() - t0
            continue
        packed, warnings = retrieval.semantic_rerank_and_pack(
            index, m, host, targets, embedder, budget_tokens=config.token_budget
        )
        retrieval_time += time.perf_counter() - t0
        result.warnings.extend(warnings)
        result.packed_names[m.signature] = [s.qualified_name for s in packed]

        t0 = time.perf_counter()
        choices = llm.choose_target(
            chat, index, host, m.signature, packed, report=report, log=result.exchanges
        )
        dt = time.perf_counter() - t0
        llm_wall += dt
        target_time += dt
        if not choices:
            continue
        target_name, rationale = choices[0]

        # final firewall: re-classify the emitted pair and require an
        # executable plan before anything is shown
        bucket, _ = llm.classify_suggestion(
            index,
            RawSuggestion(
                method=m.signature,
                target=target_name,
                rationale=rationale,
                source=llm.TARGET_SELECTION,
            ),
            host,
        )
        if bucket != "VALID":
            continue
        t0 = time.perf_counter()
        try:
            plan = executor.plan_move(index, m, host, target_name)
            preview = executor.plan_preview(index, plan)
        except (PlanConflict, InfeasibleMove, StaleIndex):
            plan_time += time.perf_counter() - t0
            continue
        plan_time += time.perf_counter() - t0

        result.plans.append(plan)
        result.recommendations.append(
            MoveRecommendation(
                rank=len(result.recommendations) + 1,
                method=m.signature,
                host=host.qualified_name,
                target=target_name,
                route=plan.route,
                new_signature=plan.new_signature,
                rationale=rationale,
                ranking_reason=ranking_reason,
                preview=preview,
            )
        )

    timings["retrieval"] = retrieval_time
    timings["choose_target"] = target_time
    timings["planning"] = plan_time
    timings["llm_wall"] = llm_wall
    return result


def recommend(
    config: PipelineConfig,
    index: ProjectIndex,
    host_name: str,
    embedder: Embedder,
    chat: ChatProvider,
) -> list[MoveRecommendation]:
    return run_recommend(config, index, host_name, embedder, chat).recommendations


# ---------------------------------------------------------------------------
# run persistence


class RunStore:
    """Directory-of-JSON persistence for recommendation runs."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _dir(self, run_id: str) -> Path:
        if not run_id or "/" in run_id or run_id.startswith("."):
            raise MissingRun(f"bad run id: {run_id!r}")
        return self.root / run_id

    def save(self, result: RunResult, config: PipelineConfig) -> str:
        run_id = uuid.uuid4().hex[:12]
        d = self._dir(run_id)
        d.mkdir()
        _write_json(d / "run.json", {
            "run_id": run_id,
            "host": result.host,
            "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            **result.recommendations_doc(),
        })
        _write_json(d / "config.json", config.to_doc())
        _write_json(d / "candidates.json", result.pool)
        _write_json(d / "packed.json", result.packed_names)
        _write_json(d / "exchanges.json", result.exchanges)
        _write_json(d / "hallucinations.json", result.report.to_doc())
        _write_json(d / "plans.json", [p.to_doc() for p in result.plans])
        _write_json(d / "timings.json", result.timings)
        _write_json(d / "warnings.json", result.warnings)
        _write_json(
            d / "verdicts.json",
            [
                {"rating": None, "applied": False}
                for _ in result.recommendations
            ],
        )
        return run_id

    def exists(self, run_id: str) -> bool:
        return self._dir(run_id).is_dir()

    def load(self, run_id: str) -> dict:
        d = self._dir(run_id)
        if not d.is_dir():
            raise MissingRun(run_id)
        doc = {}
        for part in (
            "run",
            "config",
            "candidates",
            "packed",
            "hallucinations",
            "timings",
            "warnings",
            "verdicts",
        ):
            path = d / f"{part}.json"
            if path.is_file():
                doc[part] = json.loads(path.read_text())
        return doc

    def load_plan(self, run_id: str, n: int) -> executor.MovePlan:
        d = self._dir(run_id)
        if not d.is_dir():
            raise MissingRun(run_id)
        plans = json.loads((d / "plans.json").read_text())
        if not 0 <= n < len(plans):
            raise MissingRun(f"run {run_id} has no recommendation {n}")
        return executor.plan_from_doc(plans[n])

    def recommendation_count(self, run_id: str) -> int:
        doc = self.load(run_id)
        return len(doc["run"]["recommendations"])

    def set_verdict(
        self, run_id: str, n: int, rating: int | None = None, applied: bool | None = None
    ) -> dict:
        d = self._dir(run_id)
        if not d.is_dir():
            raise MissingRun(run_id)
        path = d / "verdicts.json"
        verdicts = json.loads(path.read_text())
        if not 0 <= n < len(verdicts):
            raise MissingRun(f"run {run_id} has no recommendation {n}")
        if rating is not None:
            if not isinstance(rating, int) or not 1 <= rating <= 6:
                raise ValueError(f"rating must be an integer in 1..6, got {rating!r}")
            if verdicts[n]["rating"] is not None and verdicts[n]["rating"] != rating:
                raise ValueError("rating already submitted for this recommendation")
            verdicts[n]["rating"] = rating
        if applied is not None:
            verdicts[n]["applied"] = bool(applied)
        _write_json(path, verdicts)
        return verdicts[n]

    def list_runs(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir() if p.is_dir())


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def strata_map(index: ProjectIndex) -> dict[str, str]:
    from .evaluation import stratify

    return {q: stratify(c) for q, c in index.classes.items()}


def recommendations_json(result: RunResult) -> str:
    """Canonical JSON for the determinism guarantee."""
    return json.dumps(result.recommendations_doc(), indent=2, sort_keys=True) + "\n"
