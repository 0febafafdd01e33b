"""Gold sets, recall metrics, and synthetic corpus generation.

A gold triplet names a method, the class it currently sits in, and the
class it belongs in. Recall is measured against ranked (method, target)
recommendation lists keyed by host class:

    Recall_M:  gold methods that appear anywhere in the host's top-k
    Recall_C:  of those, the fraction whose recommended target is right
    Recall_MC: full triplets recovered, over the whole gold set

Recall_C reports 0 when no gold method was found at all; the quotient is
otherwise undefined and 0 is the conservative reading.

Synthetic corpora come from perturbation: move methods OUT of their
homes with the refactoring executor, then ask the pipeline to move them
back. Each perturbation is committed only if the reverse move passes the
feasibility checks, so the generated gold set is achievable by
construction.
"""

from __future__ import annotations

import json
import random
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import executor, filters
from .errors import (
    InfeasibleMove,
    InsufficientCandidates,
    MissingRun,
    PlanConflict,
    ReparseFailed,
    StaleIndex,
)
from .model import ClassInfo, ProjectIndex, build_index, simple_type_name

SMALL = "SMALL"
LARGE = "LARGE"

# classes at or above this many declared methods count as LARGE
_SMALL_METHOD_LIMIT = 15


@dataclass(frozen=True)
class GoldTriplet:
    method: str  # signature text, normalized on comparison
    host: str  # qualified class the method sits in now
    target: str  # qualified class it should move to
    is_static: bool = False

    def __post_init__(self):
        if self.host == self.target:
            raise ValueError(f"gold triplet may not point at its own host: {self.host}")

    def to_doc(self) -> dict:
        return {
            "method": self.method,
            "host": self.host,
            "target": self.target,
            "is_static": self.is_static,
        }


def _split_top_level(args: str) -> list[str]:
    parts: list[str] = []
    depth = 0
    current = []
    for ch in args:
        if ch in "<[(":
            depth += 1
        elif ch in ">])":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    if current:
        parts.append("".join(current))
    return [p for p in (part.strip() for part in parts) if p]


def normalize_signature(sig: str) -> str:
    """Canonical `name(Type1,Type2)` form: simple type names, no spaces."""
    name, _, rest = sig.partition("(")
    if ")" in rest:
        rest = rest.rsplit(")", 1)[0]
    args = _split_top_level(rest)
    return f"{name.strip()}({','.join(simple_type_name(a) for a in args)})"


def _method_name(sig: str) -> str:
    return sig.partition("(")[0].strip()


def load_gold(path: str | Path) -> list[GoldTriplet]:
    out: list[GoldTriplet] = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        doc = json.loads(line)
        out.append(
            GoldTriplet(
                method=doc["method"],
                host=doc["host"],
                target=doc["target"],
                is_static=bool(doc.get("is_static", False)),
            )
        )
    return out


def save_gold(gold: list[GoldTriplet], path: str | Path) -> None:
    text = "".join(json.dumps(g.to_doc()) + "\n" for g in gold)
    Path(path).write_text(text)


def stratify(cls: ClassInfo) -> str:
    """SMALL below 15 declared methods, LARGE at or above.

    Constructors are not methods and do not count.
    """
    n = sum(1 for m in cls.methods if not m.is_constructor)
    return SMALL if n < _SMALL_METHOD_LIMIT else LARGE


@dataclass
class EvalResult:
    k: int
    recall_m: float
    recall_c: float
    recall_mc: float
    gold_size: int
    methods_found: int
    triplets_found: int
    strata: dict[str, "EvalResult"] = field(default_factory=dict)

    def to_doc(self) -> dict:
        doc = {
            "k": self.k,
            "recall_m": self.recall_m,
            "recall_c": self.recall_c,
            "recall_mc": self.recall_mc,
            "gold_size": self.gold_size,
            "methods_found": self.methods_found,
            "triplets_found": self.triplets_found,
        }
        if self.strata:
            doc["strata"] = {label: r.to_doc() for label, r in self.strata.items()}
        return doc


def compute_recalls(
    gold: list[GoldTriplet],
    runs: dict[str, list[tuple[str, str]]],
    k: int,
    *,
    name_only: bool = False,
    strata: dict[str, str] | None = None,
) -> EvalResult:
    """Score top-k recommendation lists against a gold set.

    `runs` maps each gold host to its ranked (method signature, target)
    pairs. Matching normalizes signatures on both sides; `name_only`
    relaxes it to the bare method name.
    """
    for g in gold:
        if g.host not in runs:
            raise MissingRun(f"no recommendation run for gold host {g.host}")

    found_m: set[int] = set()
    found_mc: set[int] = set()
    for i, g in enumerate(gold):
        want = _method_name(g.method) if name_only else normalize_signature(g.method)
        for sig, target in list(runs[g.host])[:k]:
            got = _method_name(sig) if name_only else normalize_signature(sig)
            if got != want:
                continue
            found_m.add(i)
            if target == g.target:
                found_mc.add(i)

    size = len(gold)
    result = EvalResult(
        k=k,
        recall_m=len(found_m) / size if size else 0.0,
        recall_c=len(found_mc) / len(found_m) if found_m else 0.0,
        recall_mc=len(found_mc) / size if size else 0.0,
        gold_size=size,
        methods_found=len(found_m),
        triplets_found=len(found_mc),
    )
    if strata:
        for label in sorted({strata.get(g.host, SMALL) for g in gold}):
            subset = [g for g in gold if strata.get(g.host, SMALL) == label]
            result.strata[label] = compute_recalls(
                subset, runs, k, name_only=name_only
            )
    return result


def evaluate(
    gold: list[GoldTriplet],
    runs: dict[str, list[tuple[str, str]]],
    ks: tuple[int, ...] = (1, 2, 3),
    *,
    name_only: bool = False,
    strata: dict[str, str] | None = None,
) -> dict[int, EvalResult]:
    return {
        k: compute_recalls(gold, runs, k, name_only=name_only, strata=strata)
        for k in ks
    }


# ---------------------------------------------------------------------------
# synthetic corpus by perturbation


def _copy_roots(source_roots: list[str], dest: Path) -> list[str]:
    dest.mkdir(parents=True, exist_ok=True)
    copied: list[str] = []
    taken: set[str] = set()
    for root in source_roots:
        src = Path(root)
        name = src.name or "root"
        candidate = name
        n = 1
        while candidate in taken:
            n += 1
            candidate = f"{name}{n}"
        taken.add(candidate)
        target = dest / candidate
        shutil.copytree(src, target)
        copied.append(target.as_posix())
    return copied


def _candidate_methods(
    index: ProjectIndex,
    moved: set[tuple[str, str]],
    rejected: set[tuple[str, str, str]],
    instance_only: bool,
) -> list[tuple[str, str, tuple[str, ...]]]:
    """Deterministic (host, signature, feasible targets) list for sampling."""
    out: list[tuple[str, str, tuple[str, ...]]] = []
    for host in index.sorted_classes():
        for v in filters.sanity_filter(host):
            if not v.passed:
                continue
            m = v.method
            key = (host.qualified_name, m.signature)
            if key in moved:
                continue
            if m.is_static:
                if instance_only:
                    continue
                pool = [
                    c.qualified_name
                    for c in index.sorted_classes()
                    if c.qualified_name != host.qualified_name
                ]
            else:
                pool = sorted(filters.instance_destination_types(index, m, host))
            targets = tuple(
                q
                for q in pool
                if (host.qualified_name, m.signature, q) not in rejected
                and filters.check_feasibility(index, m, host, q).feasible
            )
            if targets:
                out.append((host.qualified_name, m.signature, targets))
    return out


def generate_perturbed_corpus(
    index: ProjectIndex,
    n: int,
    seed: int,
    *,
    dest: str | Path | None = None,
    instance_only: bool = False,
) -> tuple[ProjectIndex, list[GoldTriplet]]:
    """Copy the project, move n methods to random feasible targets, and
    return the mutated copy's index plus the gold set of reverse moves.

    Each move is committed only when the reverse direction stays feasible
    afterwards; otherwise the files are restored and another candidate is
    drawn. Same seed, same corpus.
    """
    if dest is None:
        dest = tempfile.mkdtemp(prefix="perturbed-")
    roots = _copy_roots(list(index.source_roots), Path(dest))
    idx = build_index(roots)
    rng = random.Random(seed)

    gold: list[GoldTriplet] = []
    moved: set[tuple[str, str]] = set()
    rejected: set[tuple[str, str, str]] = set()

    while len(gold) < n:
        candidates = _candidate_methods(idx, moved, rejected, instance_only)
        if not candidates:
            raise InsufficientCandidates(
                f"only {len(gold)} of {n} perturbations were feasible"
            )
        host_q, sig, targets = candidates[rng.randrange(len(candidates))]
        target_q = targets[rng.randrange(len(targets))]
        host = idx.lookup(host_q)
        m = host.method(sig)

        try:
            plan = executor.plan_move(idx, m, host, target_q)
        except (PlanConflict, InfeasibleMove, StaleIndex):
            rejected.add((host_q, sig, target_q))
            continue
        originals = {p: Path(p).read_bytes() for p in plan.file_hashes}
        try:
            result = executor.apply(idx, plan)
        except (PlanConflict, ReparseFailed, StaleIndex):
            rejected.add((host_q, sig, target_q))
            continue

        new_idx = result.index
        t_cls = new_idx.lookup(target_q)
        moved_m = t_cls.method(plan.new_signature) if t_cls else None
        back_ok = (
            moved_m is not None
            and filters.check_feasibility(new_idx, moved_m, t_cls, host_q).feasible
        )
        if not back_ok:
            for path, data in originals.items():
                Path(path).write_bytes(data)
            idx = build_index(roots)
            rejected.add((host_q, sig, target_q))
            continue

        idx = new_idx
        moved.add((host_q, sig))
        moved.add((target_q, plan.new_signature))
        gold.append(
            GoldTriplet(
                method=plan.new_signature,
                host=target_q,
                target=host_q,
                is_static=m.is_static,
            )
        )
    return idx, gold
