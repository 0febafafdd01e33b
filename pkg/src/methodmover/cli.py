"""Command-line entry points.

Exit codes: 0 success, 1 pipeline/domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import evaluation, executor, model, pipeline
from .embeddings import LocalEmbedder, RemoteEmbedder
from .errors import MethodMoverError
from .llm import HttpChatProvider, SimilarityOracleProvider

DEFAULT_RUN_DIR = ".methodmover/runs"


def _add_common(p: argparse.ArgumentParser, roots_required: bool = True) -> None:
    p.add_argument(
        "--roots",
        nargs="+",
        required=roots_required,
        help="Java source roots to index",
    )
    p.add_argument("--config", help="JSON file with pipeline settings")
    p.add_argument(
        "--mock-llm",
        action="store_true",
        help="use the deterministic similarity-oracle chat mock instead of the HTTP provider",
    )
    p.add_argument(
        "--local-embeddings",
        action="store_true",
        help="use the built-in hashed-token embedder instead of the HTTP provider",
    )
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--run-dir", default=DEFAULT_RUN_DIR, help="run artifact directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="methodmover",
        description="Recommend and execute MoveMethod refactorings on Java source",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="parse a project and save its index")
    p_index.add_argument("--roots", nargs="+", required=True)
    p_index.add_argument("--out", default="methodmover-index.json")
    p_index.add_argument("--json", action="store_true")

    p_rec = sub.add_parser("recommend", help="recommend moves out of one class")
    p_rec.add_argument("host", help="qualified class name")
    _add_common(p_rec)
    p_rec.add_argument("--critique", action="store_true", help="second-pass self-critique")

    p_apply = sub.add_parser("apply", help="apply a stored recommendation")
    p_apply.add_argument("run_id")
    p_apply.add_argument("n", type=int, help="recommendation index, 0-based")
    p_apply.add_argument("--run-dir", default=DEFAULT_RUN_DIR)
    p_apply.add_argument("--roots", nargs="+", required=True)
    p_apply.add_argument("--json", action="store_true")

    p_eval = sub.add_parser("eval", help="score recommendations against a gold set")
    p_eval.add_argument("--gold", required=True, help="gold triplets, one JSON per line")
    _add_common(p_eval)
    p_eval.add_argument("--name-only", action="store_true", help="match method names, not signatures")
    p_eval.add_argument("--workers", type=int, default=4)

    p_pert = sub.add_parser("perturb", help="build a synthetic corpus by moving methods out")
    p_pert.add_argument("--roots", nargs="+", required=True)
    p_pert.add_argument("-n", "--moves", type=int, default=30)
    p_pert.add_argument("--seed", type=int, default=0)
    p_pert.add_argument("--dest", required=True, help="directory for the mutated copy")
    p_pert.add_argument("--gold-out", required=True, help="where to write the gold set")
    p_pert.add_argument("--instance-only", action="store_true")
    p_pert.add_argument("--json", action="store_true")

    p_serve = sub.add_parser("serve", help="run the review service")
    _add_common(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--frontend", help="built dashboard assets to serve at /")

    return parser


def _providers(args):
    embedder = LocalEmbedder() if args.local_embeddings else RemoteEmbedder()
    chat = SimilarityOracleProvider() if args.mock_llm else HttpChatProvider()
    return embedder, chat


def _config(args) -> pipeline.PipelineConfig:
    if getattr(args, "config", None):
        cfg = pipeline.PipelineConfig.from_file(args.config)
    else:
        cfg = pipeline.PipelineConfig()
    if getattr(args, "critique", False):
        cfg.critique_enabled = True
    return cfg


def _cmd_index(args) -> int:
    index = model.build_index(args.roots)
    model.save_index(index, args.out)
    if args.json:
        print(json.dumps({"classes": len(index.classes), "out": args.out}, sort_keys=True))
    else:
        print(f"indexed {len(index.classes)} classes -> {args.out}")
    return 0


def _cmd_recommend(args) -> int:
    index = model.build_index(args.roots)
    embedder, chat = _providers(args)
    result = pipeline.run_recommend(_config(args), index, args.host, embedder, chat)
    run_id = pipeline.RunStore(args.run_dir).save(result, _config(args))
    print(f"run {run_id}", file=sys.stderr)
    if args.json:
        sys.stdout.write(pipeline.recommendations_json(result))
        return 0
    if not result.recommendations:
        print(f"{result.host}: no move recommended")
        return 0
    for r in result.recommendations:
        print(f"{r.rank}. move {r.method} -> {r.target}  [{r.route}]")
        if r.rationale:
            print(f"   {r.rationale}")
    return 0


def _cmd_apply(args) -> int:
    store = pipeline.RunStore(args.run_dir)
    plan = store.load_plan(args.run_id, args.n)
    index = model.build_index(args.roots)
    result = executor.apply(index, plan)
    store.set_verdict(args.run_id, args.n, applied=True)
    if args.json:
        print(json.dumps(result.to_doc(), sort_keys=True))
    else:
        print(
            f"moved {plan.method}: {plan.host} -> {plan.target}; "
            f"{len(result.files_changed)} files changed, "
            f"{result.call_sites_rewritten} call sites rewritten"
        )
    return 0


def _eval_table(by_k: dict[int, evaluation.EvalResult]) -> str:
    lines = [f"{'k':<3} {'Recall_M':>9} {'Recall_C':>9} {'Recall_MC':>10}"]
    for k in sorted(by_k):
        r = by_k[k]
        lines.append(
            f"{k:<3} {r.recall_m:>9.3f} {r.recall_c:>9.3f} {r.recall_mc:>10.3f}"
        )
    sample = by_k[min(by_k)]
    for label in sorted(sample.strata):
        lines.append(f"-- {label} --")
        for k in sorted(by_k):
            s = by_k[k].strata[label]
            lines.append(
                f"{k:<3} {s.recall_m:>9.3f} {s.recall_c:>9.3f} {s.recall_mc:>10.3f}"
                f"   (|G|={s.gold_size})"
            )
    return "\n".join(lines)


def _cmd_eval(args) -> int:
    gold = evaluation.load_gold(args.gold)
    index = model.build_index(args.roots)
    embedder, chat = _providers(args)
    cfg = _config(args)

    hosts = sorted({g.host for g in gold})

    def run_one(host: str) -> tuple[str, list[tuple[str, str]]]:
        recs = pipeline.recommend(cfg, index, host, embedder, chat)
        return host, [(r.method, r.target) for r in recs]

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        runs = dict(pool.map(run_one, hosts))

    strata = pipeline.strata_map(index)
    by_k = evaluation.evaluate(
        gold, runs, ks=(1, 2, 3), name_only=args.name_only, strata=strata
    )
    if args.json:
        print(json.dumps({k: r.to_doc() for k, r in by_k.items()}, sort_keys=True))
    else:
        print(_eval_table(by_k))
    return 0


def _cmd_perturb(args) -> int:
    index = model.build_index(args.roots)
    mutated, gold = evaluation.generate_perturbed_corpus(
        index,
        args.moves,
        args.seed,
        dest=args.dest,
        instance_only=args.instance_only,
    )
    evaluation.save_gold(gold, args.gold_out)
    if args.json:
        print(
            json.dumps(
                {
                    "moves": len(gold),
                    "dest": args.dest,
                    "gold": args.gold_out,
                    "roots": list(mutated.source_roots),
                },
                sort_keys=True,
            )
        )
    else:
        print(f"perturbed {len(gold)} methods into {args.dest}; gold -> {args.gold_out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    embedder, chat = _providers(args)
    app = create_app(
        args.roots,
        args.run_dir,
        config=_config(args),
        embedder=embedder,
        chat=chat,
        frontend_dist=args.frontend,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


_COMMANDS = {
    "index": _cmd_index,
    "recommend": _cmd_recommend,
    "apply": _cmd_apply,
    "eval": _cmd_eval,
    "perturb": _cmd_perturb,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except MethodMoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
