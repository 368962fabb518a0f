"""Command line interface.

Exit codes: 0 success, 1 bad input (files, config, judge), 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback

from . import __version__
from .config import EvalConfig, load_config
from .errors import JudgeUnavailable, ScriptEvalError
from .judge import JudgeCache, LexicalJudge, RemoteJudge
from .pipeline import (
    evaluate_corpus,
    evaluate_files,
    read_manifest,
    segmented_reward,
)
from .reports import emit_json, emit_report
from .schema import load_script, validate_script

_DETAIL_KEYS = ("event_groups", "scene_groups",
                "unaligned_gt_events", "unaligned_pred_events")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scripteval",
        description="Evaluate predicted video scripts against references.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser(
        "validate", help="parse scripts and report schema violations")
    p_validate.add_argument("files", nargs="+", help="script JSON files")

    def add_common(p, judge=True):
        p.add_argument("--config", help="TOML config file")
        if judge:
            p.add_argument("--judge", choices=("lexical", "remote"),
                           default="lexical",
                           help="judge backend (default: lexical, fully offline)")
        p.add_argument("--out", help="write the report here instead of stdout")

    p_eval = sub.add_parser("eval", help="evaluate one prediction")
    p_eval.add_argument("--gt", required=True, help="reference script")
    p_eval.add_argument("--pred", required=True, help="predicted script")
    p_eval.add_argument("--video-id", default=None,
                        help="label for the report (default: gt file stem)")
    p_eval.add_argument("--format", choices=("json", "markdown", "csv"),
                        default="json")
    p_eval.add_argument("--dump-alignment", action="store_true",
                        help="write merged group details to stderr as JSON")
    add_common(p_eval)

    p_corpus = sub.add_parser("corpus", help="evaluate a manifest of videos")
    p_corpus.add_argument("--manifest", required=True,
                          help=".csv (video_id,gt,pred) or .jsonl manifest")
    p_corpus.add_argument("--workers", type=int, default=None,
                          help="parallel video evaluations")
    p_corpus.add_argument("--format", choices=("json", "markdown", "csv"),
                          default="json")
    add_common(p_corpus)

    p_reward = sub.add_parser(
        "reward", help="segmented reward in [0, 1] for one prediction")
    p_reward.add_argument("--gt", required=True)
    p_reward.add_argument("--pred", required=True)
    add_common(p_reward)

    p_cache = sub.add_parser("cache", help="inspect the judge verdict cache")
    p_cache.add_argument("action", choices=("stats", "clear"))
    p_cache.add_argument("--config", help="TOML config file")
    return parser


def _load_config(args) -> EvalConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return EvalConfig()


def _build_judge(args, config: EvalConfig):
    if getattr(args, "judge", "lexical") == "lexical":
        return LexicalJudge()
    judge_config = config.judge
    judge_config.endpoint = os.environ.get("SCRIPTEVAL_ENDPOINT",
                                           judge_config.endpoint)
    judge_config.model = os.environ.get("SCRIPTEVAL_MODEL", judge_config.model)
    if not judge_config.endpoint or not judge_config.model:
        raise JudgeUnavailable(
            "remote judge needs judge.endpoint and judge.model in the config "
            "file, or SCRIPTEVAL_ENDPOINT and SCRIPTEVAL_MODEL in the "
            "environment"
        )
    return RemoteJudge(judge_config)


def _write(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    failed = False
    for path in args.files:
        try:
            doc = load_script(path)
        except ScriptEvalError as exc:
            print(f"{path}: FAIL\n  {exc}")
            failed = True
            continue
        violations = validate_script(doc)
        errors = [v for v in violations if v.severity == "error"]
        for v in violations:
            print(f"{path}: {v.severity}: {v.message}")
        if errors:
            failed = True
        else:
            n_events = sum(len(s.events) for s in doc.scenes)
            print(f"{path}: ok ({len(doc.scenes)} scenes, {n_events} events)")
    return 1 if failed else 0


def cmd_eval(args) -> int:
    config = _load_config(args)
    judge = _build_judge(args, config)
    video_id = args.video_id or os.path.splitext(os.path.basename(args.gt))[0]
    report = evaluate_files(video_id, args.gt, args.pred, judge, config,
                            collect_details=args.dump_alignment)
    if args.dump_alignment:
        details = {k: report.diagnostics.pop(k)
                   for k in _DETAIL_KEYS if k in report.diagnostics}
        sys.stderr.write(json.dumps(details, ensure_ascii=False, indent=2) + "\n")
    _write(emit_report(report, args.format), args.out)
    return 0


def cmd_corpus(args) -> int:
    config = _load_config(args)
    if args.workers is not None:
        config.workers = args.workers
    judge = _build_judge(args, config)
    entries = read_manifest(args.manifest)
    report = evaluate_corpus(entries, judge, config)
    _write(emit_report(report, args.format), args.out)
    return 0


def cmd_reward(args) -> int:
    config = _load_config(args)
    judge = _build_judge(args, config)
    report = segmented_reward(load_script(args.gt), load_script(args.pred),
                              judge, config)
    _write(emit_json(report), args.out)
    return 0


def cmd_cache(args) -> int:
    config = _load_config(args)
    cache = JudgeCache(config.judge.cache_path)
    if args.action == "stats":
        print(json.dumps(cache.stats(), ensure_ascii=False))
    else:
        print(json.dumps({"cleared": cache.clear()}, ensure_ascii=False))
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "eval": cmd_eval,
    "corpus": cmd_corpus,
    "reward": cmd_reward,
    "cache": cmd_cache,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ScriptEvalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
