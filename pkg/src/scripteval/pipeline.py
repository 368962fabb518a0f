"""End-to-end evaluation: one video, a corpus, or a reward score.

A video evaluation validates both documents, resolves the character mapping
once, then runs the event-level and scene-level passes.  Corpus runs fan out
over a thread pool and rebuild exact global totals from the per-video sums.
The segmented reward replays the event pass inside fixed windows with
one-to-one alignment, reusing the global character mapping.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .characters import categorize_names, extract_inventory, resolve_mapping
from .config import EvalConfig
from .errors import ManifestError, SchemaError
from .fields import FieldAccumulator, GroupScore, LevelResult, evaluate_events, evaluate_scenes
from .reports import (
    CorpusReport,
    FieldReport,
    LevelReport,
    RewardReport,
    TemporalReport,
    VideoReport,
    WindowReward,
)
from .schema import ScriptDocument, flatten_events, load_script, validate_script
from .temporal import temporal_metrics


def overall_f1(accumulators: dict[str, FieldAccumulator],
               pooled: bool = False) -> float:
    """Level summary: mean of the field F1s, or the F1 of the pooled sums."""
    if pooled:
        merged = FieldAccumulator()
        for acc in accumulators.values():
            merged.merge(acc)
        return merged.f1
    if not accumulators:
        return 0.0
    return sum(acc.f1 for acc in accumulators.values()) / len(accumulators)


def _level_report(level: LevelResult, config: EvalConfig) -> LevelReport:
    fields = {
        name: FieldReport(acc.precision, acc.recall, acc.f1,
                          acc.s_total, acc.n_gt_total, acc.n_pred_total)
        for name, acc in level.accumulators.items()
    }
    temporal = [
        TemporalReport(m.threshold, m.hits, m.total_gt, m.total_pred,
                       m.p_time, m.r_time, m.f1)
        for m in temporal_metrics(level, config.tiou_thresholds)
    ]
    return LevelReport(fields, overall_f1(level.accumulators, config.overall_pooled),
                       temporal, level.n_gt_units, level.n_pred_units,
                       len(level.groups))


def _check_valid(doc: ScriptDocument, side: str) -> list[str]:
    """Raise on validation errors; return warnings as plain strings."""
    errors: list[str] = []
    warnings: list[str] = []
    for violation in validate_script(doc):
        text = f"{side}: {violation.message}"
        (errors if violation.severity == "error" else warnings).append(text)
    if errors:
        raise SchemaError(f"{side} script failed validation", errors)
    return warnings


def _group_dict(group: GroupScore) -> dict:
    return {
        "gt_span": list(group.gt_span),
        "pred_span": list(group.pred_span),
        "gt_interval": list(group.gt_interval),
        "pred_interval": list(group.pred_interval),
        "align_score": group.align_score,
        "fields": {
            name: {"score": s, "n_gt": n_gt, "n_pred": n_pred}
            for name, (s, n_gt, n_pred) in group.fields.items()
        },
    }


def evaluate_video(video_id: str, gt_doc: ScriptDocument,
                   pred_doc: ScriptDocument, judge,
                   config: EvalConfig | None = None,
                   collect_details: bool = False) -> VideoReport:
    config = config or EvalConfig()
    warnings = _check_valid(gt_doc, "gt") + _check_valid(pred_doc, "pred")

    gt_events = [fe.event for fe in flatten_events(gt_doc)]
    pred_events = [fe.event for fe in flatten_events(pred_doc)]

    gt_inv = extract_inventory(gt_events)
    pred_inv = extract_inventory(pred_events)
    categorization = categorize_names(gt_inv, pred_inv, judge)
    mapping = resolve_mapping(gt_inv, pred_inv, categorization,
                              threshold=config.fallback_threshold)

    fallbacks_before = getattr(judge, "fallback_count", 0)
    event_level = evaluate_events(gt_events, pred_events, mapping, judge, config)
    scene_level = evaluate_scenes(gt_doc.scenes, pred_doc.scenes, judge, config)

    diagnostics = {
        "warnings": warnings,
        "mapping_source": categorization.source,
        "character_mapping": dict(mapping.mapping),
        "unmapped_pred": list(mapping.unmapped_pred),
        "unmapped_gt": list(mapping.unmapped_gt),
        "judge_fallbacks": getattr(judge, "fallback_count", 0) - fallbacks_before,
    }
    if collect_details:
        diagnostics["event_groups"] = [_group_dict(g) for g in event_level.groups]
        diagnostics["scene_groups"] = [_group_dict(g) for g in scene_level.groups]
        diagnostics["unaligned_gt_events"] = list(event_level.alignment.unaligned_gt)
        diagnostics["unaligned_pred_events"] = list(event_level.alignment.unaligned_pred)

    return VideoReport(video_id, getattr(judge, "name", "unknown"),
                       _level_report(event_level, config),
                       _level_report(scene_level, config),
                       diagnostics)


def evaluate_files(video_id: str, gt_path: str, pred_path: str, judge,
                   config: EvalConfig | None = None,
                   collect_details: bool = False) -> VideoReport:
    return evaluate_video(video_id, load_script(gt_path), load_script(pred_path),
                          judge, config, collect_details)


# ---------------------------------------------------------------------------
# Corpus runs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ManifestEntry:
    video_id: str
    gt_path: str
    pred_path: str


def read_manifest(path: str) -> list[ManifestEntry]:
    """Manifest rows from .csv (header video_id,gt,pred) or .jsonl.

    Every problem is collected before failing so one pass reports them all.
    Relative paths resolve against the manifest's directory.
    """
    base = os.path.dirname(os.path.abspath(path))
    rows: list[dict] = []
    problems: list[str] = []
    try:
        if path.endswith(".csv"):
            with open(path, encoding="utf-8", newline="") as fh:
                reader = csv.DictReader(fh)
                header = set(reader.fieldnames or [])
                if not {"video_id", "gt", "pred"} <= header:
                    raise ManifestError(
                        f"{path}: manifest header must name video_id, gt, pred"
                    )
                rows = list(reader)
        elif path.endswith(".jsonl"):
            with open(path, encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, 1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rows.append(json.loads(line))
                    except json.JSONDecodeError as exc:
                        problems.append(f"line {line_no}: invalid JSON ({exc})")
        else:
            raise ManifestError(f"{path}: manifest must be a .csv or .jsonl file")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc

    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for i, row in enumerate(rows, 1):
        video_id = str(row.get("video_id") or "").strip()
        gt = str(row.get("gt") or "").strip()
        pred = str(row.get("pred") or "").strip()
        if not (video_id and gt and pred):
            problems.append(f"row {i}: needs video_id, gt and pred")
            continue
        if video_id in seen:
            problems.append(f"row {i}: duplicate video_id {video_id!r}")
            continue
        seen.add(video_id)
        gt_path = gt if os.path.isabs(gt) else os.path.join(base, gt)
        pred_path = pred if os.path.isabs(pred) else os.path.join(base, pred)
        for label, p in (("gt", gt_path), ("pred", pred_path)):
            if not os.path.isfile(p):
                problems.append(f"row {i} ({video_id}): {label} file missing: {p}")
        entries.append(ManifestEntry(video_id, gt_path, pred_path))
    if problems:
        raise ManifestError(f"manifest {path} has problems", problems)
    if not entries:
        raise ManifestError(f"manifest {path} lists no videos")
    return entries


def _merge_level_reports(levels: list[LevelReport], field_names,
                         config: EvalConfig) -> LevelReport:
    merged = {name: FieldAccumulator() for name in field_names}
    for level in levels:
        for name, fr in level.fields.items():
            merged[name].merge(FieldAccumulator(fr.s_total, fr.n_gt, fr.n_pred))
    fields = {
        name: FieldReport(acc.precision, acc.recall, acc.f1,
                          acc.s_total, acc.n_gt_total, acc.n_pred_total)
        for name, acc in merged.items()
    }
    temporal = []
    for t in config.tiou_thresholds:
        hits = total_gt = total_pred = 0
        for level in levels:
            for tr in level.temporal:
                if tr.threshold == t:
                    hits += tr.hits
                    total_gt += tr.total_gt
                    total_pred += tr.total_pred
        p = hits / total_pred if total_pred else 0.0
        r = hits / total_gt if total_gt else 0.0
        f1 = 2.0 * p * r / (p + r) if p + r > 0.0 else 0.0
        temporal.append(TemporalReport(t, hits, total_gt, total_pred, p, r, f1))
    return LevelReport(fields, overall_f1(merged, config.overall_pooled),
                       temporal,
                       sum(l.n_gt_units for l in levels),
                       sum(l.n_pred_units for l in levels),
                       sum(l.n_groups for l in levels))


def evaluate_corpus(entries: list[ManifestEntry], judge,
                    config: EvalConfig | None = None) -> CorpusReport:
    config = config or EvalConfig()

    def run(entry: ManifestEntry) -> VideoReport:
        return evaluate_files(entry.video_id, entry.gt_path, entry.pred_path,
                              judge, config)

    workers = max(1, config.workers)
    if workers > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            videos = list(pool.map(run, entries))
    else:
        videos = [run(e) for e in entries]
    videos.sort(key=lambda v: v.video_id)

    from .fields import EVENT_FIELDS, SCENE_FIELDS

    events = _merge_level_reports([v.events for v in videos], EVENT_FIELDS, config)
    scenes = _merge_level_reports([v.scenes for v in videos], SCENE_FIELDS, config)
    diagnostics = {
        "videos": len(videos),
        "judge_fallbacks": getattr(judge, "fallback_count", 0),
    }
    return CorpusReport(getattr(judge, "name", "unknown"), videos,
                        events, scenes, diagnostics)


# ---------------------------------------------------------------------------
# Segmented reward
# ---------------------------------------------------------------------------

def segmented_reward(gt_doc: ScriptDocument, pred_doc: ScriptDocument, judge,
                     config: EvalConfig | None = None) -> RewardReport:
    """Window-by-window score in [0, 1] for reinforcement-style feedback.

    Events bucket into fixed windows by start time; each window runs the
    event pass with one-to-one alignment and scores the mean F1 of the
    fields present.  Window rewards combine weighted by ground-truth event
    count, so inventing events in empty windows earns nothing and average
    quality over the real script is what counts.
    """
    config = config or EvalConfig()
    judge_name = getattr(judge, "name", "unknown")
    gt_events = [fe.event for fe in flatten_events(gt_doc)]
    pred_events = [fe.event for fe in flatten_events(pred_doc)]
    if not gt_events and not pred_events:
        return RewardReport(1.0, judge_name, [])

    # the character mapping is global: window slicing must not change who
    # maps to whom
    gt_inv = extract_inventory(gt_events)
    pred_inv = extract_inventory(pred_events)
    categorization = categorize_names(gt_inv, pred_inv, judge)
    mapping = resolve_mapping(gt_inv, pred_inv, categorization,
                              threshold=config.fallback_threshold)

    width = config.reward_window
    params = config.reward_align_params()
    buckets: dict[int, tuple[list, list]] = {}
    for event in gt_events:
        buckets.setdefault(int(event.interval.start // width), ([], []))[0].append(event)
    for event in pred_events:
        buckets.setdefault(int(event.interval.start // width), ([], []))[1].append(event)

    windows: list[WindowReward] = []
    weighted = 0.0
    weight_total = 0
    for index in sorted(buckets):
        gt_w, pred_w = buckets[index]
        level = evaluate_events(gt_w, pred_w, mapping, judge, config,
                                align_params=params)
        available = [acc.f1 for acc in level.accumulators.values()
                     if acc.n_gt_total + acc.n_pred_total > 0]
        reward = sum(available) / len(available) if available else 0.0
        weight = len(gt_w)
        weighted += reward * weight
        weight_total += weight
        windows.append(WindowReward(index, index * width, (index + 1) * width,
                                    reward, weight, len(gt_w), len(pred_w)))
    total = weighted / weight_total if weight_total else 0.0
    return RewardReport(total, judge_name, windows)
