"""Report containers and emitters (json, markdown, csv).

Reports carry the raw sums next to every ratio so corpus totals can be
rebuilt exactly from per-video reports.  Emitters never include timestamps
or machine details; running the same evaluation twice yields byte-identical
output.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

EVENT_COLUMNS = ("character", "dialogue", "action", "expression", "audio_cue")
SCENE_COLUMNS = ("scene_location", "scene_type", "scene_environment",
                 "scene_time", "scene_mood")
EVENT_HEADERS = ("Char.", "Dia.", "Act.", "Exp.", "Aud.")
SCENE_HEADERS = ("Loc.", "Type", "Env.", "Time", "Mood")


@dataclass
class FieldReport:
    precision: float
    recall: float
    f1: float
    s_total: float
    n_gt: int
    n_pred: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
            "s_total": self.s_total, "n_gt": self.n_gt, "n_pred": self.n_pred,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "FieldReport":
        return cls(raw["precision"], raw["recall"], raw["f1"],
                   raw["s_total"], raw["n_gt"], raw["n_pred"])


@dataclass
class TemporalReport:
    threshold: float
    hits: int
    total_gt: int
    total_pred: int
    p_time: float
    r_time: float
    f1: float

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold, "hits": self.hits,
            "total_gt": self.total_gt, "total_pred": self.total_pred,
            "p_time": self.p_time, "r_time": self.r_time, "f1": self.f1,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "TemporalReport":
        return cls(raw["threshold"], raw["hits"], raw["total_gt"],
                   raw["total_pred"], raw["p_time"], raw["r_time"], raw["f1"])


@dataclass
class LevelReport:
    fields: dict[str, FieldReport]
    overall_f1: float
    temporal: list[TemporalReport]
    n_gt_units: int
    n_pred_units: int
    n_groups: int

    def to_dict(self) -> dict:
        return {
            "fields": {k: v.to_dict() for k, v in self.fields.items()},
            "overall_f1": self.overall_f1,
            "temporal": [t.to_dict() for t in self.temporal],
            "n_gt_units": self.n_gt_units,
            "n_pred_units": self.n_pred_units,
            "n_groups": self.n_groups,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "LevelReport":
        return cls(
            {k: FieldReport.from_dict(v) for k, v in raw["fields"].items()},
            raw["overall_f1"],
            [TemporalReport.from_dict(t) for t in raw["temporal"]],
            raw["n_gt_units"], raw["n_pred_units"], raw["n_groups"],
        )

    def tiou_f1(self, threshold: float) -> float | None:
        for t in self.temporal:
            if t.threshold == threshold:
                return t.f1
        return None


@dataclass
class VideoReport:
    video_id: str
    judge: str
    events: LevelReport
    scenes: LevelReport
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "judge": self.judge,
            "events": self.events.to_dict(),
            "scenes": self.scenes.to_dict(),
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "VideoReport":
        return cls(raw["video_id"], raw["judge"],
                   LevelReport.from_dict(raw["events"]),
                   LevelReport.from_dict(raw["scenes"]),
                   raw.get("diagnostics", {}))


@dataclass
class CorpusReport:
    judge: str
    videos: list[VideoReport]
    events: LevelReport
    scenes: LevelReport
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "judge": self.judge,
            "videos": [v.to_dict() for v in self.videos],
            "events": self.events.to_dict(),
            "scenes": self.scenes.to_dict(),
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "CorpusReport":
        return cls(raw["judge"],
                   [VideoReport.from_dict(v) for v in raw["videos"]],
                   LevelReport.from_dict(raw["events"]),
                   LevelReport.from_dict(raw["scenes"]),
                   raw.get("diagnostics", {}))


@dataclass
class WindowReward:
    index: int
    start: float
    end: float
    reward: float
    weight: int
    n_gt_events: int
    n_pred_events: int

    def to_dict(self) -> dict:
        return {
            "index": self.index, "start": self.start, "end": self.end,
            "reward": self.reward, "weight": self.weight,
            "n_gt_events": self.n_gt_events, "n_pred_events": self.n_pred_events,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "WindowReward":
        return cls(raw["index"], raw["start"], raw["end"], raw["reward"],
                   raw["weight"], raw["n_gt_events"], raw["n_pred_events"])


@dataclass
class RewardReport:
    reward: float
    judge: str
    windows: list[WindowReward] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "reward": self.reward,
            "judge": self.judge,
            "windows": [w.to_dict() for w in self.windows],
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "RewardReport":
        return cls(raw["reward"], raw["judge"],
                   [WindowReward.from_dict(w) for w in raw.get("windows", [])])


# ---------------------------------------------------------------------------
# Emitters
# ---------------------------------------------------------------------------

def _pct(value: float | None) -> str:
    return "-" if value is None else f"{100.0 * value:.1f}"


def _video_rows(report: CorpusReport | VideoReport) -> list[tuple[str, LevelReport, LevelReport]]:
    if isinstance(report, VideoReport):
        return [(report.video_id, report.events, report.scenes)]
    rows = [(v.video_id, v.events, v.scenes) for v in report.videos]
    rows.append(("all", report.events, report.scenes))
    return rows


def _markdown_table(rows, columns, headers) -> list[str]:
    thresholds = sorted({t.threshold for _, level in rows for t in level.temporal})
    head = ["Video", *headers, "Overall"] + [f"tIoU@{t:g}" for t in thresholds]
    lines = ["| " + " | ".join(head) + " |",
             "|" + "---|" * len(head)]
    for name, level in rows:
        cells = [name]
        for column in columns:
            fr = level.fields.get(column)
            cells.append(_pct(fr.f1 if fr else None))
        cells.append(_pct(level.overall_f1))
        cells += [_pct(level.tiou_f1(t)) for t in thresholds]
        lines.append("| " + " | ".join(cells) + " |")
    return lines


def emit_markdown(report: CorpusReport | VideoReport) -> str:
    rows = _video_rows(report)
    out = ["# Script evaluation", "", f"Judge: {report.judge}", ""]
    out.append("## Event fields (F1 x 100)")
    out.append("")
    out += _markdown_table([(n, ev) for n, ev, _ in rows],
                           EVENT_COLUMNS, EVENT_HEADERS)
    out.append("")
    out.append("## Scene fields (F1 x 100)")
    out.append("")
    out += _markdown_table([(n, sc) for n, _, sc in rows],
                           SCENE_COLUMNS, SCENE_HEADERS)
    out.append("")
    return "\n".join(out)


def emit_csv(report: CorpusReport | VideoReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["video_id", "level", "metric", "judge",
                     "precision", "recall", "f1"])
    for name, events, scenes in _video_rows(report):
        for level_name, level, columns in (("events", events, EVENT_COLUMNS),
                                            ("scenes", scenes, SCENE_COLUMNS)):
            for column in columns:
                fr = level.fields.get(column)
                if fr is None:
                    continue
                writer.writerow([name, level_name, column, report.judge,
                                 repr(fr.precision), repr(fr.recall), repr(fr.f1)])
            writer.writerow([name, level_name, "overall", report.judge,
                             "", "", repr(level.overall_f1)])
            for t in level.temporal:
                writer.writerow([name, level_name, f"tiou@{t.threshold:g}",
                                 report.judge, repr(t.p_time), repr(t.r_time),
                                 repr(t.f1)])
    return buf.getvalue()


def emit_json(report) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def emit_report(report, fmt: str = "json") -> str:
    if fmt == "json":
        return emit_json(report)
    if fmt == "markdown":
        return emit_markdown(report)
    if fmt == "csv":
        return emit_csv(report)
    raise ValueError(f"unknown report format {fmt!r}")
