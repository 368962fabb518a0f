"""Field scoring over aligned windows.

Each aligned window merges into one group per side: the interval becomes the
hull and same-speaker texts concatenate in time order, so one (speaker,
field) cell is one scoring item.  Items are matched greedily per field and
the scores feed three running totals:

  precision  = sum of item scores / predicted items inside aligned groups
  recall     = sum of item scores / every ground-truth item, aligned or not
  f1         = harmonic mean

Character items compare exactly after the character mapping is applied,
dialogue uses edit-distance similarity, scene type and time use the synonym
table, and the remaining descriptive fields go to the judge.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

from .alignment import align, event_items, scene_items
from .config import EvalConfig
from .judge import JudgeRequest, judge_many
from .similarity import fold_text, normalized_similarity
from .synonyms import categorical_match

EVENT_FIELDS = ("character", "dialogue", "action", "expression", "audio_cue")
SCENE_FIELDS = ("scene_location", "scene_type", "scene_environment",
                "scene_time", "scene_mood")

JUDGE_SCORED = frozenset({
    "action", "expression", "audio_cue",
    "scene_location", "scene_environment", "scene_mood",
})
CATEGORICAL_SCORED = frozenset({"scene_type", "scene_time"})

_SCENE_ATTRS = {
    "scene_location": "location",
    "scene_type": "scene_type",
    "scene_environment": "environment",
    "scene_time": "time_of_day",
    "scene_mood": "mood",
}


@dataclass
class MergedSide:
    """One side of a merged group: interval hull plus per-field items."""
    interval: tuple[float, float]
    items: dict[str, list[tuple[str, str]]]  # field -> [(speaker key, text)]


def merge_event_side(events: list) -> MergedSide:
    interval = (min(e.interval.start for e in events),
                max(e.interval.end for e in events))
    items: dict[str, list[tuple[str, str]]] = {}
    for name in ("dialogue", "action", "expression", "audio_cue"):
        texts: dict[str, list[str]] = {}
        for event in events:
            value = event.content(name)
            if value:
                texts.setdefault(event.character, []).append(value)
        items[name] = [(who, " ".join(parts)) for who, parts in texts.items()]
    speakers = list(dict.fromkeys(e.character for e in events))
    items["character"] = [(who, who) for who in speakers]
    return MergedSide(interval, items)


def merge_scene_side(scenes: list) -> MergedSide:
    spans = [s.span for s in scenes]
    interval = (min(sp.start for sp in spans), max(sp.end for sp in spans))
    items: dict[str, list[tuple[str, str]]] = {f: [] for f in SCENE_FIELDS}
    for scene in scenes:
        key = str(scene.scene_id)
        for field_kind, attr in _SCENE_ATTRS.items():
            value = (getattr(scene, attr) or "").strip()
            if value:
                items[field_kind].append((key, value))
    return MergedSide(interval, items)


@dataclass
class FieldAccumulator:
    """Running numerator and the two denominators for one field."""
    s_total: float = 0.0
    n_gt_total: int = 0
    n_pred_total: int = 0

    def add(self, score: float, n_gt: int, n_pred: int) -> None:
        self.s_total += score
        self.n_gt_total += n_gt
        self.n_pred_total += n_pred

    def add_gt_only(self, n_gt: int) -> None:
        self.n_gt_total += n_gt

    def add_pred_only(self, n_pred: int) -> None:
        self.n_pred_total += n_pred

    def merge(self, other: FieldAccumulator) -> None:
        self.s_total += other.s_total
        self.n_gt_total += other.n_gt_total
        self.n_pred_total += other.n_pred_total

    @property
    def precision(self) -> float:
        return self.s_total / self.n_pred_total if self.n_pred_total else 0.0

    @property
    def recall(self) -> float:
        return self.s_total / self.n_gt_total if self.n_gt_total else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2.0 * p * r / (p + r) if p + r > 0.0 else 0.0


@dataclass
class GroupScore:
    """One aligned window after merging and field scoring."""
    gt_span: tuple[int, int]
    pred_span: tuple[int, int]
    gt_interval: tuple[float, float]
    pred_interval: tuple[float, float]
    align_score: float
    fields: dict[str, tuple[float, int, int]]  # field -> (score, n_gt, n_pred)


@dataclass
class LevelResult:
    """Everything one evaluation level produces: per-field totals, the scored
    groups, the raw alignment, and unit counts including unaligned units."""
    accumulators: dict[str, FieldAccumulator]
    groups: list[GroupScore] = dataclass_field(default_factory=list)
    alignment: object = None
    n_gt_units: int = 0
    n_pred_units: int = 0


def greedy_match(matrix: list[list[float]]) -> tuple[float, list[tuple[int, int, float]]]:
    """One-to-one matching, best similarity first; ties resolve by index."""
    pairs = [
        (matrix[gi][pi], gi, pi)
        for gi in range(len(matrix))
        for pi in range(len(matrix[gi]))
    ]
    pairs.sort(key=lambda t: (-t[0], t[1], t[2]))
    used_gt: set[int] = set()
    used_pred: set[int] = set()
    total = 0.0
    chosen: list[tuple[int, int, float]] = []
    for sim, gi, pi in pairs:
        if sim <= 0.0:
            break
        if gi in used_gt or pi in used_pred:
            continue
        used_gt.add(gi)
        used_pred.add(pi)
        total += sim
        chosen.append((gi, pi, sim))
    return total, chosen


def _local_similarity(field_kind: str, gt_text: str, pred_text: str,
                      mapping, case_fold: bool) -> float:
    if field_kind == "character":
        projected = mapping.project(pred_text) if mapping is not None else pred_text
        return 1.0 if fold_text(projected) == fold_text(gt_text) else 0.0
    if field_kind == "dialogue":
        return normalized_similarity(gt_text, pred_text, case_fold=case_fold)
    if field_kind in CATEGORICAL_SCORED:
        return categorical_match(field_kind, gt_text, pred_text)
    raise ValueError(f"no local scorer for field {field_kind!r}")


def _score_level(gt_units: list, pred_units: list, alignment, merge_side,
                 field_list: tuple[str, ...], mapping, judge,
                 config: EvalConfig) -> LevelResult:
    accumulators = {f: FieldAccumulator() for f in field_list}
    pending: list[tuple] = []
    requests: list[JudgeRequest] = []
    slots: list[tuple[int, str, int, int]] = []

    for cand in alignment.aligned:
        gt_side = merge_side(gt_units[cand.gt_span[0]:cand.gt_span[1]])
        pred_side = merge_side(pred_units[cand.pred_span[0]:cand.pred_span[1]])
        matrices: dict[str, list[list[float]]] = {}
        for field_kind in field_list:
            g_items = gt_side.items[field_kind]
            p_items = pred_side.items[field_kind]
            matrix = [[0.0] * len(p_items) for _ in g_items]
            if field_kind in JUDGE_SCORED:
                for gi, (_, g_text) in enumerate(g_items):
                    for pi, (_, p_text) in enumerate(p_items):
                        slots.append((len(pending), field_kind, gi, pi))
                        requests.append(JudgeRequest(field_kind, g_text, p_text))
            else:
                for gi, (_, g_text) in enumerate(g_items):
                    for pi, (_, p_text) in enumerate(p_items):
                        matrix[gi][pi] = _local_similarity(
                            field_kind, g_text, p_text, mapping, config.case_fold
                        )
            matrices[field_kind] = matrix
        pending.append((cand, gt_side, pred_side, matrices))

    # one batched judge pass over every pair in every group
    if requests:
        verdicts = judge_many(judge, requests)
        for (group_idx, field_kind, gi, pi), verdict in zip(slots, verdicts):
            pending[group_idx][3][field_kind][gi][pi] = verdict.similarity

    groups: list[GroupScore] = []
    for cand, gt_side, pred_side, matrices in pending:
        field_scores: dict[str, tuple[float, int, int]] = {}
        for field_kind in field_list:
            n_gt = len(gt_side.items[field_kind])
            n_pred = len(pred_side.items[field_kind])
            score, _ = greedy_match(matrices[field_kind])
            accumulators[field_kind].add(score, n_gt, n_pred)
            field_scores[field_kind] = (score, n_gt, n_pred)
        groups.append(GroupScore(
            cand.gt_span, cand.pred_span,
            gt_side.interval, pred_side.interval,
            cand.score, field_scores,
        ))

    # misses: every item of an unaligned ground-truth unit stays in the
    # recall denominator
    for i in alignment.unaligned_gt:
        side = merge_side(gt_units[i:i + 1])
        for field_kind in field_list:
            accumulators[field_kind].add_gt_only(len(side.items[field_kind]))
    # hallucinations only lower precision when explicitly requested
    if config.count_unaligned_pred_items:
        for j in alignment.unaligned_pred:
            side = merge_side(pred_units[j:j + 1])
            for field_kind in field_list:
                accumulators[field_kind].add_pred_only(len(side.items[field_kind]))

    return LevelResult(accumulators, groups, alignment,
                       len(gt_units), len(pred_units))


def evaluate_events(gt_events: list, pred_events: list, mapping, judge,
                    config: EvalConfig | None = None,
                    align_params=None) -> LevelResult:
    """Stage the event-level fields: align, merge, score, accumulate."""
    config = config or EvalConfig()
    params = align_params or config.event_align_params()
    alignment = align(event_items(gt_events), event_items(pred_events), params)
    return _score_level(gt_events, pred_events, alignment, merge_event_side,
                        EVENT_FIELDS, mapping, judge, config)


def evaluate_scenes(gt_scenes: list, pred_scenes: list, judge,
                    config: EvalConfig | None = None) -> LevelResult:
    """Scene-level pass: one item per scene per populated field."""
    config = config or EvalConfig()
    alignment = align(scene_items(gt_scenes), scene_items(pred_scenes),
                      config.scene_align_params())
    return _score_level(gt_scenes, pred_scenes, alignment, merge_scene_side,
                        SCENE_FIELDS, None, judge, config)
