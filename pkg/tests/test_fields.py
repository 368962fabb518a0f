"""Field evaluation: merging, greedy matching, accumulators, temporal sweep."""

from __future__ import annotations

import pytest

from scripteval.characters import MappingDictionary
from scripteval.config import EvalConfig
from scripteval.fields import (
    FieldAccumulator,
    evaluate_events,
    evaluate_scenes,
    greedy_match,
    merge_event_side,
    merge_scene_side,
)
from scripteval.judge import JudgeVerdict, LexicalJudge
from scripteval.schema import EventRecord, SceneRecord, TimeInterval
from scripteval.temporal import group_tious, temporal_metrics


def ev(start, end, character, **content) -> EventRecord:
    return EventRecord(TimeInterval(start, end), character, **content)


def identity_mapping(*names) -> MappingDictionary:
    return MappingDictionary({n: n for n in names}, [], [])


# ---------------------------------------------------------------------------
# Merging
# ---------------------------------------------------------------------------

def test_merge_event_side():
    side = merge_event_side([
        ev(0, 5, "Li Wei", dialogue="hello", action="waves"),
        ev(6, 9, "Li Wei", dialogue="again"),
        ev(7, 12, "nurse", action="nods"),
    ])
    assert side.interval == (0.0, 12.0)
    assert side.items["dialogue"] == [("Li Wei", "hello again")]
    assert side.items["action"] == [("Li Wei", "waves"), ("nurse", "nods")]
    assert side.items["expression"] == []
    assert side.items["character"] == [("Li Wei", "Li Wei"), ("nurse", "nurse")]


def test_merge_scene_side():
    s1 = SceneRecord(1, location="Office", scene_type="Interior",
                     time_of_day="Day", mood="tense",
                     events=[ev(0, 10, "Li Wei", dialogue="x")])
    s2 = SceneRecord(2, location="Street",
                     events=[ev(100, 120, "nurse", action="walks")])
    side = merge_scene_side([s1, s2])
    assert side.interval == (0.0, 120.0)
    assert side.items["scene_location"] == [("1", "Office"), ("2", "Street")]
    assert side.items["scene_type"] == [("1", "Interior")]
    assert side.items["scene_time"] == [("1", "Day")]
    assert side.items["scene_mood"] == [("1", "tense")]
    assert side.items["scene_environment"] == []


# ---------------------------------------------------------------------------
# Greedy matching
# ---------------------------------------------------------------------------

def test_greedy_match_picks_best_first():
    total, chosen = greedy_match([[1.0, 0.5], [0.75, 0.25]])
    assert total == 1.25
    assert chosen == [(0, 0, 1.0), (1, 1, 0.25)]


def test_greedy_match_is_greedy_not_optimal():
    # taking 0.6 first forfeits the 0.5 + 0.5 assignment; that is by design
    total, chosen = greedy_match([[0.6, 0.5], [0.5, 0.0]])
    assert total == 0.6
    assert chosen == [(0, 0, 0.6)]


def test_greedy_match_ties_resolve_by_index():
    _, chosen = greedy_match([[0.5, 0.5], [0.5, 0.5]])
    assert chosen == [(0, 0, 0.5), (1, 1, 0.5)]


def test_greedy_match_empty():
    assert greedy_match([]) == (0.0, [])
    assert greedy_match([[]]) == (0.0, [])


# ---------------------------------------------------------------------------
# Accumulator arithmetic
# ---------------------------------------------------------------------------

def test_accumulator_prf():
    acc = FieldAccumulator()
    assert acc.precision == 0.0 and acc.recall == 0.0 and acc.f1 == 0.0
    acc.add(2.0, 4, 2)
    acc.add(1.0, 1, 3)
    assert acc.precision == 3 / 5
    assert acc.recall == 3 / 5
    assert acc.f1 == 3 / 5

    pooled = FieldAccumulator()
    pooled.merge(acc)
    pooled.merge(FieldAccumulator(1.0, 5, 5))
    assert pooled.precision == 4 / 10 and pooled.recall == 4 / 10


# ---------------------------------------------------------------------------
# Event-level evaluation
# ---------------------------------------------------------------------------

GT_EVENTS = [
    ev(0, 5, "Li Wei", dialogue="hello there", action="waves hand"),
    ev(40, 45, "nurse", dialogue="take this medicine"),
    ev(200, 210, "Li Wei", dialogue="goodbye"),          # never predicted
]
PRED_EVENTS = [
    ev(1, 6, "Li Wei", dialogue="hello there", action="waves hand"),
    ev(41, 44, "nurse", dialogue="take this medicine"),
    ev(500, 501, "ghost", dialogue="boo"),               # hallucinated
]


def run_events(config=None, pred=PRED_EVENTS):
    mapping = identity_mapping("Li Wei", "nurse")
    return evaluate_events(GT_EVENTS, pred, mapping, LexicalJudge(), config)


def test_evaluate_events_frozen_totals():
    level = run_events()
    acc = level.accumulators

    for name in ("character", "dialogue"):
        assert acc[name].s_total == 2.0
        assert acc[name].n_gt_total == 3
        assert acc[name].n_pred_total == 2
        assert acc[name].precision == 1.0
        assert acc[name].recall == 2 / 3
        assert acc[name].f1 == pytest.approx(0.8, abs=1e-12)

    assert acc["action"].s_total == 1.0
    assert (acc["action"].n_gt_total, acc["action"].n_pred_total) == (1, 1)
    assert acc["action"].f1 == 1.0

    for name in ("expression", "audio_cue"):
        assert acc[name].s_total == 0.0
        assert acc[name].f1 == 0.0

    assert level.n_gt_units == 3 and level.n_pred_units == 3
    assert level.alignment.unaligned_gt == [2]
    assert level.alignment.unaligned_pred == [2]


def test_evaluate_events_counting_hallucinated_items():
    config = EvalConfig(count_unaligned_pred_items=True)
    acc = run_events(config).accumulators
    assert acc["dialogue"].n_pred_total == 3
    assert acc["dialogue"].precision == 2 / 3
    assert acc["character"].n_pred_total == 3


def test_evaluate_events_temporal_sweep():
    level = run_events()
    tious = group_tious(level)
    assert tious == [pytest.approx(4 / 6), pytest.approx(3 / 5)]
    metrics = temporal_metrics(level, (0.1, 0.3, 0.5))
    for m in metrics:
        assert (m.total_gt, m.total_pred) == (3, 3)
        assert m.hits == 2
        assert m.p_time == 2 / 3 and m.r_time == 2 / 3
        assert m.f1 == pytest.approx(2 / 3, abs=1e-12)
    strict = temporal_metrics(level, (0.65,))[0]
    assert strict.hits == 1  # only the 2/3 overlap survives


def test_self_evaluation_is_perfect():
    mapping = identity_mapping("Li Wei", "nurse")
    level = evaluate_events(GT_EVENTS, GT_EVENTS, mapping, LexicalJudge())
    for name in ("character", "dialogue", "action"):
        acc = level.accumulators[name]
        assert acc.precision == 1.0 and acc.recall == 1.0 and acc.f1 == 1.0
    assert all(v == 1.0 for v in group_tious(level))
    assert level.alignment.unaligned_gt == []
    assert level.alignment.unaligned_pred == []


def test_empty_prediction_scores_zero():
    mapping = MappingDictionary({}, [], [])
    level = evaluate_events(GT_EVENTS, [], mapping, LexicalJudge())
    acc = level.accumulators["dialogue"]
    assert acc.s_total == 0.0
    assert acc.n_gt_total == 3 and acc.n_pred_total == 0
    assert acc.precision == 0.0 and acc.recall == 0.0 and acc.f1 == 0.0
    assert temporal_metrics(level)[0].r_time == 0.0


def test_character_field_uses_mapping():
    gt = [ev(0, 5, "Jin Runfa", dialogue="same line")]
    pred = [ev(0, 5, "Old Jin", dialogue="same line")]
    mapped = MappingDictionary({"Old Jin": "Jin Runfa"}, [], [])
    level = evaluate_events(gt, pred, mapped, LexicalJudge())
    assert level.accumulators["character"].f1 == 1.0

    unmapped = MappingDictionary({}, ["Old Jin"], ["Jin Runfa"])
    level = evaluate_events(gt, pred, unmapped, LexicalJudge())
    assert level.accumulators["character"].f1 == 0.0
    # dialogue is unaffected by the character mismatch
    assert level.accumulators["dialogue"].f1 == 1.0


def test_environment_passes_through_mapping():
    gt = [ev(0, 5, "Environment", audio_cue="rain on glass")]
    pred = [ev(1, 6, "Environment", audio_cue="rain on glass")]
    level = evaluate_events(gt, pred, MappingDictionary({}, [], []),
                            LexicalJudge())
    assert level.accumulators["character"].f1 == 1.0
    assert level.accumulators["audio_cue"].f1 == 1.0


class TableJudge:
    """Judge with scripted verdicts per (gt, pred) text pair."""

    name = "table"
    max_concurrent = 3

    def __init__(self, table):
        self.table = table
        self.calls = []

    def similarity(self, request):
        self.calls.append(request)
        return JudgeVerdict(self.table[(request.gt_text, request.pred_text)],
                            "scripted", "remote")


def test_judge_fields_batch_and_match():
    # one aligned window, two speakers with actions on both sides
    gt = [
        ev(0, 4, "Li Wei", dialogue="let us go", action="opens the door"),
        ev(5, 9, "nurse", dialogue="wait", action="grabs his arm"),
    ]
    pred = [
        ev(1, 8, "Li Wei", dialogue="let us go wait", action="leaves"),
    ]
    table = {
        ("opens the door", "leaves"): 0.7,
        ("grabs his arm", "leaves"): 0.2,
    }
    judge = TableJudge(table)
    mapping = identity_mapping("Li Wei", "nurse")
    level = evaluate_events(gt, pred, mapping, judge, EvalConfig())
    assert len(level.groups) == 1
    # greedy keeps the 0.7 pairing; the prediction only offers one action item
    acc = level.accumulators["action"]
    assert acc.s_total == 0.7
    assert (acc.n_gt_total, acc.n_pred_total) == (2, 1)
    assert len(judge.calls) == 2  # both pairs scored in one batch


# ---------------------------------------------------------------------------
# Scene-level evaluation
# ---------------------------------------------------------------------------

def make_scene(sid, start, end, **fields):
    events = [ev(start, end, "Li Wei", dialogue="line")]
    return SceneRecord(sid, events=events, **fields)


def test_evaluate_scenes_frozen_totals():
    gt_scenes = [
        make_scene(1, 0, 10, location="Office interior", scene_type="Interior",
                   time_of_day="Day", mood="tense", environment="cluttered desk"),
        make_scene(2, 100, 120, location="Street", scene_type="Exterior",
                   time_of_day="Night"),
    ]
    pred_scenes = [
        make_scene(1, 2, 12, location="Office interior", scene_type="Int.",
                   time_of_day="day", mood="tense", environment="cluttered desk"),
        make_scene(2, 105, 125, location="Street", scene_type="Interior",
                   time_of_day="Night"),
    ]
    level = evaluate_scenes(gt_scenes, pred_scenes, LexicalJudge())
    acc = level.accumulators

    assert acc["scene_location"].f1 == 1.0
    # synonym table equates Interior and Int.; Exterior vs Interior fails
    assert acc["scene_type"].s_total == 1.0
    assert acc["scene_type"].precision == 0.5 and acc["scene_type"].recall == 0.5
    assert acc["scene_time"].f1 == 1.0          # case-insensitive Day == day
    assert acc["scene_mood"].f1 == 1.0          # only scene 1 carries a mood
    assert acc["scene_mood"].n_gt_total == 1
    assert acc["scene_environment"].f1 == 1.0

    assert group_tious(level) == [pytest.approx(8 / 12), pytest.approx(15 / 25)]
    metrics = temporal_metrics(level, (0.5,))[0]
    assert metrics.hits == 2 and metrics.total_gt == 2 and metrics.total_pred == 2


def test_evaluate_scenes_distant_scene_unaligned():
    gt_scenes = [make_scene(1, 0, 10, location="Office")]
    pred_scenes = [make_scene(1, 300, 310, location="Office")]
    level = evaluate_scenes(gt_scenes, pred_scenes, LexicalJudge())
    assert level.groups == []
    assert level.accumulators["scene_location"].recall == 0.0
    assert temporal_metrics(level)[0].hits == 0
