"""Acceptance gate: ten end-to-end criteria, one test per criterion.

Run `pytest -v tests/test_acceptance.py` for one PASS/FAIL line each.
Tolerances are stated in every test; everything runs offline (scripted or
lexical judges only).
"""

from __future__ import annotations

import copy
import math
import os
import random
import time

import pytest

from oracles import best_chain_score, enumerate_groups, levenshtein_reference
from test_characters import assert_mapping_legal, random_setup

from scripteval.alignment import AlignItem, AlignParams, CandidateGroup, align, score_group
from scripteval.characters import resolve_mapping
from scripteval.config import EvalConfig
from scripteval.errors import JudgeUnavailable
from scripteval.judge import JudgeVerdict, LexicalJudge
from scripteval.pipeline import (
    evaluate_corpus,
    evaluate_files,
    evaluate_video,
    read_manifest,
    segmented_reward,
)
from scripteval.reports import emit_report
from scripteval.schema import (
    EventRecord,
    SceneRecord,
    ScriptDocument,
    ScriptMeta,
    TimeInterval,
    load_script,
)
from scripteval.similarity import (
    composite_text_score,
    interval_tiou,
    levenshtein_distance,
    normalized_similarity,
    time_bonus,
    token_jaccard,
)

DATA = os.path.join(os.path.dirname(__file__), "data")
TOL = 1e-12


class ScriptedJudge:
    """Offline judge: scripted pairs, exact-match fallback."""

    name = "scripted"
    max_concurrent = 1

    def __init__(self, table=None):
        self.table = table or {}

    def similarity(self, request):
        key = (request.gt_text, request.pred_text)
        if key in self.table:
            return JudgeVerdict(self.table[key], "scripted", "remote")
        return JudgeVerdict(1.0 if request.gt_text == request.pred_text else 0.0,
                            "exact", "remote")

    def complete(self, prompt):
        raise JudgeUnavailable("scripted judge has no completion endpoint")


def ev(start, end, character, **content):
    return EventRecord(TimeInterval(start, end), character, **content)


def simple_doc(events):
    return ScriptDocument(ScriptMeta(title="t", duration=2000.0),
                          [SceneRecord(1, location="Room", events=list(events))])


def test_criterion_01_fan_out_alignment_end_to_end():
    """One plural event vs two singular halves: the 1x2 window wins, the
    judge's better half is kept one-to-one, and the merged boundary overlap
    is exactly 9/11 (tolerance 1e-12)."""
    gt_action = "secure the perimeter and enter the building"
    judge = ScriptedJudge({
        (gt_action, "secures the perimeter"): 0.90,
        (gt_action, "enters the building"): 0.85,
    })
    report = evaluate_files(
        "officers",
        os.path.join(DATA, "officers_gt.json"),
        os.path.join(DATA, "officers_pred.json"),
        judge, collect_details=True,
    )
    groups = report.diagnostics["event_groups"]
    assert len(groups) == 1
    assert groups[0]["gt_span"] == [0, 1]
    assert groups[0]["pred_span"] == [0, 2]
    assert groups[0]["gt_interval"] == [5.0, 15.0]
    assert groups[0]["pred_interval"] == [4.0, 14.0]

    action = report.events.fields["action"]
    assert action.s_total == pytest.approx(0.9, abs=TOL)
    assert (action.n_gt, action.n_pred) == (1, 2)
    assert action.precision == pytest.approx(0.45, abs=TOL)
    assert action.recall == pytest.approx(0.90, abs=TOL)
    assert action.f1 == pytest.approx(0.60, abs=TOL)

    assert interval_tiou((5.0, 15.0), (4.0, 14.0)) == pytest.approx(9 / 11, abs=TOL)
    for t in report.events.temporal:  # 9/11 clears 0.1 / 0.3 / 0.5
        assert (t.hits, t.total_gt, t.total_pred) == (1, 1, 1)


def test_criterion_02_alignment_matches_exhaustive_oracle():
    """500 random instances (sides up to 6): the scheduling DP equals an
    exhaustive enumeration of monotone chains with exact float equality,
    in under 30 seconds."""
    vocab = ["open", "door", "run", "看", "什么", "hello", "there", "slowly"]
    rng = random.Random(777)

    def side():
        n = rng.randint(1, 6)
        return [
            AlignItem(start,
                      " ".join(rng.sample(vocab, rng.randint(0, 3))),
                      " ".join(rng.sample(vocab, rng.randint(0, 3))))
            for start in sorted(rng.uniform(0, 90) for _ in range(n))
        ]

    t0 = time.monotonic()
    for _ in range(500):
        gt, pred = side(), side()
        params = AlignParams(max_fanout=rng.choice([1, 2, 3]))
        got = align(gt, pred, params).total_score
        groups = enumerate_groups([i.start for i in gt], [i.start for i in pred],
                                  params.max_fanout, params.max_start_distance)
        want = best_chain_score(
            groups,
            lambda g, p: score_group(CandidateGroup(g, p), gt, pred, params),
        )
        assert got == want
    assert time.monotonic() - t0 < 30.0


def test_criterion_03_edit_distance_matches_textbook():
    """1000 random pairs up to 64 chars: the kernel equals the full-matrix
    reference exactly, in under 5 seconds."""
    alphabet = "abcdefgh 看什么走xyz"
    rng = random.Random(31337)
    t0 = time.monotonic()
    for _ in range(1000):
        a = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 64)))
        b = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 64)))
        assert levenshtein_distance(a, b) == levenshtein_reference(a, b)
    assert time.monotonic() - t0 < 5.0


def test_criterion_04_scoring_formula_spot_values():
    """Closed-form spot values, tolerance 1e-12."""
    assert composite_text_score(0.8, 0.5) == pytest.approx(0.6875, abs=TOL)
    assert composite_text_score(0.8, 0.5) == (5.0 * 0.8 + 3.0 * 0.5) / 8.0
    assert composite_text_score(None, 0.4) == 0.4  # absent channel renormalizes
    assert time_bonus(0.0) == pytest.approx(0.1, abs=TOL)
    assert time_bonus(15.0) == pytest.approx(0.1 * math.exp(-1.0), abs=TOL)
    assert time_bonus(30.0) == pytest.approx(0.1 * math.exp(-2.0), abs=TOL)
    assert interval_tiou((0.0, 10.0), (5.0, 15.0)) == pytest.approx(1 / 3, abs=TOL)
    assert normalized_similarity("kitten", "sitting") == pytest.approx(1 - 3 / 7, abs=TOL)
    assert token_jaccard("a b c", "b c d") == pytest.approx(0.5, abs=TOL)


def test_criterion_05_misses_and_hallucinations_hit_the_right_denominator():
    """Far-away unmatched gt events lower only recall and temporal recall;
    unmatched predictions lower only temporal precision (field precision
    stays on aligned groups unless the config flag widens it).  Exact
    integer ratios."""
    base_events = [ev(0, 5, "A", dialogue="hello world"),
                   ev(10, 15, "A", dialogue="see you soon")]
    far_events = [ev(1000 + 100 * i, 1005 + 100 * i, "A", dialogue=f"far {i}")
                  for i in range(3)]
    judge = LexicalJudge()

    base = evaluate_video("base", simple_doc(base_events),
                          simple_doc(base_events), judge)
    assert base.events.fields["dialogue"].precision == 1.0
    assert base.events.fields["dialogue"].recall == 1.0

    missed = evaluate_video("missed", simple_doc(base_events + far_events),
                            simple_doc(base_events), judge)
    dialogue = missed.events.fields["dialogue"]
    assert dialogue.precision == 1.0          # unchanged
    assert dialogue.recall == 2 / 5           # 3 extra gt items missed
    for t in missed.events.temporal:
        assert t.p_time == 1.0 and t.r_time == 2 / 5

    invented = evaluate_video("invented", simple_doc(base_events),
                              simple_doc(base_events + far_events), judge)
    dialogue = invented.events.fields["dialogue"]
    assert dialogue.precision == 1.0          # aligned groups only
    assert dialogue.recall == 1.0             # unchanged
    for t in invented.events.temporal:
        assert t.p_time == 2 / 5 and t.r_time == 1.0

    strict = evaluate_video("strict", simple_doc(base_events),
                            simple_doc(base_events + far_events), judge,
                            EvalConfig(count_unaligned_pred_items=True))
    assert strict.events.fields["dialogue"].precision == 2 / 5
    assert strict.events.fields["dialogue"].recall == 1.0


def test_criterion_06_mapping_constraints_survive_fuzzing():
    """10,000 randomized categorizations: the resolved mapping never pairs
    two unseeded proper names, never crosses plurality, never overrides a
    conflict, and never accepts a fallback score at or below the threshold.
    Strict check, no tolerance."""
    rng = random.Random(99991)
    for _ in range(10_000):
        gt, pred, categorization = random_setup(rng)
        mapping = resolve_mapping(gt, pred, categorization)
        assert_mapping_legal(gt, pred, categorization, mapping)


def test_criterion_07_self_evaluation_fixed_point():
    """A script evaluated against itself scores F1 = 1.0 on every populated
    field and tIoU F1 = 1.0 at every threshold (exact equality, lexical
    judge)."""
    doc = load_script(os.path.join(DATA, "ideal_gt.json"))
    report = evaluate_video("self", doc, copy.deepcopy(doc), LexicalJudge())
    for level in (report.events, report.scenes):
        for name, fr in level.fields.items():
            assert fr.f1 == 1.0, name
        for t in level.temporal:
            assert t.f1 == 1.0
        assert level.overall_f1 == 1.0


def test_criterion_08_corpus_totals_are_exact():
    """Five-video corpus with hand-countable items: global sums are exact
    integers and every ratio matches the hand computation to 1e-12."""
    entries = read_manifest(os.path.join(DATA, "corpus", "manifest.csv"))
    report = evaluate_corpus(entries, LexicalJudge(), EvalConfig(workers=4))

    dialogue = report.events.fields["dialogue"]
    assert (dialogue.s_total, dialogue.n_gt, dialogue.n_pred) == (4.0, 8, 5)
    assert dialogue.precision == pytest.approx(4 / 5, abs=TOL)
    assert dialogue.recall == pytest.approx(1 / 2, abs=TOL)
    assert dialogue.f1 == pytest.approx(8 / 13, abs=TOL)

    character = report.events.fields["character"]
    assert (character.s_total, character.n_gt, character.n_pred) == (5.0, 8, 5)
    assert character.precision == pytest.approx(1.0, abs=TOL)
    assert character.recall == pytest.approx(5 / 8, abs=TOL)

    location = report.scenes.fields["scene_location"]
    assert (location.s_total, location.n_gt, location.n_pred) == (4.0, 5, 4)

    for t in report.events.temporal:
        assert (t.hits, t.total_gt, t.total_pred) == (5, 8, 6)
        assert t.p_time == pytest.approx(5 / 6, abs=TOL)
        assert t.r_time == pytest.approx(5 / 8, abs=TOL)
    assert [(t.threshold, t.hits) for t in report.scenes.temporal] == \
        [(0.1, 3), (0.3, 2), (0.5, 2)]


def test_criterion_09_reports_are_byte_identical_across_runs():
    """The same corpus evaluated twice (4 workers) emits byte-identical
    json, markdown and csv."""
    entries = read_manifest(os.path.join(DATA, "corpus", "manifest.csv"))
    first = evaluate_corpus(entries, LexicalJudge(), EvalConfig(workers=4))
    second = evaluate_corpus(entries, LexicalJudge(), EvalConfig(workers=4))
    for fmt in ("json", "markdown", "csv"):
        assert emit_report(first, fmt) == emit_report(second, fmt)


def test_criterion_10_reward_anchors():
    """Reward of a script against itself is exactly 1.0, against an empty
    prediction exactly 0.0, and a prediction perfect on one of two equally
    weighted windows scores 0.5 within 1e-9."""
    doc = load_script(os.path.join(DATA, "ideal_gt.json"))
    judge = LexicalJudge()
    assert segmented_reward(doc, copy.deepcopy(doc), judge).reward == 1.0

    empty = load_script(os.path.join(DATA, "empty_pred.json"))
    assert segmented_reward(doc, empty, judge).reward == 0.0

    gt = simple_doc([
        ev(0, 5, "A", dialogue="first line"),
        ev(10, 15, "A", dialogue="second line"),
        ev(70, 75, "A", dialogue="third line"),
        ev(80, 85, "A", dialogue="fourth line"),
    ])
    pred = simple_doc([
        ev(0, 5, "A", dialogue="first line"),
        ev(10, 15, "A", dialogue="second line"),
    ])
    assert segmented_reward(gt, pred, judge).reward == pytest.approx(0.5, abs=1e-9)
