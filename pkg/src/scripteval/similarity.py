"""Scalar similarity primitives shared by every pipeline stage."""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass

from ._editdist import levenshtein
from .errors import NoComparableContent

# Weighted blend of the two text channels used during alignment.  Dialogue
# carries more weight than action by default.
DEFAULT_DIALOGUE_WEIGHT = 5.0
DEFAULT_ACTION_WEIGHT = 3.0

# Time-proximity bonus: cap and exponential decay constant, in seconds.
TIME_BONUS_CAP = 0.1
TIME_BONUS_DECAY = 15.0


@dataclass(frozen=True)
class TextScoreWeights:
    dialogue: float = DEFAULT_DIALOGUE_WEIGHT
    action: float = DEFAULT_ACTION_WEIGHT


def fold_text(text: str, case_fold: bool = True) -> str:
    """Canonical comparison form: NFC-normalised, optionally case-folded."""
    text = unicodedata.normalize("NFC", text)
    return text.casefold() if case_fold else text


def levenshtein_distance(a: str, b: str) -> int:
    """Exact unit-cost edit distance (no normalisation applied)."""
    return levenshtein(a, b)


def normalized_similarity(a: str, b: str, case_fold: bool = True) -> float:
    """1 - dist/max(len), computed on NFC-normalised (and case-folded) text.

    Both strings empty compare as identical (1.0); exactly one empty is a
    total mismatch (0.0).
    """
    a = fold_text(a, case_fold)
    b = fold_text(b, case_fold)
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


def token_jaccard(a: str, b: str) -> float:
    """Jaccard overlap of case-folded whitespace token sets."""
    ta = set(fold_text(a).split())
    tb = set(fold_text(b).split())
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def composite_text_score(
    dialogue_score: float | None,
    action_score: float | None,
    weights: TextScoreWeights = TextScoreWeights(),
) -> float:
    """Weighted blend of the two channel similarities.

    A channel passed as None did not exist on either side of the pair; it is
    dropped and the remaining weight renormalised.  Both None is an error:
    there is nothing to compare.
    """
    if dialogue_score is None and action_score is None:
        raise NoComparableContent("neither dialogue nor action text on either side")
    if action_score is None:
        return dialogue_score  # full weight renormalised onto the one channel
    if dialogue_score is None:
        return action_score
    return (weights.dialogue * dialogue_score + weights.action * action_score) / (
        weights.dialogue + weights.action
    )


def time_bonus(delta_seconds: float, cap: float = TIME_BONUS_CAP,
               decay: float = TIME_BONUS_DECAY) -> float:
    """Proximity bonus min(cap, cap * exp(-dt/decay)); dt must be >= 0."""
    if delta_seconds < 0:
        raise ValueError(f"negative time delta: {delta_seconds}")
    return min(cap, math.exp(-delta_seconds / decay) * cap)


def interval_tiou(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Temporal intersection-over-union of two [start, end] intervals.

    Degenerate cases: two identical points are a perfect hit (1.0); a point
    against anything else, or two distinct points, scores 0.0.
    """
    a_len = a[1] - a[0]
    b_len = b[1] - b[0]
    if a_len == 0.0 and b_len == 0.0:
        return 1.0 if a[0] == b[0] else 0.0
    inter = min(a[1], b[1]) - max(a[0], b[0])
    if inter < 0.0:
        inter = 0.0
    union = a_len + b_len - inter
    if union <= 0.0:
        return 0.0
    return inter / union
