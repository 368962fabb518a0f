"""Order-preserving alignment of two timed item sequences.

Items (events, or scenes treated as pseudo-events) are paired into groups:
one-to-one, one-to-many, or many-to-one over contiguous windows, where every
cross pair must sit within a temporal proximity limit.  A scheduling DP then
picks the disjoint, monotone chain of groups maximising the summed group
scores.  Unchosen items on either side are reported as unaligned singletons
(misses on the reference side, hallucinations on the predicted side).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import NoComparableContent
from .similarity import (
    TextScoreWeights,
    composite_text_score,
    normalized_similarity,
    time_bonus,
)


@dataclass(frozen=True)
class AlignItem:
    """One alignable unit: a start time plus the two text channels."""
    start: float
    primary: str = ""    # dialogue for events, location for scenes
    secondary: str = ""  # action for events, environment for scenes


@dataclass(frozen=True)
class AlignParams:
    weights: TextScoreWeights = field(default_factory=TextScoreWeights)
    max_start_distance: float = 30.0
    max_fanout: int = 3
    bonus_cap: float = 0.1
    bonus_decay: float = 15.0
    case_fold: bool = True


@dataclass(frozen=True)
class CandidateGroup:
    """Half-open index spans into the two item lists; one side has width 1."""
    gt_span: tuple[int, int]
    pred_span: tuple[int, int]
    score: float = 0.0


@dataclass
class AlignmentResult:
    aligned: list[CandidateGroup]
    unaligned_gt: list[int]
    unaligned_pred: list[int]
    total_score: float


def generate_candidates(
    gt_items: list[AlignItem],
    pred_items: list[AlignItem],
    params: AlignParams = AlignParams(),
) -> list[CandidateGroup]:
    """Every legal contiguous-window group: 1x1, 1xk and kx1 with k up to
    max_fanout, where each cross pair is within max_start_distance seconds."""
    out: list[CandidateGroup] = []
    dist = params.max_start_distance
    n, m = len(gt_items), len(pred_items)
    for gi in range(n):
        g_start = gt_items[gi].start
        for pi in range(m):
            if abs(g_start - pred_items[pi].start) > dist:
                continue
            out.append(CandidateGroup((gi, gi + 1), (pi, pi + 1)))
            for k in range(2, params.max_fanout + 1):
                if pi + k > m or abs(g_start - pred_items[pi + k - 1].start) > dist:
                    break
                out.append(CandidateGroup((gi, gi + 1), (pi, pi + k)))
            for k in range(2, params.max_fanout + 1):
                if gi + k > n:
                    break
                if any(
                    abs(gt_items[gi + off].start - pred_items[pi].start) > dist
                    for off in range(1, k)
                ):
                    break
                out.append(CandidateGroup((gi, gi + k), (pi, pi + 1)))
    return out


def _side_text(items: list[AlignItem], span: tuple[int, int], channel: str) -> str:
    parts = [getattr(items[i], channel) for i in range(span[0], span[1])]
    return " ".join(p for p in parts if p)


def _channel_score(gt_text: str, pred_text: str, case_fold: bool) -> float | None:
    """None when the channel exists on neither side; 0.0 when on one side only."""
    if not gt_text and not pred_text:
        return None
    if not gt_text or not pred_text:
        return 0.0
    return normalized_similarity(gt_text, pred_text, case_fold)


def score_group(
    group: CandidateGroup,
    gt_items: list[AlignItem],
    pred_items: list[AlignItem],
    params: AlignParams = AlignParams(),
) -> float:
    """Weighted text similarity over the group's concatenated channels, plus
    a proximity bonus driven by the closest start-time pair.  A group with no
    comparable text on either side keeps the bonus over a zero text score."""
    primary = _channel_score(
        _side_text(gt_items, group.gt_span, "primary"),
        _side_text(pred_items, group.pred_span, "primary"),
        params.case_fold,
    )
    secondary = _channel_score(
        _side_text(gt_items, group.gt_span, "secondary"),
        _side_text(pred_items, group.pred_span, "secondary"),
        params.case_fold,
    )
    try:
        text_score = composite_text_score(primary, secondary, params.weights)
    except NoComparableContent:
        text_score = 0.0
    dt_min = min(
        abs(gt_items[g].start - pred_items[p].start)
        for g in range(*group.gt_span)
        for p in range(*group.pred_span)
    )
    return text_score + time_bonus(dt_min, params.bonus_cap, params.bonus_decay)


class _PrefixMax:
    """Fenwick tree keeping a running prefix maximum of comparable tuples."""

    def __init__(self, n: int):
        self.n = n
        self.tree: list[tuple | None] = [None] * (n + 1)

    def update(self, i: int, value: tuple) -> None:
        while i <= self.n:
            if self.tree[i] is None or value > self.tree[i]:
                self.tree[i] = value
            i += i & (-i)

    def query(self, i: int) -> tuple | None:
        best: tuple | None = None
        while i > 0:
            node = self.tree[i]
            if node is not None and (best is None or node > best):
                best = node
            i -= i & (-i)
        return best


def align(
    gt_items: list[AlignItem],
    pred_items: list[AlignItem],
    params: AlignParams = AlignParams(),
) -> AlignmentResult:
    """Best disjoint monotone chain of scored candidate groups.

    Weighted interval scheduling over two index dimensions: candidates are
    processed in (gt_lo, pred_lo) order while a prefix-max tree over pred_hi
    holds the best chain value ending before the current candidate.  Value
    tuples are (score, group count, -rank): equal-score optima prefer more
    groups, then the earliest candidate in span order.
    """
    cands = [
        replace(c, score=score_group(c, gt_items, pred_items, params))
        for c in generate_candidates(gt_items, pred_items, params)
    ]
    order = sorted(
        range(len(cands)),
        key=lambda i: (cands[i].gt_span[0], cands[i].pred_span[0],
                       cands[i].gt_span[1], cands[i].pred_span[1]),
    )
    rank = {idx: r for r, idx in enumerate(order)}
    by_gt_hi = sorted(order, key=lambda i: cands[i].gt_span[1])

    tree = _PrefixMax(len(pred_items))
    # per candidate: (chain score, chain length, -rank), predecessor index
    value: dict[int, tuple[float, int, int]] = {}
    pred_of: dict[int, int] = {}
    activate_at = 0
    for idx in order:
        c = cands[idx]
        while (activate_at < len(by_gt_hi)
               and cands[by_gt_hi[activate_at]].gt_span[1] <= c.gt_span[0]):
            src = by_gt_hi[activate_at]
            v = value[src]
            tree.update(cands[src].pred_span[1], (v[0], v[1], v[2], src))
            activate_at += 1
        best = tree.query(c.pred_span[0]) if c.pred_span[0] > 0 else None
        if best is None:
            value[idx] = (c.score + 0.0, 1, -rank[idx])
            pred_of[idx] = -1
        else:
            value[idx] = (c.score + best[0], best[1] + 1, -rank[idx])
            pred_of[idx] = best[3]

    best_idx = -1
    best_val: tuple[float, int, int] | None = None
    for idx in order:
        if best_val is None or value[idx] > best_val:
            best_val = value[idx]
            best_idx = idx

    chain: list[CandidateGroup] = []
    covered_gt: set[int] = set()
    covered_pred: set[int] = set()
    total = 0.0
    if best_idx >= 0 and best_val is not None:
        total = best_val[0]
        at = best_idx
        while at >= 0:
            chain.append(cands[at])
            covered_gt.update(range(*cands[at].gt_span))
            covered_pred.update(range(*cands[at].pred_span))
            at = pred_of[at]
        chain.reverse()
    return AlignmentResult(
        aligned=chain,
        unaligned_gt=[i for i in range(len(gt_items)) if i not in covered_gt],
        unaligned_pred=[i for i in range(len(pred_items)) if i not in covered_pred],
        total_score=total,
    )


# ---------------------------------------------------------------------------
# Adapters
# ---------------------------------------------------------------------------

def event_items(events: list) -> list[AlignItem]:
    """Events as alignable items: dialogue is the primary channel, action the
    secondary.  Expects ``schema.EventRecord`` objects sorted by start."""
    return [
        AlignItem(e.interval.start, e.dialogue or "", e.action or "")
        for e in events
    ]


def scene_items(scenes: list) -> list[AlignItem]:
    """Scenes as alignable items: location primary, environment secondary,
    anchored at the scene's event-hull start."""
    return [AlignItem(s.span.start, s.location or "", s.environment or "")
            for s in scenes]


def align_events(gt_events: list, pred_events: list,
                 params: AlignParams = AlignParams()) -> AlignmentResult:
    return align(event_items(gt_events), event_items(pred_events), params)
