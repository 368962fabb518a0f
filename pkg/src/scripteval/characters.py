"""Character resolution: build a pred-name -> gt-name mapping dictionary.

Names are categorised (proper names vs singular/plural identity descriptions)
by the remote judge when available, or by rule-based heuristics offline.  The
judge's explicit proper-name pairings seed the mapping (many-to-one allowed);
remaining names go through greedy one-to-one fallback matching on temporal
overlap plus name similarity, subject to hard prohibitions that are enforced
here regardless of what the judge said.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import JudgeUnavailable
from .judge import extract_json_object
from .prompts import render_character_mapping_prompt
from .schema import ENVIRONMENT_NAME, EventRecord
from .similarity import fold_text, normalized_similarity

FALLBACK_THRESHOLD = 0.05  # fallback pairs must score strictly above this


class NameCategory(Enum):
    PROPER = "proper"
    SINGULAR = "singular"
    PLURAL = "plural"


# ---------------------------------------------------------------------------
# Inventory
# ---------------------------------------------------------------------------

def merge_intervals(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Union of intervals as a sorted list of disjoint spans."""
    if not intervals:
        return []
    merged: list[tuple[float, float]] = []
    for start, end in sorted(intervals):
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


def _intersection_length(a: list[tuple[float, float]],
                         b: list[tuple[float, float]]) -> float:
    total = 0.0
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if hi > lo:
            total += hi - lo
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return total


def interval_set_iou(a: list[tuple[float, float]],
                     b: list[tuple[float, float]]) -> float:
    """IoU over merged interval unions.  Two identical all-degenerate sets
    count as a perfect overlap, mirroring the single-interval rule."""
    len_a = sum(hi - lo for lo, hi in a)
    len_b = sum(hi - lo for lo, hi in b)
    inter = _intersection_length(a, b)
    union = len_a + len_b - inter
    if union <= 0.0:
        return 1.0 if a == b and a else 0.0
    return inter / union


@dataclass
class CharacterInventory:
    """Names with their active (merged) time spans, in order of first
    appearance.  The reserved Environment track is excluded."""

    spans: dict[str, list[tuple[float, float]]] = field(default_factory=dict)

    @property
    def names(self) -> list[str]:
        return list(self.spans)

    def __contains__(self, name: str) -> bool:
        return name in self.spans


def extract_inventory(events: list[EventRecord]) -> CharacterInventory:
    raw: dict[str, list[tuple[float, float]]] = {}
    for event in events:
        if event.character == ENVIRONMENT_NAME:
            continue
        raw.setdefault(event.character, []).append(
            (event.interval.start, event.interval.end)
        )
    return CharacterInventory({name: merge_intervals(iv) for name, iv in raw.items()})


# ---------------------------------------------------------------------------
# Categorisation
# ---------------------------------------------------------------------------

@dataclass
class CategorizationResult:
    gt_categories: dict[str, NameCategory]
    pred_categories: dict[str, NameCategory]
    seed_mapping: dict[str, str] = field(default_factory=dict)   # pred -> gt
    conflicts: dict[str, set[str]] = field(default_factory=dict)  # pred -> {gt}
    source: str = "rules"


_GROUP_WORDS = {
    "crowd", "people", "everyone", "masses", "group", "audience", "all",
    "大家", "人群", "众人", "群众",
}
_IRREGULAR_PLURALS = {"men", "women", "children", "policemen", "passersby"}
_QUANTIFIER_RE = re.compile(
    r"(group of|a few|couple of|two |three |four |several |some |et al|and others"
    r"|几个|一群|一些|两个|三个|群)"
)
_TITLE_WORDS = {
    "dr", "doctor", "mr", "mrs", "ms", "miss", "sir", "madam", "lord",
    "officer", "teacher", "boss", "captain", "professor", "prof", "uncle",
    "aunt", "master", "coach", "sergeant", "detective", "judge", "general",
    "old", "young",
}
_IDENTITY_WORDS = {
    "soldier", "nurse", "doctor", "police", "policeman", "passerby", "customer",
    "boss", "waiter", "waitress", "driver", "chef", "guard", "security guard",
    "fatty", "tall guy", "lady", "gentleman", "old man", "old lady", "man",
    "woman", "girl", "boy", "thief", "cop", "pedestrian", "stranger", "officer",
    "teacher", "student", "worker", "clerk", "vendor", "mom", "dad", "grandpa",
    "grandma", "narrator",
    "警察", "医生", "护士", "士兵", "路人", "老板", "顾客", "小偷", "男人",
    "女人", "老人", "男孩", "女孩", "服务员", "司机", "保安", "老师", "学生",
}
_CJK_RE = re.compile(r"^[一-鿿]{2,4}$")


def heuristic_category(name: str) -> NameCategory:
    """Offline category guess.

    Order matters: group/quantifier cues first, then numbered extras, then
    proper-name shapes, then known identity vocabulary, then a plural suffix
    check.  Single capitalised tokens are treated as singular identities on
    purpose: without context "Smith" and "Stranger" look alike.
    """
    folded = fold_text(name).strip()
    tokens = folded.split()
    if not tokens:
        return NameCategory.SINGULAR
    if folded in _GROUP_WORDS or _QUANTIFIER_RE.search(folded) or folded.endswith("们"):
        return NameCategory.PLURAL
    if tokens[-1] in _IRREGULAR_PLURALS or folded in _IRREGULAR_PLURALS:
        return NameCategory.PLURAL
    raw_tokens = name.strip().split()
    # numbered extras: "Soldier A", "Passerby 2"
    if len(raw_tokens) >= 2 and re.fullmatch(r"[A-Za-z0-9一二三四五六七八九]",
                                             raw_tokens[-1]):
        return NameCategory.SINGULAR
    if folded in _IDENTITY_WORDS:
        return NameCategory.SINGULAR
    first = tokens[0].rstrip(".")
    if (first in _TITLE_WORDS and len(raw_tokens) >= 2
            and raw_tokens[1][:1].isupper()):
        return NameCategory.PROPER
    if len(raw_tokens) >= 2 and all(t[:1].isupper() for t in raw_tokens):
        return NameCategory.PROPER
    if _CJK_RE.match(name.strip()) and not any(
        len(w) > 1 and w in folded for w in _IDENTITY_WORDS
    ):
        return NameCategory.PROPER
    if (len(tokens) == 1 and folded.endswith("s") and not folded.endswith("ss")
            and len(folded) > 3 and not name.strip()[0].isupper()):
        return NameCategory.PLURAL
    if folded.endswith("s") and not folded.endswith("ss") and tokens[-1] in {
        w + "s" for w in _IDENTITY_WORDS
    }:
        return NameCategory.PLURAL
    return NameCategory.SINGULAR


def _autoseed_exact_matches(result: CategorizationResult,
                            gt_names: list[str], pred_names: list[str]) -> None:
    """Identical proper names map to each other even if the judge forgot
    them; this keeps self-comparison an identity mapping."""
    gt_by_fold = {fold_text(n): n for n in gt_names}
    for pred in pred_names:
        if pred in result.seed_mapping:
            continue
        if result.pred_categories.get(pred) is not NameCategory.PROPER:
            continue
        gt = gt_by_fold.get(fold_text(pred))
        if gt is not None and result.gt_categories.get(gt) is NameCategory.PROPER:
            if gt not in result.conflicts.get(pred, set()):
                result.seed_mapping[pred] = gt


def rule_based_categorization(gt_names: list[str],
                              pred_names: list[str]) -> CategorizationResult:
    result = CategorizationResult(
        gt_categories={n: heuristic_category(n) for n in gt_names},
        pred_categories={n: heuristic_category(n) for n in pred_names},
        source="rules",
    )
    _autoseed_exact_matches(result, gt_names, pred_names)
    return result


def _pick_names(raw, lookup: dict[str, str]) -> list[str]:
    if not isinstance(raw, list):
        return []
    out = []
    for item in raw:
        if isinstance(item, str) and fold_text(item) in lookup:
            out.append(lookup[fold_text(item)])
    return out


def parse_categorization_reply(reply: str, gt_names: list[str],
                               pred_names: list[str]) -> CategorizationResult:
    """Judge JSON -> CategorizationResult.  Unknown names are dropped; names
    the judge never classified get heuristic categories.  Raises ValueError
    when the reply holds no usable JSON object."""
    data = extract_json_object(reply)
    gt_lookup = {fold_text(n): n for n in gt_names}
    pred_lookup = {fold_text(n): n for n in pred_names}

    def categories(side_names, lookup, classification, plurality):
        cats = {n: heuristic_category(n) for n in side_names}
        cls = data.get(classification) or {}
        plu = data.get(plurality) or {}
        for name in _pick_names(cls.get("proper_names"), lookup):
            cats[name] = NameCategory.PROPER
        for name in _pick_names(cls.get("identity_names"), lookup):
            cats[name] = NameCategory.SINGULAR
        for name in _pick_names(plu.get("singular"), lookup):
            cats[name] = NameCategory.SINGULAR
        for name in _pick_names(plu.get("plural"), lookup):
            cats[name] = NameCategory.PLURAL
        return cats

    result = CategorizationResult(
        gt_categories=categories(
            gt_names, gt_lookup, "gt_classification", "gt_identity_plurality"),
        pred_categories=categories(
            pred_names, pred_lookup, "pred_classification", "pred_identity_plurality"),
        source="judge",
    )

    mappings = data.get("proper_name_mappings") or {}
    if isinstance(mappings, dict):
        for pred_raw, gt_raw in mappings.items():
            if not isinstance(pred_raw, str) or not isinstance(gt_raw, str):
                continue
            pred = pred_lookup.get(fold_text(pred_raw))
            gt = gt_lookup.get(fold_text(gt_raw))
            if pred is not None and gt is not None:
                result.seed_mapping[pred] = gt

    def add_conflict(pred: str, gt: str) -> None:
        result.conflicts.setdefault(pred, set()).add(gt)

    for key, values in (data.get("identity_conflicts") or {}).items():
        if not isinstance(key, str) or not isinstance(values, list):
            continue
        pred = pred_lookup.get(fold_text(key))
        if pred is None:
            continue
        for gt in _pick_names(values, gt_lookup):
            add_conflict(pred, gt)

    # cross-type conflicts are keyed by proper names from either side
    for key, values in (data.get("cross_type_conflicts") or {}).items():
        if not isinstance(key, str) or not isinstance(values, list):
            continue
        as_pred = pred_lookup.get(fold_text(key))
        as_gt = gt_lookup.get(fold_text(key))
        if as_pred is not None:
            for gt in _pick_names(values, gt_lookup):
                add_conflict(as_pred, gt)
        elif as_gt is not None:
            for pred in _pick_names(values, pred_lookup):
                add_conflict(pred, as_gt)

    _autoseed_exact_matches(result, gt_names, pred_names)
    return result


def categorize_names(gt_inventory: CharacterInventory,
                     pred_inventory: CharacterInventory,
                     judge) -> CategorizationResult:
    """Judge-driven categorisation with rule-based degradation."""
    gt_names, pred_names = gt_inventory.names, pred_inventory.names
    if not gt_names and not pred_names:
        return rule_based_categorization(gt_names, pred_names)
    prompt = render_character_mapping_prompt(gt_names, pred_names)
    for _ in range(2):
        try:
            reply = judge.complete(prompt)
        except JudgeUnavailable:
            break
        try:
            return parse_categorization_reply(reply, gt_names, pred_names)
        except ValueError:
            continue
    return rule_based_categorization(gt_names, pred_names)


# ---------------------------------------------------------------------------
# Mapping resolution
# ---------------------------------------------------------------------------

@dataclass
class MappingDictionary:
    mapping: dict[str, str]          # pred name -> gt name
    unmapped_pred: list[str]
    unmapped_gt: list[str]

    def project(self, name: str) -> str:
        """Pred name into gt name space; Environment and unmapped names pass
        through unchanged."""
        if name == ENVIRONMENT_NAME:
            return name
        return self.mapping.get(name, name)


def fallback_score(gt_entry: tuple[str, list[tuple[float, float]]],
                   pred_entry: tuple[str, list[tuple[float, float]]]) -> float:
    """Equal blend of temporal overlap and name similarity."""
    gt_name, gt_spans = gt_entry
    pred_name, pred_spans = pred_entry
    return 0.5 * interval_set_iou(gt_spans, pred_spans) + \
        0.5 * normalized_similarity(gt_name, pred_name)


def _prohibited(cat: CategorizationResult, pred: str, gt: str,
                allow_proper_pair: bool) -> bool:
    """The hard rules, enforced no matter what the judge produced."""
    c_pred = cat.pred_categories.get(pred, NameCategory.SINGULAR)
    c_gt = cat.gt_categories.get(gt, NameCategory.SINGULAR)
    if c_pred is NameCategory.PROPER and c_gt is NameCategory.PROPER \
            and not allow_proper_pair:
        return True  # distinct proper names only pair through the seed graph
    if NameCategory.PLURAL in (c_pred, c_gt) and c_pred is not c_gt:
        return True  # a group never equals an individual, named or not
    if gt in cat.conflicts.get(pred, set()):
        return True
    return False


def resolve_mapping(gt_inventory: CharacterInventory,
                    pred_inventory: CharacterInventory,
                    categorization: CategorizationResult,
                    threshold: float = FALLBACK_THRESHOLD) -> MappingDictionary:
    """Seeds first (many-to-one allowed), then greedy one-to-one fallback in
    descending score order; every accepted pair must clear the prohibitions
    and fallback pairs must score strictly above the threshold."""
    cat = categorization
    mapping: dict[str, str] = {}
    for pred in sorted(cat.seed_mapping):
        gt = cat.seed_mapping[pred]
        if pred not in pred_inventory or gt not in gt_inventory:
            continue
        if _prohibited(cat, pred, gt, allow_proper_pair=True):
            continue
        mapping[pred] = gt

    used_gt = set(mapping.values())
    used_pred = set(mapping)
    candidates = [
        (fallback_score((gt, gt_inventory.spans[gt]),
                        (pred, pred_inventory.spans[pred])), gt, pred)
        for gt in gt_inventory.names if gt not in used_gt
        for pred in pred_inventory.names if pred not in used_pred
    ]
    candidates.sort(key=lambda t: (-t[0], t[1], t[2]))
    for score, gt, pred in candidates:
        if score <= threshold:
            break
        if gt in used_gt or pred in used_pred:
            continue
        if _prohibited(cat, pred, gt, allow_proper_pair=False):
            continue
        mapping[pred] = gt
        used_gt.add(gt)
        used_pred.add(pred)

    return MappingDictionary(
        mapping=mapping,
        unmapped_pred=[n for n in pred_inventory.names if n not in mapping],
        unmapped_gt=[n for n in gt_inventory.names if n not in used_gt],
    )
