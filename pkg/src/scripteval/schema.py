"""Script document model: parsing, validation, flattening, canonical output.

A script is a JSON document with a ``meta`` header, a ``script`` array of
scenes (each carrying timestamped events), and an opaque ``high_points``
section that is retained verbatim and never scored.  Unknown keys at any
level survive a parse/emit round trip.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

from .errors import MalformedTimecode, ParseError, SchemaError

ENVIRONMENT_NAME = "Environment"

# Event fields that count as content: an event must carry at least one.
CONTENT_FIELDS = ("dialogue", "action", "expression", "audio_cue")

_TIME_RE = re.compile(r"^(\d+):([0-5]\d(?:\.\d+)?)$")
_TIME_HMS_RE = re.compile(r"^(\d+):([0-5]\d):([0-5]\d(?:\.\d+)?)$")
_NUMBER_RE = re.compile(r"^\d+(?:\.\d+)?$")
_RANGE_SPLIT_RE = re.compile(r"\s*(?:-|–|—|~)\s*")
_FENCE_RE = re.compile(r"```(?:json)?\s*\n(.*?)\n\s*```", re.DOTALL)


class VoiceType(str, Enum):
    NORMAL = "Normal"
    VO = "VO"
    OS = "OS"
    NA = "NA"

    @classmethod
    def parse(cls, raw: str) -> "VoiceType | None":
        """Accepts annotated forms like "VO (voice-over)"; None if unknown."""
        token = raw.strip().split("(")[0].strip().split()[0] if raw.strip() else ""
        token = token.rstrip(".").upper()
        return {
            "NORMAL": cls.NORMAL, "VO": cls.VO, "OS": cls.OS, "NA": cls.NA,
        }.get(token)


class SceneType(str, Enum):
    INTERIOR = "Interior"
    EXTERIOR = "Exterior"
    UNKNOWN = "Unknown"


# ---------------------------------------------------------------------------
# Timecodes
# ---------------------------------------------------------------------------

def parse_timecode(value: Any) -> float:
    """Seconds from "MM:SS", "HH:MM:SS", or a plain non-negative number."""
    if isinstance(value, bool):
        raise MalformedTimecode(f"not a timecode: {value!r}")
    if isinstance(value, (int, float)):
        if value < 0:
            raise MalformedTimecode(f"negative timecode: {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise MalformedTimecode(f"not a timecode: {value!r}")
    text = value.strip()
    m = _TIME_HMS_RE.match(text)
    if m:
        return 3600.0 * int(m.group(1)) + 60.0 * int(m.group(2)) + float(m.group(3))
    m = _TIME_RE.match(text)
    if m:
        return 60.0 * int(m.group(1)) + float(m.group(2))
    if _NUMBER_RE.match(text):
        return float(text)
    raise MalformedTimecode(f"not a timecode: {value!r}")


def format_timecode(seconds: float) -> str:
    """Canonical "MM:SS" (or "HH:MM:SS" past an hour); fractional seconds are
    kept so that parse(format(x)) == x exactly."""
    if seconds < 0:
        raise MalformedTimecode(f"negative timecode: {seconds!r}")
    hours = int(seconds // 3600.0)
    rem = seconds - 3600.0 * hours
    minutes = int(rem // 60.0)
    secs = rem - 60.0 * minutes
    whole = int(secs)
    frac = secs - whole
    if frac == 0.0:
        sec_text = f"{whole:02d}"
    else:
        frac_repr = repr(frac)
        if "e" in frac_repr or "E" in frac_repr:
            frac_repr = f"{frac:.17f}".rstrip("0")
        sec_text = f"{whole:02d}" + frac_repr[1:]
    if hours:
        return f"{hours:02d}:{minutes:02d}:{sec_text}"
    return f"{minutes:02d}:{sec_text}"


@dataclass(frozen=True)
class TimeInterval:
    start: float
    end: float

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise MalformedTimecode(
                f"invalid interval: start={self.start} end={self.end}"
            )

    @property
    def length(self) -> float:
        return self.end - self.start

    @property
    def is_point(self) -> bool:
        return self.start == self.end

    def as_text(self) -> str:
        if self.is_point:
            return format_timecode(self.start)
        return f"{format_timecode(self.start)} - {format_timecode(self.end)}"


def parse_interval(value: Any) -> TimeInterval:
    """Interval from "MM:SS - MM:SS", a single timestamp (degenerate), or a
    two-element [start, end] list."""
    if isinstance(value, (list, tuple)):
        if len(value) == 2:
            return TimeInterval(parse_timecode(value[0]), parse_timecode(value[1]))
        if len(value) == 1:
            t = parse_timecode(value[0])
            return TimeInterval(t, t)
        raise MalformedTimecode(f"not a time range: {value!r}")
    if isinstance(value, str):
        text = value.strip()
        if text.startswith("[") and text.endswith("]"):
            text = text[1:-1].strip()
        parts = _RANGE_SPLIT_RE.split(text)
        if len(parts) == 2:
            return TimeInterval(parse_timecode(parts[0]), parse_timecode(parts[1]))
        if len(parts) == 1:
            t = parse_timecode(parts[0])
            return TimeInterval(t, t)
        raise MalformedTimecode(f"not a time range: {value!r}")
    t = parse_timecode(value)
    return TimeInterval(t, t)


# ---------------------------------------------------------------------------
# Document model
# ---------------------------------------------------------------------------

@dataclass
class EventRecord:
    interval: TimeInterval
    character: str
    action: str | None = None
    expression: str | None = None
    dialogue: str | None = None
    voice_type: VoiceType | None = None
    audio_cue: str | None = None
    subtext: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def content(self, name: str) -> str | None:
        """Value of one of the scored content fields, or None if absent."""
        return getattr(self, name)


@dataclass
class SceneRecord:
    scene_id: int
    location: str = ""
    scene_type: str = ""
    environment: str = ""
    time_of_day: str = ""
    mood: str = ""
    events: list[EventRecord] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def scene_kind(self) -> SceneType:
        from . import synonyms

        head = synonyms.canonical("scene_type", self.scene_type)
        if head == "interior":
            return SceneType.INTERIOR
        if head == "exterior":
            return SceneType.EXTERIOR
        return SceneType.UNKNOWN

    @property
    def span(self) -> TimeInterval:
        """Hull of the scene's event intervals ([0, 0] for an empty scene)."""
        if not self.events:
            return TimeInterval(0.0, 0.0)
        return TimeInterval(
            min(e.interval.start for e in self.events),
            max(e.interval.end for e in self.events),
        )


@dataclass
class ScriptMeta:
    title: str = ""
    duration: float | None = None
    characters: list[str] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass
class ScriptDocument:
    meta: ScriptMeta = field(default_factory=ScriptMeta)
    scenes: list[SceneRecord] = field(default_factory=list)
    high_points: Any = None
    extra: dict[str, Any] = field(default_factory=dict)

    def iter_events(self) -> Iterator[tuple[int, EventRecord]]:
        for scene in self.scenes:
            for event in scene.events:
                yield scene.scene_id, event


@dataclass(frozen=True)
class Violation:
    severity: str  # "error" | "warning"
    message: str
    scene_id: int | None = None
    event_index: int | None = None


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_META_KEYS = ("title", "duration", "characters")
_SCENE_KEYS = ("scene_id", "location", "type", "environment", "time", "mood", "events")
_EVENT_KEYS = ("timestamp", "character", "action", "expression", "dialogue",
               "voice_type", "audio_cue", "subtext")


def strip_fence(text: str) -> str:
    """Unwrap one fenced ```json ... ``` block if present."""
    m = _FENCE_RE.search(text)
    return m.group(1) if m else text


def _clean_text(value: Any, where: str, problems: list[str]) -> str | None:
    if value is None:
        return None
    if isinstance(value, str):
        stripped = value.strip()
        return stripped or None
    if isinstance(value, (int, float, bool)):
        return str(value)
    problems.append(f"{where}: expected text, got {type(value).__name__}")
    return None


def _canon_character(name: str) -> str:
    return ENVIRONMENT_NAME if name.casefold() == "environment" else name


def _parse_event(raw: Any, where: str, problems: list[str]) -> EventRecord | None:
    if not isinstance(raw, dict):
        problems.append(f"{where}: event is not an object")
        return None
    if "timestamp" not in raw:
        problems.append(f"{where}: missing timestamp")
        return None
    try:
        interval = parse_interval(raw["timestamp"])
    except MalformedTimecode as exc:
        problems.append(f"{where}: {exc}")
        return None
    character = raw.get("character")
    if not isinstance(character, str) or not character.strip():
        problems.append(f"{where}: event missing character")
        return None
    extra = {k: v for k, v in raw.items() if k not in _EVENT_KEYS}
    voice_type = None
    if isinstance(raw.get("voice_type"), str):
        voice_type = VoiceType.parse(raw["voice_type"])
        if voice_type is None and raw["voice_type"].strip():
            extra["voice_type"] = raw["voice_type"]
    event = EventRecord(
        interval=interval,
        character=_canon_character(character.strip()),
        action=_clean_text(raw.get("action"), f"{where}.action", problems),
        expression=_clean_text(raw.get("expression"), f"{where}.expression", problems),
        dialogue=_clean_text(raw.get("dialogue"), f"{where}.dialogue", problems),
        voice_type=voice_type,
        audio_cue=_clean_text(raw.get("audio_cue"), f"{where}.audio_cue", problems),
        subtext=_clean_text(raw.get("subtext"), f"{where}.subtext", problems),
        extra=extra,
    )
    if all(event.content(name) is None for name in CONTENT_FIELDS):
        problems.append(
            f"{where}: event needs at least one of dialogue/action/expression/audio_cue"
        )
        return None
    return event


def parse_script(text: str) -> ScriptDocument:
    """Parse script JSON (optionally wrapped in a fenced block) into the
    typed document.  Event-level defects are collected and reported together
    in one SchemaError rather than stopping at the first."""
    try:
        data = json.loads(strip_fence(text))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("top level must be a JSON object")
    if "meta" not in data or not isinstance(data["meta"], dict):
        raise SchemaError("missing meta object")
    if "script" not in data or not isinstance(data["script"], list):
        raise SchemaError("missing script array")

    problems: list[str] = []
    raw_meta = data["meta"]
    duration = None
    if raw_meta.get("duration") is not None:
        try:
            duration = parse_timecode(raw_meta["duration"])
        except MalformedTimecode as exc:
            problems.append(f"meta.duration: {exc}")
    characters: list[str] = []
    raw_chars = raw_meta.get("characters", [])
    if isinstance(raw_chars, list):
        characters = [
            _canon_character(str(c).strip()) for c in raw_chars if str(c).strip()
        ]
    elif raw_chars is not None:
        problems.append("meta.characters: expected a list")
    meta = ScriptMeta(
        title=str(raw_meta.get("title") or ""),
        duration=duration,
        characters=characters,
        extra={k: v for k, v in raw_meta.items() if k not in _META_KEYS},
    )

    scenes: list[SceneRecord] = []
    for s_idx, raw_scene in enumerate(data["script"]):
        where = f"script[{s_idx}]"
        if not isinstance(raw_scene, dict):
            problems.append(f"{where}: scene is not an object")
            continue
        scene_id = raw_scene.get("scene_id")
        if not isinstance(scene_id, int) or isinstance(scene_id, bool):
            problems.append(f"{where}: missing integer scene_id")
            continue
        events: list[EventRecord] = []
        raw_events = raw_scene.get("events", [])
        if not isinstance(raw_events, list):
            problems.append(f"{where}.events: expected a list")
            raw_events = []
        for e_idx, raw_event in enumerate(raw_events):
            event = _parse_event(raw_event, f"{where}.events[{e_idx}]", problems)
            if event is not None:
                events.append(event)
        scenes.append(
            SceneRecord(
                scene_id=scene_id,
                location=str(raw_scene.get("location") or ""),
                scene_type=str(raw_scene.get("type") or ""),
                environment=str(raw_scene.get("environment") or ""),
                time_of_day=str(raw_scene.get("time") or ""),
                mood=str(raw_scene.get("mood") or ""),
                events=events,
                extra={k: v for k, v in raw_scene.items() if k not in _SCENE_KEYS},
            )
        )

    if problems:
        raise SchemaError("script does not satisfy the schema", problems)

    return ScriptDocument(
        meta=meta,
        scenes=scenes,
        high_points=data.get("high_points"),
        extra={
            k: v for k, v in data.items()
            if k not in ("meta", "script", "high_points")
        },
    )


def load_script(path: str) -> ScriptDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read script {path}: {exc}") from exc
    return parse_script(text)


# ---------------------------------------------------------------------------
# Validation / flattening / output
# ---------------------------------------------------------------------------

def validate_script(doc: ScriptDocument) -> list[Violation]:
    """Structural checks beyond the schema: scene_id ordering, event ordering
    within scenes (errors), and events overrunning meta.duration (warnings)."""
    out: list[Violation] = []
    prev_id: int | None = None
    for scene in doc.scenes:
        if prev_id is not None and scene.scene_id <= prev_id:
            out.append(Violation(
                "error",
                f"scene_id {scene.scene_id} does not increase (previous {prev_id})",
                scene_id=scene.scene_id,
            ))
        prev_id = scene.scene_id
        prev_start: float | None = None
        for idx, event in enumerate(scene.events):
            if prev_start is not None and event.interval.start < prev_start:
                out.append(Violation(
                    "error",
                    f"event {idx} starts at {event.interval.start:g}s, before the "
                    f"previous event ({prev_start:g}s)",
                    scene_id=scene.scene_id,
                    event_index=idx,
                ))
            prev_start = event.interval.start
            if doc.meta.duration is not None and event.interval.end > doc.meta.duration:
                out.append(Violation(
                    "warning",
                    f"event {idx} ends at {event.interval.end:g}s, past the stated "
                    f"duration ({doc.meta.duration:g}s)",
                    scene_id=scene.scene_id,
                    event_index=idx,
                ))
    return out


@dataclass(frozen=True)
class FlatEvent:
    scene_id: int
    event: EventRecord


def flatten_events(doc: ScriptDocument) -> list[FlatEvent]:
    """Events across all scenes, stable-sorted by interval start."""
    flat = [FlatEvent(sid, ev) for sid, ev in doc.iter_events()]
    flat.sort(key=lambda fe: fe.event.interval.start)
    return flat


def _event_to_json(event: EventRecord) -> dict[str, Any]:
    out: dict[str, Any] = {"timestamp": event.interval.as_text(),
                           "character": event.character}
    if event.action is not None:
        out["action"] = event.action
    if event.expression is not None:
        out["expression"] = event.expression
    if event.dialogue is not None:
        out["dialogue"] = event.dialogue
    if event.voice_type is not None:
        out["voice_type"] = event.voice_type.value
    if event.audio_cue is not None:
        out["audio_cue"] = event.audio_cue
    if event.subtext is not None:
        out["subtext"] = event.subtext
    out.update(event.extra)
    return out


def emit_script(doc: ScriptDocument) -> str:
    """Canonical two-space-indented JSON; schema keys first, retained unknown
    keys after, so parse(emit(doc)) == doc."""
    meta: dict[str, Any] = {"title": doc.meta.title}
    if doc.meta.duration is not None:
        meta["duration"] = format_timecode(doc.meta.duration)
    meta["characters"] = list(doc.meta.characters)
    meta.update(doc.meta.extra)
    scenes = []
    for scene in doc.scenes:
        s: dict[str, Any] = {
            "scene_id": scene.scene_id,
            "location": scene.location,
            "type": scene.scene_type,
            "environment": scene.environment,
            "time": scene.time_of_day,
            "mood": scene.mood,
        }
        s.update(scene.extra)
        s["events"] = [_event_to_json(ev) for ev in scene.events]
        scenes.append(s)
    root: dict[str, Any] = {"meta": meta, "script": scenes}
    if doc.high_points is not None:
        root["high_points"] = doc.high_points
    root.update(doc.extra)
    return json.dumps(root, ensure_ascii=False, indent=2)
