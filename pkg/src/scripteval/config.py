"""Evaluation settings, with optional TOML overrides.

Defaults reproduce the standard protocol; a config file only needs the keys
it changes.  Judge connection settings live in a ``[judge]`` table.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields as dataclass_fields

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .alignment import AlignParams
from .errors import ConfigError
from .judge import JudgeConfig
from .similarity import TextScoreWeights


@dataclass
class EvalConfig:
    # event alignment
    dialogue_weight: float = 5.0
    action_weight: float = 3.0
    max_start_distance: float = 30.0
    bonus_cap: float = 0.1
    bonus_decay: float = 15.0
    max_fanout: int = 3
    # character resolution
    fallback_threshold: float = 0.05
    # field scoring
    count_unaligned_pred_items: bool = False
    overall_pooled: bool = False
    case_fold: bool = True
    # boundary quality
    tiou_thresholds: tuple[float, ...] = (0.1, 0.3, 0.5)
    # scene-level pass
    scene_max_start_distance: float = 60.0
    scene_max_fanout: int = 3
    # segmented reward
    reward_window: float = 60.0
    reward_max_fanout: int = 1
    # corpus runs
    workers: int = 4
    judge: JudgeConfig = field(default_factory=JudgeConfig)

    def event_align_params(self, max_fanout: int | None = None) -> AlignParams:
        return AlignParams(
            weights=TextScoreWeights(self.dialogue_weight, self.action_weight),
            max_start_distance=self.max_start_distance,
            max_fanout=self.max_fanout if max_fanout is None else max_fanout,
            bonus_cap=self.bonus_cap,
            bonus_decay=self.bonus_decay,
            case_fold=self.case_fold,
        )

    def scene_align_params(self) -> AlignParams:
        # scenes weight both text channels equally
        return AlignParams(
            weights=TextScoreWeights(1.0, 1.0),
            max_start_distance=self.scene_max_start_distance,
            max_fanout=self.scene_max_fanout,
            bonus_cap=self.bonus_cap,
            bonus_decay=self.bonus_decay,
            case_fold=self.case_fold,
        )

    def reward_align_params(self) -> AlignParams:
        return self.event_align_params(max_fanout=self.reward_max_fanout)


def config_from_dict(raw: dict) -> EvalConfig:
    raw = dict(raw)
    judge_raw = raw.pop("judge", {})
    if not isinstance(judge_raw, dict):
        raise ConfigError("judge section must be a table")
    known = {f.name for f in dataclass_fields(EvalConfig)} - {"judge"}
    judge_known = {f.name for f in dataclass_fields(JudgeConfig)}
    unknown = sorted(set(raw) - known)
    unknown += sorted(f"judge.{k}" for k in set(judge_raw) - judge_known)
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(unknown))
    if "tiou_thresholds" in raw:
        raw["tiou_thresholds"] = tuple(float(t) for t in raw["tiou_thresholds"])
    try:
        return EvalConfig(judge=JudgeConfig(**judge_raw), **raw)
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}") from exc


def load_config(path: str) -> EvalConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    return config_from_dict(raw)
