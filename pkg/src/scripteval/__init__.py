"""scripteval: evaluate predicted video scripts against references.

The pipeline aligns timestamped events between two scripts, resolves the
character name mapping, scores each content field with precision/recall/F1,
and sweeps temporal overlap thresholds.  A segmented reward variant folds
the same machinery into a single number per prediction.
"""

from .config import EvalConfig, load_config
from .errors import (
    ConfigError,
    JudgeUnavailable,
    MalformedTimecode,
    ManifestError,
    NoComparableContent,
    ParseError,
    SchemaError,
    ScriptEvalError,
    TemplateMissing,
)
from .judge import JudgeConfig, LexicalJudge, RemoteJudge
from .pipeline import (
    evaluate_corpus,
    evaluate_files,
    evaluate_video,
    read_manifest,
    segmented_reward,
)
from .reports import CorpusReport, RewardReport, VideoReport, emit_report
from .schema import (
    ScriptDocument,
    load_script,
    parse_script,
    validate_script,
)

__version__ = "0.1.0"

__all__ = [
    "EvalConfig",
    "load_config",
    "ConfigError",
    "JudgeUnavailable",
    "MalformedTimecode",
    "ManifestError",
    "NoComparableContent",
    "ParseError",
    "SchemaError",
    "ScriptEvalError",
    "TemplateMissing",
    "JudgeConfig",
    "LexicalJudge",
    "RemoteJudge",
    "evaluate_corpus",
    "evaluate_files",
    "evaluate_video",
    "read_manifest",
    "segmented_reward",
    "CorpusReport",
    "RewardReport",
    "VideoReport",
    "emit_report",
    "ScriptDocument",
    "load_script",
    "parse_script",
    "validate_script",
    "__version__",
]
