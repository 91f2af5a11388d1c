"""Exception hierarchy shared by every llmdetect module.

Each error carries a short machine-greppable ``code`` that the CLI prints
as ``llmdetect: error[<code>]: <message>``.
"""


class LlmdetectError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class CorpusError(LlmdetectError):
    """Malformed dataset file, bad label, duplicate id, or undecodable bytes."""

    code = "corpus"


class TokenizerError(LlmdetectError):
    """Invalid BPE training input or vocabulary file."""

    code = "tokenizer"


class FeatureError(LlmdetectError):
    """Invalid TF-IDF configuration or empty fitting corpus."""

    code = "features"


class ModelError(LlmdetectError):
    """Invalid training data/config or corrupt model bundle."""

    code = "model"


class EnsembleError(LlmdetectError):
    """Bad voter specification, score file, or id coverage failure."""

    code = "ensemble"


class MetricsError(LlmdetectError):
    """Single-class labels or mismatched score/label lengths."""

    code = "metrics"


class ConfigError(LlmdetectError):
    """Unknown key, unparseable value, or missing section in a run config."""

    code = "config"
