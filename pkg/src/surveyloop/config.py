"""Flat key=value configuration shared by the CLI and the HTTP service.

Files contain one ``key = value`` per line; ``#`` starts a comment. Unknown
keys are rejected so typos surface immediately. Command-line flags override
file values, which override built-in defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

from .engine import DEFAULT_EPSILON, DEFAULT_HORIZON, ConversationEngine
from .generation import TemplateQuestionGenerator
from .llm import ChatCompletionClient, DEFAULT_TIMEOUT_SECONDS
from .lsde import ResponseScorer
from .policy import DEFAULT_ALPHA, EpsilonSchedule, EvTable, load_default_priors, read_table
from .sentiment import LexiconSentimentScorer
from .specificity import RuleSpecificityDetector


class ConfigError(Exception):
    """Configuration file or value is invalid."""


@dataclass(frozen=True)
class AppConfig:
    # engine
    horizon: int = DEFAULT_HORIZON
    alpha: float = DEFAULT_ALPHA
    epsilon_schedule: str = "fixed"
    epsilon: float = DEFAULT_EPSILON
    epsilon_start: float = 0.40
    epsilon_end: float = 0.05
    generator: str = "templates"
    scorer_mode: str = "strict"
    sentiment_lexicon: str = ""
    temporal_words: str = ""
    spatial_words: str = ""
    prior_table: str = ""
    # service
    bind_host: str = "127.0.0.1"
    bind_port: int = 8000
    admin_token: str = ""
    cors_origins: str = ""
    transcript_dir: str = ""
    # llm backend
    llm_base_url: str = ""
    llm_model: str = ""
    llm_timeout: float = DEFAULT_TIMEOUT_SECONDS

    def schedule(self) -> EpsilonSchedule:
        if self.epsilon_schedule == "fixed":
            return EpsilonSchedule.fixed(self.epsilon)
        if self.epsilon_schedule == "linear_decay":
            return EpsilonSchedule.linear_decay(
                self.epsilon_start, self.epsilon_end, self.horizon
            )
        raise ConfigError(f"unknown epsilon_schedule {self.epsilon_schedule!r}")

    def cors_origin_list(self) -> tuple[str, ...]:
        return tuple(o.strip() for o in self.cors_origins.split(",") if o.strip())

    def build_scorer(self) -> ResponseScorer:
        if self.scorer_mode not in ("strict", "lenient"):
            raise ConfigError(f"unknown scorer_mode {self.scorer_mode!r}")
        sentiment = LexiconSentimentScorer(self.sentiment_lexicon or None)
        detector = RuleSpecificityDetector(
            self.temporal_words or None, self.spatial_words or None
        )
        return ResponseScorer(
            sentiment=sentiment, detector=detector, lenient=self.scorer_mode == "lenient"
        )

    def load_priors(self) -> EvTable:
        if self.prior_table:
            return read_table(self.prior_table)
        return load_default_priors()

    def build_engine(self) -> ConversationEngine:
        if self.generator == "templates":
            factory = TemplateQuestionGenerator
        elif self.generator == "llm":
            client = ChatCompletionClient(
                base_url=self.llm_base_url or None,
                model=self.llm_model or None,
                timeout=self.llm_timeout,
            )

            def factory(rng):  # type: ignore[misc]
                from .generation import LlmQuestionGenerator

                return LlmQuestionGenerator(
                    client=client, fallback_generator=TemplateQuestionGenerator(rng)
                )

        else:
            raise ConfigError(f"unknown generator {self.generator!r}")
        return ConversationEngine(
            priors=self.load_priors(),
            scorer=self.build_scorer(),
            generator_factory=factory,
        )


_DEFAULTS: dict[str, Any] = {f.name: f.default for f in fields(AppConfig)}


def _coerce(key: str, raw: str) -> Any:
    default = _DEFAULTS[key]
    if isinstance(default, int) and not isinstance(default, bool):
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"{key}: expected integer, got {raw!r}") from exc
    if isinstance(default, float):
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"{key}: expected number, got {raw!r}") from exc
    return raw


def parse_config_text(text: str, origin: str = "<config>") -> dict[str, Any]:
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{origin} line {lineno}: expected key = value")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _DEFAULTS:
            raise ConfigError(f"{origin} line {lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"{origin} line {lineno}: {exc}") from exc
    return values


def load_config(path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> AppConfig:
    values: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        values.update(parse_config_text(text, origin=str(path)))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = value
    config = replace(AppConfig(), **values)
    _validate(config)
    return config


def _validate(config: AppConfig) -> None:
    if config.horizon < 1:
        raise ConfigError("horizon must be >= 1")
    if not 0.0 < config.alpha <= 1.0:
        raise ConfigError("alpha must be in (0, 1]")
    for name in ("epsilon", "epsilon_start", "epsilon_end"):
        value = getattr(config, name)
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"{name} must be in [0, 1]")
    config.schedule()
    if config.scorer_mode not in ("strict", "lenient"):
        raise ConfigError(f"unknown scorer_mode {config.scorer_mode!r}")
    if config.generator not in ("templates", "llm"):
        raise ConfigError(f"unknown generator {config.generator!r}")
