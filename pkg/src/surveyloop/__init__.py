"""Adaptive conversational survey engine with within-session policy learning."""

from .actions import ACTION_ORDER, ActionType, IntentLabel, KeywordClassifier
from .engine import (
    ConversationEngine,
    ConversationSession,
    SessionConfig,
    SessionTranscript,
)
from .lsde import LsdeScore, ResponseScorer, ResponseText, ScoringError
from .policy import (
    EpsilonSchedule,
    EvTable,
    ExchangePair,
    compute_priors,
    epsilon_at,
    fork_session,
    load_default_priors,
    select_action,
    update_ev,
)
from .sentiment import LexiconSentimentScorer
from .specificity import RuleSpecificityDetector, SpecificityFlags
from .states import EngagementState, assign_state, delta_q

__version__ = "0.1.0"

__all__ = [
    "ACTION_ORDER",
    "ActionType",
    "ConversationEngine",
    "ConversationSession",
    "EngagementState",
    "EpsilonSchedule",
    "EvTable",
    "ExchangePair",
    "IntentLabel",
    "KeywordClassifier",
    "LexiconSentimentScorer",
    "LsdeScore",
    "ResponseScorer",
    "ResponseText",
    "RuleSpecificityDetector",
    "ScoringError",
    "SessionConfig",
    "SessionTranscript",
    "SpecificityFlags",
    "__version__",
    "assign_state",
    "compute_priors",
    "delta_q",
    "epsilon_at",
    "fork_session",
    "load_default_priors",
    "select_action",
    "update_ev",
]
