"""Follow-up question generation: template pools with an optional LLM backend.

Each action type carries a directive describing what the next chatbot message
should do. The template generator picks a phrasing from a per-action pool via
an injected random source, so sessions replay deterministically. The LLM
generator sends the directive plus a short context window to a chat model;
on failure it retries once, then falls back to templates and flags the result.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .actions import ActionType
from .llm import ChatCompletionClient, ChatMessage, LlmError

CONTEXT_WINDOW = 3
GENERATION_TEMPERATURE = 0.7

ACTION_INSTRUCTIONS: dict[ActionType, str] = {
    ActionType.SPECIFICATION: (
        "Ask the respondent for a concrete example with contextual details "
        "such as when, where, or who was involved."
    ),
    ActionType.ELABORATION: (
        "Ask the respondent to explain their reasoning or feelings in more depth."
    ),
    ActionType.TOPIC_PROBE: (
        "Move the conversation to a related dimension of campus experience."
    ),
    ActionType.VALIDATION: (
        "Acknowledge and affirm the respondent's answer in under 20 words."
    ),
    ActionType.CONTINUATION: (
        "Offer a minimal prompt to continue, between 5 and 10 words."
    ),
}

# Slots: {topic} is the directive's topic hint (or a neutral filler).
TEMPLATES: dict[ActionType, tuple[str, ...]] = {
    ActionType.SPECIFICATION: (
        "Could you walk me through a specific time that happened? Where were you and who was involved?",
        "Can you give me a concrete example of that, including when and where it took place?",
        "What is one specific moment related to {topic} that stands out? Please describe the setting.",
        "Could you describe a particular instance in detail, including what led up to it?",
    ),
    ActionType.ELABORATION: (
        "Tell me more about that. What was going through your mind?",
        "Why do you think that is, and how did it make you feel?",
        "What do you think drives that feeling for you?",
        "How has that affected you personally?",
    ),
    ActionType.TOPIC_PROBE: (
        "Beyond {topic}, how would you describe your experience with the broader campus community?",
        "Shifting to a related area: how satisfied are you with campus housing and dining?",
        "Thinking about other parts of campus life, how do you find the academic support services?",
        "Outside of {topic}, what has your experience been with campus facilities like the library and study spaces?",
    ),
    ActionType.VALIDATION: (
        "Thank you for sharing that; your perspective really helps us understand the student experience.",
        "That is really valuable feedback, thank you for being so open.",
        "I appreciate you sharing that; it helps us see the full picture.",
        "Thanks, that is a helpful way of putting it.",
    ),
    ActionType.CONTINUATION: (
        "Is there anything else you would like to share?",
        "Anything else on your mind?",
        "What else comes to mind?",
        "Would you like to add anything more?",
    ),
}

OPENING_TEMPLATES: tuple[str, ...] = (
    "To get us started, how has your experience with {topic} been so far?",
    "Thanks for joining. To begin, what is your overall impression of {topic}?",
    "Let's start broad: how do you feel about {topic} these days?",
)

DEFAULT_TOPIC = "campus life"


@dataclass(frozen=True)
class ContextExchange:
    """One prior (question, response) pair shown to the generator."""

    question: str
    response: str


@dataclass(frozen=True)
class QuestionDirective:
    """What the next chatbot message must accomplish."""

    action: ActionType
    context: tuple[ContextExchange, ...] = ()
    topic_hint: str = ""

    def __post_init__(self) -> None:
        if len(self.context) > CONTEXT_WINDOW:
            raise ValueError(f"context window limited to {CONTEXT_WINDOW} exchanges")


@dataclass(frozen=True)
class GeneratedQuestion:
    text: str
    fallback: bool = False


class QuestionGenerator(Protocol):
    def generate(self, directive: QuestionDirective) -> GeneratedQuestion: ...


def _fill(template: str, topic_hint: str) -> str:
    return template.replace("{topic}", topic_hint or DEFAULT_TOPIC)


class TemplateQuestionGenerator:
    """Deterministic phrasing choice from fixed per-action pools."""

    def __init__(self, rng: random.Random | None = None):
        self.rng = rng if rng is not None else random.Random()

    def generate(self, directive: QuestionDirective) -> GeneratedQuestion:
        pool = TEMPLATES[directive.action]
        template = pool[self.rng.randrange(len(pool))]
        return GeneratedQuestion(text=_fill(template, directive.topic_hint))

    def opening_question(self, topic_hint: str = "") -> str:
        template = OPENING_TEMPLATES[self.rng.randrange(len(OPENING_TEMPLATES))]
        return _fill(template, topic_hint)


@dataclass
class LlmQuestionGenerator:
    """Chat-model generation with single retry and template fallback."""

    client: ChatCompletionClient
    fallback_generator: TemplateQuestionGenerator = field(default_factory=TemplateQuestionGenerator)
    temperature: float = GENERATION_TEMPERATURE

    def generate(self, directive: QuestionDirective) -> GeneratedQuestion:
        messages = self._build_messages(directive)
        for _ in range(2):
            try:
                return GeneratedQuestion(text=self.client.complete(messages, self.temperature))
            except LlmError:
                continue
        fallback = self.fallback_generator.generate(directive)
        return GeneratedQuestion(text=fallback.text, fallback=True)

    def _build_messages(self, directive: QuestionDirective) -> list[ChatMessage]:
        system = (
            "You are a conversational survey assistant interviewing a university "
            "student about their campus experience. Reply with exactly one chatbot "
            "message and nothing else."
        )
        lines = []
        if directive.topic_hint:
            lines.append(f"Survey topic: {directive.topic_hint}")
        if directive.context:
            lines.append("Recent exchanges:")
            for exchange in directive.context:
                lines.append(f"Interviewer: {exchange.question}")
                lines.append(f"Respondent: {exchange.response}")
        lines.append(f"Instruction: {ACTION_INSTRUCTIONS[directive.action]}")
        return [
            ChatMessage(role="system", content=system),
            ChatMessage(role="user", content="\n".join(lines)),
        ]


def generate_question(
    directive: QuestionDirective, generator: QuestionGenerator
) -> GeneratedQuestion:
    return generator.generate(directive)


def context_from_history(
    history: Sequence[tuple[str, str]], window: int = CONTEXT_WINDOW
) -> tuple[ContextExchange, ...]:
    """Last ``window`` (question, response) pairs, oldest first."""
    tail = list(history)[-window:]
    return tuple(ContextExchange(question=q, response=r) for q, r in tail)
