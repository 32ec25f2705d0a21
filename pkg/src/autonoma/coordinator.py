"""Conversational entry point: intent gating, refusal, clarification, handoff.

Classification is a deterministic rule cascade with the completion provider
as last resort, in this fixed order: harmful patterns, greeting/small-talk
patterns, referent-resolution check, provider. Safety comes first: if any
harmful rule matches, the result is Harmful no matter what the provider would
have said (the provider is not even consulted).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

from .clock import Clock, WallClock
from .errors import ProviderUnavailable
from .model import Lang, Message, Role
from .model.serialize import digest, message_to_jsonable
from .provider import CompletionRequest, ProviderRouter


class IntentClass(str, Enum):
    CASUAL_CHAT = "CasualChat"
    HARMFUL = "Harmful"
    AMBIGUOUS = "Ambiguous"
    TASK = "Task"


@dataclass(frozen=True)
class Intent:
    intent_class: IntentClass
    confidence: float
    cues: tuple[str, ...]


@dataclass(frozen=True)
class HandoffRecord:
    """Unit of count for the handoff success metric."""

    from_role: str
    to_role: str
    payload_digest: str
    accepted: bool
    timestamp: int


# Arabic Unicode blocks: Arabic, Supplement, Extended-A, Presentation Forms A/B
_ARABIC_RANGES = (
    (0x0600, 0x06FF),
    (0x0750, 0x077F),
    (0x08A0, 0x08FF),
    (0xFB50, 0xFDFF),
    (0xFE70, 0xFEFF),
)

_LANG_THRESHOLD = 0.30  # tolerates mixed-script prompts


def detect_language(text: str) -> Lang:
    """Codepoint-ratio heuristic over alphabetic characters.

    ar iff >= 30% of alphabetic codepoints fall in the Arabic blocks; en iff
    >= 30% are Basic-Latin letters and the text is not ar; und otherwise.
    """
    alpha = [ch for ch in text if ch.isalpha()]
    if not alpha:
        return Lang.UND
    arabic = sum(1 for ch in alpha if any(lo <= ord(ch) <= hi for lo, hi in _ARABIC_RANGES))
    latin = sum(1 for ch in alpha if "a" <= ch.lower() <= "z")
    if arabic / len(alpha) >= _LANG_THRESHOLD:
        return Lang.AR
    if latin / len(alpha) >= _LANG_THRESHOLD:
        return Lang.EN
    return Lang.UND


def _load_patterns(path: str | Path | None, default_name: str) -> list[re.Pattern]:
    """UTF-8 pattern file, one case-insensitive regex per line, # comments."""
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = (
            resources.files("autonoma.coordinator_data").joinpath(default_name).read_text("utf-8")
        )
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        out.append(re.compile(line, re.IGNORECASE))
    return out


_REFERENT_WORDS = frozenset(
    ["it", "this", "that", "them", "those", "these", "him", "her", "هذا", "ذلك", "هذه", "تلك"]
)
# a pronoun later in the sentence usually has an intra-message antecedent
# ("collect the data and chart it"); only a leading pronoun is suspicious
_REFERENT_WINDOW = 3


def _has_leading_referent(text: str) -> bool:
    words = re.findall(r"[\w؀-ۿ]+", text.lower())
    return any(w in _REFERENT_WORDS for w in words[:_REFERENT_WINDOW])

EntityExtractor = Callable[[Message, list], Iterable[str]]


class RuleEngine:
    """The deterministic half of classification.

    ``entity_extractors`` is an extension hook: each extractor yields cue
    identifiers merged into the Intent cues. Only the referent-resolution
    check ships by default.
    """

    def __init__(
        self,
        harmful_path: str | Path | None = None,
        greeting_path: str | Path | None = None,
    ):
        self.harmful = _load_patterns(harmful_path, "harmful_patterns.txt")
        self.greeting = _load_patterns(greeting_path, "greeting_patterns.txt")
        self.entity_extractors: list[EntityExtractor] = []

    def match_harmful(self, text: str) -> list[str]:
        return [f"harmful:{i}" for i, p in enumerate(self.harmful) if p.search(text)]

    def match_greeting(self, text: str) -> list[str]:
        return [f"greeting:{i}" for i, p in enumerate(self.greeting) if p.search(text)]

    def unresolved_referent(self, message: Message, history: list[Message]) -> bool:
        """A referent pronoun with nothing to bind to.

        An antecedent is any prior message not authored by the coordinator
        (coordinator chrome like clarification requests never binds a
        pronoun). No antecedent + leading referent = unresolved.
        """
        if not _has_leading_referent(message.content):
            return False
        return not any(m.role is not Role.COORDINATOR for m in history)

    def extract_entities(self, message: Message, history: list[Message]) -> list[str]:
        cues: list[str] = []
        for extractor in self.entity_extractors:
            cues.extend(extractor(message, history))
        return cues


_CLARIFICATION_LIMIT = 2  # a third ambiguous turn is treated as CasualChat

_REPLIES = {
    Lang.EN: {
        "greeting": "Hello! I'm doing well — how can I help you today?",
        "refusal": "I can't help with that request. If there's something else you need, I'm happy to assist.",
        "clarify": "Could you tell me a bit more about what you'd like me to do?",
    },
    Lang.AR: {
        "greeting": "مرحباً! أنا بخير — كيف يمكنني مساعدتك اليوم؟",
        "refusal": "لا أستطيع المساعدة في هذا الطلب. إذا كان هناك شيء آخر تحتاجه، يسعدني المساعدة.",
        "clarify": "هل يمكنك إخباري بالمزيد عما تريد مني القيام به؟",
    },
}


class Coordinator:
    """Stateless given (rule set, provider handle); safe across conversations."""

    def __init__(
        self,
        provider: ProviderRouter,
        rules: RuleEngine | None = None,
        clock: Clock | None = None,
    ):
        self.provider = provider
        self.rules = rules or RuleEngine()
        self.clock = clock or WallClock()

    def classify(self, message: Message, history: list[Message]) -> Intent:
        """Deterministic given (message, history, rule set, provider script)."""
        harmful = self.rules.match_harmful(message.content)
        if harmful:
            return Intent(IntentClass.HARMFUL, 1.0, tuple(harmful))

        entity_cues = self.rules.extract_entities(message, history)

        greeting = self.rules.match_greeting(message.content)
        if greeting:
            return Intent(IntentClass.CASUAL_CHAT, 1.0, tuple(greeting + entity_cues))

        if self.rules.unresolved_referent(message, history):
            if self._clarifications_asked(history) >= _CLARIFICATION_LIMIT:
                return Intent(IntentClass.CASUAL_CHAT, 1.0, ("clarification_limit",))
            return Intent(IntentClass.AMBIGUOUS, 1.0, tuple(["referent:unresolved"] + entity_cues))

        try:
            text = self._ask_provider(message, history)
        except ProviderUnavailable:
            if self._clarifications_asked(history) >= _CLARIFICATION_LIMIT:
                return Intent(IntentClass.CASUAL_CHAT, 0.0, ("provider_unavailable", "clarification_limit"))
            return Intent(IntentClass.AMBIGUOUS, 0.0, ("provider_unavailable",))

        cls = self._parse_provider_class(text)
        if cls is IntentClass.AMBIGUOUS and self._clarifications_asked(history) >= _CLARIFICATION_LIMIT:
            return Intent(IntentClass.CASUAL_CHAT, 0.5, ("clarification_limit",))
        return Intent(cls, 0.5, tuple(entity_cues) or ("provider",))

    def reply_for(self, intent: Intent, lang: Lang) -> str | None:
        """Coordinator reply text mirroring the user's language (und -> en)."""
        table = _REPLIES[Lang.AR if lang is Lang.AR else Lang.EN]
        if intent.intent_class is IntentClass.CASUAL_CHAT:
            return table["greeting"]
        if intent.intent_class is IntentClass.HARMFUL:
            return table["refusal"]
        if intent.intent_class is IntentClass.AMBIGUOUS:
            return table["clarify"]
        return None

    def handoff_to_planner(
        self,
        conversation_id: str,
        context: list[Message],
        acknowledge: Callable[[], bool],
    ) -> HandoffRecord:
        """Transfer responsibility to the planner; accepted iff acknowledged."""
        payload_digest = digest(
            {"conversation": conversation_id, "context": [message_to_jsonable(m) for m in context]}
        )
        try:
            accepted = bool(acknowledge())
        except Exception:
            accepted = False
        return HandoffRecord(
            from_role="coordinator",
            to_role="planner",
            payload_digest=payload_digest,
            accepted=accepted,
            timestamp=self.clock.now_ms(),
        )

    # -- internals -----------------------------------------------------------

    def _clarifications_asked(self, history: list[Message]) -> int:
        """Consecutive clarification requests at the tail of the history."""
        clarify_texts = {t["clarify"] for t in _REPLIES.values()}
        count = 0
        for m in reversed(history):
            if m.role is Role.COORDINATOR:
                if m.content in clarify_texts:
                    count += 1
                else:
                    break
            elif m.role is not Role.USER:
                break
        return count

    def _ask_provider(self, message: Message, history: list[Message]) -> str:
        convo = [("system", (
            "Classify the user's latest message as exactly one of: "
            "task, casual_chat, ambiguous, harmful. Answer with the single label."
        ))]
        for m in history[-6:]:
            role = "user" if m.role is Role.USER else "assistant"
            convo.append((role, m.content))
        convo.append(("user", message.content))
        return self.provider.complete(
            CompletionRequest(role_context="coordinator", messages=tuple(convo))
        ).text

    @staticmethod
    def _parse_provider_class(text: str) -> IntentClass:
        lowered = text.lower()
        if "harmful" in lowered:
            return IntentClass.HARMFUL
        if "casual" in lowered:
            return IntentClass.CASUAL_CHAT
        if "task" in lowered:
            return IntentClass.TASK
        return IntentClass.AMBIGUOUS
