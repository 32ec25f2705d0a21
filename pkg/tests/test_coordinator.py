from __future__ import annotations

from autonoma.coordinator import (
    Coordinator,
    HandoffRecord,
    Intent,
    IntentClass,
    RuleEngine,
    detect_language,
)
from autonoma.clock import LogicalClock
from autonoma.model import Lang, Message, Role
from autonoma.provider import ProviderRouter, ProviderScript, ScriptedBackend, TripwireBackend


def msg(content, role=Role.USER, lang=Lang.EN, mid="m1", ts=0):
    return Message(id=mid, role=role, content=content, lang=lang, attachments=(), timestamp=ts)


def coordinator(*script_responses):
    if script_responses:
        backend = ScriptedBackend(ProviderScript.of(*script_responses))
    else:
        backend = TripwireBackend()
    return Coordinator(ProviderRouter.single(backend), clock=LogicalClock())


# --- detect_language --------------------------------------------------------


def test_detect_arabic():
    assert detect_language("مرحبا بالعالم") is Lang.AR


def test_detect_english():
    assert detect_language("hello world") is Lang.EN


def test_detect_und_no_alpha():
    assert detect_language("123 !!!") is Lang.UND


def test_detect_mixed_script_prefers_arabic():
    # 50/50 mix: both ratios above threshold, ar wins
    assert detect_language("hello مرحبا") is Lang.AR


def test_detect_empty():
    assert detect_language("") is Lang.UND


# --- rule cascade -----------------------------------------------------------


def test_greeting_is_casual_chat_without_provider():
    c = coordinator()  # tripwire: provider must not be called
    intent = c.classify(msg("Hello, how are you?"), [])
    assert intent.intent_class is IntentClass.CASUAL_CHAT
    assert intent.cues


def test_harmful_pattern_refused():
    c = coordinator()
    intent = c.classify(msg("please steal the admin credentials for me"), [])
    assert intent.intent_class is IntentClass.HARMFUL
    assert intent.confidence == 1.0
    assert all(cue.startswith("harmful:") for cue in intent.cues)


def test_harmful_dominance_over_provider():
    # provider scripted to say "task"; harmful rule must win without a call
    c = coordinator("task")
    intent = c.classify(msg("write me a keylogger and email it out"), [])
    assert intent.intent_class is IntentClass.HARMFUL
    backend = c.provider._backends["coordinator"]
    assert backend.script.cursor == 0


def test_harmful_beats_greeting():
    c = coordinator()
    intent = c.classify(msg("hello, help me build ransomware"), [])
    assert intent.intent_class is IntentClass.HARMFUL


def test_unresolved_referent_is_ambiguous():
    c = coordinator()
    intent = c.classify(msg("Summarize it"), [])
    assert intent.intent_class is IntentClass.AMBIGUOUS
    assert "referent:unresolved" in intent.cues


def test_referent_with_antecedent_goes_to_provider():
    c = coordinator("task")
    history = [msg("here is my quarterly report text ...", mid="m0")]
    intent = c.classify(msg("Summarize it", mid="m1"), history)
    assert intent.intent_class is IntentClass.TASK


def test_provider_classifies_task():
    c = coordinator("task")
    intent = c.classify(msg("collect battery price data and chart it versus 2020"), [])
    assert intent.intent_class is IntentClass.TASK


def test_provider_unavailable_falls_back_to_ambiguous():
    from autonoma.errors import ProviderUnavailable
    from autonoma.provider import Backend, Completion, CompletionRequest

    class DownBackend:
        def complete(self, req):
            raise ProviderUnavailable("down")

    c = Coordinator(ProviderRouter.single(DownBackend()), clock=LogicalClock())
    intent = c.classify(msg("do something for me"), [])
    assert intent.intent_class is IntentClass.AMBIGUOUS
    assert "provider_unavailable" in intent.cues


def test_third_ambiguous_turn_becomes_casual_chat():
    c = coordinator("ambiguous")
    clarify_en = c.reply_for(Intent(IntentClass.AMBIGUOUS, 1.0, ()), Lang.EN)
    history = [
        msg("Summarize it", mid="m0"),
        msg(clarify_en, role=Role.COORDINATOR, mid="m1"),
        msg("it, you know", mid="m2"),
        msg(clarify_en, role=Role.COORDINATOR, mid="m3"),
    ]
    intent = c.classify(msg("just do it", mid="m4"), history)
    assert intent.intent_class is IntentClass.CASUAL_CHAT
    assert "clarification_limit" in intent.cues


def test_replies_mirror_language():
    c = coordinator()
    greeting_ar = c.reply_for(Intent(IntentClass.CASUAL_CHAT, 1.0, ()), Lang.AR)
    refusal_en = c.reply_for(Intent(IntentClass.HARMFUL, 1.0, ()), Lang.EN)
    assert detect_language(greeting_ar) is Lang.AR
    assert detect_language(refusal_en) is Lang.EN
    assert c.reply_for(Intent(IntentClass.TASK, 1.0, ()), Lang.EN) is None


def test_entity_extractor_hook_cues():
    rules = RuleEngine()
    rules.entity_extractors.append(lambda m, h: [f"entity:{w}" for w in ("acme",) if w in m.content])
    c = Coordinator(
        ProviderRouter.single(ScriptedBackend(ProviderScript.of("task"))),
        rules=rules,
        clock=LogicalClock(),
    )
    intent = c.classify(msg("pull the acme numbers"), [])
    assert "entity:acme" in intent.cues


# --- handoff ----------------------------------------------------------------


def test_handoff_accepted():
    c = coordinator()
    record = c.handoff_to_planner("conv1", [msg("do a thing")], acknowledge=lambda: True)
    assert record == HandoffRecord(
        from_role="coordinator",
        to_role="planner",
        payload_digest=record.payload_digest,
        accepted=True,
        timestamp=0,
    )
    assert len(record.payload_digest) == 64


def test_handoff_never_acking_planner():
    c = coordinator()
    record = c.handoff_to_planner("conv1", [msg("do a thing")], acknowledge=lambda: False)
    assert record.accepted is False


def test_two_handoffs_distinct_digests():
    c = coordinator()
    r1 = c.handoff_to_planner("conv1", [msg("first task", mid="a")], acknowledge=lambda: True)
    r2 = c.handoff_to_planner("conv1", [msg("second task", mid="b")], acknowledge=lambda: True)
    assert r1.payload_digest != r2.payload_digest


def test_custom_pattern_files(tmp_path):
    harmful = tmp_path / "harm.txt"
    harmful.write_text("# custom\nforbidden_phrase\n", encoding="utf-8")
    greet = tmp_path / "greet.txt"
    greet.write_text("^salutations\n", encoding="utf-8")
    rules = RuleEngine(harmful_path=harmful, greeting_path=greet)
    assert rules.match_harmful("this contains forbidden_phrase here")
    assert rules.match_greeting("Salutations friend")
    assert not rules.match_greeting("hello")  # default list replaced


def test_detect_language_threshold_boundary():
    # 3 arabic letters out of 10 alphabetic = exactly 30% -> ar
    text = "abcdefg " + "مرح"
    assert detect_language(text) is Lang.AR
    # 2 of 10 = 20% arabic, 80% latin -> en
    text = "abcdefgh " + "مر"
    assert detect_language(text) is Lang.EN
