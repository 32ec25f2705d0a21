from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autonoma.errors import GapInSequence, IllegalTransition
from autonoma.model import (
    EventKind,
    TaskPhase,
    WorkflowEvent,
    WorkflowState,
    WorkflowStatus,
    replay,
    transition,
)
from autonoma.model import events as ev
from autonoma.model.serialize import state_to_jsonable

from conftest import make_plan
from dag_oracle import enumerate_dags
from eventlog import LogBuilder


def finished_run_log():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.handoff_to_planner()
    b.handoff("coordinator", "planner")
    b.plan(make_plan({"s1": set()}, order=["s1"]))
    b.handoff("planner", "supervisor")
    b.run_step("s1")
    b.handoff("agent", "supervisor")
    b.handoff("supervisor", "reporter")
    b.report()
    b.close()
    return b.events


def test_empty_log_is_created_state():
    assert replay([]) == WorkflowState()


def test_intent_task_moves_created_to_planning():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    assert replay(b.events).status is WorkflowStatus.PLANNING


def test_intent_routes():
    for cls, status in [
        ("CasualChat", WorkflowStatus.CREATED),
        ("Harmful", WorkflowStatus.REJECTED),
        ("Ambiguous", WorkflowStatus.AWAITING_CLARIFICATION),
    ]:
        b = LogBuilder()
        b.prompt()
        b.intent(cls)
        assert replay(b.events).status is status


def test_successful_run_reaches_complete():
    state = replay(finished_run_log())
    assert state.status is WorkflowStatus.COMPLETE
    assert state.task_states["s1"].phase is TaskPhase.SUCCEEDED


def test_final_task_success_moves_executing_to_reporting():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"s1": set(), "s2": {"s1"}}, order=["s1", "s2"]))
    b.run_step("s1")
    assert replay(b.events).status is WorkflowStatus.EXECUTING
    b.run_step("s2")
    assert replay(b.events).status is WorkflowStatus.REPORTING


def test_dispatch_in_reporting_is_illegal():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"s1": set()}, order=["s1"]))
    b.run_step("s1")
    assert replay(b.events).status is WorkflowStatus.REPORTING
    b.dispatch("s2")
    with pytest.raises(IllegalTransition):
        replay(b.events)


def test_seq_gap_detected():
    events = finished_run_log()
    # drop seq 4 (3 -> 5 jump)
    broken = events[:3] + events[4:]
    with pytest.raises(GapInSequence):
        replay(broken)


def test_dispatch_before_dependency_succeeded_is_illegal():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"a": set(), "b": {"a"}}, order=["a", "b"]))
    b.dispatch("b")
    with pytest.raises(IllegalTransition):
        replay(b.events)


def test_failed_step_skips_descendants():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    deps = {"a": set(), "b": {"a"}, "c": {"a"}, "d": {"b", "c"}}
    b.plan(make_plan(deps, order=["a", "b", "c", "d"]))
    b.run_step("a")
    b.dispatch("b")
    b.ack("b")
    b.fail("b")
    state = replay(b.events)
    assert state.task_states["b"].phase is TaskPhase.FAILED
    assert state.task_states["d"].phase is TaskPhase.SKIPPED
    assert state.task_states["c"].phase is TaskPhase.PENDING
    b.run_step("c")
    state = replay(b.events)
    assert state.status is WorkflowStatus.REPORTING
    b.handoff("supervisor", "reporter")
    b.report()
    b.close()
    assert replay(b.events).status is WorkflowStatus.PARTIAL_FAILURE


def test_all_failed_closes_failed():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"s1": set()}, order=["s1"]))
    b.dispatch("s1")
    b.ack("s1")
    b.fail("s1", attempts=2)
    b.handoff("supervisor", "reporter")
    b.report()
    b.close()
    assert replay(b.events).status is WorkflowStatus.FAILED


def test_retry_accounting_attempts():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"s1": set()}, order=["s1"]))
    b.dispatch("s1", attempt=1)
    b.ack("s1")
    b.retry("s1", attempt=1)
    b.dispatch("s1", attempt=2)
    b.ack("s1")
    b.retry("s1", attempt=2)
    b.dispatch("s1", attempt=3)
    b.ack("s1")
    b.succeed("s1", attempts=3)
    state = replay(b.events)
    assert state.task_states["s1"].attempts == 3
    retried = sum(1 for e in b.events if e.kind is EventKind.TASK_RETRIED)
    assert state.task_states["s1"].attempts == 1 + retried


def test_heartbeat_updates_last_heartbeat():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"s1": set()}, order=["s1"]))
    b.dispatch("s1")
    b.ack("s1")
    e = b.beat("s1")
    state = replay(b.events)
    assert state.task_states["s1"].last_heartbeat == e.timestamp


def test_heartbeat_for_pending_step_is_illegal():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"s1": set(), "s2": set()}, order=["s1", "s2"]))
    b.beat("s2")
    with pytest.raises(IllegalTransition):
        replay(b.events)


def test_approval_cycle():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"s1": set()}, order=["s1"]))
    b.dispatch("s1")
    b.ack("s1")
    b.request_approval("s1", "digest-1")
    state = replay(b.events)
    assert state.status is WorkflowStatus.AWAITING_APPROVAL
    assert state.pending_approvals == frozenset({"digest-1"})
    b.resolve_approval("digest-1", approved=True, step_id="s1")
    state = replay(b.events)
    assert state.status is WorkflowStatus.EXECUTING
    assert state.pending_approvals == frozenset()


def test_approval_resolution_with_unknown_digest_is_illegal():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"s1": set()}, order=["s1"]))
    b.dispatch("s1")
    b.ack("s1")
    b.request_approval("s1", "digest-1")
    b.resolve_approval("other", approved=True)
    with pytest.raises(IllegalTransition):
        replay(b.events)


def test_two_pending_approvals_stay_awaiting_until_both_resolved():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"s1": set(), "s2": set()}, order=["s1", "s2"]))
    b.dispatch("s1")
    b.ack("s1")
    b.dispatch("s2", agent="w2")
    b.ack("s2", agent="w2")
    b.request_approval("s1", "d1")
    b.request_approval("s2", "d2")
    b.resolve_approval("d1", approved=True)
    assert replay(b.events).status is WorkflowStatus.AWAITING_APPROVAL
    b.resolve_approval("d2", approved=False)
    assert replay(b.events).status is WorkflowStatus.EXECUTING


def test_cancel_during_executing_skips_pending_tasks():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"a": set(), "b": {"a"}}, order=["a", "b"]))
    b.run_step("a")
    b.close("cancelled")
    state = replay(b.events)
    assert state.task_states["b"].phase is TaskPhase.SKIPPED
    # succeeded + skipped but no failure: not PartialFailure by invariant
    assert state.status is WorkflowStatus.FAILED


def test_terminal_state_accepts_new_prompt_and_resets():
    events = finished_run_log()
    b = LogBuilder()
    b.events = list(events)
    b._t = events[-1].timestamp
    b.prompt("second task")
    state = replay(b.events)
    assert state.status is WorkflowStatus.CREATED
    assert state.task_states == {}
    assert state.plan is None


def test_prompt_while_executing_is_illegal():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.plan(make_plan({"s1": set()}, order=["s1"]))
    b.prompt("another")
    with pytest.raises(IllegalTransition):
        replay(b.events)


def test_replay_is_deterministic():
    events = finished_run_log()
    s1, s2 = replay(list(events)), replay(list(events))
    assert s1 == s2
    assert state_to_jsonable(s1) == state_to_jsonable(s2)


def test_plan_failure_closes_from_planning():
    b = LogBuilder()
    b.prompt()
    b.intent("Task")
    b.handoff_to_planner()
    b.handoff("coordinator", "planner")
    b.close("plan_failed")
    assert replay(b.events).status is WorkflowStatus.FAILED


# --- property: random legal event sequences never violate state invariants --


def _check_invariants(state: WorkflowState):
    if state.status is WorkflowStatus.COMPLETE:
        assert state.task_states
        assert all(t.phase is TaskPhase.SUCCEEDED for t in state.task_states.values())
    if state.status is WorkflowStatus.PARTIAL_FAILURE:
        s, f, _ = state.counts()
        assert s >= 1 and f >= 1
    for t in state.task_states.values():
        assert t.attempts >= 0


@settings(max_examples=150)
@given(st.data())
def test_random_legal_walks_preserve_invariants(data):
    """Drive the machine with randomly chosen *accepted* events; every reached
    state must satisfy the documented invariants."""
    from dag_oracle import enumerate_dags as _  # noqa: F401  (keep import local)

    b = LogBuilder()
    b.prompt()
    state = replay(b.events)
    _check_invariants(state)

    cls = data.draw(st.sampled_from(["CasualChat", "Harmful", "Ambiguous", "Task"]))
    b.intent(cls)
    state = replay(b.events)
    _check_invariants(state)
    if cls != "Task":
        return

    deps = {"a": set(), "b": {"a"}, "c": {"a"}}
    b.plan(make_plan(deps, order=["a", "b", "c"]))

    # walk: pick any ready step, dispatch/ack, then succeed or fail it
    outcome_bits = data.draw(st.lists(st.booleans(), min_size=3, max_size=3))
    finished: dict[str, bool] = {}
    for _round in range(3):
        state = replay(b.events)
        if state.status is not WorkflowStatus.EXECUTING:
            break
        ready = [
            sid
            for sid, ts in state.task_states.items()
            if ts.phase is TaskPhase.PENDING
            and all(state.task_states[d].phase is TaskPhase.SUCCEEDED for d in deps[sid])
        ]
        if not ready:
            break
        sid = ready[0]
        b.dispatch(sid)
        b.ack(sid)
        if outcome_bits[len(finished)]:
            b.succeed(sid)
            finished[sid] = True
        else:
            b.fail(sid)
            finished[sid] = False
        _check_invariants(replay(b.events))

    state = replay(b.events)
    if state.status is WorkflowStatus.REPORTING:
        b.report()
        b.close()
        _check_invariants(replay(b.events))


def test_skip_propagation_matches_oracle_exhaustively():
    """For all DAGs <= 4 nodes and every choice of single failing step, the
    Skipped set equals the brute-force descendant closure."""
    from dag_oracle import oracle_descendants

    for n in range(1, 5):
        for deps in enumerate_dags(n):
            order = [f"s{i + 1}" for i in range(n)]
            for bad in order:
                expected_skipped = oracle_descendants(deps, bad)
                b = LogBuilder()
                b.prompt()
                b.intent("Task")
                b.plan(make_plan(deps, order=order))
                # run steps in declaration order; fail `bad`, skip its closure
                for sid in order:
                    state = replay(b.events)
                    ts = state.task_states[sid]
                    if ts.phase is not TaskPhase.PENDING:
                        continue
                    if any(
                        state.task_states[d].phase is not TaskPhase.SUCCEEDED for d in deps[sid]
                    ):
                        continue
                    b.dispatch(sid)
                    b.ack(sid)
                    if sid == bad:
                        b.fail(sid)
                    else:
                        b.succeed(sid)
                state = replay(b.events)
                skipped = {
                    sid for sid, ts in state.task_states.items() if ts.phase is TaskPhase.SKIPPED
                }
                assert skipped == expected_skipped, (deps, bad)
