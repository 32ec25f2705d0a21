from __future__ import annotations

import json
import os
from pathlib import Path

import pytest

from autonoma.agentkit import ApprovalRequired, InvokeContext, PrivilegeGrants, TaskPayload
from autonoma.agents import (
    ApprovalTokenBox,
    BrowserStubAgent,
    FileOp,
    compile_report,
    execute_fileop,
    parse_fileop,
    placeholder_png,
    research,
    resolve_in_jail,
    run_script,
)
from autonoma.clock import LogicalClock
from autonoma.errors import (
    AllToolsFailed,
    ApprovalDenied,
    ExecDenied,
    FileOpNotFound,
    InvalidQuery,
    JailEscape,
    NothingToReport,
    SandboxTimeout,
)
from autonoma.model import Lang
from autonoma.search import FailingSearchTool, FixtureSearchTool
from autonoma.supervisor.results import TaskResult

from conftest import make_plan
from jail_corpus import BENIGN_ODD_PATHS, ESCAPING_PATHS


def ctx(grants=None):
    return InvokeContext(
        grants=grants or PrivilegeGrants(), clock=LogicalClock(), heartbeat=lambda: None
    )


# --- jail -------------------------------------------------------------------


def test_escaping_paths_all_raise(tmp_path):
    jail = tmp_path / "jail"
    jail.mkdir()
    for p in ESCAPING_PATHS:
        with pytest.raises(JailEscape):
            resolve_in_jail(jail, p)


def test_benign_odd_paths_resolve_inside(tmp_path):
    jail = tmp_path / "jail"
    jail.mkdir()
    for p in BENIGN_ODD_PATHS:
        resolved = resolve_in_jail(jail, p).resolve()
        assert resolved == jail.resolve() or jail.resolve() in resolved.parents


def test_corpus_is_large_enough():
    assert len(ESCAPING_PATHS) + len(BENIGN_ODD_PATHS) >= 50


def test_symlink_out_of_jail_rejected(tmp_path):
    jail = tmp_path / "jail"
    jail.mkdir()
    outside = tmp_path / "outside"
    outside.mkdir()
    (outside / "secret.txt").write_text("s", encoding="utf-8")
    os.symlink(outside, jail / "link")
    with pytest.raises(JailEscape):
        resolve_in_jail(jail, "link/secret.txt")
    with pytest.raises(JailEscape):
        resolve_in_jail(jail, "link/newfile.txt")  # write destination via symlink


def test_symlink_inside_jail_allowed(tmp_path):
    jail = tmp_path / "jail"
    (jail / "real").mkdir(parents=True)
    (jail / "real" / "f.txt").write_text("ok", encoding="utf-8")
    os.symlink(jail / "real", jail / "alias")
    assert resolve_in_jail(jail, "alias/f.txt").read_text(encoding="utf-8") == "ok"


# --- file manager -----------------------------------------------------------


def fixture_tree(tmp_path):
    jail = tmp_path / "jail"
    (jail / "reports").mkdir(parents=True)
    (jail / "reports" / "old.txt").write_text("old", encoding="utf-8")
    (jail / "b.txt").write_text("b", encoding="utf-8")
    (jail / "a.txt").write_text("a", encoding="utf-8")
    return jail


def test_list_lexicographic(tmp_path):
    jail = fixture_tree(tmp_path)
    result = execute_fileop(FileOp("list", (".",)), jail)
    assert result.entries == ("a.txt", "b.txt", "reports")


def test_read_and_write_round_trip(tmp_path):
    jail = fixture_tree(tmp_path)
    execute_fileop(FileOp("write", ("notes/n.txt",), "hello"), jail)
    got = execute_fileop(FileOp("read", ("notes/n.txt",)), jail)
    assert got.content == "hello"


def test_delete_without_token_pends(tmp_path):
    jail = fixture_tree(tmp_path)
    with pytest.raises(ApprovalRequired) as err:
        execute_fileop(FileOp("delete", ("reports/old.txt",)), jail, conversation_id="c1")
    assert err.value.kind == "delete"
    assert (jail / "reports" / "old.txt").exists()  # no effect before approval


def test_delete_with_valid_token(tmp_path):
    jail = fixture_tree(tmp_path)
    box = ApprovalTokenBox(clock=LogicalClock())
    op = FileOp("delete", ("reports/old.txt",))
    token = box.mint("c1", op.action_digest("c1"))
    execute_fileop(op, jail, conversation_id="c1", approval_token=token, token_box=box)
    assert not (jail / "reports" / "old.txt").exists()


def test_token_single_use(tmp_path):
    jail = fixture_tree(tmp_path)
    box = ApprovalTokenBox(clock=LogicalClock())
    op = FileOp("write", ("a.txt",), "overwrite")  # overwrite-write is destructive
    token = box.mint("c1", op.action_digest("c1"))
    execute_fileop(op, jail, conversation_id="c1", approval_token=token, token_box=box)
    with pytest.raises(ApprovalDenied):
        execute_fileop(op, jail, conversation_id="c1", approval_token=token, token_box=box)


def test_token_expiry(tmp_path):
    jail = fixture_tree(tmp_path)
    clock = LogicalClock()
    box = ApprovalTokenBox(clock=clock)
    op = FileOp("delete", ("a.txt",))
    token = box.mint("c1", op.action_digest("c1"))
    clock.advance(10 * 60 * 1000 + 1)
    with pytest.raises(ApprovalDenied):
        execute_fileop(op, jail, conversation_id="c1", approval_token=token, token_box=box)


def test_token_bound_to_action(tmp_path):
    jail = fixture_tree(tmp_path)
    box = ApprovalTokenBox(clock=LogicalClock())
    op = FileOp("delete", ("a.txt",))
    other = FileOp("delete", ("b.txt",))
    token = box.mint("c1", other.action_digest("c1"))
    with pytest.raises(ApprovalDenied):
        execute_fileop(op, jail, conversation_id="c1", approval_token=token, token_box=box)


def test_fresh_write_not_destructive(tmp_path):
    jail = fixture_tree(tmp_path)
    execute_fileop(FileOp("write", ("new.txt",), "x"), jail)  # no token needed
    assert (jail / "new.txt").read_text(encoding="utf-8") == "x"


def test_traversal_read_rejected(tmp_path):
    jail = fixture_tree(tmp_path)
    with pytest.raises(JailEscape):
        execute_fileop(FileOp("read", ("../../etc/anything",)), jail)


def test_copy_and_move(tmp_path):
    jail = fixture_tree(tmp_path)
    execute_fileop(FileOp("copy", ("a.txt", "copies/a.txt")), jail)
    assert (jail / "copies" / "a.txt").exists()
    box = ApprovalTokenBox(clock=LogicalClock())
    op = FileOp("move", ("b.txt", "moved.txt"))
    token = box.mint("c", op.action_digest("c"))
    execute_fileop(op, jail, conversation_id="c", approval_token=token, token_box=box)
    assert (jail / "moved.txt").exists() and not (jail / "b.txt").exists()


def test_read_missing_file(tmp_path):
    jail = fixture_tree(tmp_path)
    with pytest.raises(FileOpNotFound):
        execute_fileop(FileOp("read", ("ghost.txt",)), jail)


def test_parse_fileop_grammar():
    assert parse_fileop("delete reports/old.txt") == FileOp("delete", ("reports/old.txt",))
    assert parse_fileop("write notes/x.txt :: hello world") == FileOp(
        "write", ("notes/x.txt",), "hello world"
    )
    assert parse_fileop("copy a b") == FileOp("copy", ("a", "b"))
    with pytest.raises(FileOpNotFound):
        parse_fileop("frobnicate z")


# --- researcher -------------------------------------------------------------


def corpus_dir(tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    docs = [
        {"id": "doc1", "title": "Battery prices", "text": "battery prices fell in 2024"},
        {"id": "doc2", "title": "More battery prices", "text": "cells got cheaper"},
        {"id": "doc3", "title": "Weather", "text": "it rained"},
    ]
    for doc in docs:
        (d / f"{doc['id']}.json").write_text(json.dumps(doc), encoding="utf-8")
    return d


def test_research_fixture_corpus(tmp_path):
    tool = FixtureSearchTool(corpus_dir(tmp_path))
    findings = research("battery prices", [tool], budget=2, clock=LogicalClock())
    assert len(findings.items) == 2
    assert all(item["source_id"].startswith("fixture:") for item in findings.items)
    assert findings.query == "battery prices"


def test_research_all_tools_failed(tmp_path):
    with pytest.raises(AllToolsFailed):
        research("anything", [FailingSearchTool(), FixtureSearchTool(corpus_dir(tmp_path))],
                 budget=1, clock=LogicalClock())


def test_research_empty_query():
    with pytest.raises(InvalidQuery):
        research("   ", [FailingSearchTool()], budget=1)


def test_research_provenance_every_item_sourced(tmp_path):
    tool = FixtureSearchTool(corpus_dir(tmp_path))
    findings = research("battery", [tool], budget=1, clock=LogicalClock())
    assert len([i for i in findings.items if i["source_id"]]) == len(findings.items)


# --- coder ------------------------------------------------------------------


def exec_grants(tmp_path, **kw):
    return PrivilegeGrants(fs_jail_root=str(tmp_path), allow_exec=True, **kw)


def test_run_script_prints_42(tmp_path):
    result = run_script("print(42)", "python-like", exec_grants(tmp_path))
    assert result.stdout == "42\n"
    assert result.exit_code == 0


def test_run_script_shell(tmp_path):
    result = run_script("echo shell-ok", "shell-like", exec_grants(tmp_path))
    assert result.stdout == "shell-ok\n"


def test_run_script_timeout(tmp_path):
    grants = exec_grants(tmp_path, max_runtime_ms=300)
    with pytest.raises(SandboxTimeout):
        run_script("while True:\n    pass", "python-like", grants)


def test_run_script_denied_without_grant(tmp_path):
    with pytest.raises(ExecDenied):
        run_script("print(1)", "python-like", PrivilegeGrants(fs_jail_root=str(tmp_path)))


def test_run_script_output_capped(tmp_path):
    grants = exec_grants(tmp_path, max_output_bytes=64)
    result = run_script("print('x' * 10000)", "python-like", grants)
    assert len(result.stdout) <= 64


def test_run_script_workdir_inside_jail(tmp_path):
    run_script("open('made.txt', 'w').write('hi')", "python-like", exec_grants(tmp_path))
    assert (tmp_path / "workspace" / "made.txt").read_text(encoding="utf-8") == "hi"


# --- reporter ---------------------------------------------------------------


def results_fixture():
    return [
        TaskResult("s1", "succeeded", summary="found 3 sources", agent_id="researcher",
                   data={"items": [{"source_id": "fixture:doc1"}]}, attempts=1, duration_ms=10),
        TaskResult("s2", "succeeded", summary="computed totals", agent_id="coder",
                   attempts=1, duration_ms=20),
        TaskResult("s3", "succeeded", summary="drafted section", agent_id="reporter",
                   attempts=1, duration_ms=5),
    ]


def plan_fixture():
    return make_plan({"s1": set(), "s2": {"s1"}, "s3": {"s2"}}, order=["s1", "s2", "s3"])


def test_report_all_succeeded():
    report = compile_report(plan_fixture(), results_fixture(), Lang.EN)
    assert report.failure_log == ()
    assert len(report.key_findings) == 3
    assert report.executive_summary
    assert report.detailed_analysis
    assert report.conclusions_and_recommendations
    assert "fixture:doc1" in report.sources


def test_report_failure_log_with_recommendation():
    results = results_fixture()[:1] + [
        TaskResult("s2", "failed", cause="timeout", attempts=3, agent_id="coder"),
        TaskResult("s3", "skipped", cause="skipped:s2"),
    ]
    report = compile_report(plan_fixture(), results, Lang.EN)
    assert len(report.failure_log) == 2
    entry = report.failure_log[0]
    assert entry["step_id"] == "s2"
    assert entry["cause"] == "timeout"
    assert "max_runtime" in entry["recommendation"]


def test_report_totality_every_result_in_exactly_one_bucket():
    results = results_fixture()[:1] + [
        TaskResult("s2", "failed", cause="agent_panic", attempts=1),
        TaskResult("s3", "skipped", cause="skipped:s2"),
    ]
    report = compile_report(plan_fixture(), results, Lang.EN)
    finding_ids = {f.split(":")[0] for f in report.key_findings}
    failure_ids = {e["step_id"] for e in report.failure_log}
    assert finding_ids | failure_ids == {"s1", "s2", "s3"}
    assert finding_ids & failure_ids == set()


def test_report_arabic_sections():
    report = compile_report(plan_fixture(), results_fixture(), Lang.AR)
    assert report.lang == "ar"
    assert "اكتمل" in report.executive_summary


def test_report_empty_results():
    with pytest.raises(NothingToReport):
        compile_report(plan_fixture(), [], Lang.EN)


# --- stubs ------------------------------------------------------------------


def test_browser_stub_records_actions(tmp_path):
    agent = BrowserStubAgent()
    payload = TaskPayload(
        conversation_id="c", step_id="s1",
        description="open example.org and click Login",
        capability="browser", artifacts_dir=str(tmp_path),
    )
    out = agent.handle(payload, ctx())
    assert out.data["actions"] == ["open example.org", "click Login"]
    assert agent.recorded == [("open example.org", "click Login")]


def test_stub_screenshot_artifact(tmp_path):
    agent = BrowserStubAgent()
    payload = TaskPayload(
        conversation_id="c", step_id="shot", description="screenshot the page",
        capability="browser", artifacts_dir=str(tmp_path),
    )
    out = agent.handle(payload, ctx())
    assert out.artifacts
    png = tmp_path / out.artifacts[0]
    assert png.exists()
    assert png.read_bytes().startswith(b"\x89PNG")


def test_stub_empty_action():
    agent = BrowserStubAgent()
    payload = TaskPayload(conversation_id="c", step_id="s", description="",
                          capability="browser")
    out = agent.handle(payload, ctx())
    assert out.data["actions"] == []
    assert agent.recorded == [()]


def test_placeholder_png_is_valid():
    data = placeholder_png()
    assert data.startswith(b"\x89PNG\r\n\x1a\n")
    assert data.endswith(b"IEND\xaeB`\x82")
