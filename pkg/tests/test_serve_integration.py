"""End-to-end over a real TCP socket: the `serve` wiring (config file,
scripted provider files, builtin worker agents) handling a prompt whose plan
drives the jailed file manager."""

from __future__ import annotations

import argparse
import json
import threading
import time

import httpx
import pytest
import uvicorn

from autonoma.cli import _build_service
from autonoma.gateway import create_app


@pytest.fixture()
def live_server(tmp_path):
    plan = {
        "thought": "list the workspace then summarize",
        "steps": [
            {
                "id": "s1",
                "description": "list .",
                "required_capability": "file_ops",
                "depends_on": [],
            },
            {
                "id": "s2",
                "description": "summarize the listing",
                "required_capability": "report",
                "depends_on": ["s1"],
            },
        ],
    }
    coordinator_script = tmp_path / "coordinator_script.json"
    coordinator_script.write_text(
        json.dumps([{"match": "*", "response": "task"}]), encoding="utf-8"
    )
    planner_script = tmp_path / "planner_script.json"
    planner_script.write_text(
        json.dumps([{"match": "*", "response": json.dumps(plan)}]), encoding="utf-8"
    )
    config_file = tmp_path / "autonoma.toml"
    config_file.write_text(
        f"""
[server]
host = "127.0.0.1"
port = 0
storage_root = "{tmp_path / 'data'}"

[policy]
retry_limit = 1

[providers.coordinator]
kind = "scripted"
script = "{coordinator_script}"

[providers.planner]
kind = "scripted"
script = "{planner_script}"
""",
        encoding="utf-8",
    )

    args = argparse.Namespace(
        bind=None, config=str(config_file), allow_cidr=None, storage=None, print_qr=False
    )
    service = _build_service(args)
    app = create_app(service)
    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started and time.time() < deadline:
        time.sleep(0.02)
    assert server.started
    port = server.servers[0].sockets[0].getsockname()[1]
    try:
        yield service, f"http://127.0.0.1:{port}"
    finally:
        server.should_exit = True
        thread.join(timeout=5)


def test_full_prompt_over_real_socket(live_server):
    service, base = live_server
    token, payload = service.issue_pairing()
    assert payload.startswith("autonoma://pair?host=127.0.0.1")
    headers = {"Authorization": f"Bearer {token}"}

    with httpx.Client(base_url=base, headers=headers, timeout=10) as client:
        unauth = httpx.post(f"{base}/api/prompt", json={"text": "hi"}, timeout=10)
        assert unauth.status_code == 401

        resp = client.post("/api/prompt", json={"text": "list the workspace"})
        assert resp.status_code == 200
        cid = resp.json()["conversation_id"]

        deadline = time.time() + 15
        status = None
        while time.time() < deadline:
            detail = client.get(f"/api/conversations/{cid}").json()
            status = detail["status"]
            if status in ("Complete", "Failed", "PartialFailure"):
                break
            time.sleep(0.05)
        assert status == "Complete", detail

        kinds = [e["kind"] for e in detail["events"]]
        assert kinds[0] == "PromptReceived"
        assert "PlanProposed" in kinds
        assert kinds[-1] == "WorkflowClosed"
        succeeded = [e for e in detail["events"] if e["kind"] == "TaskSucceeded"]
        assert {e["payload"]["step_id"] for e in succeeded} == {"s1", "s2"}
        assert {e["payload"]["agent_id"] for e in succeeded} == {"file_manager", "reporter"}

        listing = client.get("/api/conversations").json()["conversations"]
        assert any(c["id"] == cid for c in listing)

    # persisted on disk with a verifiable audit chain
    record, messages, events = service.store.load(cid)
    assert record.id == cid
    assert service.audit.verify().valid
