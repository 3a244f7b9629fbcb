"""Episode management and the TCP gateway service.

An episode is one agent attempt at one task instance. Its state machine is
start -> (observe | full_table)* -> submit -> terminal; out-of-order or
post-terminal messages are rejected without state change. Budget accounting is
authoritative here, delegated to the observation session. Transcripts are
persisted per episode as line-delimited role-tagged records; verdicts append a
run record.
"""

from __future__ import annotations

import json
import os
import socket
import socketserver
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..catalog import Catalog, build_catalog
from ..environment import (BudgetObs, FullObs, PER_CALL_CAP, create_session)
from ..errors import (BudgetExhaustedError, CapError, OrbitLabError,
                      ProtocolError, ScenarioNotFoundError, ValidationError,
                      WindowError)
from ..evaluation import RunRecord, append_records, score_answer_detailed
from ..prompts import render_prompt
from . import wire


@dataclass
class GatewayConfig:
    bind: str = "127.0.0.1:0"
    scenario_dir: str | None = None
    catalog_manifest: str | None = None
    results_dir: str = "runs"
    idle_timeout_s: float = 600.0
    show_threshold: bool = False
    default_budget: int = 100

    @classmethod
    def from_file(cls, path=None, **overrides):
        """Config from an optional JSON file, environment, and overrides.

        ORBITLAB_BIND and ORBITLAB_RESULTS_DIR override the file; explicit
        keyword overrides win over both.
        """
        data = {}
        if path is not None:
            data.update(json.loads(Path(path).read_text()))
        if os.environ.get("ORBITLAB_BIND"):
            data["bind"] = os.environ["ORBITLAB_BIND"]
        if os.environ.get("ORBITLAB_RESULTS_DIR"):
            data["results_dir"] = os.environ["ORBITLAB_RESULTS_DIR"]
        data.update({k: v for k, v in overrides.items() if v is not None})
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


class _Episode:
    def __init__(self, token, instance, scenario, protocol, agent_id, repeat):
        self.token = token
        self.instance = instance
        self.scenario = scenario
        self.protocol = protocol
        self.agent_id = agent_id
        self.repeat = repeat
        self.session = create_session(scenario, protocol)
        self.lock = threading.Lock()
        self.terminal = False
        self.flag = ""
        self.started = time.monotonic()
        self.last_activity = time.monotonic()
        self.transcript: list[dict] = []

    def log(self, role, kind, payload):
        self.transcript.append({"role": role, "kind": kind, "payload": payload})


class EpisodeManager:
    """Owns episodes, dispatches protocol messages, persists outcomes."""

    def __init__(self, catalog: Catalog | None = None,
                 config: GatewayConfig | None = None):
        self.catalog = catalog if catalog is not None else build_catalog()
        self.config = config or GatewayConfig()
        self.episodes: dict[str, _Episode] = {}
        self._lock = threading.Lock()
        self._seq = 0

    # -- lifecycle ---------------------------------------------------------

    def _new_token(self):
        with self._lock:
            self._seq += 1
            return f"ep{self._seq:06d}"

    def start_episode(self, task_id, scenario_id, protocol_name,
                      agent_id="anonymous", budget=None, repeat=0):
        instance = self.catalog.find(task_id, scenario_id)
        scenario = self.catalog.scenario(scenario_id)
        if protocol_name == "budget_obs":
            protocol = BudgetObs(budget or self.config.default_budget)
        elif protocol_name == "full_obs":
            protocol = FullObs()
        else:
            raise ValidationError(f"unknown protocol {protocol_name!r}")
        token = self._new_token()
        ep = _Episode(token, instance, scenario, protocol, agent_id, repeat)
        with self._lock:
            self.episodes[token] = ep
        return ep

    def _episode(self, msg):
        token = msg.get("session")
        ep = self.episodes.get(token)
        if ep is None:
            raise ScenarioNotFoundError(f"unknown session {token!r}")
        if (time.monotonic() - ep.last_activity) > self.config.idle_timeout_s:
            ep.terminal = True
            raise OrbitLabError("session expired after idle timeout")
        return ep

    # -- dispatch ------------------------------------------------------------

    def handle(self, msg: dict) -> dict:
        """One request, one reply. Never raises for protocol-level failures;
        they come back as kind="error" replies."""
        kind = msg.get("kind")
        try:
            if kind == "start_task":
                return self._handle_start(msg)
            if kind in ("observe", "full_table", "submit_answer"):
                ep = self._episode(msg)
                with ep.lock:
                    ep.last_activity = time.monotonic()
                    if ep.terminal:
                        return wire.error_reply(wire.E_EPISODE_CLOSED,
                                                "episode already terminal")
                    if kind == "observe":
                        return self._handle_observe(ep, msg)
                    if kind == "full_table":
                        return self._handle_full_table(ep, msg)
                    return self._handle_submit(ep, msg)
            return wire.error_reply(wire.E_UNKNOWN_KIND,
                                    f"unknown message kind {kind!r}")
        except ScenarioNotFoundError as exc:
            return wire.error_reply(wire.E_UNKNOWN_SESSION
                                    if kind != "start_task" else wire.E_NOT_FOUND,
                                    str(exc))
        except ValidationError as exc:
            return wire.error_reply(wire.E_BAD_REQUEST, str(exc))
        except OrbitLabError as exc:
            return wire.error_reply(wire.E_EXPIRED if "expired" in str(exc)
                                    else wire.E_BAD_REQUEST, str(exc))

    def _handle_start(self, msg):
        ep = self.start_episode(
            msg.get("task_id"), msg.get("scenario_id"),
            msg.get("protocol", "budget_obs"),
            agent_id=msg.get("agent_id", "anonymous"),
            budget=msg.get("budget"),
            repeat=int(msg.get("repeat", 0)))
        u = ep.scenario.unit_system
        prompt = render_prompt(ep.instance, ep.protocol, u)
        reply = {
            "kind": "start_result",
            "session": ep.token,
            "prompt": prompt,
            "window": [0.0, ep.instance.window_end],
            "budget": ep.session.remaining,
            "per_call_cap": PER_CALL_CAP,
            "answer_units": ep.instance.units,
            "units": {"time": u.time_name, "length": u.length_name,
                      "mass": u.mass_name},
        }
        ep.log("environment", "start_result",
               {k: reply[k] for k in ("session", "window", "budget", "prompt")})
        return reply

    def _handle_observe(self, ep, msg):
        times = msg.get("times")
        if not isinstance(times, list):
            return wire.error_reply(wire.E_BAD_REQUEST, "'times' must be a list")
        ep.log("agent", "observe", {"times": times})
        try:
            rows = ep.session.observe(times)
        except CapError as exc:
            reply = wire.error_reply(wire.E_CAP, str(exc))
        except WindowError as exc:
            reply = wire.error_reply(wire.E_WINDOW, str(exc))
        except BudgetExhaustedError as exc:
            reply = wire.error_reply(wire.E_EXHAUSTED, str(exc))
        except ProtocolError as exc:
            reply = wire.error_reply(wire.E_PROTOCOL, str(exc))
        except ValidationError as exc:
            reply = wire.error_reply(wire.E_BAD_REQUEST, str(exc))
        else:
            reply = {"kind": "observe_result",
                     "rows": [list(r.as_tuple()) for r in rows],
                     "used": ep.session.used,
                     "remaining": ep.session.remaining}
        ep.log("environment", reply["kind"],
               {k: v for k, v in reply.items() if k != "kind"})
        return reply

    def _handle_full_table(self, ep, msg):
        ep.log("agent", "full_table", {})
        try:
            rows = ep.session.full_table()
        except ProtocolError as exc:
            reply = wire.error_reply(wire.E_PROTOCOL, str(exc))
            ep.log("environment", "error", {"code": reply["code"]})
            return reply
        reply = {"kind": "table_result",
                 "rows": [list(r.as_tuple()) for r in rows]}
        ep.log("environment", "table_result", {"rows": len(rows)})
        return reply

    def _handle_submit(self, ep, msg):
        value = msg.get("value")
        units = msg.get("units", "")
        ep.log("agent", "submit_answer", {"value": value, "units": units})
        submitted = value if isinstance(value, bool) else (value, units)
        correct, flag = score_answer_detailed(ep.instance, submitted)
        ep.terminal = True
        reply = {"kind": "verdict", "correct": bool(correct),
                 "observations_used": ep.session.used}
        if self.config.show_threshold:
            reply["threshold_pct"] = ep.instance.task.threshold_pct
        ep.log("environment", "verdict", {"correct": bool(correct)})
        self._persist(ep, value, units, correct, flag or ep.flag)
        return reply

    # -- persistence -------------------------------------------------------------

    def _transcript_path(self, ep):
        return Path(self.config.results_dir) / "transcripts" / f"{ep.token}.jsonl"

    def write_transcript(self, ep):
        path = self._transcript_path(ep)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as fh:
            for entry in ep.transcript:
                fh.write(json.dumps(entry) + "\n")
        return path

    def _persist(self, ep, value, units, correct, flag):
        path = self.write_transcript(ep)
        record = RunRecord(
            task_id=ep.instance.task.id,
            scenario_id=ep.instance.scenario_id,
            agent_id=ep.agent_id,
            protocol=ep.protocol.name,
            submitted_value=value,
            submitted_units=units,
            observations_used=ep.session.used,
            wall_time=time.monotonic() - ep.started,
            transcript_ref=str(path),
            correct=bool(correct),
            repeat=ep.repeat,
            flag=flag,
        )
        append_records([record], Path(self.config.results_dir) / "records.jsonl")
        return record


# --- TCP service -------------------------------------------------------------------


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        manager = self.server.manager
        while True:
            try:
                msg = wire.read_frame(self.rfile)
            except wire.MessageError as exc:
                wire.write_frame(self.wfile, wire.error_reply(
                    wire.E_BAD_REQUEST, str(exc)))
                return
            if msg is None:
                return
            reply = manager.handle(msg)
            wire.write_frame(self.wfile, reply)


class _Server(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


class GatewayService:
    """A running gateway bound to a local TCP address."""

    def __init__(self, manager: EpisodeManager, bind: str):
        host, _, port = bind.partition(":")
        self.manager = manager
        self._server = _Server((host, int(port or 0)), _Handler)
        self._server.manager = manager
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        name="orbitlab-gateway", daemon=True)

    def start(self):
        self._thread.start()
        return self

    @property
    def address(self):
        host, port = self._server.server_address[:2]
        return f"{host}:{port}"

    def close(self):
        self._server.shutdown()
        self._server.server_close()


def serve(config: GatewayConfig, catalog: Catalog | None = None) -> GatewayService:
    """Start the gateway service; returns a handle with .address and .close().

    Scenarios found in config.scenario_dir extend the built-in library.
    """
    scenarios = None
    if config.scenario_dir:
        from ..catalog import scenario_library
        from ..scenario import load_scenario
        scenarios = scenario_library()
        known = {s.id for s in scenarios}
        for path in sorted(Path(config.scenario_dir).glob("*.json")):
            sc = load_scenario(path)
            if sc.id not in known:
                scenarios.append(sc)
    if catalog is None:
        catalog = build_catalog(scenarios=scenarios) if scenarios else build_catalog()
    manager = EpisodeManager(catalog, config)
    try:
        service = GatewayService(manager, config.bind)
    except OSError as exc:
        raise OrbitLabError(f"cannot bind gateway to {config.bind!r}: {exc}") from exc
    return service.start()
