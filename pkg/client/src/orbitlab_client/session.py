"""Client sessions over the gateway protocol.

The session mirrors server state (budget, collected rows) strictly from server
replies; the client never does its own accounting, so the server stays
authoritative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .wire import Connection, GatewayError

Row = Tuple[float, float, float, float, float, float, float]


@dataclass
class ClientSession:
    endpoint: str
    token: str
    prompt: str
    window: Tuple[float, float]
    remaining: Optional[int]            # None under full_obs
    per_call_cap: int
    answer_units: str
    units: dict
    rows: List[Row] = field(default_factory=list)
    verdict: Optional[dict] = None
    _conn: Connection = None

    @property
    def terminal(self) -> bool:
        return self.verdict is not None

    def close(self):
        if self._conn is not None:
            self._conn.close()


def start(endpoint: str, task_id: str, scenario_id: str,
          protocol: str = "budget_obs", agent_id: str = "sdk-agent",
          budget: Optional[int] = None, repeat: int = 0) -> ClientSession:
    """Open an episode and return its session.

    Connection and selector failures surface as ``GatewayError`` (server
    codes) or ``OSError`` (transport).
    """
    conn = Connection(endpoint)
    msg = {"kind": "start_task", "task_id": task_id, "scenario_id": scenario_id,
           "protocol": protocol, "agent_id": agent_id, "repeat": repeat}
    if budget is not None:
        msg["budget"] = budget
    try:
        reply = conn.request(msg)
    except Exception:
        conn.close()
        raise
    return ClientSession(
        endpoint=endpoint,
        token=reply["session"],
        prompt=reply["prompt"],
        window=tuple(reply["window"]),
        remaining=reply["budget"],
        per_call_cap=reply["per_call_cap"],
        answer_units=reply.get("answer_units", ""),
        units=reply.get("units", {}),
        _conn=conn,
    )


def observe(session: ClientSession, times) -> List[Row]:
    """Request rows at the given times; cache and budget update only from the
    server's reply. Server errors re-raise verbatim and change nothing."""
    reply = session._conn.request({
        "kind": "observe", "session": session.token,
        "times": [float(t) for t in times],
    })
    rows = [tuple(r) for r in reply["rows"]]
    session.rows.extend(rows)
    session.remaining = reply["remaining"]
    return rows


def full_table(session: ClientSession) -> List[Row]:
    reply = session._conn.request({"kind": "full_table",
                                   "session": session.token})
    rows = [tuple(r) for r in reply["rows"]]
    session.rows = rows
    return rows


def submit(session: ClientSession, value, units: str = "") -> dict:
    """Submit the final answer; returns the verdict and closes the episode."""
    reply = session._conn.request({
        "kind": "submit_answer", "session": session.token,
        "value": value, "units": units,
    })
    session.verdict = reply
    return reply
