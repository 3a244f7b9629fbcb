"""Length-delimited JSON framing for the gateway wire protocol.

Each message is one UTF-8 JSON object framed as::

    <decimal byte length of body>\\n<body bytes>

Every request receives exactly one reply. The message schema is documented in
docs/protocol.md at the repository root.
"""

from __future__ import annotations

import json

MAX_FRAME = 64 * 1024 * 1024

REQUEST_KINDS = ("start_task", "observe", "full_table", "submit_answer")
REPLY_KINDS = ("start_result", "observe_result", "table_result", "verdict", "error")

# error codes carried by kind="error" replies
E_BAD_REQUEST = "bad_request"
E_UNKNOWN_KIND = "unknown_kind"
E_UNKNOWN_SESSION = "unknown_session"
E_NOT_FOUND = "not_found"
E_WINDOW = "window_error"
E_CAP = "cap_error"
E_EXHAUSTED = "budget_exhausted"
E_PROTOCOL = "protocol_error"
E_EPISODE_CLOSED = "episode_closed"
E_EXPIRED = "session_expired"


class MessageError(Exception):
    """Framing or schema violation on the wire."""


def encode_message(obj: dict) -> bytes:
    body = json.dumps(obj, separators=(",", ":")).encode("utf-8")
    return str(len(body)).encode("ascii") + b"\n" + body


def write_frame(stream, obj: dict):
    stream.write(encode_message(obj))
    stream.flush()


def read_frame(stream) -> dict | None:
    """Next message from a readable byte stream; None on clean EOF."""
    header = stream.readline()
    if not header:
        return None
    try:
        length = int(header.strip())
    except ValueError:
        raise MessageError(f"bad frame header {header!r}")
    if not 0 <= length <= MAX_FRAME:
        raise MessageError(f"frame length {length} out of range")
    body = stream.read(length)
    if len(body) != length:
        raise MessageError("truncated frame")
    try:
        obj = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MessageError(f"bad frame body: {exc}") from exc
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MessageError("message must be an object with a 'kind' field")
    return obj


def error_reply(code: str, detail: str) -> dict:
    return {"kind": "error", "code": code, "detail": detail}
