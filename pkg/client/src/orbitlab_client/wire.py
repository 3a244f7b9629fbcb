"""Client-side framing for the gateway wire protocol.

Messages are UTF-8 JSON objects framed as ``<decimal byte length>\\n<body>``;
every request gets exactly one reply. This module deliberately depends only on
the documented wire contract, not on the server implementation.
"""

from __future__ import annotations

import json
import socket

MAX_FRAME = 64 * 1024 * 1024


class GatewayError(Exception):
    """An error reply from the gateway, re-raised verbatim with its code."""

    def __init__(self, code: str, detail: str):
        super().__init__(f"{code}: {detail}")
        self.code = code
        self.detail = detail


class Connection:
    """One TCP connection to a gateway; usable for many episodes."""

    def __init__(self, endpoint: str, timeout: float = 30.0):
        host, _, port = endpoint.partition(":")
        self._sock = socket.create_connection((host, int(port)), timeout=timeout)
        self._stream = self._sock.makefile("rwb")

    def request(self, msg: dict) -> dict:
        """Send one message and return its non-error reply.

        Error replies raise ``GatewayError`` carrying the server's code and
        detail unchanged.
        """
        body = json.dumps(msg, separators=(",", ":")).encode("utf-8")
        self._stream.write(str(len(body)).encode("ascii") + b"\n" + body)
        self._stream.flush()
        header = self._stream.readline()
        if not header:
            raise ConnectionError("gateway closed the connection")
        length = int(header.strip())
        if not 0 <= length <= MAX_FRAME:
            raise ConnectionError(f"bad frame length {length}")
        payload = self._stream.read(length)
        if len(payload) != length:
            raise ConnectionError("truncated frame from gateway")
        reply = json.loads(payload.decode("utf-8"))
        if reply.get("kind") == "error":
            raise GatewayError(reply.get("code", "unknown"),
                               reply.get("detail", ""))
        return reply

    def close(self):
        try:
            self._stream.close()
        finally:
            self._sock.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
