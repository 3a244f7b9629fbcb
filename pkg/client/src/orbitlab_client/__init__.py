"""Agent-author SDK for the orbitlab gateway.

Speaks the documented length-delimited JSON wire protocol; no dependency on
the server package. See docs/protocol.md in the environment repository.
"""

from .scaffold import ScaffoldResult, ScaffoldView, run_scaffold
from .session import ClientSession, full_table, observe, start, submit
from .wire import Connection, GatewayError

__version__ = "0.1.0"

__all__ = [
    "ClientSession", "Connection", "GatewayError", "ScaffoldResult",
    "ScaffoldView", "full_table", "observe", "run_scaffold", "start", "submit",
]
