from .server import EpisodeManager, GatewayConfig, GatewayService, serve
from .suite import FullTableAgent, UniformBaselineAgent, run_suite
from .wire import MessageError, read_frame, write_frame

__all__ = [
    "EpisodeManager", "GatewayConfig", "GatewayService", "serve",
    "FullTableAgent", "UniformBaselineAgent", "run_suite",
    "MessageError", "read_frame", "write_frame",
]
