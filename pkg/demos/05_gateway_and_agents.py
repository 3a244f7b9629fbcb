"""
Serving the environment to agents and batch evaluation
======================================================

The gateway exposes episodes over a length-delimited JSON TCP protocol
(docs/protocol.md). Here a raw socket client plays one episode, then the
scripted uniform baseline runs a small batch suite.
"""

import socket
import tempfile

from orbitlab import build_catalog
from orbitlab.gateway import (GatewayConfig, UniformBaselineAgent, run_suite,
                              serve)
from orbitlab.gateway.wire import read_frame, write_frame

catalog = build_catalog()
results = tempfile.mkdtemp(prefix="orbitlab-demo-")

service = serve(GatewayConfig(bind="127.0.0.1:0", results_dir=results),
                catalog=catalog)
print(f"gateway on {service.address}")

host, port = service.address.split(":")
with socket.create_connection((host, int(port))) as sock:
    stream = sock.makefile("rwb")

    def rpc(msg):
        write_frame(stream, msg)
        return read_frame(stream)

    start = rpc({"kind": "start_task", "task_id": "period",
                 "scenario_id": "circular-equal", "protocol": "budget_obs",
                 "agent_id": "demo-socket-agent"})
    print(f"episode {start['session']}: budget {start['budget']}, "
          f"window {start['window']}")

    reply = rpc({"kind": "observe", "session": start["session"],
                 "times": [0.0, 1e6, 2e6]})
    print(f"observed {len(reply['rows'])} rows, remaining {reply['remaining']}")

    verdict = rpc({"kind": "submit_answer", "session": start["session"],
                   "value": 2.2313e7, "units": "s"})
    print(f"verdict: correct={verdict['correct']}, "
          f"observations used={verdict['observations_used']}")

service.close()

# batch evaluation with the planning-free baseline over the mass tasks
reports = run_suite(UniformBaselineAgent(100), catalog, task_filter="mass",
                    repeats=3, results_dir=results)
print()
uniform = next(r for r in reports if r.agent_id.startswith("uniform"))
print(uniform.to_text())
