"""Reference observe-reason-act scaffold.

``run_scaffold`` drives an episode with a user-supplied reasoner: a callable
that looks at the transcript so far and picks the next action. Actions are

* ``{"observe": [t, ...]}``: query the observation tool,
* ``{"code": "..."}``: run local analysis code,
* ``{"submit": value, "units": "..."}``: answer and stop.

Local analysis runs as plain in-process ``exec`` in a persistent namespace
seeded with the collected ``rows``; there is NO sandbox, so only run reasoners
you trust. The transcript uses the same role-tagged line-delimited records the
gateway persists, so server-side analyzers can scan it directly.

Plug in any decision source: the reasoner is just a callable, so a scripted
policy or any vendor's model loop fits without the SDK depending on one.
"""

from __future__ import annotations

import io
import json
import traceback
from contextlib import redirect_stdout
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Optional

from .session import ClientSession, observe, submit
from .wire import GatewayError


@dataclass
class ScaffoldView:
    """What the reasoner sees each step."""

    prompt: str
    window: tuple
    remaining: Optional[int]
    rows: list
    transcript: List[dict]
    last_output: str = ""
    step: int = 0


@dataclass
class ScaffoldResult:
    verdict: Optional[dict]
    transcript: List[dict]
    steps: int
    aborted: bool = False
    abort_reason: str = ""


def _run_code(code: str, namespace: dict) -> str:
    out = io.StringIO()
    try:
        with redirect_stdout(out):
            exec(code, namespace)          # no sandbox; trusted reasoners only
    except Exception:
        out.write(traceback.format_exc())
    return out.getvalue()


def run_scaffold(session: ClientSession,
                 reasoner: Callable[[ScaffoldView], dict],
                 max_steps: int = 40,
                 transcript_path=None) -> ScaffoldResult:
    """Loop reason -> act until the reasoner submits or a limit trips.

    A reasoner exception or the step limit aborts the episode: a null answer
    is submitted so the episode is scored (incorrect) server-side, and the
    transcript is preserved either way.
    """
    transcript: List[dict] = [
        {"role": "environment", "kind": "prompt", "content": session.prompt}]
    namespace = {"rows": session.rows}
    view = ScaffoldView(session.prompt, session.window, session.remaining,
                        session.rows, transcript)
    result = ScaffoldResult(None, transcript, steps=0)

    for step in range(max_steps):
        view.step = step
        view.remaining = session.remaining
        try:
            action = reasoner(view)
        except Exception as exc:
            result.aborted = True
            result.abort_reason = f"reasoner raised: {exc!r}"
            transcript.append({"role": "agent", "kind": "abort",
                               "content": result.abort_reason})
            break
        result.steps = step + 1

        if not isinstance(action, dict):
            result.aborted = True
            result.abort_reason = f"bad action {action!r}"
            break

        if "observe" in action:
            times = list(action["observe"])
            transcript.append({"role": "agent", "kind": "observe",
                               "payload": {"times": times}})
            try:
                rows = observe(session, times)
            except GatewayError as exc:
                transcript.append({"role": "environment", "kind": "error",
                                   "content": f"{exc.code}: {exc.detail}"})
                view.last_output = f"error {exc.code}"
                continue
            transcript.append({"role": "environment", "kind": "observe_result",
                               "payload": {"rows": rows,
                                           "remaining": session.remaining}})
            view.last_output = f"{len(rows)} rows"
            continue

        if "code" in action:
            transcript.append({"role": "agent", "kind": "code",
                               "content": action["code"]})
            output = _run_code(action["code"], namespace)
            transcript.append({"role": "environment", "kind": "code_output",
                               "content": output})
            view.last_output = output
            continue

        if "submit" in action:
            transcript.append({"role": "agent", "kind": "submit_answer",
                               "payload": {"value": action["submit"],
                                           "units": action.get("units", "")}})
            verdict = submit(session, action["submit"],
                             action.get("units", ""))
            transcript.append({"role": "environment", "kind": "verdict",
                               "payload": verdict})
            result.verdict = verdict
            break

        result.aborted = True
        result.abort_reason = f"unknown action keys {sorted(action)}"
        break
    else:
        result.aborted = True
        result.abort_reason = "step limit reached"
        transcript.append({"role": "agent", "kind": "abort",
                           "content": result.abort_reason})

    if result.verdict is None and not session.terminal:
        # close the episode so it is scored; a null answer is incorrect
        try:
            result.verdict = submit(session, None, "")
            transcript.append({"role": "environment", "kind": "verdict",
                               "payload": result.verdict})
        except GatewayError:
            pass

    if transcript_path is not None:
        with Path(transcript_path).open("w") as fh:
            for entry in transcript:
                fh.write(json.dumps(entry) + "\n")
    return result
