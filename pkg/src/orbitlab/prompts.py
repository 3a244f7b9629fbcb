"""Agent prompt rendering for the two observation protocols."""

from __future__ import annotations

from .catalog import TaskInstance
from .environment import BudgetObs, FullObs, PER_CALL_CAP
from .units import long_unit_name

_PREAMBLE = (
    "You are tasked with solving the following physics problem related to a "
    "binary star system. You are provided observations of each star's position "
    "over time, (t,x,y,z), in units of {time_long} and {length_long}.\n"
    "\n"
    "### Problem Description\n"
    "{problem}\n"
    "\n"
    "### Additional Instructions\n"
)

_BUDGET_BODY = (
    "To complete this task, you have access to the following tools and data:\n"
    "1. An observational tool called `Observe` that allows you observe the "
    "system at specific times of your choosing.\n"
    "2. A code interpreter that can execute Python code.\n"
    "\n"
    "When using `Observe`:\n"
    "1. The `times_requested` parameter should be a list that can contain any "
    "values in the time window [0.0, {t_end}] {time_long}. You cannot request "
    "negative times. The upper limit for the time window was chosen to "
    "guarantee that the problem is solvable with an appropriate sampling of "
    "observations using the total observational budget.\n"
    "2. You can observe the system at any time within the time window, even "
    "if it is in the past compared to the last observation.\n"
    "3. You can observe the system up to a total of {budget} times and you "
    "can observe up to {cap} times per observational request which is the "
    "maximum length of the `times_requested` list.\n"
    "4. After each observation, the dataframe `row_wise_results.df` will be "
    "updated. It contains columns: time, star1_x, star1_y, star1_z, star2_x, "
    "star2_y, star2_z. You can access it using the code interpreter tool. For "
    "example, to access the first five rows, print(row_wise_results.df.head(n=5))\n"
    "\n"
    "When using the code interpreter:\n"
    "1. Always use print() to display results.\n"
    "2. Do not use read_csv or attempt to load the DataFrame, as it is "
    "already pre-loaded\n"
    "Important reminder: Repeated tool access is enabled until you have found "
    "the answer and have submitted it with the `submit_answer` tool."
)

_FULL_BODY = (
    "To complete this task, you have access to the following tools and data:\n"
    "1. A DataFrame `df` containing columns: time, star1_x, star1_y, star1_z, "
    "star2_x, star2_y, star2_z.\n"
    "2. A code interpreter with `df` pre-loaded that can execute Python code.\n"
    "\n"
    "When using the code interpreter:\n"
    "1. Always use print() to display results.\n"
    "2. Do not use read_csv or attempt to load the DataFrame, as it is "
    "already pre-loaded\n"
    "Important reminder: Repeated tool access is enabled until you have found "
    "the answer and have submitted it with the `submit_answer` tool."
)


def _problem_text(instance: TaskInstance) -> str:
    template = instance.task.prompt_template
    if "{units}" in template:
        return template.format(units=instance.units)
    return template


def render_prompt(instance: TaskInstance, protocol, unit_system) -> str:
    """Full agent prompt for one task instance under a protocol."""
    problem = _problem_text(instance)
    head = _PREAMBLE.format(
        problem=problem,
        time_long=long_unit_name(unit_system.time_name),
        length_long=long_unit_name(unit_system.length_name),
    )
    if isinstance(protocol, BudgetObs):
        body = _BUDGET_BODY.format(
            t_end=f"{instance.window_end:.2e}",
            budget=protocol.n_obs,
            cap=PER_CALL_CAP,
            time_long=long_unit_name(unit_system.time_name),
        )
    elif isinstance(protocol, FullObs):
        body = _FULL_BODY
    else:
        raise TypeError(f"unknown protocol {protocol!r}")
    return head + body
