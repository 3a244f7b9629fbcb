"""
The budgeted observation protocol
=================================

Agents never see the dense simulation. A budget session meters access: up to
ten timestamped queries per call, a fixed total budget, cubic interpolation
between the dense samples, and atomic accounting (failed calls charge
nothing).
"""

from orbitlab import BudgetObs, build_catalog, create_session
from orbitlab.errors import BudgetExhaustedError, CapError, WindowError

catalog = build_catalog()
scenario = catalog.scenario("eccentric-moderate")
session = create_session(scenario, BudgetObs(100))

lo, hi = session.window
print(f"window [{lo}, {hi:.3e}] s, budget {session.remaining}")

rows = session.observe([0.0, hi / 4, hi / 2])
for r in rows:
    print(f"t={r.time:.3e}  star1=({r.star1.x:.3e}, {r.star1.y:.3e})")
print(f"remaining after 3 observations: {session.remaining}")

# rejected calls are free
for bad in ([-1.0], [hi * 2], list(range(11))):
    try:
        session.observe(bad)
    except (WindowError, CapError, BudgetExhaustedError) as exc:
        print(f"rejected ({type(exc).__name__}): budget still {session.remaining}")

# observing back in time is allowed
session.observe([hi / 3, 10.0])
print(f"collected {len(session.collected)} rows, used {session.used}")

# every exchange is logged and replayable
print(f"transcript entries: {len(session.transcript)}")
