"""Why time-sharing matters: three mutually conflicting users and one PRB.

A frozen coloring (what the xApp alone can do) gives the single PRB to one
user for the whole tick. The dApp's proportional-fair windows rotate it, so
each user is served in roughly a third of the windows. Success stays low in
both cases because a user only counts as satisfied when served in at least
half of the tick's windows; fairness is what changes.

    python3 demos/02_time_sharing.py
"""

import numpy as np

from oransim.coloring import Strategy
from oransim.orchestrator import Scheme, jfi, run_xapp_interval
from oransim.policy import FairnessScheme, PolicyProfile
from oransim.radio import ChannelParams, Position, RadioEnvironment, RadioUnit, RuKind, UserEquipment, attach_ues
from oransim.scheduler import SchedulerState, service_share

# mu=4 on a 3.2 MHz carrier leaves exactly one 2.88 MHz PRB
BW = 3.2e6
profile = PolicyProfile({"default": 1.0}, 0.0, Strategy.GREEDY, FairnessScheme(), 4)

for scheme in (Scheme.RAPP_XAPP_ONLY, Scheme.FULL):
    ch = ChannelParams(bandwidth_hz=BW)
    ru = RadioUnit(0, RuKind.MACRO, Position(250, 250))
    ues = [UserEquipment(i, Position(260 + 0.1 * i, 250), velocity_mps=0.0) for i in range(3)]
    attach_ues(ues, [ru], ch)
    env = RadioEnvironment([ru], ues, ch)
    state = SchedulerState()
    out = run_xapp_interval(env, profile, state, scheme, np.random.default_rng(0), np.random.default_rng(1),
                            bandwidth_hz=BW)
    shares = [service_share(state, u) for u in range(3)]
    print(f"{scheme.value:>13}: shares {np.round(shares, 3).tolist()}, JFI {jfi(shares):.3f}, "
          f"success {out.record.success_rate:.3f}, conflicts {out.violations}")
