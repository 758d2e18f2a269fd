"""Two cells, a handful of users: build the conflict hypergraph and color it.

Walks through the xApp step by hand. Users near the cell border interfere
with the neighbouring cell, so they pick up cross-RU edges; everyone served
by the same RU shares one exclusivity hyperedge. Each coloring strategy then
assigns PRB indices from a bounded palette.

    python3 demos/01_two_cell_conflicts.py
"""

import numpy as np

from oransim.coloring import Strategy, color, validate_coloring
from oransim.conflict import build_hypergraph, expand
from oransim.policy import FairnessScheme, NumerologyConfig, PolicyProfile
from oransim.radio import ChannelParams, Position, RadioEnvironment, RadioUnit, RuKind, UserEquipment, attach_ues

ch = ChannelParams()
rus = [RadioUnit(0, RuKind.MACRO, Position(150, 250)), RadioUnit(1, RuKind.MICRO, Position(350, 250))]
# three users hug each RU, two sit near the border between them
spots = [(140, 240), (160, 265), (130, 255), (360, 245), (345, 260), (340, 240), (245, 250), (255, 245)]
ues = [UserEquipment(i, Position(x, y)) for i, (x, y) in enumerate(spots)]
attach_ues(ues, rus, ch)
env = RadioEnvironment(rus, ues, ch)

for mu in (2, 4):
    num = NumerologyConfig.from_mu(mu, ch.bandwidth_hz)
    profile = PolicyProfile({"default": 1.0}, 0.1, Strategy.GREEDY, FairnessScheme(), mu)
    h = build_hypergraph(env, profile, num)
    g = expand(h)
    print(f"mu={mu}: {num.prb_count} PRBs of {num.prb_bandwidth_hz / 1e3:.0f} kHz")
    print(f"  serving RU per user: {[u.serving_ru for u in ues]}")
    print(f"  hyperedges: {[sorted(e) for e in h.hyperedges]}")
    print(f"  cross-RU conflicts: {sorted(sorted(e) for e in h.pair_edges)}")
    for s in Strategy:
        r = color(g, num.prb_count, s, np.random.default_rng(0))
        assert not validate_coloring(g, r)
        print(f"  {s.value:>11}: {r.colors_used} colors, unassigned {r.unassigned}")
