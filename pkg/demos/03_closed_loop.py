"""The full closed loop on a few rApp intervals of the bundled fig5 scenario.

Each rApp interval forecasts the next 15 minutes of load, maps it to a UE
count and picks a numerology (XappDappOnly skips the forecast and keeps a
static numerology); the xApp then recolors every second and the
dApp schedules every 10 ms. Ticks are shortened here so the demo runs in
seconds; the CLI runs the full 900-tick intervals.

    python3 demos/03_closed_loop.py
"""

from oransim.config import load_preset
from oransim.orchestrator import Replication

cfg = load_preset("fig5", {"run": {"rapp_count": 6, "rapp_start": 40, "xapp_per_rapp": 60}})
for scheme in cfg.run.schemes:
    rep = Replication(cfg, scheme, cfg.strategies()[0], 3e6, seed=0)
    print(scheme)
    for k in cfg.rapp_indices():
        o = rep.run_rapp_interval(k)
        peak = f"{o.predicted_peak:>2} UEs" if o.predicted_peak >= 0 else "static"
        print(f"  interval {k}: forecast peak {peak:>6}, {o.active_ues:>2} active, mu={o.mu}, "
              f"success {o.record.success_rate:.3f}, JFI {o.record.jfi:.3f}")
