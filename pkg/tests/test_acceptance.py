"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

The reproduction checks run the bundled ``fig4`` and ``fig5`` presets in full
(about 15 s and 10 min); they are marked ``slow``.
"""

import hashlib
from itertools import chain

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, brute_chromatic, random_graph
from oransim import cli
from oransim.coloring import ExpandedGraph, Strategy, color, validate_coloring
from oransim.config import load_preset
from oransim.orchestrator import Scheme, jfi, run_experiment, run_xapp_interval, success_rate
from oransim.policy import FairnessScheme, PolicyProfile, select_numerology
from oransim.radio import ChannelParams, Position, RadioEnvironment, RadioUnit, RuKind, UserEquipment, attach_ues
from oransim.scheduler import SchedulerState, service_share
from oransim.traffic import Forecaster, ForecasterKind, forecast_error

# windows in which adjacent UEs shared a PRB, per criterion that schedules anything
VIOLATIONS: dict[int, int] = {}


def record(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2} {title}: {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)


def check(n: int, title: str, clauses: dict[str, bool], detail: str) -> None:
    failed = [k for k, ok in clauses.items() if not ok]
    suffix = f" | failed: {', '.join(failed)}" if failed else ""
    record(n, title, not failed, detail + suffix)
    assert not failed, f"criterion {n}: {failed}"


# -- shared preset runs ----------------------------------------------------------

@pytest.fixture(scope="module")
def fig4():
    return run_experiment(load_preset("fig4"))


@pytest.fixture(scope="module")
def fig5():
    return run_experiment(load_preset("fig5"))


# -- 1: strategy ordering ----------------------------------------------------------

@pytest.mark.slow
def test_criterion_1_strategy_ordering(fig4):
    VIOLATIONS[1] = fig4.violations
    low_k, high_k = fig4.config.rapp_indices()
    overall, low, high = {}, {}, {}
    for s in Strategy:
        reps = [r for r in fig4.replications if r.strategy is s]
        overall[s] = float(np.mean([r.run.success_rate for r in reps]))
        low[s] = float(np.mean([o.record.success_rate for r in reps for o in r.rapps if o.record.rapp == low_k]))
        high[s] = float(np.mean([o.record.success_rate for r in reps for o in r.rapps if o.record.rapp == high_k]))
    wp, heur = Strategy.WELSH_POWELL, (Strategy.GREEDY, Strategy.DSATUR, Strategy.WELSH_POWELL)
    naive = (Strategy.RANDOM, Strategy.SEQ_COLOR)
    clauses = {
        "WP >= Greedy": overall[wp] >= overall[Strategy.GREEDY],
        "WP >= DSatur - 1pt": overall[wp] >= overall[Strategy.DSATUR] - 0.01,
        "WP >= Random": overall[wp] >= overall[Strategy.RANDOM],
        "WP >= SeqColor": overall[wp] >= overall[Strategy.SEQ_COLOR],
        "heuristics >= 84% low load": all(low[s] >= 0.84 for s in heur),
        "WP >= 90% low load": low[wp] >= 0.90,
        "WP >= 85% high load": high[wp] >= 0.85,
        "naive <= heuristics - 10pt": max(overall[s] for s in naive) <= min(overall[s] for s in heur) - 0.10,
    }
    n_low = np.mean([o.active_ues for r in fig4.replications for o in r.rapps if o.record.rapp == low_k])
    n_high = np.mean([o.active_ues for r in fig4.replications for o in r.rapps if o.record.rapp == high_k])
    detail = (f"{len(fig4.config.run.seeds)} seeds, {n_low:.0f}/{n_high:.0f} UEs; "
              + ", ".join(f"{s.value} {overall[s]:.4f} ({low[s]:.3f}/{high[s]:.3f})" for s in Strategy))
    check(1, "strategy ordering", clauses, detail)


# -- 2: scheme trade-off -------------------------------------------------------------

@pytest.mark.slow
def test_criterion_2_scheme_tradeoff(fig5):
    VIOLATIONS[2] = fig5.violations
    demands = fig5.config.run.demands_bps
    succ, fair = {}, {}
    for s in Scheme:
        for d in demands:
            reps = [r for r in fig5.replications if r.scheme is s and r.demand_bps == d]
            succ[s, d] = float(np.mean([r.run.success_rate for r in reps]))
            fair[s, d] = float(np.mean([r.run.jfi for r in reps]))
    rxo, xdo, full = Scheme.RAPP_XAPP_ONLY, Scheme.XAPP_DAPP_ONLY, Scheme.FULL
    others = (rxo, xdo)
    clauses = {
        "(a) RappXappOnly success >= 85%": all(succ[rxo, d] >= 0.85 for d in demands),
        "(a) RappXappOnly JFI <= Full - 20pt": all(fair[rxo, d] <= fair[full, d] - 0.20 for d in demands),
        "(b) XappDappOnly JFI >= 85%": all(fair[xdo, d] >= 0.85 for d in demands),
        "(b) XappDappOnly success < Full at 3 Mbps": succ[xdo, max(demands)] < succ[full, max(demands)],
        "(c) Full success within 2pt of best": all(succ[full, d] >= max(succ[o, d] for o in others) - 0.02
                                                   for d in demands),
        "(c) Full JFI within 2pt of best": all(fair[full, d] >= max(fair[o, d] for o in others) - 0.02
                                               for d in demands),
    }
    detail = f"{len(fig5.config.run.seeds)} seeds x {len(fig5.config.rapp_indices())} intervals; " + "; ".join(
        f"{s.value} " + " ".join(f"{d / 1e6:g}M {succ[s, d]:.3f}/{fair[s, d]:.3f}" for d in demands)
        for s in Scheme) + " (success/JFI)"
    check(2, "scheme trade-off", clauses, detail)


# -- 3: coloring against the exact oracle ------------------------------------------------

def test_criterion_3_coloring_oracle():
    rng = np.random.default_rng(2024)
    invalid = 0
    excess = 0
    below_chi = 0
    for i in range(500):
        n = int(rng.integers(1, 9))
        g = random_graph(rng, n, float(rng.choice([0.2, 0.4, 0.6, 0.8])))
        chi = brute_chromatic(g)
        palette = int(rng.integers(1, n + 1))
        for s in Strategy:
            r = color(g, palette, s, np.random.default_rng(i))
            invalid += len(validate_coloring(g, r))
        if palette < chi:
            continue
        for s in (Strategy.DSATUR, Strategy.WELSH_POWELL):
            needed = color(g, n, s).colors_used
            r = color(g, palette, s)
            excess += len(r.unassigned) > max(needed - chi, 0)
            below_chi += r.colors_used < chi
    check(3, "coloring oracle", {"valid": invalid == 0, "unassigned bound": excess == 0, "colors >= chi": below_chi == 0},
          f"500 graphs (n <= 8), {invalid} violations, {excess} bound breaches, {below_chi} colorings below chi")


# -- 4: scheduler fairness ---------------------------------------------------------------

def clustered_cell(n: int):
    # one 2.88 MHz PRB (mu=4 on a 3.2 MHz carrier); UEs right next to the RU all conflict
    ch = ChannelParams(bandwidth_hz=3.2e6)
    ru = RadioUnit(0, RuKind.MACRO, Position(250, 250))
    ues = [UserEquipment(i, Position(260 + 0.1 * i, 250), velocity_mps=0.0) for i in range(n)]
    attach_ues(ues, [ru], ch)
    return RadioEnvironment([ru], ues, ch)


def test_criterion_4_scheduler_fairness():
    prof = PolicyProfile({"default": 1.0}, 0.0, Strategy.GREEDY, FairnessScheme(), 4)
    shares = {}
    violations = 0
    for n in (2, 3):
        env, state = clustered_cell(n), SchedulerState()
        out = run_xapp_interval(env, prof, state, Scheme.FULL, np.random.default_rng(0), np.random.default_rng(0),
                                windows=100, bandwidth_hz=3.2e6)
        violations += out.violations
        shares[n] = [service_share(state, u) for u in range(n)]
    VIOLATIONS[4] = violations
    clauses = {
        "pair 0.5 +/- 0.02": all(abs(s - 0.5) <= 0.02 for s in shares[2]),
        "K3 1/3 +/- 0.05": all(abs(s - 1 / 3) <= 0.05 for s in shares[3]),
        "K3 JFI >= 0.98": jfi(shares[3]) >= 0.98,
    }
    check(4, "scheduler fairness", clauses,
          f"pair shares {shares[2]}, K3 shares {[round(s, 4) for s in shares[3]]}, K3 JFI {jfi(shares[3]):.4f}")


# -- 5: conflict safety ----------------------------------------------------------------

@pytest.mark.slow
def test_criterion_5_conflict_safety(fig4, fig5):
    VIOLATIONS.setdefault(1, fig4.violations)
    VIOLATIONS.setdefault(2, fig5.violations)
    if 4 not in VIOLATIONS:
        test_criterion_4_scheduler_fairness()
    # criterion 3 schedules nothing; its plans are covered by validate_coloring
    windows = sum(o.windows for rep in chain(fig4.replications, fig5.replications) for o in rep.rapps)
    total = sum(VIOLATIONS.values())
    ok = total == 0
    record(5, "conflict safety", ok, f"{total} adjacent co-channel pairs over {windows:,} preset windows "
                                     f"plus the fairness scenarios")
    assert total == 0


# -- 6: clock accounting -------------------------------------------------------------

@pytest.mark.slow
def test_criterion_6_clock_accounting(fig5):
    outcomes = [o for rep in fig5.replications for o in rep.rapps]
    ticks = {o.ticks for o in outcomes}
    windows = {o.windows for o in outcomes}
    ok = ticks == {900} and windows == {90_000}
    record(6, "clock accounting", ok, f"{len(outcomes)} rApp intervals, ticks per interval {sorted(ticks)}, "
                                      f"windows per interval {sorted(windows)}")
    assert ok


# -- 7: numerology ----------------------------------------------------------------------

def test_criterion_7_numerology():
    anchors = [select_numerology(p, 10e6, headroom=1.0) for p in (0, 11, 60)]
    sweep = [select_numerology(p, 10e6, headroom=1.0) for p in range(61)]
    monotone = all(a >= b for a, b in zip(sweep, sweep[1:]))
    check(7, "numerology anchors", {"anchors": anchors == [4, 2, 0], "monotone": monotone},
          f"peaks 0/11/60 -> {anchors}, sweep 0..60 non-increasing: {monotone}")


# -- 8: metrics ----------------------------------------------------------------------------

def test_criterion_8_metrics():
    values = [jfi([1, 1, 1, 1]), jfi([1, 0]), jfi([1, 0.5]), success_rate([True] * 10 + [False] * 2)]
    expected = [1.0, 0.5, 0.9, 10 / 12]
    ok = all(abs(v - e) <= 1e-9 for v, e in zip(values, expected))
    record(8, "metric values", ok, f"jfi 1.0/0.5/0.9 and success 10 of 12 -> {[round(v, 12) for v in values]}")
    assert ok


# -- 9: determinism ------------------------------------------------------------------------

def test_criterion_9_determinism(tmp_path):
    hashes = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert cli.main(["run", "--preset", "fig4", "--seeds", "0-1", "--out", str(out)]) == 0
        hashes.append({p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(out.iterdir())})
    ok = hashes[0] == hashes[1]
    record(9, "determinism", ok, f"two fig4 runs (seeds 0-1), {len(hashes[0])} files, identical hashes: {ok}")
    assert ok


# -- 10: forecasters ------------------------------------------------------------------------

def test_criterion_10_forecasters():
    day = np.random.default_rng(10).uniform(0, 100, size=96)
    y = np.tile(day, 3)
    preds = [Forecaster(ForecasterKind.SEASONAL_NAIVE).fit(y[:t]).rollout(1)[0] for t in range(96, len(y))]
    mae, _ = forecast_error(preds, y[96:])
    ramp = 2.0 * np.arange(40)
    err = abs(Forecaster(ForecasterKind.LINEAR_AR, order=2).fit(ramp).rollout(1)[0] - 80.0)
    check(10, "forecaster sanity", {"seasonal MAE 0": mae == 0.0, "AR ramp < 1e-6": err < 1e-6},
          f"SeasonalNaive one-step MAE {mae}, LinearAR ramp error {err:.2e}")


def test_chromatic_oracle_is_sane():
    # guards the oracle used by criterion 3: odd cycle, complete graph, empty graph
    assert brute_chromatic(ExpandedGraph.from_edges(range(5), [(i, (i + 1) % 5) for i in range(5)])) == 3
    assert brute_chromatic(ExpandedGraph.from_edges(range(6), [(u, v) for u in range(6) for v in range(u)])) == 6
    assert brute_chromatic(ExpandedGraph.from_edges(range(4), [])) == 1
