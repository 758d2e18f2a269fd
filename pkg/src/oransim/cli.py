"""Command-line runner: validate configs, run experiments and sweeps, dump hypergraph snapshots.

Exit codes: 0 success, 2 configuration or argument error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import shutil
import sys
import tempfile
from pathlib import Path
from statistics import mean, pstdev

import numpy as np

from . import __version__
from .coloring import Strategy, color
from .config import SCHEMES, ConfigError, ParseError, ScenarioConfig, config_from_dict, preset_dict
from .conflict import build_hypergraph, expand, hypergraph_to_dict
from .orchestrator import ExperimentResult, Replication, _Replay, run_experiment
from .policy import NumerologyConfig

CSV_COLUMNS = ["scope", "scheme", "strategy", "demand_bps", "mu", "rapp", "xapp", "success_rate", "jfi",
               "mean_service_share", "active_ues", "seed"]
TRACE_COLUMNS = ["scheme", "strategy", "demand_bps", "seed", "window", "ue", "prb", "achieved_bps", "satisfied"]


class IndexOutOfRange(ValueError):
    pass


# -- config resolution -------------------------------------------------------------

def parse_seeds(text: str) -> list[int]:
    """'0,1,5' or '0-9' (inclusive) or a mix such as '0-2,7'."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError("empty seed list")
    return seeds


def resolve_config(args) -> ScenarioConfig:
    if args.config and args.preset:
        raise ConfigError([("<args>", "give either --config or --preset, not both")])
    if args.config:
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError([("<args>", f"cannot read {path}: {exc.strerror}")]) from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        base = path.parent
    elif args.preset:
        data, base = preset_dict(args.preset), None
    else:
        data, base = {}, None
    if getattr(args, "seeds", None):
        try:
            seeds = parse_seeds(args.seeds)
        except ValueError as exc:
            raise ConfigError([("--seeds", str(exc))]) from None
        data = dict(data)
        data["run"] = {**data.get("run", {}), "seeds": seeds}
    cfg = config_from_dict(data, base)
    if cfg.traffic.dataset is not None and base is not None and not Path(cfg.traffic.dataset).is_absolute():
        cfg.traffic.dataset = str((base / cfg.traffic.dataset).resolve())
    return cfg


# -- output writers ------------------------------------------------------------------

def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def results_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in result.records(include_xapp=result.config.run.emit_xapp_rows):
        w.writerow([r.scope.value, r.scheme.value, r.strategy.value, _num(r.demand_bps), _num(r.mu),
                    _num(r.rapp), _num(r.xapp), _num(r.success_rate), _num(r.jfi), _num(r.mean_service_share),
                    _num(r.active_ues), _num(r.seed)])
    return buf.getvalue()


def _stats(values: list[float]) -> dict:
    return {"mean": mean(values), "std": pstdev(values) if len(values) > 1 else 0.0,
            "min": min(values), "max": max(values)}


def summary(result: ExperimentResult) -> dict:
    """Per (scheme, strategy, demand) aggregates over seeds, with a per-interval breakdown."""
    groups: dict[tuple, list] = {}
    for rep in result.replications:
        groups.setdefault((rep.scheme.value, rep.strategy.value, rep.demand_bps), []).append(rep)
    out = []
    for (scheme, strategy, demand), reps in groups.items():
        by_rapp = []
        for i, o in enumerate(reps[0].rapps):
            rows = [rep.rapps[i] for rep in reps]
            by_rapp.append({
                "rapp": o.record.rapp,
                "success": _stats([r.record.success_rate for r in rows]),
                "jfi": _stats([r.record.jfi for r in rows]),
                "active_ues_mean": mean(r.active_ues for r in rows),
                "mu": sorted({r.mu for r in rows}),
            })
        out.append({
            "scheme": scheme, "strategy": strategy, "demand_bps": demand,
            "seeds": [rep.seed for rep in reps],
            "success": _stats([rep.run.success_rate for rep in reps]),
            "jfi": _stats([rep.run.jfi for rep in reps]),
            "mean_service_share": _stats([rep.run.mean_service_share for rep in reps]),
            "by_rapp": by_rapp,
        })
    windows = sum(o.windows for rep in result.replications for o in rep.rapps)
    return {"name": result.config.name, "config_digest": result.config.digest(), "groups": out,
            "windows": windows, "violations": result.violations}


def trace_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for rep in result.replications:
        t = rep.trace
        if t is None:
            continue
        target = (1 - t["tolerance"]) * t["demand"]
        for row in range(len(t["n"])):
            for slot in range(int(t["n"][row])):
                rate = float(t["rate"][row, slot])
                prb = int(t["prb"][row, slot])
                w.writerow([rep.scheme.value, rep.strategy.value, _num(rep.demand_bps), rep.seed,
                            int(t["window"][row]), int(t["ids"][row, slot]), prb if prb >= 0 else "",
                            repr(rate), int(rate >= target)])
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_outputs(out_dir: Path, files: dict[str, str]) -> None:
    """Write every file or none: stage in a temp dir, then move into place."""
    out_dir.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=".staging-", dir=out_dir))
    try:
        for name, text in files.items():
            (stage / name).write_text(text, encoding="utf-8")
        for name in files:
            (stage / name).replace(out_dir / name)
    finally:
        shutil.rmtree(stage, ignore_errors=True)


def experiment_files(cfg: ScenarioConfig, trace: bool = False) -> dict[str, str]:
    result = run_experiment(cfg, trace=trace)
    files = {
        "results.csv": results_csv(result),
        "summary.json": _dump(summary(result)),
        "config.resolved.json": _dump(cfg.to_dict()),
    }
    if trace:
        files["trace.csv"] = trace_csv(result)
    files["manifest.json"] = _dump({
        "config_digest": cfg.digest(),
        "seeds": list(cfg.run.seeds),
        "version": __version__,
        "files": {k: hashlib.sha256(v.encode()).hexdigest() for k, v in sorted(files.items())},
    })
    return files


# -- commands --------------------------------------------------------------------------

def cmd_validate(args) -> int:
    cfg = resolve_config(args)
    sys.stdout.write(_dump(cfg.to_dict()))
    return 0


def cmd_run(args) -> int:
    cfg = resolve_config(args)
    out = Path(args.out)
    write_outputs(out, experiment_files(cfg, trace=args.trace))
    print(f"wrote results to {out}", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    """Cartesian run over strategies and schemes (all of them unless restricted)."""
    cfg = resolve_config(args)
    data = cfg.to_dict()
    data["run"]["strategies"] = args.strategies.split(",") if args.strategies else [s.value for s in Strategy]
    data["run"]["schemes"] = args.schemes.split(",") if args.schemes else list(SCHEMES)
    cfg = config_from_dict(data)
    out = Path(args.out)
    write_outputs(out, experiment_files(cfg, trace=args.trace))
    print(f"wrote sweep results to {out}", file=sys.stderr)
    return 0


def snapshot(cfg: ScenarioConfig, rapp: int, xapp: int, scheme: str | None = None, strategy: str | None = None,
             demand_bps: float | None = None, seed: int | None = None) -> dict:
    """Hypergraph and coloring at the start of xApp tick ``xapp`` of rApp interval ``rapp``."""
    indices = cfg.rapp_indices()
    if rapp not in indices:
        raise IndexOutOfRange(f"rApp interval {rapp} is not among the configured intervals "
                              f"{indices[0]}..{indices[-1]}")
    if not 0 <= xapp < cfg.run.xapp_per_rapp:
        raise IndexOutOfRange(f"xApp tick {xapp} outside 0..{cfg.run.xapp_per_rapp - 1}")
    scheme = scheme or cfg.run.schemes[0]
    strategy = strategy or cfg.strategies()[0]
    demand_bps = demand_bps if demand_bps is not None else cfg.run.demands_bps[0]
    seed = seed if seed is not None else cfg.run.seeds[0]
    rep = Replication(cfg, scheme, strategy, demand_bps, seed)
    for k in indices:
        if k == rapp:
            break
        rep.run_rapp_interval(k)
    profile, _, angles, uniforms = rep.begin_interval(rapp)
    if xapp:
        rep.run_ticks(profile, angles[:xapp], uniforms[:xapp], np.zeros(rep.n_active, dtype=np.int64))
    env = rep.environment()
    num = NumerologyConfig.from_mu(profile.numerology, cfg.radio.channel.bandwidth_hz)
    h = build_hypergraph(env, profile, num)
    coloring = color(expand(h), num.prb_count, profile.strategy, _Replay(uniforms[xapp:xapp + 1], 0.0, 1.0))
    return hypergraph_to_dict(h, coloring, env, rapp=rapp, xapp=xapp, mu=profile.numerology, seed=seed,
                              scheme=rep.scheme.value, demand_bps=demand_bps,
                              rus=[{"id": r.id, "kind": r.kind.value, "x": r.position.x, "y": r.position.y}
                                   for r in rep.rus])


def cmd_dump_graph(args) -> int:
    cfg = resolve_config(args)
    snap = snapshot(cfg, args.rapp, args.xapp, args.scheme, args.strategy, args.demand, args.seed)
    text = _dump(snap)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        out = Path(args.out)
        write_outputs(out.parent if str(out.parent) else Path("."), {out.name: text})
    return 0


# -- entry point -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oransim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seeds=True):
        sp.add_argument("--config", help="scenario config (JSON)")
        sp.add_argument("--preset", choices=["fig4", "fig5"], help="bundled scenario")
        if seeds:
            sp.add_argument("--seeds", help="seed list overriding the config, e.g. 0-9 or 1,4,7")

    v = sub.add_parser("validate", help="resolve a config and print it, or list its problems")
    common(v, seeds=False)
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("run", help="run the configured experiment")
    common(r)
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--trace", action="store_true", help="also write the per-window trace CSV")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run every strategy under every scheme")
    common(s)
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--trace", action="store_true", help="also write the per-window trace CSV")
    s.add_argument("--strategies", help="comma-separated subset of strategies")
    s.add_argument("--schemes", help="comma-separated subset of schemes")
    s.set_defaults(func=cmd_sweep)

    d = sub.add_parser("dump-graph", help="write the hypergraph and PRB coloring at one xApp tick")
    common(d)
    d.add_argument("--rapp", type=int, required=True, help="rApp interval index")
    d.add_argument("--xapp", type=int, required=True, help="xApp tick within the interval")
    d.add_argument("--scheme", choices=list(SCHEMES))
    d.add_argument("--strategy", choices=[x.value for x in Strategy])
    d.add_argument("--demand", type=float, help="demand in bps")
    d.add_argument("--seed", type=int)
    d.add_argument("--out", help="output JSON file (default: stdout)")
    d.set_defaults(func=cmd_dump_graph)
    return p


def _report(exc: ConfigError) -> None:
    if isinstance(exc, ParseError):
        print(f"error: {exc}", file=sys.stderr)
        return
    for path, msg in exc.diagnostics:
        print(f"error: {path}: {msg}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _report(exc)
        return 2
    except IndexOutOfRange as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the exit code is the contract
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
