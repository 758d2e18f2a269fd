import csv
import hashlib
import io
import json

import pytest

from oransim import cli
from oransim.config import ScenarioConfig, load_preset, validate_config

TINY = {
    "name": "tiny",
    "traffic": {"synthetic": {"history_days": 1, "noise_std": 0.0}, "forecaster": {"kind": "SeasonalNaive"},
                "mapping": {"n_min": 2, "n_max": 8, "x_min": 0.0, "x_max": 50.0}, "ru_shares": [0.5, 0.5]},
    "policy": {"headroom": 1.0, "peak_scope": "per_ru"},
    "run": {"schemes": ["Full", "RappXappOnly"], "seeds": [0, 1], "rapp_indices": [40, 41], "xapp_per_rapp": 4,
            "windows_per_xapp": 10, "trace_limit": 30},
}


def write_config(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data), encoding="utf-8")
    return p


def digests(folder):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(folder.iterdir())}


# -- validate --

def test_validate_minimal_config_echoes_defaults(tmp_path, capsys):
    p = write_config(tmp_path, {})
    assert cli.main(["validate", "--config", str(p)]) == 0
    resolved = json.loads(capsys.readouterr().out)
    assert resolved == ScenarioConfig().to_dict()
    assert resolved["radio"]["channel"]["bandwidth_hz"] == 10e6
    assert resolved["policy"]["static_mu"] == 1


def test_validate_round_trips(tmp_path, capsys):
    p = write_config(tmp_path, TINY)
    assert cli.main(["validate", "--config", str(p)]) == 0
    first = capsys.readouterr().out
    q = tmp_path / "resolved.json"
    q.write_text(first)
    assert cli.main(["validate", "--config", str(q)]) == 0
    assert capsys.readouterr().out == first


def test_bad_numerology_names_field(tmp_path, capsys):
    p = write_config(tmp_path, {"policy": {"static_mu": 5}})
    assert cli.main(["validate", "--config", str(p)]) == 2
    assert "policy.static_mu" in capsys.readouterr().err


def test_inverted_mapping_names_both_fields(tmp_path, capsys):
    p = write_config(tmp_path, {"traffic": {"mapping": {"n_min": 9, "n_max": 3}}})
    assert cli.main(["validate", "--config", str(p)]) == 2
    err = capsys.readouterr().err
    assert "traffic.mapping.n_min" in err and "traffic.mapping.n_max" in err


def test_type_errors_and_unknown_fields(tmp_path, capsys):
    p = write_config(tmp_path, {"run": {"seeds": "zero"}, "radio": {"colour": 1}})
    assert cli.main(["validate", "--config", str(p)]) == 2
    err = capsys.readouterr().err
    assert "run.seeds" in err and "radio.colour" in err


def test_parse_error_has_location(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text('{"run": {\n  "seeds": [0,]\n}}')
    assert cli.main(["validate", "--config", str(p)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert cli.main(["validate", "--config", str(tmp_path / "nope.json")]) == 2


def test_validate_config_function(tmp_path):
    cfg = validate_config(write_config(tmp_path, TINY))
    assert cfg.run.rapp_indices == [40, 41]


def test_parse_seeds():
    assert cli.parse_seeds("0-3,7") == [0, 1, 2, 3, 7]
    with pytest.raises(ValueError):
        cli.parse_seeds(" , ")


def test_bad_seed_flag_is_config_error(tmp_path):
    p = write_config(tmp_path, TINY)
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path / "o"), "--seeds", "a-b"]) == 2


# -- run --

def test_run_writes_artifacts(tmp_path):
    p = write_config(tmp_path, TINY)
    out = tmp_path / "out"
    assert cli.main(["run", "--config", str(p), "--out", str(out), "--trace"]) == 0
    assert {f.name for f in out.iterdir()} == {"results.csv", "summary.json", "config.resolved.json", "trace.csv",
                                               "manifest.json"}
    rows = list(csv.DictReader(io.StringIO((out / "results.csv").read_text())))
    assert list(rows[0]) == cli.CSV_COLUMNS
    scopes = [r["scope"] for r in rows]
    # 2 schemes x 2 seeds, each with 2 intervals of 4 xApp rows + 1 rApp row, then one Run row
    assert scopes.count("Xapp") == 4 * 2 * 4 and scopes.count("Rapp") == 4 * 2 and scopes.count("Run") == 4
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seeds"] == [0, 1]
    for name, digest in manifest["files"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    trace = list(csv.DictReader(io.StringIO((out / "trace.csv").read_text())))
    assert set(trace[0]) >= {"window", "ue", "prb", "achieved_bps", "satisfied"}
    summary = json.loads((out / "summary.json").read_text())
    assert summary["violations"] == 0
    assert summary["windows"] == 4 * 2 * 4 * 10


def test_rerun_is_byte_identical(tmp_path):
    p = write_config(tmp_path, TINY)
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path / "b")]) == 0
    assert digests(tmp_path / "a") == digests(tmp_path / "b")


def test_seed_override_changes_manifest(tmp_path):
    p = write_config(tmp_path, TINY)
    assert cli.main(["run", "--config", str(p), "--out", str(tmp_path / "a"), "--seeds", "5"]) == 0
    assert json.loads((tmp_path / "a" / "manifest.json").read_text())["seeds"] == [5]


def test_runtime_failure_leaves_no_output(tmp_path, capsys):
    data = json.loads(json.dumps(TINY))
    # a dataset far too short for the requested interval
    ds = tmp_path / "short.csv"
    ds.write_text("timestamp,ru_id,load\n" + "".join(f"{900 * i},{r},10\n" for i in range(3) for r in (0, 1)))
    data["traffic"]["dataset"] = "short.csv"
    data["traffic"]["history_samples"] = 1
    p = write_config(tmp_path, data)
    out = tmp_path / "out"
    assert cli.main(["run", "--config", str(p), "--out", str(out)]) == 1
    assert "error" in capsys.readouterr().err
    assert not out.exists() or not any(f.suffix in (".csv", ".json") for f in out.iterdir())


def test_sweep_covers_requested_grid(tmp_path):
    p = write_config(tmp_path, TINY)
    out = tmp_path / "sweep"
    assert cli.main(["sweep", "--config", str(p), "--out", str(out), "--strategies", "Greedy,Random",
                     "--schemes", "Full", "--seeds", "0"]) == 0
    groups = json.loads((out / "summary.json").read_text())["groups"]
    assert {(g["scheme"], g["strategy"]) for g in groups} == {("Full", "Greedy"), ("Full", "Random")}


# -- presets --

def test_presets_resolve():
    fig4, fig5 = load_preset("fig4"), load_preset("fig5")
    assert len(fig4.strategies()) == 5 and len(fig4.rapp_indices()) == 2 and len(fig4.run.seeds) >= 30
    assert len(fig5.run.schemes) == 3 and fig5.run.demands_bps == [1e6, 2e6, 3e6]
    assert len(fig5.rapp_indices()) == 96 and len(fig5.run.seeds) >= 10


def test_fig5_summary_shape_on_a_shortened_day():
    cfg = load_preset("fig5", {"run": {"seeds": [0], "rapp_count": 1, "rapp_start": 68, "xapp_per_rapp": 3}})
    groups = cli.summary(cli.run_experiment(cfg))["groups"]
    assert len(groups) == 9
    assert {(g["scheme"], g["demand_bps"]) for g in groups} == {
        (s, d) for s in ("RappXappOnly", "XappDappOnly", "Full") for d in (1e6, 2e6, 3e6)}


def test_fig4_summary_shape_on_short_ticks():
    cfg = load_preset("fig4", {"run": {"seeds": [0], "xapp_per_rapp": 3}})
    groups = cli.summary(cli.run_experiment(cfg))["groups"]
    assert len(groups) == 5
    assert all(len(g["by_rapp"]) == 2 for g in groups)


# -- dump-graph --

def test_dump_graph_first_tick(tmp_path):
    p = write_config(tmp_path, TINY)
    out = tmp_path / "g.json"
    assert cli.main(["dump-graph", "--config", str(p), "--rapp", "40", "--xapp", "0", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    cfg = validate_config(p)
    rep = cli.Replication(cfg, "Full", cfg.strategies()[0], 2e6, 0)
    assert len(data["nodes"]) == sum(rep.actual_counts(40))
    assert all({"x", "y", "serving_ru", "prb"} <= n.keys() for n in data["nodes"])


def test_dump_graph_is_repeatable(tmp_path, capsys):
    p = write_config(tmp_path, TINY)
    args = ["dump-graph", "--config", str(p), "--rapp", "41", "--xapp", "3"]
    assert cli.main(args) == 0
    first = capsys.readouterr().out
    assert cli.main(args) == 0
    assert capsys.readouterr().out == first


def test_dump_graph_single_ru_has_no_pair_edges(tmp_path, capsys):
    data = json.loads(json.dumps(TINY))
    data["radio"] = {"rus": [{"id": 0, "kind": "Macro", "x": 250.0, "y": 250.0}]}
    data["traffic"]["ru_shares"] = [1.0]
    p = write_config(tmp_path, data)
    assert cli.main(["dump-graph", "--config", str(p), "--rapp", "40", "--xapp", "2"]) == 0
    snap = json.loads(capsys.readouterr().out)
    assert snap["pair_edges"] == []
    assert len(snap["hyperedges"]) == 1


@pytest.mark.parametrize("rapp, xapp", [(39, 0), (40, 4), (40, -1)])
def test_dump_graph_index_out_of_range(tmp_path, rapp, xapp):
    p = write_config(tmp_path, TINY)
    assert cli.main(["dump-graph", "--config", str(p), "--rapp", str(rapp), "--xapp", str(xapp)]) == 2
