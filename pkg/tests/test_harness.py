"""Scenario loading, determinism, message accounting, and privacy verdicts."""

import dataclasses

import pytest

from fourier_mpc.harness import (
    ConfigInvalid,
    MessageLog,
    Scenario,
    assert_no_internode_traffic,
    privacy_check,
    run,
    run_transcript,
    serialize,
)

GOLDEN = {
    "kind": "two-party",
    "tau": "1/6",
    "secrets": [2.2, 4.1],
    "weights": [3.0, 5.0],
    "y": -9.0,
    "seed": 20,
}


def scenario(**over):
    raw = dict(GOLDEN)
    raw.update(over)
    return Scenario.from_dict(raw)


# -- configuration ----------------------------------------------------------

def test_from_dict_parses_rational_tau():
    sc = scenario()
    assert sc.tau == pytest.approx(1.0 / 6.0)
    assert sc.secrets == (2.2, 4.1)


def test_from_dict_rejects_unknown_kind_and_fields():
    with pytest.raises(ConfigInvalid):
        Scenario.from_dict({"kind": "mystery"})
    with pytest.raises(ConfigInvalid):
        scenario(surprise=1)


def test_from_dict_rejects_length_mismatch():
    with pytest.raises(ConfigInvalid):
        scenario(weights=[3.0])


def test_from_toml_round_trip(tmp_path):
    p = tmp_path / "sc.toml"
    p.write_text(
        'kind = "n-party"\ntau = "1/6"\nsecrets = [1.0, 2.0, 3.0]\n'
        "weights = [1.0, 1.0, 1.0]\ny = 1.0\nseed = 3\n"
    )
    sc = Scenario.from_toml(p)
    assert sc.kind == "n-party" and sc.n == 2  # n field unused for n-party
    t = run_transcript(sc)
    assert t.display.real == pytest.approx(12.0, abs=1e-8)


def test_bundled_example_scenario_loads():
    from importlib.resources import files

    path = files("fourier_mpc.data") / "worked_example.toml"
    sc = Scenario.from_toml(path)
    t = run_transcript(sc)
    assert t.display.real == pytest.approx(-54.08, abs=1e-6)


# -- determinism ------------------------------------------------------------

def test_identical_scenarios_serialize_to_identical_bytes():
    sc = scenario()
    t1, log1, _ = run(sc)
    t2, log2, _ = run(scenario())
    assert serialize(t1, log1) == serialize(t2, log2)


def test_different_seeds_change_masks_not_display():
    t1 = run_transcript(scenario(seed=1))
    t2 = run_transcript(scenario(seed=2))
    assert serialize(t1, MessageLog()) != serialize(t2, MessageLog())
    assert t1.display.real == pytest.approx(t2.display.real, abs=1e-8)


# -- message accounting -----------------------------------------------------

def test_two_party_message_counts():
    _, log, _ = run(scenario())
    assert log.counts() == {"user-node": 8, "node-display": 4}


def test_multi_node_message_counts():
    sc = Scenario.from_dict({
        "kind": "multi-node", "iota": 1, "secrets": [1.0, 2.0, 3.0],
        "weights": [1.0, 1.0, 1.0], "y": 1.0, "seed": 4,
    })
    _, log, _ = run(sc)
    assert log.counts() == {
        "user-node": 36, "second level": 12, "node-display": 4,
    }


def test_no_internode_traffic_invariant():
    _, log, _ = run(scenario())
    assert assert_no_internode_traffic(log) == "PASS"
    log.send("gossip", ("node", 1), ("node", 2), "leak")
    assert assert_no_internode_traffic(log) == "FAIL"
    log2 = MessageLog()
    log2.send("gossip", ("category", 0), ("category", 5), "leak")
    assert assert_no_internode_traffic(log2) == "FAIL"


# -- privacy verdicts -------------------------------------------------------

def test_single_corrupted_node_passes():
    t = run_transcript(scenario())
    for node in (1, 2, 3, 4):
        verdict, detail = privacy_check(t, (node,))
        assert verdict == "PASS", detail


def test_two_corrupted_nodes_fail_as_beyond_threshold():
    t = run_transcript(scenario())
    verdict, detail = privacy_check(t, (1, 3))
    assert verdict == "FAIL" and "threshold" in detail


def test_multi_node_partial_categories_pass():
    sc = Scenario.from_dict({
        "kind": "multi-node", "iota": 1, "secrets": [2.0, 3.0],
        "weights": [1.0, 1.0], "y": 1.0, "seed": 9,
    })
    t = run_transcript(sc)
    one_per_three = tuple(("cat", c, 0) for c in (0, 1, 2))
    assert privacy_check(t, one_per_three)[0] == "PASS"
    all_four_partial = tuple(("cat", c, 0) for c in range(4))
    assert privacy_check(t, all_four_partial)[0] == "PASS"
    assert privacy_check(t, (("node", 2),))[0] == "PASS"


def test_multi_node_full_category_plus_ratio_fails():
    sc = Scenario.from_dict({
        "kind": "multi-node", "iota": 1, "secrets": [2.0, 3.0],
        "weights": [1.0, 1.0], "y": 1.0, "seed": 9,
    })
    t = run_transcript(sc)
    bad = tuple(("cat", 0, s) for s in range(3)) + (("cat", 1, 0),)
    verdict, _ = privacy_check(t, bad)
    assert verdict == "FAIL"


def test_run_reports_privacy_verdict_from_scenario_field():
    sc = scenario(corrupted=[2])
    _, _, report = run(sc)
    assert report.privacy.startswith("PASS")
    assert report.residual < 1e-6


# -- report fields ----------------------------------------------------------

def test_report_record_is_plain_data():
    _, _, report = run(scenario())
    rec = report.to_record()
    assert set(rec) == {
        "display_re", "display_im", "expected", "residual", "privacy",
        "messages", "elapsed_ms",
    }
    assert rec["display_re"] == pytest.approx(-54.08, abs=1e-6)
    assert rec["expected"] == pytest.approx(-54.08, abs=1e-9)
    assert rec["elapsed_ms"] > 0


def test_baseline_scenario_runs_through_the_harness():
    sc = Scenario.from_dict({
        "kind": "baseline", "secrets": [2.2, 4.1], "weights": [1.0, 1.0],
        "baseline_mode": "product", "node_count": 4,
    })
    t, log, report = run(sc)
    assert report.display_re == pytest.approx(9.02, abs=1e-9)
    assert log.counts()["node-display"] == 4


def test_scenario_is_frozen():
    sc = scenario()
    with pytest.raises(dataclasses.FrozenInstanceError):
        sc.seed = 99
