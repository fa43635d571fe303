import pytest

import bitgrip


def test_accuracy_and_scores():
    assert bitgrip.accuracy_pct(50, 59.558) == pytest.approx(80.884, abs=1e-3)
    assert bitgrip.score_spaghetti(48.42, 0.8, 0.14) == pytest.approx(47.34, abs=0.05)
    assert bitgrip.score_ikura(11.206, 3.5, 4.3) == pytest.approx(13.756, abs=0.05)


def test_simulate_drop_is_deterministic():
    a = bitgrip.simulate_drop("ikura", [5, 10], trials=20, seed=3)
    b = bitgrip.simulate_drop("ikura", [5, 10], trials=20, seed=3)
    assert a == b
    assert a["csv"].splitlines()[0] == "food,target_g,trial,dropped_g,steps,terminated_by"
    assert len(a["csv"].splitlines()) == 41


def test_pack_demo():
    r = bitgrip.pack(seed=1)
    assert r["tool_changes"] == 1
    assert len(r["servings"]) == 4
    assert r["estimated_time_s"] == 180
    assert not r["failed"]


def test_tool_change():
    ok = bitgrip.tool_change(cycles=4, seed=2)
    assert [c["success"] for c in ok] == [True] * 4
    assert all(c["elapsed_s"] == 40 for c in ok)
    bad = bitgrip.tool_change(cycles=4, seed=2, misalignment_mm=2.5)
    assert bad[0]["fault"] == "MisalignmentFault"


def test_errors_carry_codes():
    with pytest.raises(bitgrip.BitgripError) as e:
        bitgrip.simulate_drop("natto", [5])
    assert e.value.code == "UnknownFood"
    with pytest.raises(ValueError):
        bitgrip.pack(config_path="/nonexistent.json")
