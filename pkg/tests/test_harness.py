import math

import numpy as np
import pytest

from thzmec import channel as ch
from thzmec.beamforming import build_codebook, select_beam
from thzmec.errors import ConfigError, InfeasibleError
from thzmec.harness.output import Table, emit_outputs, render_csv
from thzmec.harness.presets import run_preset
from thzmec.harness.runner import AGG_COLUMNS, check_scenario, monte_carlo, run_trial, run_trials
from thzmec.harness.scenario import Scenario, load_scenario, scenario_from_mapping
from thzmec.topology import deploy_users, distance_matrix, pair_users


def test_defaults_match_system_table():
    s = Scenario()
    assert (s.n_antennas, s.n_beams, s.bits_edge, s.bits_center, s.block_s) == (4, 20, 1e9, 1e9, 0.25)
    assert s.beta_edge == 0.3 and s.thz_window == ch.get_window("f3")
    assert s.p_max_w == pytest.approx(10 ** 0.9)
    assert s.replace(p_max_unit="dBm").p_max_w == pytest.approx(10 ** 0.9 / 1000)
    assert s.noise_w == ch.noise_power(137e9)
    assert s.replace(mode="mmwave").noise_w == pytest.approx(1e-7)


def test_same_seed_identical_metrics():
    s = Scenario(trials=3, users=(6,))
    a, b = run_trials(s, 6), run_trials(s, 6)
    assert repr(a) == repr(b)  # repr: nan-safe equality


def test_no_offload_independent_of_radio():
    s = Scenario(mode="none", trials=1)
    base = run_trial(s, 0, 8).total_energy
    assert run_trial(s.replace(window="f9"), 0, 8).total_energy == base
    assert run_trial(s.replace(n_antennas=16), 0, 8).total_energy == base


def test_four_users_equals_closed_form_recomputation():
    s = Scenario(trials=1)
    m = run_trial(s, 5, 4)
    dep = deploy_users([s.seed, 5], s.geometry, 2)
    dist = distance_matrix(dep)
    # K = 2: only two matchings exist
    cols = [0, 1] if dist[0, 0] + dist[1, 1] <= dist[0, 1] + dist[1, 0] else [1, 0]
    win, g = ch.get_window("f3"), ch.AntennaGains.from_dbi(3, 3, 26)
    s2 = ch.noise_power(win.bandwidth)
    cb = build_codebook(20, 4)
    total = 0.0
    for e, c in enumerate(cols):
        r, th = dep.center_users[c]
        h = ch.bs_channel_vector(win, g, r, th, 4)
        _, w = select_beam(h, cb)
        gain = abs(np.vdot(h, w)) ** 2
        side = ch.sidelink_gain(win, g, dist[e, c]) ** 2
        tc = 1e9 / (win.bandwidth * math.log2(0.7 / 0.3 + 1))
        te = 0.125 - tc
        pe = s2 * (2 ** (1e9 / (win.bandwidth * te)) - 1) / side
        pc = s2 * (2 ** (1e9 / (win.bandwidth * tc)) - 1) / (0.3 * gain)
        total += te * pe + tc * pc
    assert m.total_energy == pytest.approx(total, rel=1e-9)


def test_totals_equal_pair_sums():
    for s in (Scenario(trials=1), Scenario(trials=1, objective="cee_max", bits_edge=0.2e9, bits_center=0.2e9)):
        for t in range(5):
            m = run_trial(s, t, 8)
            ok = [p for p in m.pairs if not p.infeasible]
            assert m.total_energy == pytest.approx(sum(p.energy_J for p in ok), rel=1e-9)
            assert m.infeasible_pair_count == len(m.pairs) - len(ok)
            if s.objective == "cee_max" and ok:
                assert m.total_cee == pytest.approx(sum(p.cee_bpJHz for p in ok), rel=1e-9)


def test_single_trial_aggregate():
    s = Scenario(trials=1, users=(4, 8))
    cols, rows = monte_carlo(s)
    assert cols == list(AGG_COLUMNS)
    for row in rows:
        rec = dict(zip(cols, row))
        single = run_trial(s, 0, rec["users"])
        assert rec["energy_J"] == single.total_energy and rec["std_energy_J"] == 0.0


def test_pair_energy_grows_as_slot_shrinks():
    # the same pair with more users sharing the block only loses time
    from thzmec.emin import TaskDemand, prop1_allocate
    from thzmec.validation import random_link
    from thzmec.beamforming import cm_beamformer

    rng = np.random.default_rng(3)
    for _ in range(50):
        link = random_link(rng)
        beam = cm_beamformer(link.bs_channel)
        e = [prop1_allocate(link, TaskDemand(1e9, 1e9, 0.25, k), beam).energy for k in (2, 4, 6, 8, 10)]
        assert all(b >= a for a, b in zip(e, e[1:]))


def test_mean_energy_grows_with_users():
    _, rows = monte_carlo(Scenario(trials=100))
    means = [r[1] for r in rows]
    assert all(b >= a for a, b in zip(means, means[1:]))


def test_parallel_equals_serial():
    s = Scenario(trials=4, users=(4, 8), objective="cee_max", bits_edge=0.2e9, bits_center=0.2e9)
    assert repr(monte_carlo(s, workers=1)) == repr(monte_carlo(s, workers=2))


def test_infeasible_rate_column():
    s = Scenario(trials=5, users=(4,), objective="cee_max")
    cols, rows = monte_carlo(s)
    rec = dict(zip(cols, rows[0]))
    assert 0 < rec["infeasible_rate"] <= 1
    assert rec["trials_used"] <= 5


def test_scenario_level_infeasibility():
    with pytest.raises(InfeasibleError):
        check_scenario(Scenario(bits_center=10e9, users=(20,)))
    check_scenario(Scenario())


def test_config_parsing(tmp_path):
    empty = tmp_path / "empty.ini"
    empty.write_text("")
    assert load_scenario(empty) == Scenario()
    f = tmp_path / "s.ini"
    f.write_text(
        "[scenario]\nwindow = f7\nusers = 4, 8\np_max_db = 30\np_max_unit = dBm\n"
        "[geometry]\ncenter_radius_m = 2.5\n[solver]\nmax_iters = 20\n"
    )
    s = load_scenario(f)
    assert s.window == "f7" and s.users == (4, 8) and s.p_max_w == pytest.approx(1.0)
    assert s.center_radius_m == 2.5 and s.solver.max_iters == 20


def test_config_custom_window():
    s = scenario_from_mapping({"scenario.window": "custom", "custom_window.frequency_hz": "1e12",
                               "custom_window.bandwidth_hz": "5e10", "custom_window.absorption_per_m": "0.1"})
    assert s.thz_window == ch.ThzWindow(1e12, 5e10, 0.1)


@pytest.mark.parametrize(
    "key,value",
    [
        ("scenario.mode", "fast"),
        ("scenario.users", "5"),
        ("scenario.beta_edge", "1.2"),
        ("scenario.trials", "many"),
        ("geometry.center_radius_m", "9"),
        ("scenario.bogus", "1"),
        ("scenario.window", "f12"),
    ],
)
def test_config_errors_name_field(key, value):
    with pytest.raises(ConfigError) as exc:
        scenario_from_mapping({key: value})
    assert exc.value.field
    assert str(exc.value).startswith(exc.value.field)


def test_empty_table_header_only():
    text = render_csv(Table("empty", ["users", "energy_J"]), revision="abc")
    lines = text.splitlines()
    assert all(ln.startswith("#") for ln in lines[:-1])
    assert lines[-1] == "users,energy_J"


def test_fig3_and_fig4_schema():
    base = Scenario(trials=2, users=(4, 8))
    tabs = run_preset("fig3", base)
    assert [t.name for t in tabs] == ["fig3_full", "fig3_partial", "fig3_none"]
    assert {r[1] for r in tabs[0].rows} == {x * 1e9 for x in (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)}
    (fig4,) = run_preset("fig4", base)
    assert fig4.columns == ["users", "energy_noma_J", "energy_oma_J", "std_energy_noma_J", "std_energy_oma_J"]


def test_emit_identical_bytes(tmp_path):
    base = Scenario(trials=3, users=(4, 6))
    a = emit_outputs(run_preset("fig9", base), tmp_path / "a")
    b = emit_outputs(run_preset("fig9", base, workers=2), tmp_path / "b")
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    csv = (tmp_path / "a" / "fig9.csv").read_text()
    assert "# seed: 2023" in csv and "# scenario_hash: " in csv and "# git_revision: " in csv
    gp = (tmp_path / "a" / "fig9.gp").read_text()
    assert "'fig9.csv'" in gp


def test_emit_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        emit_outputs([Table("t", ["users"])], blocker / "sub")


def test_example_config_is_the_default():
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "docs" / "example.ini"
    assert load_scenario(path) == Scenario()
