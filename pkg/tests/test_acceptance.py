"""Acceptance suite: one verdict line per check, grouped per criterion in the summary.

Each test records its verdict through the ``verdict`` fixture before asserting,
so failing criteria still print their measured numbers.
"""

import math
import time

import numpy as np
import pytest

from thzmec.beamforming import beam_gain, build_codebook, select_beam
from thzmec.ceemax import (
    CeeProblem,
    alternating_upper_bound,
    cee_value,
    design_and_finalize,
    solve_gain_given_power,
    solve_power_given_gain,
)
from thzmec.emin import TaskDemand, max_offload_bits, prop1_allocate
from thzmec.errors import InfeasibleError
from thzmec.harness.output import emit_outputs
from thzmec.harness.presets import ANTENNA_GRID, BETA_GRID, T_GRID, run_preset
from thzmec.harness.runner import check_scenario, pair_links, run_trials
from thzmec.harness.scenario import Scenario
from thzmec.topology import deploy_users, pair_users
from thzmec.validation import (
    grid_gain_oracle,
    grid_power_oracle,
    random_cee_problem,
    suite_cm,
    suite_fejer,
    suite_hungarian,
    suite_spot_values,
)

BASE = Scenario()  # 100 trials, users 4..20, 1 Gbit per user


def realizations(scenario):
    """(users, trial, link, demand, beam) for every pair of every realization."""
    codebook = build_codebook(scenario.n_beams, scenario.n_antennas)
    for users in scenario.users:
        k = users // 2
        demand = TaskDemand(scenario.bits_edge, scenario.bits_center, scenario.block_s, k)
        for t in range(scenario.trials):
            dep = deploy_users([scenario.seed, t], scenario.geometry, k)
            for link in pair_links(scenario, dep, pair_users(dep)):
                _, beam = select_beam(link.bs_channel, codebook)
                yield users, t, link, demand, beam


def totals(scenario):
    """users -> per-trial total energy list."""
    return {u: [m.total_energy for m in run_trials(scenario, u)] for u in scenario.users}


def count_holding(pred, *series):
    return {u: sum(pred(*vals) for vals in zip(*(s[u] for s in series))) for u in BASE.users}


def fmt_counts(counts):
    return " ".join(f"{u}u:{n}" for u, n in counts.items())


# 1 -------------------------------------------------------------------------
@pytest.fixture(scope="module")
def closed_form_runs():
    rows = []
    for users, t, link, demand, beam in realizations(BASE):
        t0 = time.perf_counter()
        a = prop1_allocate(link, demand, beam)
        rows.append((link, demand, beam, a, time.perf_counter() - t0))
    return rows


def test_ac1_edge_bits_equality(closed_form_runs, verdict):
    worst = 0.0
    for link, demand, beam, a, _ in closed_form_runs:
        g = beam_gain(link.bs_channel, beam)
        w, s2 = link.bandwidth, link.noise
        side = a.t_edge * w * math.log2(1 + a.p_edge * link.sidelink_power_gain / s2)
        relay = a.t_center * w * math.log2(1 + link.beta_edge * a.p_center * g / s2)
        worst = max(worst, abs(side / demand.bits_edge - 1), abs(relay / demand.bits_edge - 1))
    assert verdict(1, "edge_bits_equality", worst <= 1e-9, f"{len(closed_form_runs)} pairs, max rel residual {worst:.2e}")


def test_ac1_time_budget(closed_form_runs, verdict):
    worst = max(abs(a.t_edge + a.t_center - d.slot) / d.slot for _, d, _, a, _ in closed_form_runs)
    assert verdict(1, "time_budget", worst <= 1e-12, f"max rel residual {worst:.2e}")


def test_ac1_center_bits_slack(closed_form_runs, verdict):
    ratios = []
    for link, demand, beam, a, _ in closed_form_runs:
        rx = a.p_center * beam_gain(link.bs_channel, beam)
        sinr = link.beta_center * rx / (link.beta_edge * rx + link.noise)
        ratios.append(a.t_center * link.bandwidth * math.log2(1 + sinr) / demand.bits_center)
    lo, hi = min(ratios), max(ratios)
    ok = lo >= 1 - 1e-9 and hi < 1.01
    assert verdict(1, "center_bits_slack", ok, f"delivered/required in [{lo:.6f}, {hi:.6f}], need [1, 1.01)")


def test_ac1_runtime(closed_form_runs, verdict):
    dt = np.array([r[4] for r in closed_form_runs])
    ok = dt.mean() < 1e-3
    assert verdict(1, "runtime", ok, f"mean {dt.mean() * 1e6:.1f} us/pair, max {dt.max() * 1e6:.1f} us")


# 2 -------------------------------------------------------------------------
def test_ac2_oma_power_ratio(verdict):
    noma = {u: run_trials(BASE.replace(mode="full"), u) for u in BASE.users}
    oma = {u: run_trials(BASE.replace(mode="oma"), u) for u in BASE.users}
    ratios = [
        q.p_center_W / p.p_center_W
        for u in BASE.users
        for a, b in zip(noma[u], oma[u])
        for p, q in zip(a.pairs, b.pairs)
    ]
    lo, hi = min(ratios), max(ratios)
    ok = 7.6 <= lo and hi <= 8.1
    assert verdict(2, "oma_center_power_ratio", ok, f"{len(ratios)} pairs, ratio in [{lo:.5f}, {hi:.5f}]")


# 3 -------------------------------------------------------------------------
def test_ac3_full_partial_none(verdict):
    full, part, none = (totals(BASE.replace(mode=m)) for m in ("full", "partial", "none"))
    counts = count_holding(lambda f, p, n: f < p < n, full, part, none)
    ok = all(n == BASE.trials for n in counts.values())
    assert verdict(3, "full<partial<none", ok, fmt_counts(counts) + f" of {BASE.trials}")


def test_ac3_noma_below_oma(verdict):
    counts = count_holding(lambda a, b: a < b, totals(BASE), totals(BASE.replace(mode="oma")))
    ok = all(n == BASE.trials for n in counts.values())
    assert verdict(3, "noma<oma", ok, fmt_counts(counts) + f" of {BASE.trials}")


def test_ac3_nonincreasing_in_antennas(verdict):
    runs = [totals(BASE.replace(n_antennas=n)) for n in ANTENNA_GRID]
    counts = count_holding(lambda *e: all(b <= a for a, b in zip(e, e[1:])), *runs)
    ok = all(n == BASE.trials for n in counts.values())
    assert verdict(3, "nonincreasing_in_N", ok, fmt_counts(counts) + f" of {BASE.trials}")


def test_ac3_nonincreasing_in_beta(verdict):
    counts = {}
    for u in BASE.users:
        betas = []
        for b in BETA_GRID:
            try:
                check_scenario(BASE.replace(beta_edge=b, users=(u,)))
                betas.append(b)
            except InfeasibleError:
                pass
        runs = [[m.total_energy for m in run_trials(BASE.replace(beta_edge=b), u)] for b in betas]
        counts[u] = sum(all(b <= a for a, b in zip(e, e[1:])) for e in zip(*runs))
    ok = all(n == BASE.trials for n in counts.values())
    assert verdict(3, "nonincreasing_in_beta", ok, fmt_counts(counts) + f" of {BASE.trials}")


# 4 -------------------------------------------------------------------------
def test_ac4_capacity_anchor(verdict):
    cap = max_offload_bits(0.25, 2, 137e9, 0.3)
    ratios = {k: max_offload_bits(0.25, k, 137e9, 0.3) / max_offload_bits(0.25, k, 2e9, 0.3) for k in range(1, 11)}
    ok = abs(cap / 1e9 - 29.75) <= 0.01 and all(abs(r - 68.5) <= 1e-12 * 68.5 for r in ratios.values())
    spread = max(abs(r - 68.5) for r in ratios.values())
    assert verdict(4, "max_offload_bits", ok, f"{cap / 1e9:.5f} Gbit, THz/mmWave ratio 68.5 +- {spread:.1e}")


# 5 -------------------------------------------------------------------------
def test_ac5_window_ordering(verdict):
    f5, f6, f7 = (totals(BASE.replace(window=w)) for w in ("f5", "f6", "f7"))
    counts = count_holding(lambda a, b, c: c < a and c < b, f5, f6, f7)
    ok = all(n >= 95 for n in counts.values())
    assert verdict(5, "f7_below_f5_f6", ok, fmt_counts(counts) + f" of {BASE.trials}, need >= 95")


# 6 -------------------------------------------------------------------------
@pytest.fixture(scope="module")
def cee_instances():
    rng = np.random.default_rng(2024)
    out = []
    while len(out) < 50:
        p = random_cee_problem(rng)
        out.append((p, CeeProblem(p.link, p.demand.scaled(0.8), p.p_max), rng.uniform(0.5, 1.0)))
    return out


@pytest.mark.parametrize("variant", ["full", "partial"])
def test_ac6_power_step_vs_grid(cee_instances, variant, verdict):
    worst, worst_f, most_iters, n = 0.0, 0.0, 0, 0
    for full, part, frac in cee_instances:
        p = full if variant == "full" else part
        gain = frac * p.gain_cap
        try:
            sol = solve_power_given_gain(p, gain)
        except InfeasibleError:
            gain = p.gain_cap
            sol = solve_power_given_gain(p, gain)
        _, _, ref = grid_power_oracle(p, gain, points=400)
        worst = max(worst, abs(ref - sol.cee) / ref)
        worst_f = max(worst_f, abs(sol.trace[-1][1]))
        most_iters = max(most_iters, sol.iterations)
        n += 1
    ok = worst <= 1e-3 and worst_f < 1e-5 and most_iters <= 50
    assert verdict(6, f"power_step_{variant}", ok,
                   f"{n} instances, max rel gap {worst:.2e}, max |F| {worst_f:.1e}, max iters {most_iters}")


def test_ac6_gain_step_vs_grid(cee_instances, verdict):
    worst = 0.0
    for p, _, _ in cee_instances:
        sol = solve_power_given_gain(p, p.gain_cap)
        c = solve_gain_given_power(p, sol.p_edge, sol.p_center)
        got = cee_value(p, sol.p_edge, sol.p_center, c)
        _, ref = grid_gain_oracle(p, sol.p_edge, sol.p_center, points=1_000_000)
        worst = max(worst, abs(ref - got) / ref)
    assert verdict(6, "gain_step", worst <= 1e-9, f"50 instances vs 1e6-point grid, max rel gap {worst:.2e}")


def test_ac6_alternation_and_final(cee_instances, verdict):
    drops, above_ub, iters = 0, 0, []
    for p, _, _ in cee_instances:
        ub = alternating_upper_bound(p)
        h = ub.history
        drops += sum(b < a for a, b in zip(h, h[1:]))
        iters.append(ub.iterations)
        # both values come from separate Dinkelbach solves at gains equal to an ulp
        if design_and_finalize(p, ub).cee > ub.cee * (1 + 1e-9):
            above_ub += 1
    ok = drops == 0 and above_ub == 0
    assert verdict(6, "alternation_monotone_and_bounded", ok,
                   f"{drops} decreasing steps, {above_ub} finals above the bound, rounds <= {max(iters)}")


# 7 -------------------------------------------------------------------------
CEE_BASE = BASE.replace(objective="cee_max")


def pair_cee(scenario):
    """(users, trial, edge, center) -> CEE, or None when the pair is infeasible."""
    out = {}
    for u in scenario.users:
        for m in run_trials(scenario, u):
            for r in m.pairs:
                out[(u, m.trial, r.edge, r.center)] = None if r.infeasible else r.cee_bpJHz
    return out


def test_ac7_offload_ordering(verdict):
    full, part, none = (pair_cee(CEE_BASE.replace(mode=m)) for m in ("full", "partial", "none"))
    both = [k for k in full if full[k] is not None and part[k] is not None]
    held = sum(full[k] > part[k] > none[k] for k in both)
    ok = held == len(both) and len(both) > 0
    assert verdict(7, "full>partial>none", ok,
                   f"{held}/{len(both)} pairs feasible in both offload modes ({len(full)} pairs total)")


def _sweep_check(configs):
    runs = [pair_cee(s) for s in configs]
    compared, drops, lost = 0, 0, 0
    for a, b in zip(runs, runs[1:]):
        for k, v in a.items():
            if v is None:
                continue
            if b[k] is None:
                lost += 1
                continue
            compared += 1
            drops += b[k] < v
    return compared, drops, lost


def test_ac7_nondecreasing_in_block(verdict):
    compared, drops, lost = _sweep_check([CEE_BASE.replace(block_s=t) for t in T_GRID])
    ok = drops == 0 and lost == 0 and compared > 0
    assert verdict(7, "nondecreasing_in_T", ok,
                   f"{compared} consecutive comparisons, {drops} decreases, {lost} feasible->infeasible")


def test_ac7_nondecreasing_in_antennas(verdict):
    compared, drops, lost = _sweep_check([CEE_BASE.replace(n_antennas=n) for n in ANTENNA_GRID])
    ok = drops == 0 and lost == 0 and compared > 0
    assert verdict(7, "nondecreasing_in_N", ok,
                   f"{compared} consecutive comparisons, {drops} decreases, {lost} feasible->infeasible")


# 8 -------------------------------------------------------------------------
@pytest.mark.parametrize("suite", [suite_hungarian, suite_fejer, suite_cm], ids=["hungarian", "fejer", "cm"])
def test_ac8_oracle_suites(suite, verdict):
    res = suite(np.random.default_rng(8))
    assert verdict(8, res.name, res.passed, res.detail)


def test_ac8_spot_values(verdict):
    res = suite_spot_values()
    assert verdict(8, res.name, res.passed, res.detail)


# 9 -------------------------------------------------------------------------
@pytest.mark.parametrize("preset", ["fig4", "fig12"])
def test_ac9_byte_identical(preset, tmp_path, verdict):
    serial = emit_outputs(run_preset(preset, BASE, workers=1), tmp_path / "serial")
    again = emit_outputs(run_preset(preset, BASE, workers=1), tmp_path / "again")
    parallel = emit_outputs(run_preset(preset, BASE, workers=2), tmp_path / "parallel")
    same = all(a.read_bytes() == b.read_bytes() == c.read_bytes() for a, b, c in zip(serial, again, parallel))
    assert verdict(9, f"{preset}_csv_bytes", same, f"{len(serial)} files, serial x2 vs 2 workers")
