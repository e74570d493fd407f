"""Deterministic Monte-Carlo runner: deploy, pair, beam, allocate, accumulate."""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from thzmec import channel as ch
from thzmec.beamforming import beam_gain, build_codebook, select_beam
from thzmec.ceemax import CeeProblem, cee_no_offload, cee_partial, solve_cee
from thzmec.emin import (
    TaskDemand,
    baseline_no_offload,
    baseline_oma,
    baseline_partial,
    local_compute_energy,
    max_offload_bits,
    prop1_allocate,
)
from thzmec.errors import InfeasibleError
from thzmec.linkmodel import PairLink
from thzmec.topology import deploy_users, pair_users

WORKERS_ENV = "THZMEC_WORKERS"


@dataclass
class PairRecord:
    edge: int
    center: int
    sidelink_m: float
    center_radius_m: float
    energy_J: float = float("nan")
    cee_bpJHz: float = float("nan")
    p_edge_W: float = float("nan")
    p_center_W: float = float("nan")
    t_edge_s: float = float("nan")
    t_center_s: float = float("nan")
    gain: float = float("nan")
    iterations: int = 0
    infeasible: str = ""  # violated constraint name, empty when solved


@dataclass
class TrialMetrics:
    users: int
    trial: int
    total_energy: float
    total_cee: float
    max_bits_per_user: float
    pairs: list = field(default_factory=list)
    infeasible_pair_count: int = 0
    solver_iterations: int = 0

    @property
    def feasible(self):
        return self.infeasible_pair_count == 0


def pair_links(scenario, deployment, pairing):
    """One PairLink per (edge, center) assignment."""
    win, gains = scenario.thz_window, scenario.gains
    noise = scenario.noise_w
    links = []
    for (e, c), d in zip(pairing.assignments, pairing.sidelink_distances):
        r, theta = deployment.center_users[c]
        h = ch.bs_channel_vector(win, gains, r, theta, scenario.n_antennas)
        links.append(PairLink(h, ch.sidelink_gain(win, gains, d), scenario.beta_edge, win.bandwidth, noise))
    return links


def _energy_pair(scenario, link, demand, codebook, rec):
    profile = scenario.profile
    mode = scenario.mode
    if mode == "none":
        t_loc = demand.block if scenario.no_offload_time == "block" else demand.slot
        rec.energy_J = baseline_no_offload(demand, profile, t_loc)
        return
    _, beam = select_beam(link.bs_channel, codebook)
    rec.gain = beam_gain(link.bs_channel, beam)
    if mode in ("full", "mmwave"):
        a = prop1_allocate(link, demand, beam)
        rec.energy_J = a.energy
        rec.p_edge_W, rec.p_center_W, rec.t_edge_s, rec.t_center_s = a.p_edge, a.p_center, a.t_edge, a.t_center
    elif mode == "partial":
        t_loc = demand.slot if scenario.partial_local_time == "slot" else demand.block
        rec.energy_J = baseline_partial(link, demand, beam, profile, scenario.offload_fraction, t_loc)
    else:  # oma
        a, energy = baseline_oma(link, demand, beam)
        rec.energy_J = energy
        rec.p_edge_W, rec.p_center_W = a.p_edge, a.p_center
        rec.t_edge_s, rec.t_center_s = a.t_edge, a.t_phase2 + a.t_phase3


def _cee_pair(scenario, link, demand, rec):
    profile, mode = scenario.profile, scenario.mode
    if mode == "none":
        t_loc = demand.block if scenario.no_offload_time == "block" else demand.slot
        rec.cee_bpJHz = cee_no_offload(demand, profile, link.bandwidth, t_loc)
        rec.energy_J = baseline_no_offload(demand, profile, t_loc)
        return
    problem = CeeProblem(link, demand, scenario.p_max_w)
    if mode == "partial":
        t_loc = demand.slot if scenario.partial_local_time == "slot" else demand.block
        rec.cee_bpJHz, sol = cee_partial(problem, profile, scenario.offload_fraction, t_loc, scenario.solver)
        keep = 1.0 - scenario.offload_fraction
        rec.energy_J = sol.energy + local_compute_energy(profile, keep * demand.bits_edge, t_loc) \
            + local_compute_energy(profile, keep * demand.bits_center, t_loc)
    else:
        sol = solve_cee(problem, scenario.solver)
        rec.cee_bpJHz, rec.energy_J = sol.cee, sol.energy
    rec.p_edge_W, rec.p_center_W, rec.gain = sol.p_edge, sol.p_center, sol.gain
    rec.t_edge_s = rec.t_center_s = problem.phase_time
    rec.iterations = sol.upper_bound.iterations


def run_trial(scenario, trial_index, users=None):
    """Metrics for one user-location realization.

    The deployment depends only on ``(scenario.seed, trial_index)`` so every
    scenario variant sees the same users for a given trial.
    """
    users = scenario.users[0] if users is None else users
    k = users // 2
    deployment = deploy_users([scenario.seed, trial_index], scenario.geometry, k)
    pairing = pair_users(deployment)
    links = pair_links(scenario, deployment, pairing)
    demand = TaskDemand(scenario.bits_edge, scenario.bits_center, scenario.block_s, k)
    codebook = build_codebook(scenario.n_beams, scenario.n_antennas)

    records = []
    for (e, c), d, link in zip(pairing.assignments, pairing.sidelink_distances, links):
        rec = PairRecord(e, c, float(d), float(deployment.center_users[c, 0]))
        try:
            if scenario.objective == "energy_min":
                _energy_pair(scenario, link, demand, codebook, rec)
            else:
                _cee_pair(scenario, link, demand, rec)
        except InfeasibleError as exc:
            rec.infeasible = exc.constraint or "infeasible"
        records.append(rec)

    solved = [r for r in records if not r.infeasible]
    return TrialMetrics(
        users=users,
        trial=trial_index,
        total_energy=float(sum(r.energy_J for r in solved)),
        total_cee=float(sum(r.cee_bpJHz for r in solved)),
        max_bits_per_user=max_offload_bits(scenario.block_s, k, scenario.thz_window.bandwidth, scenario.beta_edge),
        pairs=records,
        infeasible_pair_count=len(records) - len(solved),
        solver_iterations=sum(r.iterations for r in records),
    )


def _job(args):
    scenario, users, trial = args
    return run_trial(scenario, trial, users)


def worker_count(requested=None):
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(WORKERS_ENV, "").strip()
    return max(1, int(env)) if env else 1


def run_trials(scenario, users=None, workers=None):
    """All trials for one user count, in trial order."""
    users = scenario.users[0] if users is None else users
    return _map(scenario, [(users, t) for t in range(scenario.trials)], workers)


def _map(scenario, points, workers):
    jobs = [(scenario, u, t) for u, t in points]
    n = worker_count(workers)
    if n == 1 or len(jobs) < 2:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        # map preserves submission order, so aggregation sees the serial order
        return list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * n))))


AGG_COLUMNS = (
    "users",
    "energy_J",
    "std_energy_J",
    "cee_bpJHz",
    "std_cee_bpJHz",
    "cee_solved_bpJHz",
    "max_bits_per_user_bits",
    "infeasible_rate",
    "trials_used",
)


def aggregate(metrics):
    """Mean/std over fully solved trials; infeasible_rate is the pair fraction that failed.

    ``cee_solved_bpJHz`` averages every trial's CEE summed over its solved
    pairs, so an infeasible pair contributes zero instead of dropping the trial.
    """
    ok = [m for m in metrics if m.feasible]
    pairs = sum(len(m.pairs) for m in metrics)
    bad = sum(m.infeasible_pair_count for m in metrics)
    e = np.array([m.total_energy for m in ok])
    c = np.array([m.total_cee for m in ok])
    nan = float("nan")
    return {
        "energy_J": float(e.mean()) if ok else nan,
        "std_energy_J": float(e.std()) if ok else nan,
        "cee_bpJHz": float(c.mean()) if ok else nan,
        "std_cee_bpJHz": float(c.std()) if ok else nan,
        "cee_solved_bpJHz": float(np.mean([m.total_cee for m in metrics])) if metrics else nan,
        "max_bits_per_user_bits": metrics[0].max_bits_per_user if metrics else nan,
        "infeasible_rate": bad / pairs if pairs else nan,
        "trials_used": len(ok),
    }


def monte_carlo(scenario, workers=None, metrics_out=None):
    """Aggregated table: one row per user count in the sweep.

    Returns ``(columns, rows)``. When ``metrics_out`` is a dict, the raw
    per-trial metrics are stored there keyed by user count.
    """
    points = [(u, t) for u in scenario.users for t in range(scenario.trials)]
    results = _map(scenario, points, workers)
    rows = []
    for i, u in enumerate(scenario.users):
        chunk = results[i * scenario.trials:(i + 1) * scenario.trials]
        if metrics_out is not None:
            metrics_out[u] = chunk
        agg = aggregate(chunk)
        rows.append((u,) + tuple(agg[c] for c in AGG_COLUMNS[1:]))
    return list(AGG_COLUMNS), rows


def check_scenario(scenario):
    """Raise ``InfeasibleError`` when no deployment can meet the demand.

    Catches demands that fail for every pair regardless of user positions;
    position-dependent failures are only counted per pair.
    """
    fraction = scenario.offload_fraction if scenario.mode == "partial" else 1.0
    if scenario.mode == "none":
        return
    w = scenario.thz_window.bandwidth
    for users in scenario.users:
        k = users // 2
        if scenario.objective == "energy_min":
            cap = max_offload_bits(scenario.block_s, k, w, scenario.beta_edge)
            if fraction * scenario.bits_center >= cap:
                raise InfeasibleError(
                    f"{users} users: {fraction * scenario.bits_center:.6g} bits per center user exceed the "
                    f"{cap:.6g}-bit per-slot limit",
                    constraint="time_budget",
                    deficit=fraction * scenario.bits_center - cap,
                )
        else:
            t = scenario.block_s / k / 2.0
            margin = 1.0 - scenario.beta_edge * 2.0 ** (fraction * scenario.bits_center / (t * w))
            if margin <= 0:
                raise InfeasibleError(
                    f"{users} users: center demand unreachable in a {t:.6g} s phase at any power",
                    constraint="center_bits",
                    deficit=-margin,
                )
