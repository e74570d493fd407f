"""Brute-force oracle suites, shared by ``thzmec validate`` and the test suite.

Every oracle here recomputes its answer by exhaustive search or an
independent formula rather than calling the routine it checks.
"""

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from thzmec import channel as ch
from thzmec.beamforming import beam_gain, cm_beamformer, cosine_similarity, fejer_kernel
from thzmec.ceemax import CeeProblem, cee_value, gain_floor, solve_gain_given_power, solve_power_given_gain
from thzmec.emin import TaskDemand, prop1_allocate
from thzmec.errors import InfeasibleError
from thzmec.linkmodel import PairLink, offload_outcome
from thzmec.optim import hungarian

# Independently computed (50-digit arithmetic) reference values.
PATH_LOSS_SPOTS = (  # (window, distance m, linear path loss)
    ("mmwave", 1.0, 1.37560e6),
    ("mmwave", 2.0, 5.50241e6),
    ("f3", 1.0, 2.71539e10),
    ("f3", 2.0, 1.43712e11),
)
NOISE_SPOTS = (  # (bandwidth Hz, noise W)
    (137e9, 5.45407e-9),
    (2e9, 7.96214e-11),
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


def sig_equal(a, b, digits=6):
    return float(f"{a:.{digits - 1}e}") == float(f"{b:.{digits - 1}e}")


def brute_assignment_cost(cost):
    n = len(cost)
    return min(sum(cost[r][p[r]] for r in range(n)) for p in itertools.permutations(range(n)))


def cm_phase_grid_gain(h, points=64):
    """Best |h^H w|^2 over CM beams whose phases sit on a uniform grid (first phase fixed)."""
    h = np.asarray(h, dtype=complex)
    n = h.size
    grid = np.exp(1j * 2 * np.pi * np.arange(points) / points)
    # sum_n conj(h_n) w_n with w_0 fixed to 1/sqrt(N)
    partial = np.array([np.conj(h[0])])
    for k in range(1, n):
        partial = (partial[:, None] + np.conj(h[k]) * grid[None, :]).ravel()
    return float(np.max(np.abs(partial)) ** 2 / n)


def _eta_grid(problem, pe, pc, gain):
    """Vectorized CEE from first principles (rates per Hz over transmit energy)."""
    link, t = problem.link, problem.phase_time
    s2 = link.noise
    rx = pc * gain
    own = np.log2(1 + (1 - link.beta_edge) * rx / (link.beta_edge * rx + s2))
    side = np.log2(1 + pe * link.sidelink**2 / s2)
    relay = np.log2(1 + link.beta_edge * rx / s2)
    return t * (own + np.minimum(side, relay)) / (t * (pe + pc))


def grid_power_oracle(problem, gain, points=400):
    """Grid search plus bounded Nelder-Mead polish of the power step."""
    link, t = problem.link, problem.phase_time
    s2, p_max = link.noise, problem.p_max
    tgt_j = 2 ** (problem.demand.bits_edge / (t * link.bandwidth)) - 1
    tgt_i = 2 ** (problem.demand.bits_center / (t * link.bandwidth))
    pe_lo = tgt_j * s2 / link.sidelink**2
    margin = 1 - link.beta_edge * tgt_i
    pc_lo = max(tgt_j * s2 / link.beta_edge, (tgt_i - 1) * s2 / margin) / gain
    pe_lo, pc_lo = min(pe_lo, p_max), min(pc_lo, p_max)
    # log spacing resolves optima that hug the lower bounds
    ge = np.unique(np.concatenate([np.geomspace(pe_lo, p_max, points // 2), np.linspace(pe_lo, p_max, points // 2)]))
    gc = np.unique(np.concatenate([np.geomspace(pc_lo, p_max, points // 2), np.linspace(pc_lo, p_max, points // 2)]))
    pe, pc = np.meshgrid(ge, gc, indexing="ij")
    eta = _eta_grid(problem, pe, pc, gain)
    i, j = np.unravel_index(np.argmax(eta), eta.shape)
    x0 = np.array([ge[i], gc[j]])
    scale = x0.copy()

    def neg(z):
        x = np.clip(z * scale, [pe_lo, pc_lo], [p_max, p_max])
        return -float(_eta_grid(problem, x[0], x[1], gain))

    res = minimize(neg, np.ones(2), method="Nelder-Mead",
                   bounds=[(pe_lo / scale[0], p_max / scale[0]), (pc_lo / scale[1], p_max / scale[1])],
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    best = max(-res.fun, float(eta[i, j]))
    x = np.clip(res.x * scale, [pe_lo, pc_lo], [p_max, p_max]) if -res.fun >= eta[i, j] else x0
    return float(x[0]), float(x[1]), best


def grid_gain_oracle(problem, p_edge, p_center, points=1_000_000):
    lo = min(gain_floor(problem, p_center), problem.gain_cap)
    grid = np.linspace(lo, problem.gain_cap, points)
    eta = _eta_grid(problem, p_edge, p_center, grid)
    k = int(np.argmax(eta))
    return float(grid[k]), float(eta[k])


def random_cee_problem(rng, p_max=None):
    """A feasible single-pair CEE instance at default radio settings."""
    win = ch.get_window(ch.DEFAULT_WINDOW)
    gains = ch.AntennaGains.from_dbi(3, 3, 26)
    noise = ch.noise_power(win.bandwidth)
    p_max = ch.db_to_linear(9.0) if p_max is None else p_max
    while True:
        n = int(rng.choice([2, 4, 8, 16]))
        h = ch.bs_channel_vector(win, gains, rng.uniform(0.5, 3.0), rng.uniform(-math.pi / 6, math.pi / 2), n)
        side = ch.sidelink_gain(win, gains, rng.uniform(0.2, 1.5))
        link = PairLink(h, side, float(rng.choice([0.1, 0.2, 0.3, 0.4])), win.bandwidth, noise)
        bits = rng.uniform(0.05, 1.0) * 1e9
        demand = TaskDemand(bits, bits * rng.uniform(0.5, 1.5), 0.25, int(rng.integers(1, 6)))
        try:
            problem = CeeProblem(link, demand, p_max)
            solve_power_given_gain(problem, problem.gain_cap)
        except InfeasibleError:
            continue
        return problem


def random_link(rng, window=ch.DEFAULT_WINDOW, n_antennas=4, beta_edge=0.3):
    win = ch.get_window(window)
    gains = ch.AntennaGains.from_dbi(3, 3, 26)
    h = ch.bs_channel_vector(win, gains, rng.uniform(0.5, 3.0), rng.uniform(-math.pi / 6, math.pi / 2), n_antennas)
    side = ch.sidelink_gain(win, gains, rng.uniform(0.2, 5.0))
    return PairLink(h, side, beta_edge, win.bandwidth, ch.noise_power(win.bandwidth))


# suites ---------------------------------------------------------------------
def suite_hungarian(rng, instances=100):
    worst = 0.0
    for _ in range(instances):
        k = int(rng.integers(1, 7))
        cost = rng.uniform(0, 10, (k, k))
        _, value = hungarian(cost)
        worst = max(worst, abs(value - brute_assignment_cost(cost)))
    return SuiteResult("hungarian_vs_bruteforce", worst <= 1e-9, f"{instances} instances, max |diff| {worst:.3g}")


def suite_fejer(rng, instances=200):
    worst = 0.0
    for _ in range(instances):
        n = int(rng.integers(1, 33))
        a, b = rng.uniform(-math.pi / 2, math.pi / 2, 2)
        sim = cosine_similarity(ch.steering_vector(a, n), ch.steering_vector(b, n))
        ref = fejer_kernel(math.pi * (math.sin(a) - math.sin(b)), n)
        worst = max(worst, abs(sim - ref))
    return SuiteResult("cosine_vs_fejer", worst <= 1e-10, f"max |diff| {worst:.3g}")


def suite_cm(rng, instances=30):
    worst = 0.0
    for _ in range(instances):
        n = int(rng.integers(2, 5))
        h = rng.normal(size=n) + 1j * rng.normal(size=n)
        got = beam_gain(h, cm_beamformer(h))
        ref = cm_phase_grid_gain(h, 64)
        worst = max(worst, abs(ref - got) / ref)
    return SuiteResult("cm_vs_phase_grid", worst <= 1e-3, f"max relative gap {worst:.3g}")


def suite_spot_values():
    bad = []
    for name, d, ref in PATH_LOSS_SPOTS:
        if not sig_equal(ch.path_loss(ch.get_window(name), d), ref):
            bad.append(f"PL({name},{d})")
    for w, ref in NOISE_SPOTS:
        if not sig_equal(ch.noise_power(w), ref):
            bad.append(f"noise({w:g})")
    return SuiteResult("channel_spot_values", not bad, "ok" if not bad else "mismatch: " + ", ".join(bad))


def suite_closed_form(rng, instances=100):
    worst, slowest = 0.0, 0.0
    for _ in range(instances):
        link = random_link(rng)
        demand = TaskDemand(1e9, 1e9, 0.25, int(rng.integers(2, 11)))
        beam = cm_beamformer(link.bs_channel)
        t0 = time.perf_counter()
        a = prop1_allocate(link, demand, beam)
        slowest = max(slowest, time.perf_counter() - t0)
        g = beam_gain(link.bs_channel, beam)
        side = a.t_edge * link.bandwidth * math.log2(1 + a.p_edge * link.sidelink**2 / link.noise)
        relay = a.t_center * link.bandwidth * math.log2(1 + link.beta_edge * a.p_center * g / link.noise)
        worst = max(worst, abs(side / demand.bits_edge - 1), abs(relay / demand.bits_edge - 1),
                    abs(a.t_edge + a.t_center - demand.slot) / demand.slot)
        offload_outcome(link, a)
    return SuiteResult("closed_form_edge_constraints", worst <= 1e-9,
                       f"max rel residual {worst:.3g}, slowest {slowest * 1e3:.3f} ms")


def suite_cee_power(rng, instances=10):
    worst = 0.0
    for _ in range(instances):
        p = random_cee_problem(rng)
        gain = p.gain_cap * rng.uniform(0.5, 1.0)
        try:
            sol = solve_power_given_gain(p, gain)
        except InfeasibleError:
            continue
        _, _, ref = grid_power_oracle(p, gain)
        worst = max(worst, abs(ref - sol.cee) / ref)
    return SuiteResult("cee_power_vs_grid", bool(worst <= 1e-3), f"max relative gap {worst:.3g}")


def suite_cee_gain(rng, instances=5):
    worst = 0.0
    for _ in range(instances):
        p = random_cee_problem(rng)
        sol = solve_power_given_gain(p, p.gain_cap)
        c = solve_gain_given_power(p, sol.p_edge, sol.p_center)
        got = cee_value(p, sol.p_edge, sol.p_center, c)
        _, ref = grid_gain_oracle(p, sol.p_edge, sol.p_center)
        worst = max(worst, abs(ref - got) / ref)
    return SuiteResult("cee_gain_vs_grid", worst <= 1e-9, f"max relative gap {worst:.3g}")


def run_all(seed=7):
    rng = np.random.default_rng(seed)
    return [
        suite_spot_values(),
        suite_hungarian(rng),
        suite_fejer(rng),
        suite_cm(rng),
        suite_closed_form(rng),
        suite_cee_power(rng),
        suite_cee_gain(rng),
    ]
