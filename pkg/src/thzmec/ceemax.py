"""Computation-energy-efficiency (CEE) maximization for one NOMA pair.

CEE is offloaded bits per joule per hertz: rates are normalized by the
bandwidth (bits/s/Hz) while energies stay in joules. The slot is split equally
between the side-link phase and the BS phase.

Pipeline: alternate between the power step (a 2-D fractional program solved
with Dinkelbach) and the beam-gain step under ideal beamforming; this gives an
upper bound. Then realize a constant-modulus beam and re-solve the powers.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from thzmec.beamforming import beam_gain, cm_beamformer
from thzmec.emin import local_compute_energy, snr_needed
from thzmec.errors import DomainError, InfeasibleError
from thzmec.optim import FractionalProgram, concave_max_box, dinkelbach, golden_section_max

LN2 = math.log(2.0)


@dataclass(frozen=True)
class SolverSettings:
    dinkelbach_lambda0: float = 0.01
    dinkelbach_eps: float = 1e-5
    max_iters: int = 50
    alternating_tol: float = 1e-6
    golden_tol: float = 1e-10


DEFAULT_SETTINGS = SolverSettings()


@dataclass(frozen=True)
class CeeProblem:
    link: object  # PairLink
    demand: object  # TaskDemand
    p_max: float

    def __post_init__(self):
        if not self.p_max > 0:
            raise DomainError("p_max must be > 0")
        if self.own_margin <= 0:
            raise InfeasibleError(
                "center demand unreachable in half the slot at any power "
                f"(1 - beta_e 2^(L_i/(tW)) = {self.own_margin:.6g})",
                constraint="center_bits",
                deficit=-self.own_margin,
            )

    @property
    def n_antennas(self):
        return self.link.bs_channel.size

    @property
    def phase_time(self):
        """Equal split: each phase gets T/(2K)."""
        return self.demand.slot / 2.0

    def _snr_target(self, bits):
        return snr_needed(bits, self.link.bandwidth, self.phase_time)

    @property
    def own_margin(self):
        return 1.0 - self.link.beta_edge * (1.0 + self._snr_target(self.demand.bits_center))

    @property
    def edge_power_floor(self):
        """Smallest p_edge delivering L_j over the side link."""
        return self._snr_target(self.demand.bits_edge) * self.link.noise / self.link.sidelink_power_gain

    @property
    def relay_floor(self):
        """Lower bound on p_center * c from relaying L_j to the BS."""
        return self._snr_target(self.demand.bits_edge) * self.link.noise / self.link.beta_edge

    @property
    def own_floor(self):
        """Lower bound on p_center * c from the center user's own L_i."""
        return self._snr_target(self.demand.bits_center) * self.link.noise / self.own_margin

    @property
    def gain_cap(self):
        """Ideal-beamforming beam gain N |lambda|^2 (= ||h||^2 for LoS channels)."""
        return self.link.ideal_gain


@dataclass
class PowerSolution:
    p_edge: float
    p_center: float
    cee: float
    iterations: int
    trace: list = field(default_factory=list)


@dataclass
class UpperBound:
    p_edge: float
    p_center: float
    gain: float
    cee: float
    iterations: int
    history: list = field(default_factory=list)  # CEE after each round


@dataclass
class CeeSolution:
    p_edge: float
    p_center: float
    gain: float
    beam: np.ndarray
    cee: float
    upper_bound: UpperBound = None
    numerator: float = 0.0  # offloaded bits / W achieved
    energy: float = 0.0  # J


def _numerator(problem, p_edge, p_center, gain):
    link, t = problem.link, problem.phase_time
    s2 = link.noise
    rx = p_center * gain
    own = math.log2(1.0 + link.beta_center * rx / (link.beta_edge * rx + s2))
    side = math.log2(1.0 + p_edge * link.sidelink_power_gain / s2)
    relay = math.log2(1.0 + link.beta_edge * rx / s2)
    return t * own + min(t * side, t * relay)


def _denominator(problem, p_edge, p_center):
    return problem.phase_time * (p_edge + p_center)


def cee_value(problem, p_edge, p_center, gain):
    """Offloaded bits/Hz over transmit energy for the given powers and beam gain."""
    if p_edge < 0 or p_center < 0:
        raise DomainError("powers must be >= 0")
    den = _denominator(problem, p_edge, p_center)
    if not den > 0:
        raise DomainError("zero transmit energy: CEE undefined")
    return _numerator(problem, p_edge, p_center, gain) / den


def initial_beam_gain(problem):
    """Sum-rate motivated starting gain (2^(L_j/(tW)) - 1) sigma^2 / p_max."""
    return problem._snr_target(problem.demand.bits_edge) * problem.link.noise / problem.p_max


def power_floors(problem, gain):
    """(p_edge, p_center) lower bounds implied by the three bit constraints."""
    return problem.edge_power_floor, max(problem.relay_floor, problem.own_floor) / gain


def _check_power_box(problem, gain):
    pe_lo, pc_lo = power_floors(problem, gain)
    # a gain sized exactly for p_max can put the floor an ulp above it
    slack = problem.p_max * (1.0 + 1e-9)
    if pc_lo <= slack:
        pc_lo = min(pc_lo, problem.p_max)
    if pe_lo <= slack:
        pe_lo = min(pe_lo, problem.p_max)
    if pe_lo > problem.p_max:
        raise InfeasibleError(
            f"side-link threshold needs p_edge >= {pe_lo:.6g} W > p_max {problem.p_max:.6g} W",
            constraint="sidelink_bits",
            deficit=pe_lo - problem.p_max,
        )
    if pc_lo > problem.p_max:
        name = "relay_bits" if problem.relay_floor >= problem.own_floor else "center_bits"
        raise InfeasibleError(
            f"{name} threshold needs p_center >= {pc_lo:.6g} W > p_max {problem.p_max:.6g} W",
            constraint=name,
            deficit=pc_lo - problem.p_max,
        )
    return pe_lo, pc_lo


def solve_power_given_gain(problem, gain, settings=DEFAULT_SETTINGS):
    """Powers maximizing CEE at a fixed beam gain (Dinkelbach outer loop)."""
    pe_lo, pc_lo = _check_power_box(problem, gain)
    p_max = problem.p_max
    link = problem.link
    s = link.sidelink_power_gain / link.noise
    g = gain / link.noise

    def numerator(x):
        return _numerator(problem, x[0], x[1], gain)

    def denominator(x):
        return _denominator(problem, x[0], x[1])

    def maximize(lam):
        def f(pe, pc):
            return _numerator(problem, pe, pc, gain) - lam * _denominator(problem, pe, pc)

        def best_edge(pc):
            # side-link term is useless past the kink where it meets the relay term
            kink = link.beta_edge * pc * g / s
            stat = 1.0 / (lam * LN2) - 1.0 / s if lam > 0 else math.inf
            return min(max(min(stat, kink), pe_lo), p_max)

        return concave_max_box(f, (pe_lo, pc_lo), (p_max, p_max), settings.golden_tol, inner_argmax=best_edge)

    res = dinkelbach(
        FractionalProgram(numerator, denominator, maximize),
        lambda0=settings.dinkelbach_lambda0,
        eps=settings.dinkelbach_eps,
        max_iters=settings.max_iters,
    )
    pe, pc = res.x
    return PowerSolution(pe, pc, res.ratio, res.iterations, res.trace)


def gain_floor(problem, p_center):
    """Smallest beam gain meeting both BS-side thresholds at ``p_center``."""
    return max(problem.relay_floor, problem.own_floor) / p_center


def solve_gain_given_power(problem, p_edge, p_center, settings=DEFAULT_SETTINGS):
    """Beam gain maximizing CEE at fixed powers, capped by ideal beamforming."""
    lo, cap = gain_floor(problem, p_center), problem.gain_cap
    if lo > cap * (1.0 + 1e-9):
        raise InfeasibleError(
            f"required beam gain {lo:.6g} exceeds ideal beamforming gain {cap:.6g}",
            constraint="beam_gain",
            deficit=lo - cap,
        )
    lo = min(lo, cap)
    return golden_section_max(lambda c: cee_value(problem, p_edge, p_center, c), lo, cap, settings.golden_tol)


def alternating_upper_bound(problem, settings=DEFAULT_SETTINGS):
    """Alternate power and beam-gain steps under ideal beamforming.

    Ignores the constant-modulus constraint, so the returned CEE bounds what
    any realizable analog beam achieves.
    """
    cap = problem.gain_cap
    lo = max(problem.relay_floor, problem.own_floor) / problem.p_max
    if lo > cap * (1.0 + 1e-9):
        raise InfeasibleError(
            f"BS-side thresholds need beam gain {lo:.6g} at p_max, above ideal gain {cap:.6g}",
            constraint="beam_gain",
            deficit=lo - cap,
        )
    # the starting value sits below the feasible range whenever beta_e < 1
    gain = min(max(initial_beam_gain(problem), lo), cap)
    history = []
    for it in range(1, settings.max_iters + 1):
        power = solve_power_given_gain(problem, gain, settings)
        gain = solve_gain_given_power(problem, power.p_edge, power.p_center, settings)
        eta = cee_value(problem, power.p_edge, power.p_center, gain)
        history.append(eta)
        if it > 1 and abs(history[-1] - history[-2]) <= settings.alternating_tol * abs(eta):
            break
    return UpperBound(power.p_edge, power.p_center, gain, eta, it, history)


def design_and_finalize(problem, upper_bound, settings=DEFAULT_SETTINGS):
    """Constant-modulus beam for the upper-bound powers, then re-solved powers."""
    pc_bar = upper_bound.p_center
    floors = (problem.relay_floor / pc_bar, problem.own_floor / pc_bar)
    w = cm_beamformer(problem.link.bs_channel, floors)
    gain = beam_gain(problem.link.bs_channel, w)
    power = solve_power_given_gain(problem, gain, settings)
    return CeeSolution(
        p_edge=power.p_edge,
        p_center=power.p_center,
        gain=gain,
        beam=w,
        cee=power.cee,
        upper_bound=upper_bound,
        numerator=_numerator(problem, power.p_edge, power.p_center, gain),
        energy=_denominator(problem, power.p_edge, power.p_center),
    )


def solve_cee(problem, settings=DEFAULT_SETTINGS):
    """Full per-pair pipeline: upper bound, then CM beam design and power polish."""
    return design_and_finalize(problem, alternating_upper_bound(problem, settings), settings)


def cee_partial(problem, profile, offload_fraction=0.8, local_time=None, settings=DEFAULT_SETTINGS):
    """Pair CEE when only ``offload_fraction`` of each task is offloaded.

    Locally processed bits count in the numerator (normalized by W) and their
    CPU energy in the denominator. Returns ``(cee, offload_solution)``.
    """
    if not 0.0 < offload_fraction < 1.0:
        raise DomainError(f"offload_fraction must lie in (0, 1), got {offload_fraction}")
    demand = problem.demand
    sub = CeeProblem(problem.link, demand.scaled(offload_fraction), problem.p_max)
    sol = solve_cee(sub, settings)
    keep = 1.0 - offload_fraction
    t_loc = demand.slot if local_time is None else local_time
    local_bits = keep * (demand.bits_edge + demand.bits_center)
    local_energy = local_compute_energy(profile, keep * demand.bits_edge, t_loc) + local_compute_energy(
        profile, keep * demand.bits_center, t_loc
    )
    cee = (sol.numerator + local_bits / problem.link.bandwidth) / (sol.energy + local_energy)
    return cee, sol


def cee_no_offload(demand, profile, bandwidth, local_time=None):
    """Pair CEE with both tasks computed locally over ``local_time`` (default T)."""
    t_loc = demand.block if local_time is None else local_time
    energy = local_compute_energy(profile, demand.bits_edge, t_loc) + local_compute_energy(
        profile, demand.bits_center, t_loc
    )
    if not energy > 0:
        raise DomainError("zero local energy: CEE undefined")
    return (demand.bits_edge + demand.bits_center) / bandwidth / energy
