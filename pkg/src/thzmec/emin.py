"""Energy-minimal time/power allocation for one NOMA pair, plus baselines.

The center-user time follows from the high-SNR limit of its NOMA rate,
``W log2(1 + beta_c/beta_e)``; the other three variables then follow from the
remaining constraints at equality. That limit is approached but never reached
at finite power, so the center user's offloaded bits fall short of ``L_i`` by
an amount :func:`verify_kkt` reports.
"""

import math
from dataclasses import dataclass

import numpy as np

from thzmec.beamforming import beam_gain
from thzmec.errors import DomainError, InfeasibleError
from thzmec.linkmodel import Allocation, offload_outcome


@dataclass(frozen=True)
class ComputeProfile:
    cycles_per_bit: float = 1.0
    capacitance_coeff: float = 1e-27

    def __post_init__(self):
        if not (self.cycles_per_bit > 0 and self.capacitance_coeff > 0):
            raise DomainError("cycles_per_bit and capacitance_coeff must be > 0")


@dataclass(frozen=True)
class TaskDemand:
    bits_edge: float
    bits_center: float
    block: float = 0.25
    pair_count: int = 1

    def __post_init__(self):
        if self.bits_edge < 0 or self.bits_center < 0:
            raise DomainError("task sizes must be >= 0")
        if not self.block > 0:
            raise DomainError("block duration must be > 0")
        if self.pair_count < 1:
            raise DomainError("pair_count must be >= 1")

    @property
    def slot(self):
        """Per-pair time budget T/K."""
        return self.block / self.pair_count

    def scaled(self, fraction):
        return TaskDemand(self.bits_edge * fraction, self.bits_center * fraction, self.block, self.pair_count)


@dataclass(frozen=True)
class OmaAllocation:
    t_edge: float
    t_phase2: float
    t_phase3: float
    p_edge: float
    p_center: float

    @property
    def energy(self):
        return self.t_edge * self.p_edge + (self.t_phase2 + self.t_phase3) * self.p_center


def snr_needed(bits, bandwidth, t):
    """2^(bits/(W t)) - 1: the SNR that carries ``bits`` in ``t`` seconds (inf on overflow)."""
    x = bits / (bandwidth * t) * math.log(2.0)
    return math.expm1(x) if x < 709.0 else math.inf


def noma_spectral_limit(beta_edge):
    """log2(1 + beta_c/beta_e): the center user's rate per Hz as power -> infinity."""
    return math.log2(1.0 + (1.0 - beta_edge) / beta_edge)


def max_offload_bits(block, pair_count, bandwidth, beta_edge):
    """Largest per-user demand for which the closed-form allocation exists."""
    return block / pair_count * bandwidth * noma_spectral_limit(beta_edge)


def _center_time(link, demand):
    t_center = demand.bits_center / (link.bandwidth * noma_spectral_limit(link.beta_edge))
    if t_center >= demand.slot:
        raise InfeasibleError(
            f"demand exceeds per-pair time budget: center phase needs {t_center:.6g} s "
            f"of a {demand.slot:.6g} s slot",
            constraint="time_budget",
            deficit=t_center - demand.slot,
        )
    return t_center


def prop1_allocate(link, demand, beam):
    """Closed-form energy-minimal allocation for one pair with a fixed beam."""
    t_center = _center_time(link, demand)
    t_edge = demand.slot - t_center
    w, s2 = link.bandwidth, link.noise
    gain = beam_gain(link.bs_channel, beam)
    p_edge = s2 * snr_needed(demand.bits_edge, w, t_edge) / link.sidelink_power_gain
    p_center = s2 * snr_needed(demand.bits_edge, w, t_center) / (link.beta_edge * gain)
    return Allocation(t_edge, t_center, p_edge, p_center, np.asarray(beam))


def min_feasible_powers(link, demand, gain, t_edge, t_center):
    """Smallest powers meeting all three bit constraints exactly at given times.

    Unlike the closed form, the center user's own NOMA constraint is enforced
    without the high-SNR approximation. Raises ``InfeasibleError`` when the
    center message cannot be delivered in ``t_center`` at any power.
    """
    w, s2 = link.bandwidth, link.noise
    p_edge = s2 * snr_needed(demand.bits_edge, w, t_edge) / link.sidelink_power_gain
    p_relay = s2 * snr_needed(demand.bits_edge, w, t_center) / (link.beta_edge * gain)
    q = 1.0 + snr_needed(demand.bits_center, w, t_center)
    margin = 1.0 - link.beta_edge * q
    if margin <= 0:
        raise InfeasibleError(
            "center demand unreachable at any power in the given time",
            constraint="center_bits",
            deficit=-margin,
        )
    p_own = (q - 1.0) * s2 / (gain * margin)
    return p_edge, max(p_relay, p_own)


@dataclass
class KktReport:
    """Constraint residuals (relative to the demand) and recovered multipliers."""

    sidelink_residual: float
    bs_edge_residual: float
    center_residual: float  # > 0 means the center user is short of L_i
    time_residual: float  # seconds
    high_snr_ratio: float  # beta_c * p_c * c / sigma^2
    multipliers: tuple  # (lambda1, lambda2, lambda3, lambda4)

    @property
    def dual_feasible(self):
        return all(m >= 0 for m in self.multipliers)


def _persp_derivs(t, energy, a, w):
    """Partial derivatives (d/dt, d/dE) of t W log2(1 + a E / t)."""
    x = a * energy / t
    d_e = w * a / ((1.0 + x) * math.log(2.0))
    d_t = w * math.log2(1.0 + x) - w * x / ((1.0 + x) * math.log(2.0))
    return d_t, d_e


def verify_kkt(link, demand, alloc):
    """Residuals of the bit/time constraints and the implied KKT multipliers.

    The multipliers solve the four stationarity equations of the Lagrangian
    in (t_edge, t_center, E_edge, E_center); a negative multiplier means the
    point is not a KKT point of the exact problem.
    """
    out = offload_outcome(link, alloc)
    w, s2 = link.bandwidth, link.noise
    gain = beam_gain(link.bs_channel, alloc.beam)
    t_j, t_i = alloc.t_edge, alloc.t_center
    e_j, e_i = t_j * alloc.p_edge, t_i * alloc.p_center
    s = link.sidelink_power_gain / s2
    g = gain / s2
    be = link.beta_edge

    r_side = t_j * w * math.log2(1.0 + alloc.p_edge * s)
    r_edge = t_i * w * math.log2(1.0 + be * alloc.p_center * g)

    lam1_t, lam1_e = _persp_derivs(t_j, e_j, s, w)
    lam1 = 1.0 / lam1_e
    lam4 = lam1 * lam1_t
    # center-user bits = phi(g) - phi(beta_e g), phi the perspective log term
    a_t, a_e = _persp_derivs(t_i, e_i, be * g, w)
    f_t, f_e = _persp_derivs(t_i, e_i, g, w)
    mat = np.array([[a_e, f_e - a_e], [a_t, f_t - a_t]])
    lam2, lam3 = np.linalg.solve(mat, np.array([1.0, lam4]))

    return KktReport(
        sidelink_residual=(demand.bits_edge - r_side) / demand.bits_edge,
        bs_edge_residual=(demand.bits_edge - r_edge) / demand.bits_edge,
        center_residual=(demand.bits_center - out.bits_center) / demand.bits_center,
        time_residual=t_j + t_i - demand.slot,
        high_snr_ratio=link.beta_center * alloc.p_center * gain / s2,
        multipliers=(lam1, float(lam2), float(lam3), lam4),
    )


def local_compute_energy(profile, bits_local, time_budget):
    """kappa * xi^3 * L^3 / t^2: dynamic CPU energy at a constant clock."""
    if not time_budget > 0:
        raise DomainError("time_budget must be > 0")
    return profile.capacitance_coeff * (profile.cycles_per_bit * bits_local) ** 3 / time_budget**2


def baseline_partial(link, demand, beam, profile, offload_fraction=0.8, local_time=None):
    """Pair energy when ``offload_fraction`` of each task is offloaded.

    The rest runs locally over ``local_time`` (default: the pair's slot T/K).
    """
    if not 0.0 < offload_fraction < 1.0:
        raise DomainError(f"offload_fraction must lie in (0, 1), got {offload_fraction}")
    alloc = prop1_allocate(link, demand.scaled(offload_fraction), beam)
    t_loc = demand.slot if local_time is None else local_time
    keep = 1.0 - offload_fraction
    local = local_compute_energy(profile, keep * demand.bits_edge, t_loc) + local_compute_energy(
        profile, keep * demand.bits_center, t_loc
    )
    return alloc.energy + local


def baseline_no_offload(demand, profile, local_time=None):
    """Pair energy when both tasks run locally over ``local_time`` (default: T)."""
    t_loc = demand.block if local_time is None else local_time
    return local_compute_energy(profile, demand.bits_edge, t_loc) + local_compute_energy(
        profile, demand.bits_center, t_loc
    )


def baseline_oma(link, demand, beam):
    """Three-phase orthogonal counterpart with the same total center-user time.

    Each BS phase uses half the band and half the noise; the center power is
    sized by the relayed edge message, as in the closed form.
    """
    t_center = _center_time(link, demand)
    t_edge = demand.slot - t_center
    t_half = 0.5 * t_center
    w, s2 = link.bandwidth, link.noise
    gain = beam_gain(link.bs_channel, beam)
    p_edge = s2 * snr_needed(demand.bits_edge, w, t_edge) / link.sidelink_power_gain
    p_center = 0.5 * s2 * snr_needed(demand.bits_edge, 0.5 * w, t_half) / gain
    alloc = OmaAllocation(t_edge, t_half, t_half, p_edge, p_center)
    return alloc, alloc.energy
