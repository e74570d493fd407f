"""Two-phase NOMA offloading for one user pair, in bits/s and joules.

Phase 1: the cell-edge user sends to its cell-center partner over the side
link. Phase 2: the center user superposes its own message (fraction
``beta_center``) and the relayed one (``beta_edge``) towards the BS.
"""

import math
from dataclasses import dataclass

import numpy as np

from thzmec.beamforming import beam_gain
from thzmec.errors import DomainError


@dataclass(frozen=True)
class PairLink:
    bs_channel: np.ndarray  # center user -> BS array
    sidelink: float  # amplitude gain edge -> center
    beta_edge: float
    bandwidth: float  # Hz
    noise: float  # W

    def __post_init__(self):
        if not 0.0 < self.beta_edge < 1.0:
            raise DomainError(f"beta_edge must lie in (0, 1), got {self.beta_edge}")
        if not self.noise > 0:
            raise DomainError("noise power must be > 0")
        if not self.bandwidth > 0:
            raise DomainError("bandwidth must be > 0")

    @property
    def beta_center(self):
        return 1.0 - self.beta_edge

    @property
    def sidelink_power_gain(self):
        return self.sidelink**2

    @property
    def ideal_gain(self):
        """Beam gain of unconstrained (MRC) combining, ||h||^2 = N |lambda|^2."""
        return float(np.vdot(self.bs_channel, self.bs_channel).real)


@dataclass(frozen=True)
class Allocation:
    t_edge: float
    t_center: float
    p_edge: float
    p_center: float
    beam: np.ndarray

    @property
    def energy(self):
        return self.t_edge * self.p_edge + self.t_center * self.p_center


@dataclass(frozen=True)
class OffloadResult:
    bits_center: float
    bits_edge: float
    energy_center: float
    energy_edge: float

    @property
    def energy(self):
        return self.energy_center + self.energy_edge


def rates_from_gain(link, p_edge, p_center, gain):
    """(side link, BS center, BS edge) rates in bits/s for a given beam gain."""
    if p_edge < 0 or p_center < 0:
        raise DomainError("transmit powers must be >= 0")
    w, s2 = link.bandwidth, link.noise
    rx = p_center * gain
    r_side = w * math.log2(1.0 + p_edge * link.sidelink_power_gain / s2)
    r_center = w * math.log2(1.0 + link.beta_center * rx / (link.beta_edge * rx + s2))
    r_edge = w * math.log2(1.0 + link.beta_edge * rx / s2)
    return r_side, r_center, r_edge


def link_rates(link, alloc):
    return rates_from_gain(link, alloc.p_edge, alloc.p_center, beam_gain(link.bs_channel, alloc.beam))


def offload_outcome(link, alloc):
    r_side, r_center, r_edge = link_rates(link, alloc)
    return OffloadResult(
        bits_center=alloc.t_center * r_center,
        bits_edge=min(alloc.t_edge * r_side, alloc.t_center * r_edge),
        energy_center=alloc.t_center * alloc.p_center,
        energy_edge=alloc.t_edge * alloc.p_edge,
    )
