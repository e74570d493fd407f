"""Analog receive beamforming at the BS.

Two paths: a fixed codebook with cosine-similarity selection (energy
minimization) and the closed-form constant-modulus beamformer (CEE
maximization).
"""

import math
from dataclasses import dataclass

import numpy as np

from thzmec.channel import steering_vector
from thzmec.errors import DomainError, InfeasibleError

SECTOR_START = -math.pi / 6
SECTOR_END = math.pi / 2


@dataclass(frozen=True)
class Codebook:
    beams: np.ndarray  # (B+1, N), one unit-norm beam per row
    boresights: np.ndarray  # (B+1,) radians

    def __len__(self):
        return len(self.boresights)


def build_codebook(n_beams, n_antennas, sector=(SECTOR_START, SECTOR_END)):
    """B+1 steering beams with boresights evenly spaced across the sector."""
    if n_beams < 1:
        raise DomainError(f"n_beams must be >= 1, got {n_beams}")
    start, end = sector
    boresights = start + np.arange(n_beams + 1) * (end - start) / n_beams
    boresights[-1] = end
    beams = np.array([steering_vector(float(t), n_antennas) for t in boresights])
    return Codebook(beams=beams, boresights=boresights)


def fejer_kernel(x, n):
    """Normalized Fejer-type kernel |sin(N x/2) / (N sin(x/2))|, equal to 1 at x = 0."""
    half = x / 2.0
    den = n * math.sin(half)
    if abs(den) < 1e-300:
        return 1.0
    return abs(math.sin(n * half) / den)


def _check_pair(h, w):
    h = np.asarray(h)
    w = np.asarray(w)
    if h.shape != w.shape:
        raise DomainError(f"length mismatch: {h.shape} vs {w.shape}")
    return h, w


def cosine_similarity(h, w):
    """|h^H w| / (||h|| ||w||)."""
    h, w = _check_pair(h, w)
    nh, nw = np.linalg.norm(h), np.linalg.norm(w)
    if nh == 0 or nw == 0:
        raise DomainError("cosine similarity of a zero vector is undefined")
    return float(abs(np.vdot(h, w)) / (nh * nw))


def beam_gain(h, w):
    """|h^H w|^2."""
    h, w = _check_pair(h, w)
    return float(abs(np.vdot(h, w)) ** 2)


def select_beam(h, codebook):
    """Index and vector of the most aligned codebook beam (lowest index on ties)."""
    h = np.asarray(h)
    nh = np.linalg.norm(h)
    if nh == 0:
        raise DomainError("cannot select a beam for a zero channel")
    # beams are unit-norm
    sims = np.abs(codebook.beams.conj() @ h) / nh
    best = sims.max()
    # ties up to rounding noise in the inner products
    idx = int(np.flatnonzero(sims >= best - 1e-12)[0])
    return idx, codebook.beams[idx]


def cm_beamformer(h, gain_floors=()):
    """Constant-modulus beamformer maximizing |h^H w|^2.

    Every weight has magnitude 1/sqrt(N) and phase arg(h_n), which makes
    h^H w = sum|h_n| / sqrt(N) real and positive. Raises ``InfeasibleError``
    when the resulting gain falls below any of ``gain_floors``.
    """
    h = np.asarray(h, dtype=complex)
    if not np.any(h):
        raise DomainError("cannot beamform towards a zero channel")
    n = h.size
    w = np.exp(1j * np.angle(h)) / math.sqrt(n)
    gain = float(np.abs(h).sum() ** 2 / n)
    for k, floor in enumerate(gain_floors):
        # floors sized at the ideal gain can sit an ulp above the CM gain
        if gain < floor * (1.0 - 1e-9):
            raise InfeasibleError(
                "offload targets unreachable with CM beamforming: "
                f"beam gain {gain:.6g} below floor {floor:.6g}",
                constraint=f"cm_gain_floor_{k}",
                deficit=floor - gain,
            )
    return w
