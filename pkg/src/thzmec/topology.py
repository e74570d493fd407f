"""User deployment in one BS sector and edge-to-center pairing."""

import math
from dataclasses import dataclass

import numpy as np

from thzmec.beamforming import SECTOR_END, SECTOR_START
from thzmec.errors import DomainError
from thzmec.optim import hungarian


@dataclass(frozen=True)
class CellGeometry:
    center_radius: float = 3.0
    edge_radius: float = 5.0
    min_radius: float = 0.5
    sector_start: float = SECTOR_START
    sector_end: float = SECTOR_END

    def __post_init__(self):
        if not 0 < self.min_radius < self.center_radius < self.edge_radius:
            raise DomainError("need 0 < min_radius < center_radius < edge_radius")
        if not self.sector_start < self.sector_end:
            raise DomainError("sector_start must precede sector_end")


@dataclass(frozen=True)
class Deployment:
    """Polar positions (radius m, angle rad) seen from the BS at the origin."""

    center_users: np.ndarray  # (K, 2)
    edge_users: np.ndarray  # (K, 2)

    @property
    def pair_count(self):
        return len(self.center_users)


@dataclass(frozen=True)
class Pairing:
    assignments: tuple  # ((edge_index, center_index), ...)
    sidelink_distances: np.ndarray  # per pair, m

    @property
    def total_distance(self):
        return float(self.sidelink_distances.sum())


def _sample_ring(rng, count, r_in, r_out, a0, a1):
    # prefix-stable: the first k rows do not depend on ``count``
    u = rng.random((count, 2))
    radius = np.sqrt(u[:, 0] * (r_out**2 - r_in**2) + r_in**2)
    angle = a0 + u[:, 1] * (a1 - a0)
    return np.column_stack([radius, angle])


def deploy_users(seed, geometry, pair_count):
    """Drop K cell-center and K cell-edge users uniformly over their ring sectors.

    ``seed`` is anything ``numpy.random.default_rng`` accepts; a sequence such
    as ``[master_seed, trial]`` gives independent per-trial streams. Radii are
    area-uniform. Center radii lie in [min_radius, center_radius]; edge radii
    in (center_radius, edge_radius].
    """
    if pair_count < 1:
        raise DomainError(f"pair_count must be >= 1, got {pair_count}")
    g = geometry
    seq = np.random.SeedSequence(seed)
    rng_center, rng_edge = (np.random.default_rng(s) for s in seq.spawn(2))
    center = _sample_ring(rng_center, pair_count, g.min_radius, g.center_radius, g.sector_start, g.sector_end)
    edge = _sample_ring(rng_edge, pair_count, g.center_radius, g.edge_radius, g.sector_start, g.sector_end)
    # u = 0 would land exactly on center_radius, which belongs to the inner ring
    edge[:, 0] = np.maximum(edge[:, 0], np.nextafter(g.center_radius, math.inf))
    return Deployment(center_users=center, edge_users=edge)


def to_cartesian(polar):
    polar = np.asarray(polar, dtype=float)
    return np.column_stack([polar[:, 0] * np.cos(polar[:, 1]), polar[:, 0] * np.sin(polar[:, 1])])


def distance_matrix(deployment):
    """Euclidean distances, rows = edge users, columns = center users."""
    e = to_cartesian(deployment.edge_users)
    c = to_cartesian(deployment.center_users)
    return np.linalg.norm(e[:, None, :] - c[None, :, :], axis=-1)


def pair_users(deployment):
    """Pair every edge user with a center user, minimizing total side-link distance."""
    if len(deployment.edge_users) != len(deployment.center_users):
        raise DomainError(
            f"need equal user counts, got {len(deployment.edge_users)} edge "
            f"and {len(deployment.center_users)} center"
        )
    dist = distance_matrix(deployment)
    cols, _ = hungarian(dist)
    rows = np.arange(len(cols))
    return Pairing(
        assignments=tuple((int(r), int(c)) for r, c in zip(rows, cols)),
        sidelink_distances=dist[rows, cols],
    )
