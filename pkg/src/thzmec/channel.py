"""Line-of-sight THz/mmWave propagation primitives.

Everything here works in linear SI units (W, Hz, m, linear gains). The dB
helpers at the bottom are meant for configuration and reporting only.
"""

import math
from dataclasses import dataclass

import numpy as np

from thzmec.errors import DomainError

SPEED_OF_LIGHT = 3e8  # m/s, rounded as in the system-parameter table
THERMAL_NOISE_DBM_PER_HZ = -174.0


@dataclass(frozen=True)
class ThzWindow:
    """A transmission window: carrier, contiguous bandwidth and absorption."""

    center_frequency: float  # Hz
    bandwidth: float  # Hz
    absorption_coeff: float = 0.0  # 1/m

    def __post_init__(self):
        if not self.center_frequency > 0:
            raise DomainError(f"center_frequency must be > 0, got {self.center_frequency}")
        if not self.bandwidth > 0:
            raise DomainError(f"bandwidth must be > 0, got {self.bandwidth}")
        if not self.absorption_coeff >= 0:
            raise DomainError(f"absorption_coeff must be >= 0, got {self.absorption_coeff}")


@dataclass(frozen=True)
class AntennaGains:
    """Linear antenna gains of a user (tx/rx) and of the BS receive array."""

    user_tx: float
    user_rx: float
    bs_rx: float

    def __post_init__(self):
        for name in ("user_tx", "user_rx", "bs_rx"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} gain must be > 0")

    @classmethod
    def from_dbi(cls, user_tx_dbi=3.0, user_rx_dbi=3.0, bs_rx_dbi=26.0):
        return cls(db_to_linear(user_tx_dbi), db_to_linear(user_rx_dbi), db_to_linear(bs_rx_dbi))


# Potential THz windows (center THz, bandwidth GHz, k_abs 1/m).
_WINDOW_TABLE = {
    "f1": (1.51, 169, 0.1432),
    "f2": (2.52, 82, 0.48),
    "f3": (3.42, 137, 0.28),
    "f4": (4.91, 113, 0.32),
    "f5": (5.72, 126, 0.32),
    "f6": (6.57, 120, 0.34),
    "f7": (7.19, 246, 0.1344),
    "f8": (8.83, 217, 0.1033),
    "f9": (9.57, 230, 0.0779),
}

WINDOWS = {
    name: ThzWindow(f * 1e12, bw * 1e9, k) for name, (f, bw, k) in _WINDOW_TABLE.items()
}
DEFAULT_WINDOW = "f3"

# 28 GHz baseline; no absorption coefficient is given for it, so it is zero.
MMWAVE = ThzWindow(28e9, 2e9, 0.0)
MMWAVE_NOISE_DBM = -40.0


def get_window(name):
    """Look up a named window (``f1``..``f9`` or ``mmwave``)."""
    if name == "mmwave":
        return MMWAVE
    try:
        return WINDOWS[name]
    except KeyError:
        raise DomainError(f"unknown window {name!r}; choose from f1..f9 or mmwave") from None


def path_loss(window, distance):
    """Spreading times molecular-absorption loss, linear (>= 1 beyond c/4πf)."""
    if not distance > 0:
        raise DomainError(f"distance must be > 0, got {distance}")
    spreading = (4.0 * math.pi * window.center_frequency * distance / SPEED_OF_LIGHT) ** 2
    return spreading * math.exp(window.absorption_coeff * distance)


def noise_power(bandwidth, noise_figure_db=10.0):
    """Thermal noise power in watts over ``bandwidth`` with the given noise figure."""
    if not bandwidth > 0:
        raise DomainError(f"bandwidth must be > 0, got {bandwidth}")
    dbm = 10.0 * math.log10(bandwidth) + noise_figure_db + THERMAL_NOISE_DBM_PER_HZ
    return dbm_to_watts(dbm)


def steering_vector(angle, n_antennas):
    """Unit-norm ULA response with half-wavelength spacing."""
    if n_antennas < 1:
        raise DomainError(f"n_antennas must be >= 1, got {n_antennas}")
    if abs(angle) > math.pi:
        raise DomainError(f"|angle| must be <= pi, got {angle}")
    n = np.arange(n_antennas)
    return np.exp(1j * math.pi * n * math.sin(angle)) / math.sqrt(n_antennas)


def amplitude_gain(window, tx_gain, rx_gain, distance):
    """sqrt(G_t G_r / PL): the LoS amplitude gain of a single link."""
    return math.sqrt(tx_gain * rx_gain / path_loss(window, distance))


def bs_channel_vector(window, gains, distance, angle, n_antennas):
    """Channel from a single-antenna user to the N-antenna BS array.

    ``||h||^2 = N * G_t * G_r,BS / PL`` regardless of the arrival angle.
    """
    lam = amplitude_gain(window, gains.user_tx, gains.bs_rx, distance)
    return math.sqrt(n_antennas) * lam * steering_vector(angle, n_antennas)


def sidelink_gain(window, gains, distance):
    """Amplitude gain of the user-to-user cooperative link."""
    return amplitude_gain(window, gains.user_tx, gains.user_rx, distance)


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def linear_to_db(value):
    return 10.0 * math.log10(value)


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts):
    return 10.0 * math.log10(watts) + 30.0
