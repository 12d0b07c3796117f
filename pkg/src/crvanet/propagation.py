"""Radio propagation: Hata median path loss, Rayleigh fading, thermal noise.

Large-scale loss between a tower and a road position uses the Hata
suburban model (urban base form plus the suburban correction). Small-scale
fading is Rayleigh: the power gain of each sensing window is an
independent unit-mean exponential draw. The two compose into a received
power in dBW:

    rx = tx - pathLoss + 10*log10(fadingGain)

Inputs outside Hata's validity ranges are hard errors rather than
extrapolations, so a misconfigured scenario fails loudly instead of
silently skewing a comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BOLTZMANN = 1.380649e-23  # J/K

# Hata (1980) validity ranges
_F_RANGE = (150.0, 1500.0)   # MHz
_HB_RANGE = (30.0, 200.0)    # m
_HM_RANGE = (1.0, 10.0)      # m
_D_RANGE = (1.0, 20.0)       # km


class PropagationDomainError(ValueError):
    """An input lies outside the Hata model's validity range."""


@dataclass(frozen=True)
class TowerGeometry:
    """A PU tower: its projection point on the road, perpendicular offset,
    and the contiguous block of channels it owns."""

    tower_id: int
    along_road: float       # m, projection on the road axis
    offset: float           # m, perpendicular distance to the road
    first_channel: int
    n_channels: int

    def distance_to(self, position: float) -> float:
        """2-D distance (m) from the tower to a road position."""
        return math.hypot(position - self.along_road, self.offset)

    def owns(self, channel_id: int) -> bool:
        return self.first_channel <= channel_id < self.first_channel + self.n_channels


def build_towers(n_towers: int, channels_per_tower: int, road_length: float,
                 offset: float) -> list[TowerGeometry]:
    """Lay out towers, all projecting onto the road midpoint.

    With the default 2 km road and 10 km offset this keeps tower-vehicle
    distances inside [10, 10.05] km, comfortably within Hata validity.
    """
    return [
        TowerGeometry(
            tower_id=t,
            along_road=road_length / 2.0,
            offset=offset,
            first_channel=t * channels_per_tower,
            n_channels=channels_per_tower,
        )
        for t in range(n_towers)
    ]


def _check(name: str, value: float, lo: float, hi: float, unit: str) -> None:
    if not (lo <= value <= hi):
        raise PropagationDomainError(
            f"{name} = {value:g} {unit} outside Hata validity [{lo:g}, {hi:g}] {unit}"
        )


def hata_urban_loss(f: float, hb: float, hm: float, d: float) -> float:
    """Median urban path loss in dB.

    Parameters
    ----------
    f : carrier frequency, MHz (150..1500)
    hb : base station antenna height, m (30..200)
    hm : mobile antenna height, m (1..10)
    d : link distance, km (1..20)
    """
    _check("frequency", f, *_F_RANGE, "MHz")
    _check("baseStationHeight", hb, *_HB_RANGE, "m")
    _check("mobileHeight", hm, *_HM_RANGE, "m")
    _check("distance", d, *_D_RANGE, "km")
    log_f = math.log10(f)
    a_hm = (1.1 * log_f - 0.7) * hm - (1.56 * log_f - 0.8)
    return (
        69.55
        + 26.16 * log_f
        - 13.82 * math.log10(hb)
        - a_hm
        + (44.9 - 6.55 * math.log10(hb)) * math.log10(d)
    )


def hata_suburban_loss(f: float, hb: float, hm: float, d: float) -> float:
    """Median suburban path loss in dB: urban loss plus the suburban correction."""
    return hata_urban_loss(f, hb, hm, d) - 2.0 * math.log10(f / 28.0) ** 2 - 5.4


def rayleigh_gain(rng: np.random.Generator, size: int | None = None):
    """Unit-mean exponential power gain(s): the squared envelope of
    unit-power Rayleigh fading. One independent draw per sensing window."""
    return rng.exponential(1.0, size=size) if size is not None else rng.exponential(1.0)


def received_power(tx_dbw: float, loss_db: float, gain: float) -> float:
    """Compose a link budget: tx - loss + 10*log10(fading gain), in dBW."""
    if gain <= 0:
        raise ValueError("fading gain must be positive")
    return tx_dbw - loss_db + 10.0 * math.log10(gain)


def thermal_noise_power(temperature_k: float, bandwidth_hz: float) -> float:
    """Thermal noise power 10*log10(k*T*B) in dBW."""
    if temperature_k <= 0 or bandwidth_hz <= 0:
        raise ValueError("temperature and bandwidth must be positive")
    return 10.0 * math.log10(BOLTZMANN * temperature_k * bandwidth_hz)


@dataclass(frozen=True)
class LinkBudget:
    """A fully-resolved link: inputs and resulting received power."""

    tx_power: float     # dBW
    path_loss: float    # dB
    fading_gain: float  # linear power factor, unit mean
    rx_power: float     # dBW

    @classmethod
    def compute(cls, tx_power: float, path_loss: float, fading_gain: float) -> "LinkBudget":
        return cls(tx_power, path_loss, fading_gain,
                   received_power(tx_power, path_loss, fading_gain))
