"""Deterministic per-subsystem random streams.

One root seed fans out into independent generators keyed by (domain,
entity). Each subsystem owns its stream, so changing how many draws one
subsystem makes never perturbs another — the property that keeps
cross-scheme comparisons honest: mobility, PU schedules and vehicle
parameters are bit-identical for a given seed no matter which sensing
scheme is running.

Domains:
    INIT      per-vehicle parameter draws (desired speed, human error)
    MOBILITY  per-vehicle driving randomization (the speed-choice draw)
    PU        per-channel PU hold/gap schedule
    SU        per-vehicle SU hold/gap schedule and attempt timing
    FADING    per-(tower, observer) small-scale fading draws
    SENSING   per-observer detector statistic draws
"""

from __future__ import annotations

import numpy as np

INIT = 0
MOBILITY = 1
PU = 2
SU = 3
FADING = 4
SENSING = 5


def substream(seed: int, domain: int, *entity: int) -> np.random.Generator:
    """Generator for one (domain, entity...) slot under a root seed."""
    return np.random.default_rng(np.random.SeedSequence((seed, domain) + entity))


class StreamBundle:
    """Lazily-built cache of the per-entity generators for one run."""

    def __init__(self, seed: int):
        self.seed = seed
        self._cache: dict[tuple, np.random.Generator] = {}

    def get(self, domain: int, *entity: int) -> np.random.Generator:
        key = (domain,) + entity
        rng = self._cache.get(key)
        if rng is None:
            rng = substream(self.seed, domain, *entity)
            self._cache[key] = rng
        return rng

    def init_stream(self, vehicle_id: int) -> np.random.Generator:
        return self.get(INIT, vehicle_id)

    def mobility_stream(self, vehicle_id: int) -> np.random.Generator:
        return self.get(MOBILITY, vehicle_id)

    def pu_stream(self, channel_id: int) -> np.random.Generator:
        return self.get(PU, channel_id)

    def su_stream(self, vehicle_id: int) -> np.random.Generator:
        return self.get(SU, vehicle_id)

    def fading_stream(self, tower_id: int, observer_id: int) -> np.random.Generator:
        return self.get(FADING, tower_id, observer_id)

    def sensing_stream(self, observer_id: int) -> np.random.Generator:
        return self.get(SENSING, observer_id)
