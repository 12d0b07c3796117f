"""The three sensing/allocation schemes behind one strategy interface.

standalone   A vehicle trusts nobody: each attempt scans the whole band
             itself and transmits on a channel it sensed vacant.

cooperative  Vehicles sense a rotating handful of channels every epoch
             and share those decisions with neighbours in comm range. A
             requester ranks channels by an OR-fusion of the latest
             vacant votes, then verifies a short list of top-ranked
             candidates itself before transmitting — shared votes carry
             no freshness guarantee, so they are hints, not permissions.

proposed     Each cluster elects a main, forward and backward
             coordinator every epoch. All three sense every channel; a
             channel is reported vacant only if all three agree
             (AND-of-vacancy). A requester takes a fresh vacant-reported
             channel and still re-senses it locally over two independent
             fading blocks before occupying, with the per-block threshold
             compensated so the overall false-alarm rate stays at the
             target.

Shared state refreshes only at coordination epochs: between epochs a
requester acts on reports up to one interval old, which is the entire
cost of coordination in this model. Requesters pick uniformly among their
qualifying candidates (drawn from their own stream) so concurrent
attempts spread over the spectrum instead of serializing on the lowest
channel id.

Only the sensing a vehicle performs while trying to acquire a channel is
returned from ``attempt`` and counted in the run report; epoch sensing is
infrastructure and only updates shared state. Switching scheme changes
nothing but candidate selection and epoch work: mobility, propagation and
PU schedules draw from their own streams either way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig, Scheme
from .mobility import neighbors_in_range
from .scheduling import ChannelMap
from .sensing import ChannelSensor, ChannelState, SensingOutcome

# cooperative scheme tuning
VOTE_CHANNELS_PER_EPOCH = 5   # channels each vehicle senses and shares per epoch
VERIFY_SHORTLIST = 3          # top-group candidates a requester verifies itself

# proposed scheme: re-check spans this many independent fading blocks
RECHECK_BLOCKS = 2

VOTE_UNKNOWN = -1
VOTE_VACANT = 0
VOTE_OCCUPIED = 1


@dataclass(frozen=True)
class CoordinatorSet:
    """The three coordination roles of one cluster; roles may coincide in
    small clusters."""

    main_id: int
    forward_id: int
    backward_id: int
    members: tuple[int, ...]
    elected_at: float

    def distinct_coordinators(self) -> tuple[int, ...]:
        seen: list[int] = []
        for cid in (self.main_id, self.forward_id, self.backward_id):
            if cid not in seen:
                seen.append(cid)
        return tuple(seen)


def form_clusters(positions: np.ndarray, directions: np.ndarray,
                  comm_range: float) -> list[list[int]]:
    """Partition same-direction vehicles into maximal chains whose
    consecutive members sit within comm range. Deterministic in positions;
    clusters ordered by direction then leading position."""
    clusters: list[list[int]] = []
    for direction in (1, -1):
        ids = [i for i in range(len(positions)) if directions[i] == direction]
        ids.sort(key=lambda i: (positions[i], i))
        chain: list[int] = []
        for i in ids:
            if chain and positions[i] - positions[chain[-1]] > comm_range:
                clusters.append(chain)
                chain = []
            chain.append(i)
        if chain:
            clusters.append(chain)
    return clusters


def select_coordinators(cluster: list[int], positions: np.ndarray,
                        direction: int, now: float) -> CoordinatorSet:
    """Forward = furthest along the travel direction, backward = rearmost,
    main = nearest the cluster centroid; all ties broken by lowest id."""
    if not cluster:
        raise ValueError("cluster must be nonempty")
    members = sorted(cluster)
    forward = max(members, key=lambda i: (positions[i] * direction, -i))
    backward = min(members, key=lambda i: (positions[i] * direction, i))
    centroid = float(np.mean([positions[i] for i in members]))
    main = min(members, key=lambda i: (abs(positions[i] - centroid), i))
    return CoordinatorSet(
        main_id=main, forward_id=forward, backward_id=backward,
        members=tuple(members), elected_at=now,
    )


def coordinated_sense(coord_set: CoordinatorSet, sensor: ChannelSensor,
                      channel_map: ChannelMap, positions: np.ndarray,
                      now: float, streams) -> np.ndarray:
    """AND-of-vacancy fusion: every distinct coordinator senses every
    channel at its own position; a channel is reported vacant only if all
    of them decide vacant. Returns a boolean vacancy array."""
    n = channel_map.n_channels
    all_channels = np.arange(n)
    vacant = np.ones(n, dtype=bool)
    for cid in coord_set.distinct_coordinators():
        outcomes = sensor.sense_block(
            cid, float(positions[cid]), all_channels, channel_map, now, streams
        )
        vacant &= np.array([o.decision == ChannelState.VACANT for o in outcomes])
    return vacant


class CoordinationState:
    """Epoch bookkeeping shared by the epoch-driven schemes."""

    def __init__(self, coordination_interval: float):
        self.interval = coordination_interval
        self.next_coordination_time = 0.0
        self.clusters: list[CoordinatorSet] = []
        self.cluster_of: dict[int, int] = {}
        self.reports: list[np.ndarray] = []       # per cluster: vacancy bools
        self.report_times: list[float] = []

    def due(self, now: float) -> bool:
        return now >= self.next_coordination_time - 1e-12

    def advance_epoch(self) -> None:
        self.next_coordination_time += self.interval

    def fresh_report(self, vehicle_id: int, now: float) -> np.ndarray | None:
        idx = self.cluster_of.get(vehicle_id)
        if idx is None:
            return None
        if now - self.report_times[idx] > self.interval + 1e-12:
            return None
        return self.reports[idx]


class Strategy:
    """Scheme interface: epoch work plus per-attempt candidate sensing."""

    needs_epoch = False

    def __init__(self, config: ScenarioConfig, sensor: ChannelSensor):
        self.config = config
        self.sensor = sensor
        self.state = CoordinationState(config.coordination_interval)

    def on_epoch(self, now: float, fleet, channel_map: ChannelMap, streams) -> None:
        raise NotImplementedError

    def attempt(self, vehicle_id: int, positions: np.ndarray, now: float,
                channel_map: ChannelMap, streams) -> tuple[list[SensingOutcome], int | None]:
        """Sense candidates for one acquisition attempt.

        positions is the fleet position array (the requester's own position
        is positions[vehicle_id]). Returns (counted sensing outcomes,
        channel sensed vacant to occupy, or None when the attempt must back
        off)."""
        raise NotImplementedError


class StandaloneStrategy(Strategy):
    """Full-band self-scan: no shared state, no epochs."""

    needs_epoch = False

    def on_epoch(self, now, fleet, channel_map, streams):  # pragma: no cover
        pass

    def attempt(self, vehicle_id, positions, now, channel_map, streams):
        all_channels = np.arange(self.config.n_channels)
        outcomes = self.sensor.sense_block(
            vehicle_id, float(positions[vehicle_id]), all_channels, channel_map, now, streams
        )
        vacant = [o.channel_id for o in outcomes if o.decision == ChannelState.VACANT]
        if not vacant:
            return outcomes, None
        pick = int(streams.su_stream(vehicle_id).integers(len(vacant)))
        return outcomes, vacant[pick]


class CooperativeStrategy(Strategy):
    """Shared independent sensing: epoch votes, OR-fused ranking, local
    verification of a short list."""

    needs_epoch = True

    def __init__(self, config: ScenarioConfig, sensor: ChannelSensor):
        super().__init__(config, sensor)
        self.votes = np.full((config.n_vehicles, config.n_channels), VOTE_UNKNOWN, dtype=np.int8)
        self._epoch_index = 0

    def _rotation(self, vehicle_id: int) -> np.ndarray:
        n = self.config.n_channels
        count = min(VOTE_CHANNELS_PER_EPOCH, n)
        start = (self._epoch_index * count + vehicle_id * 7) % n
        return (start + np.arange(count)) % n

    def on_epoch(self, now, fleet, channel_map, streams):
        for vehicle_id in range(len(fleet)):
            channels = self._rotation(vehicle_id)
            outcomes = self.sensor.sense_block(
                vehicle_id, float(fleet.positions[vehicle_id]), channels,
                channel_map, now, streams,
            )
            self._absorb(vehicle_id, outcomes)
        self._epoch_index += 1

    def _absorb(self, vehicle_id: int, outcomes: list[SensingOutcome]) -> None:
        for o in outcomes:
            self.votes[vehicle_id, o.channel_id] = (
                VOTE_VACANT if o.decision == ChannelState.VACANT else VOTE_OCCUPIED
            )

    def shortlist(self, vehicle_id: int, positions: np.ndarray,
                  rng: np.random.Generator) -> np.ndarray:
        """Up to VERIFY_SHORTLIST candidates drawn from the best-ranked vote
        group: vacant-voted channels first, then unvoted, then
        occupied-voted. Draws spread concurrent requesters apart."""
        group = neighbors_in_range(positions, vehicle_id, self.config.comm_range)
        group.add(vehicle_id)
        rows = self.votes[sorted(group)]
        any_vacant = np.any(rows == VOTE_VACANT, axis=0)
        any_vote = np.any(rows != VOTE_UNKNOWN, axis=0)
        rank = np.where(any_vacant, 0, np.where(~any_vote, 1, 2))
        picked: list[int] = []
        for level in (0, 1, 2):
            pool = np.nonzero(rank == level)[0]
            want = VERIFY_SHORTLIST - len(picked)
            if want <= 0:
                break
            if pool.size:
                take = pool if pool.size <= want else np.sort(
                    rng.choice(pool, size=want, replace=False)
                )
                picked.extend(int(c) for c in take)
        return np.array(picked, dtype=int)

    def attempt(self, vehicle_id, positions, now, channel_map, streams):
        rng = streams.su_stream(vehicle_id)
        shortlist = self.shortlist(vehicle_id, positions, rng)
        outcomes = self.sensor.sense_block(
            vehicle_id, float(positions[vehicle_id]), shortlist, channel_map, now, streams
        )
        # verification doubles as the requester's own freshest votes
        self._absorb(vehicle_id, outcomes)
        vacant = [o.channel_id for o in outcomes if o.decision == ChannelState.VACANT]
        if not vacant:
            return outcomes, None
        pick = int(rng.integers(len(vacant)))
        return outcomes, vacant[pick]


class ProposedStrategy(Strategy):
    """Three-coordinator clusters with conservative fusion and a hardened
    local re-check before any occupation."""

    needs_epoch = True

    def on_epoch(self, now, fleet, channel_map, streams):
        state = self.state
        state.clusters = []
        state.cluster_of = {}
        state.reports = []
        state.report_times = []
        clusters = form_clusters(fleet.positions, fleet.directions, self.config.comm_range)
        for idx, members in enumerate(clusters):
            direction = int(fleet.directions[members[0]])
            coord_set = select_coordinators(members, fleet.positions, direction, now)
            vacant = coordinated_sense(
                coord_set, self.sensor, channel_map, fleet.positions, now, streams
            )
            state.clusters.append(coord_set)
            state.reports.append(vacant)
            state.report_times.append(now)
            for member in members:
                state.cluster_of[member] = idx

    def candidates(self, vehicle_id: int, now: float) -> np.ndarray:
        """Fresh vacant-reported channels for this vehicle's cluster,
        ascending id; empty when the vehicle has no cluster or the report
        has gone stale."""
        report = self.state.fresh_report(vehicle_id, now)
        if report is None:
            return np.empty(0, dtype=int)
        return np.nonzero(report)[0]

    def attempt(self, vehicle_id, positions, now, channel_map, streams):
        candidates = self.candidates(vehicle_id, now)
        if candidates.size == 0:
            return [], None
        pick = candidates[int(streams.su_stream(vehicle_id).integers(candidates.size))]
        outcomes = self.sensor.sense_block(
            vehicle_id, float(positions[vehicle_id]), np.array([pick]), channel_map,
            now, streams, blocks=RECHECK_BLOCKS,
        )
        if outcomes[0].decision == ChannelState.VACANT:
            return outcomes, outcomes[0].channel_id
        return outcomes, None


def make_strategy(config: ScenarioConfig, sensor: ChannelSensor) -> Strategy:
    if config.scheme == Scheme.STANDALONE:
        return StandaloneStrategy(config, sensor)
    if config.scheme == Scheme.COOPERATIVE:
        return CooperativeStrategy(config, sensor)
    return ProposedStrategy(config, sensor)
