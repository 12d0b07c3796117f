"""Run outcomes: the event trace and the counter report.

Counters track the three recorded quantities — successful allocations,
false alarms, misdetections — plus correct detections so that the three
sensing classes always sum to the number of counted sensing events.
Sense events are counted when a vehicle senses in the course of an
allocation attempt; infrastructure sensing (coordinator scans, shared
cooperative votes) informs decisions but is not a recorded outcome.

``harmful_occupations`` counts SU occupation attempts that landed on a
PU-active channel — the interference events the proposed scheme is meant
to eliminate. They are not successful allocations: the transmission
collides immediately and the vehicle backs off.
"""

from __future__ import annotations

from dataclasses import dataclass

from .sensing import Classification

# trace event types
PU_OCCUPIED = "pu-occupied"
PU_VACATED = "pu-vacated"
SU_OCCUPIED = "su-occupied"
SU_VACATED = "su-vacated"
SU_PREEMPTED = "su-preempted"
SU_BACKOFF = "su-backoff"
SU_INTERFERENCE = "su-interference"
SENSE = "sense"
MOVE = "move"

EVENT_TYPES = (
    PU_OCCUPIED, PU_VACATED, SU_OCCUPIED, SU_VACATED,
    SU_PREEMPTED, SU_BACKOFF, SU_INTERFERENCE, SENSE, MOVE,
)


@dataclass(frozen=True)
class TraceEvent:
    tick: int
    time: float
    event: str
    channel_id: int = -1
    actor_id: int = -1
    detail: str = ""


@dataclass
class SimulationReport:
    allocations: int = 0
    false_alarms: int = 0
    misdetections: int = 0
    correct_detections: int = 0
    sensing_events: int = 0
    harmful_occupations: int = 0
    preemptions: int = 0
    backoffs: int = 0
    trace: list[TraceEvent] | None = None

    @property
    def counters(self) -> tuple[int, ...]:
        return (self.allocations, self.false_alarms, self.misdetections,
                self.correct_detections, self.sensing_events,
                self.harmful_occupations, self.preemptions, self.backoffs)

    def conservation_holds(self) -> bool:
        return (self.false_alarms + self.misdetections + self.correct_detections
                == self.sensing_events)


_SENSE_COUNTER = {
    Classification.FALSE_ALARM: "false_alarms",
    Classification.MISDETECTION: "misdetections",
    Classification.CORRECT_DETECTION: "correct_detections",
}


def record_event(report: SimulationReport, event: TraceEvent,
                 classification: Classification | None = None) -> SimulationReport:
    """Fold one trace event into the report counters.

    su-occupied bumps allocations; a sense event bumps exactly one of the
    three classification counters plus the sensing-event total; all other
    event types touch only their bookkeeping counter or the trace.
    """
    if event.event == SU_OCCUPIED:
        report.allocations += 1
    elif event.event == SENSE:
        if classification is None:
            raise ValueError("sense events need a classification")
        setattr(report, _SENSE_COUNTER[classification],
                getattr(report, _SENSE_COUNTER[classification]) + 1)
        report.sensing_events += 1
    elif event.event == SU_INTERFERENCE:
        report.harmful_occupations += 1
    elif event.event == SU_PREEMPTED:
        report.preemptions += 1
    elif event.event == SU_BACKOFF:
        report.backoffs += 1
    if report.trace is not None:
        report.trace.append(event)
    return report
