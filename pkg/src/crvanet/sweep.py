"""Parameter sweeps across schemes and seeds, with CSV output.

A sweep varies one axis (vehicle count, channel count, or average speed)
over a value grid, runs every (value, scheme, seed) combination, and
collects the per-run counters into a table ordered by (value, scheme,
seed) regardless of execution order. Runs share nothing, so sweep points
may execute in parallel; the CRVANET_PARALLEL environment variable caps
the worker count (default: one worker per run, 1 forces in-process
serial execution).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .config import ScenarioConfig, Scheme
from .engine import run_simulation

PARALLEL_ENV = "CRVANET_PARALLEL"

AXES = ("vehicles", "channels", "speed")

CSV_HEADER = "axis_value,scheme,seed,allocations,false_alarms,misdetections,sensing_events"


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    values: tuple[float, ...]
    schemes: tuple[Scheme, ...]
    seeds: tuple[int, ...]
    base_config: ScenarioConfig

    def validate(self) -> "SweepSpec":
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.values:
            raise ValueError("values must be nonempty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be strictly increasing")
        if not self.schemes or not self.seeds:
            raise ValueError("schemes and seeds must be nonempty")
        if self.axis == "channels":
            for v in self.values:
                if int(v) % self.base_config.n_pu_towers != 0:
                    raise ValueError(
                        f"channel count {v} not divisible by nPuTowers "
                        f"({self.base_config.n_pu_towers})"
                    )
        return self


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    scheme: Scheme
    seed: int
    allocations: int
    false_alarms: int
    misdetections: int
    sensing_events: int
    harmful_occupations: int = 0


@dataclass(frozen=True)
class SweepTable:
    spec_axis: str
    rows: tuple[SweepRow, ...]


def apply_axis(config: ScenarioConfig, axis: str, value: float,
               scheme: Scheme, seed: int) -> ScenarioConfig:
    """Clone the base config with one axis value, scheme and seed applied.

    Speed values are given in km/h, matching how the sweep grids are
    quoted; they are converted on application.
    """
    if axis == "vehicles":
        fields = {"n_vehicles": int(value)}
    elif axis == "channels":
        n = int(value)
        fields = {"n_channels": n, "channels_per_tower": n // config.n_pu_towers}
    else:
        fields = {"avg_speed": value / 3.6}
    return replace(config, scheme=scheme, seed=seed, **fields).validate()


def _run_point(args: tuple) -> SweepRow:
    config, axis_value, scheme, seed = args
    report = run_simulation(config)
    return SweepRow(
        axis_value=axis_value, scheme=scheme, seed=seed,
        allocations=report.allocations,
        false_alarms=report.false_alarms,
        misdetections=report.misdetections,
        sensing_events=report.sensing_events,
        harmful_occupations=report.harmful_occupations,
    )


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepTable:
    """Run every (value, scheme, seed) combination, rows in that order.

    Execution may be parallel; the result is identical either way. A run
    failure aborts the sweep naming the offending triple.
    """
    spec.validate()
    jobs = []
    for value in spec.values:
        for scheme in spec.schemes:
            for seed in spec.seeds:
                config = apply_axis(spec.base_config, spec.axis, value, scheme, seed)
                jobs.append((config, value, scheme, seed))

    if workers is None:
        env = os.environ.get(PARALLEL_ENV, "")
        workers = int(env) if env.strip() else len(jobs)
    workers = max(1, min(workers, len(jobs))) if jobs else 1

    rows: list[SweepRow] = []
    if workers == 1:
        for job in jobs:
            try:
                rows.append(_run_point(job))
            except Exception as exc:
                raise RuntimeError(
                    f"sweep run failed at (value={job[1]}, scheme={job[2].value}, "
                    f"seed={job[3]}): {exc}"
                ) from exc
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(job, pool.submit(_run_point, job)) for job in jobs]
            for job, future in futures:
                try:
                    rows.append(future.result())
                except Exception as exc:
                    raise RuntimeError(
                        f"sweep run failed at (value={job[1]}, scheme={job[2].value}, "
                        f"seed={job[3]}): {exc}"
                    ) from exc
    return SweepTable(spec_axis=spec.axis, rows=tuple(rows))


def format_axis_value(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def write_csv(table: SweepTable, path: str) -> None:
    """ASCII CSV with LF line endings, one row per table row."""
    lines = [CSV_HEADER]
    for r in table.rows:
        lines.append(
            f"{format_axis_value(r.axis_value)},{r.scheme.value},{r.seed},"
            f"{r.allocations},{r.false_alarms},{r.misdetections},{r.sensing_events}"
        )
    data = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def read_csv(path: str) -> SweepTable:
    """Parse a file produced by write_csv back into a table."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: missing or wrong header")
    rows = []
    for line in lines[1:]:
        value, scheme, seed, alloc, fa, md, senses = line.split(",")
        rows.append(SweepRow(
            axis_value=float(value), scheme=Scheme(scheme), seed=int(seed),
            allocations=int(alloc), false_alarms=int(fa),
            misdetections=int(md), sensing_events=int(senses),
        ))
    return SweepTable(spec_axis="", rows=tuple(rows))
