"""Hourly series ingestion and synthetic fine-tuning workload generation.

Series files are CSV with header ``timestamp,value``: ISO-8601 UTC stamps on
exact hour boundaries, strictly increasing and gap-free. Workload files are
CSV with header ``job_id,src_dc,arrival_min,gpus,duration_min,slack_min,
data_gb,model_gb``, sorted by arrival.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .core import MIN_PER_HOUR, HourlySeries, Job


class ParseError(ValueError):
    """Malformed input file; message carries file and line context."""


SERIES_KINDS = ("price", "carbon")

WORKLOAD_CSV_HEADER = (
    "job_id,src_dc,arrival_min,gpus,duration_min,slack_min,data_gb,model_gb"
)

# Hourly arrival rates (jobs/hour before delta scaling) over a day: quiet
# overnight, morning ramp, peaks near 10:00 and 15:00 with a midday dip.
# Mean 327.5/h so the stock delta coefficients yield ~1500 jobs over 2 days.
DEFAULT_TEMPLATE = (
    130.0, 120.0, 110.0, 110.0, 120.0, 140.0,
    180.0, 250.0, 350.0, 480.0, 590.0, 560.0,
    510.0, 530.0, 570.0, 600.0, 540.0, 470.0,
    380.0, 310.0, 260.0, 220.0, 180.0, 150.0,
)


@dataclass(frozen=True)
class JobType:
    """Parameter ranges for one fine-tuning task family."""

    name: str
    gpus: tuple[int, int]
    duration_min: tuple[int, int]
    data_gb: tuple[float, float]
    model_gb: tuple[float, float]

    def __post_init__(self):
        for lo, hi in (self.gpus, self.duration_min, self.data_gb, self.model_gb):
            if not (0 < lo <= hi):
                raise ValueError(f"job type {self.name}: bad range ({lo}, {hi})")


DEFAULT_JOB_TYPES = (
    JobType("image_gen", (1, 4), (30, 240), (1.0, 20.0), (2.0, 5.0)),
    JobType("text_gen", (1, 8), (60, 480), (1.0, 10.0), (3.0, 12.0)),
    JobType("text_to_image", (2, 8), (120, 720), (5.0, 50.0), (4.0, 8.0)),
)


@dataclass
class WorkloadParams:
    """Knobs of the synthetic arrival process and job attribute draws."""

    delta: tuple = (0.01, 0.02, 0.01, 0.025, 0.03)
    template: tuple = DEFAULT_TEMPLATE
    job_types: tuple = DEFAULT_JOB_TYPES
    mixture_weights: tuple = ()
    slack_ratio_mean: float = 0.4

    def __post_init__(self):
        self.delta = tuple(float(d) for d in self.delta)
        self.template = tuple(float(x) for x in self.template)
        if any(d < 0 for d in self.delta):
            raise ValueError("delta coefficients must be >= 0")
        if len(self.template) != 24 or any(x < 0 for x in self.template):
            raise ValueError("template must be 24 non-negative hourly rates")
        if not self.job_types:
            raise ValueError("at least one job type required")
        if not self.mixture_weights:
            self.mixture_weights = tuple(1.0 / len(self.job_types) for _ in self.job_types)
        self.mixture_weights = tuple(float(w) for w in self.mixture_weights)
        if len(self.mixture_weights) != len(self.job_types):
            raise ValueError("mixture weight count must match job type count")
        if any(w < 0 for w in self.mixture_weights):
            raise ValueError("mixture weights must be >= 0")
        if abs(sum(self.mixture_weights) - 1.0) > 1e-9:
            raise ValueError("mixture weights must sum to 1")
        if self.slack_ratio_mean < 0:
            raise ValueError("slack_ratio_mean must be >= 0")


# --- series ingestion ---

def _parse_stamp(text: str, path, line_no: int) -> datetime:
    raw = text.strip()
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    try:
        stamp = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise ParseError(f"{path}:{line_no}: bad timestamp {text!r}: {exc}") from None
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc)


def load_series(path, kind: str) -> HourlySeries:
    """Parse one hourly price or carbon CSV into a validated series."""
    if kind not in SERIES_KINDS:
        raise ValueError(f"kind must be one of {SERIES_KINDS}, got {kind!r}")
    values = []
    start_min = None
    prev_min = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["timestamp", "value"]:
            raise ParseError(f"{path}:1: expected header 'timestamp,value', got {header}")
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise ParseError(f"{path}:{line_no}: expected 2 fields, got {len(row)}")
            stamp = _parse_stamp(row[0], path, line_no)
            if stamp.minute or stamp.second or stamp.microsecond:
                raise ParseError(f"{path}:{line_no}: {row[0]} is not on an hour boundary")
            t_min = int(stamp.timestamp()) // 60
            try:
                value = float(row[1])
            except ValueError:
                raise ParseError(f"{path}:{line_no}: bad value {row[1]!r}") from None
            if not np.isfinite(value):
                raise ParseError(f"{path}:{line_no}: non-finite value {row[1]!r}")
            if prev_min is not None:
                if t_min <= prev_min:
                    raise ParseError(f"{path}:{line_no}: timestamps not strictly increasing")
                if t_min != prev_min + MIN_PER_HOUR:
                    missing = prev_min + MIN_PER_HOUR
                    raise ParseError(
                        f"{path}:{line_no}: gap in series, missing hour at minute {missing}"
                    )
            else:
                start_min = t_min
            prev_min = t_min
            values.append(value)
    if not values:
        raise ParseError(f"{path}: no data rows")
    return HourlySeries(start_min, np.array(values), label=f"{kind}:{path}")


# --- workload synthesis ---

def synthesize_workload(
    params: WorkloadParams, dc_count: int, horizon_min: int, seed: int
) -> list[Job]:
    """Draw a job list from the configured diurnal Poisson process.

    Arrival counts per (DC, hour) are Poisson with mean delta_n * template;
    arrival minutes are uniform within the hour. Jobs are sorted by
    (arrival, source, draw order) and given dense ids from 0.
    """
    if horizon_min < MIN_PER_HOUR:
        raise ValueError("horizon_min must be >= 60")
    if len(params.delta) < dc_count:
        raise ValueError(
            f"need {dc_count} delta coefficients, got {len(params.delta)}"
        )
    rng = np.random.default_rng(np.random.SeedSequence((int(seed), 0xD1CE)))
    raw = []  # (arrival_min, dc, order) before attribute draws
    order = 0
    n_hours = (horizon_min + MIN_PER_HOUR - 1) // MIN_PER_HOUR
    for n in range(dc_count):
        for h in range(n_hours):
            window_lo = h * MIN_PER_HOUR
            window_hi = min(window_lo + MIN_PER_HOUR, horizon_min)
            frac = (window_hi - window_lo) / MIN_PER_HOUR
            mean = params.delta[n] * params.template[h % 24] * frac
            count = int(rng.poisson(mean))
            for _ in range(count):
                arrival = int(rng.integers(window_lo, window_hi))
                raw.append((arrival, n, order))
                order += 1
    raw.sort()
    jobs = []
    weights = np.array(params.mixture_weights)
    for job_id, (arrival, dc, _) in enumerate(raw):
        jt = params.job_types[int(rng.choice(len(params.job_types), p=weights))]
        gpus = int(rng.integers(jt.gpus[0], jt.gpus[1], endpoint=True))
        duration = int(rng.integers(jt.duration_min[0], jt.duration_min[1], endpoint=True))
        data_gb = float(rng.uniform(jt.data_gb[0], jt.data_gb[1]))
        model_gb = float(rng.uniform(jt.model_gb[0], jt.model_gb[1]))
        ratio = float(
            rng.uniform(0.5 * params.slack_ratio_mean, 1.5 * params.slack_ratio_mean)
        )
        jobs.append(
            Job(
                id=job_id,
                src_dc=dc,
                data_gb=data_gb,
                model_gb=model_gb,
                arrival_min=arrival,
                gpus=gpus,
                duration_min=duration,
                slack_min=int(round(ratio * duration)),
            )
        )
    return jobs


# --- workload files ---

def write_workload(jobs: list[Job], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(WORKLOAD_CSV_HEADER.split(","))
        for job in jobs:
            writer.writerow(
                [
                    job.id,
                    job.src_dc,
                    job.arrival_min,
                    job.gpus,
                    job.duration_min,
                    job.slack_min,
                    repr(job.data_gb),
                    repr(job.model_gb),
                ]
            )


def load_workload(path) -> list[Job]:
    jobs = []
    prev_arrival = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        expected = WORKLOAD_CSV_HEADER.split(",")
        if header is None or [h.strip() for h in header] != expected:
            raise ParseError(f"{path}:1: expected header {WORKLOAD_CSV_HEADER!r}")
        for line_no, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 8:
                raise ParseError(f"{path}:{line_no}: expected 8 fields, got {len(row)}")
            try:
                job = Job(
                    id=int(row[0]),
                    src_dc=int(row[1]),
                    arrival_min=int(row[2]),
                    gpus=int(row[3]),
                    duration_min=int(row[4]),
                    slack_min=int(row[5]),
                    data_gb=float(row[6]),
                    model_gb=float(row[7]),
                )
            except ValueError as exc:
                raise ParseError(f"{path}:{line_no}: {exc}") from None
            if prev_arrival is not None and job.arrival_min < prev_arrival:
                raise ParseError(f"{path}:{line_no}: arrivals out of order")
            prev_arrival = job.arrival_min
            jobs.append(job)
    return jobs
