"""Domain types and unit conventions for the data center simulator.

Conventions used throughout the package: money in USD, energy in kWh,
carbon in grams CO2, time in integer minutes, data in GB, power in kW.
Price series are USD/MWh and carbon series gCO2/kWh (the units the source
data comes in); conversion happens at the point of use.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

MIN_PER_HOUR = 60

# Job lifecycle states.
QUEUED = "queued"
IN_TRANSIT = "in_transit"
RUNNING = "running"
FINISHED = "finished"
FAILED = "failed"

_STATUS_TRANSITIONS = {
    QUEUED: {IN_TRANSIT, RUNNING, FAILED},
    IN_TRANSIT: {QUEUED},
    RUNNING: {FINISHED},
    FINISHED: set(),
    FAILED: set(),
}


class SeriesRangeError(ValueError):
    """Lookup outside the covered time window of an hourly series."""


class SequencingError(RuntimeError):
    """An operation was invoked out of its required order."""


class ConfigError(ValueError):
    """Invalid or inconsistent scenario configuration."""


# --- unit converters ---

def usd_per_mwh_to_usd_per_kwh(price: float) -> float:
    return price / 1000.0


def usd_per_kwh_to_usd_per_mwh(price: float) -> float:
    return price * 1000.0


def usd_per_ton_to_usd_per_g(price: float) -> float:
    return price * 1e-6


def usd_per_g_to_usd_per_ton(price: float) -> float:
    return price * 1e6


# --- domain types ---

@dataclass
class Job:
    """One GPU fine-tuning request moving through the system.

    ``data_gb`` covers the training inputs shipped on migration;
    ``model_gb`` the parameters shipped both on migration and when
    results are sent back to the source region.
    """

    id: int
    src_dc: int
    data_gb: float
    model_gb: float
    arrival_min: int
    gpus: int
    duration_min: int
    slack_min: int
    status: str = QUEUED
    accrued_delay_min: int = 0
    dest_dc: int | None = None
    start_min: int | None = None

    def __post_init__(self):
        if self.gpus < 1:
            raise ValueError(f"job {self.id}: gpus must be >= 1, got {self.gpus}")
        if self.duration_min < 1:
            raise ValueError(f"job {self.id}: duration_min must be >= 1, got {self.duration_min}")
        if self.slack_min < 0:
            raise ValueError(f"job {self.id}: slack_min must be >= 0, got {self.slack_min}")
        if self.data_gb < 0 or self.model_gb < 0:
            raise ValueError(f"job {self.id}: payload sizes must be >= 0")
        if self.arrival_min < 0:
            raise ValueError(f"job {self.id}: arrival_min must be >= 0")

    @property
    def payload_gb(self) -> float:
        """Total bytes moved on migration: dataset plus model."""
        return self.data_gb + self.model_gb

    def set_status(self, new: str) -> None:
        allowed = _STATUS_TRANSITIONS[self.status]
        if new not in allowed:
            raise ValueError(f"job {self.id}: illegal status change {self.status} -> {new}")
        self.status = new

    def add_delay(self, minutes: int) -> None:
        if minutes < 0:
            raise ValueError("delay increments must be non-negative")
        self.accrued_delay_min += minutes


@dataclass
class HourlySeries:
    """Hourly samples held constant within each hour.

    ``start_epoch_min`` anchors sample 0; sample h covers minutes
    [start + 60*h, start + 60*h + 59]. Lookups outside the covered
    window raise rather than extrapolate.
    """

    start_epoch_min: int
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError(f"series {self.label!r}: needs a non-empty 1-d value array")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"series {self.label!r}: all values must be finite")

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def end_min(self) -> int:
        """First minute past the covered window."""
        return self.start_epoch_min + MIN_PER_HOUR * len(self)

    def rebased(self, start_epoch_min: int = 0) -> "HourlySeries":
        return HourlySeries(start_epoch_min, self.values.copy(), self.label)


def series_at(series: HourlySeries, t_min: int) -> float:
    """Value in force at minute ``t_min`` (piecewise-constant hold)."""
    if t_min < series.start_epoch_min or t_min >= series.end_min:
        raise SeriesRangeError(
            f"series {series.label!r}: minute {t_min} outside "
            f"[{series.start_epoch_min}, {series.end_min})"
        )
    idx = (t_min - series.start_epoch_min) // MIN_PER_HOUR
    return float(series.values[idx])


@dataclass
class DataCenter:
    """A GPU region: capacity, facility overhead, venue series, and queues.

    ``running`` maps a started job id to its release minute; ``used_gpus``
    tracks the gang-allocated total and never exceeds ``r_max``.
    """

    id: int
    zone: str
    r_max: int
    pue: float
    price_series: HourlySeries
    carbon_series: HourlySeries
    queue: deque = field(default_factory=deque)
    running: dict = field(default_factory=dict)
    used_gpus: int = 0

    def __post_init__(self):
        if self.r_max < 1:
            raise ValueError(f"data center {self.id}: r_max must be >= 1")
        if not self.pue > 1.0:
            raise ValueError(f"data center {self.id}: pue must be > 1, got {self.pue}")

    @property
    def available_gpus(self) -> int:
        return self.r_max - self.used_gpus

    def price_at(self, t_min: int) -> float:
        return series_at(self.price_series, t_min)

    def carbon_at(self, t_min: int) -> float:
        return series_at(self.carbon_series, t_min)


@dataclass(frozen=True)
class NetworkLink:
    """Directed inter-region link with throughput and transfer coefficients."""

    from_dc: int
    to_dc: int
    throughput_gb_per_min: float
    cost_usd_per_gb: float
    energy_kwh_per_gb: float

    def __post_init__(self):
        if self.from_dc == self.to_dc:
            raise ValueError("link endpoints must differ")
        if not self.throughput_gb_per_min > 0:
            raise ValueError("link throughput must be > 0")
        if self.cost_usd_per_gb < 0 or self.energy_kwh_per_gb < 0:
            raise ValueError("link coefficients must be >= 0")


def build_links(
    n_dcs: int,
    throughput_gb_per_min: float = 2.0,
    cost_usd_per_gb: float = 0.01,
    energy_kwh_per_gb: float = 0.02,
    overrides: dict[tuple[int, int], NetworkLink] | None = None,
) -> dict[tuple[int, int], NetworkLink]:
    """Complete digraph over ``n_dcs`` regions with uniform defaults.

    ``overrides`` replaces individual ordered pairs.
    """
    links = {}
    for i in range(n_dcs):
        for j in range(n_dcs):
            if i == j:
                continue
            links[(i, j)] = NetworkLink(
                i, j, throughput_gb_per_min, cost_usd_per_gb, energy_kwh_per_gb
            )
    for key, link in (overrides or {}).items():
        if key[0] == key[1] or not (0 <= key[0] < n_dcs and 0 <= key[1] < n_dcs):
            raise ConfigError(f"link override {key} is not a valid ordered pair")
        links[key] = link
    return links


@dataclass(frozen=True)
class EconomicsConfig:
    """Revenue and cost coefficients shared by all regions."""

    alpha_usd_per_gpu_hour: float = 0.05
    carbon_price_usd_per_ton: float = 100.0
    idle_power_ratio: float = 0.1
    gpu_power_kw: float = 0.3

    def __post_init__(self):
        if self.alpha_usd_per_gpu_hour < 0:
            raise ValueError("alpha_usd_per_gpu_hour must be >= 0")
        if self.carbon_price_usd_per_ton < 0:
            raise ValueError("carbon_price_usd_per_ton must be >= 0")
        if not 0.0 <= self.idle_power_ratio <= 1.0:
            raise ValueError("idle_power_ratio must be in [0, 1]")
        if not self.gpu_power_kw > 0:
            raise ValueError("gpu_power_kw must be > 0")

    @property
    def carbon_price_usd_per_g(self) -> float:
        return usd_per_ton_to_usd_per_g(self.carbon_price_usd_per_ton)


# --- link-level formulas ---

def link_delay_min(link: NetworkLink, size_gb: float) -> int:
    """Transfer delay in whole minutes, rounded up to the slot boundary."""
    if size_gb < 0:
        raise ValueError("size_gb must be >= 0")
    # 1e-9 guards float quotients that land epsilon above an integer.
    return int(math.ceil(size_gb / link.throughput_gb_per_min - 1e-9))


def link_cost_usd(link: NetworkLink, size_gb: float) -> float:
    """Transfer overhead cost; continuous in the payload size."""
    if size_gb < 0:
        raise ValueError("size_gb must be >= 0")
    return size_gb * link.cost_usd_per_gb


def link_carbon_g(link: NetworkLink, size_gb: float, i_src: float, i_dst: float) -> float:
    """Transfer emissions in grams, priced at the endpoint-average intensity."""
    if size_gb < 0:
        raise ValueError("size_gb must be >= 0")
    if i_src < 0 or i_dst < 0:
        raise ValueError("carbon intensities must be >= 0")
    return link.energy_kwh_per_gb * size_gb * (i_src + i_dst) / 2.0


def latest_feasible_start(job: Job, retrieval_delay_min: int) -> int:
    """Last minute the job may start without blowing its slack budget.

    The budget is charged with transfer delay already accrued plus the
    result-retrieval delay of the candidate destination (0 when the job
    would run at its source). A result below the current clock means the
    job can no longer start there.
    """
    if job.status in (FINISHED, FAILED):
        raise ValueError(f"job {job.id} is terminal ({job.status})")
    return job.arrival_min + job.slack_min - (job.accrued_delay_min + retrieval_delay_min)
