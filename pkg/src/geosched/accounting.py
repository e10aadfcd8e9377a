"""Utility accounting: incremental GPU profit, idle, carbon, and transfer costs.

The ledger is the single money authority. Slot energy terms settle once per
minute; migration and retrieval charges land at the step that causes them.
The per-step utility increment recorded here doubles as the shared reward.

Sign convention: u1 accumulates signed profit; u2..u5 accumulate
non-negative costs; utility() = u1 - u2 - u3 - u4 - u5.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .core import (
    MIN_PER_HOUR,
    DataCenter,
    EconomicsConfig,
    Job,
    NetworkLink,
    SequencingError,
    link_carbon_g,
    link_cost_usd,
)


@dataclass
class LedgerEvent:
    """One audited fact: a settlement, a job transition, or a transfer charge.

    delta_u1..delta_u5 hold the amounts this event added to the matching
    utility component (positive magnitudes for the cost components).
    """

    t: int
    step: int
    dc: int
    event_kind: str
    job_id: int
    delta_u1: float = 0.0
    delta_u2: float = 0.0
    delta_u3: float = 0.0
    delta_u4: float = 0.0
    delta_u5: float = 0.0


EVENT_CSV_HEADER = (
    "t,step,dc,event_kind,job_id,delta_u1,delta_u2,delta_u3,delta_u4,delta_u5"
)


@dataclass
class UtilityLedger:
    """Running totals of the five utility components plus the event trace.

    ``step_increments`` stores (step index, utility delta) pairs so the
    telescoped sum of rewards can be checked against the final objective.
    """

    econ: EconomicsConfig
    u1_gpu_profit: float = 0.0
    u2_idle_cost: float = 0.0
    u3_carbon_cost: float = 0.0
    u4_migration_cost: float = 0.0
    u5_retrieval_cost: float = 0.0
    step_increments: list = field(default_factory=list)
    last_settled_min: int = -1
    events: list = field(default_factory=list)
    # Side tallies for efficiency metrics; not part of the objective.
    gpu_minutes: float = 0.0
    energy_kwh: float = 0.0
    energy_cost_usd: float = 0.0
    carbon_grams: float = 0.0

    def utility(self) -> float:
        return (
            self.u1_gpu_profit
            - self.u2_idle_cost
            - self.u3_carbon_cost
            - self.u4_migration_cost
            - self.u5_retrieval_cost
        )

    def breakdown(self) -> dict:
        return {
            "u1_gpu_profit": self.u1_gpu_profit,
            "u2_idle_cost": self.u2_idle_cost,
            "u3_carbon_cost": self.u3_carbon_cost,
            "u4_migration_cost": self.u4_migration_cost,
            "u5_retrieval_cost": self.u5_retrieval_cost,
            "utility": self.utility(),
        }

    # --- charging operations ---

    def settle_slot(self, dcs: list[DataCenter], t: int, step: int = 0) -> float:
        """Charge one minute of energy, idle, and carbon for every region.

        Slots must settle exactly once, in order. Returns the signed slot
        total (profit minus idle and carbon costs).
        """
        if self.last_settled_min >= 0 and t != self.last_settled_min + 1:
            raise SequencingError(
                f"slot {t} settled out of order (last was {self.last_settled_min})"
            )
        econ = self.econ
        alpha_min = econ.alpha_usd_per_gpu_hour / MIN_PER_HOUR
        rho_min = econ.gpu_power_kw / MIN_PER_HOUR  # kWh drawn per GPU per slot
        beta = econ.idle_power_ratio
        mu_g = econ.carbon_price_usd_per_g
        slot_total = 0.0
        for dc in dcs:
            used = dc.used_gpus
            price_kwh = dc.price_at(t) / 1000.0
            intensity = dc.carbon_at(t)
            du1 = (alpha_min - dc.pue * rho_min * price_kwh) * used
            du2 = dc.pue * beta * rho_min * (dc.r_max - used) * price_kwh
            grams = dc.pue * rho_min * ((1.0 - beta) * used + beta * dc.r_max) * intensity
            du3 = mu_g * grams
            self.u1_gpu_profit += du1
            self.u2_idle_cost += du2
            self.u3_carbon_cost += du3
            energy = dc.pue * rho_min * (used + beta * (dc.r_max - used))
            self.gpu_minutes += used
            self.energy_kwh += energy
            self.energy_cost_usd += energy * price_kwh
            self.carbon_grams += grams
            slot_total += du1 - du2 - du3
            self.events.append(
                LedgerEvent(t, step, dc.id, "settle", -1, du1, du2, du3)
            )
        self.last_settled_min = t
        return slot_total

    def charge_migration(
        self, job: Job, link: NetworkLink, i_src: float, i_dst: float,
        t: int = 0, step: int = 0,
    ) -> float:
        """Charge moving the job's dataset+model over the link; returns -ΔU4."""
        payload = job.payload_gb
        grams = link_carbon_g(link, payload, i_src, i_dst)
        du4 = link_cost_usd(link, payload) + self.econ.carbon_price_usd_per_g * grams
        self.u4_migration_cost += du4
        self.carbon_grams += grams
        self.events.append(
            LedgerEvent(t, step, link.to_dc, "migrate", job.id, delta_u4=du4)
        )
        return -du4

    def charge_retrieval(
        self, job: Job, link: NetworkLink, i_des: float, i_src: float,
        t: int = 0, step: int = 0,
    ) -> float:
        """Charge shipping the trained model from where it ran back to its
        source region; returns -ΔU5. Callers skip this when dest == src."""
        grams = link_carbon_g(link, job.model_gb, i_des, i_src)
        du5 = link_cost_usd(link, job.model_gb) + self.econ.carbon_price_usd_per_g * grams
        self.u5_retrieval_cost += du5
        self.carbon_grams += grams
        self.events.append(
            LedgerEvent(t, step, link.from_dc, "retrieve", job.id, delta_u5=du5)
        )
        return -du5

    # --- bookkeeping ---

    def record_step(self, k: int, delta_u: float) -> None:
        self.step_increments.append((k, delta_u))

    def record_event(self, t: int, step: int, dc: int, kind: str, job_id: int) -> None:
        """Log a zero-delta lifecycle fact (start/deliver/finish/fail)."""
        self.events.append(LedgerEvent(t, step, dc, kind, job_id))

    # --- efficiency metrics ---

    @property
    def gpu_hours(self) -> float:
        return self.gpu_minutes / MIN_PER_HOUR

    def cost_efficiency_usd_per_gpu_hour(self) -> float:
        """Grid energy spend (compute + idle) per delivered GPU hour."""
        if self.gpu_minutes == 0:
            return 0.0
        return self.energy_cost_usd / self.gpu_hours

    def carbon_efficiency_g_per_gpu_hour(self) -> float:
        """All emissions (compute, idle, transfers) per delivered GPU hour."""
        if self.gpu_minutes == 0:
            return 0.0
        return self.carbon_grams / self.gpu_hours

    # --- export ---

    def write_events_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(EVENT_CSV_HEADER.split(","))
            for ev in self.events:
                writer.writerow(
                    [
                        ev.t,
                        ev.step,
                        ev.dc,
                        ev.event_kind,
                        ev.job_id,
                        repr(ev.delta_u1),
                        repr(ev.delta_u2),
                        repr(ev.delta_u3),
                        repr(ev.delta_u4),
                        repr(ev.delta_u5),
                    ]
                )
