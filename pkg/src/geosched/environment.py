"""Multi-agent scheduling environment over geo-distributed GPU regions.

Time advances in 1-minute slots. Within a slot, decision steps repeat while
any region still has an offerable head job: each such region's agent picks
postpone / execute / migrate simultaneously. Postponing parks that queue for
the rest of the slot, so every step strictly shrinks the offerable set and
the slot terminates. When nothing is offerable the slot settles and rolls
over: energy/idle/carbon are charged, finished jobs release GPUs and ship
results home, transits deliver, arrivals enqueue, and expired jobs drop.

Action encoding for region n: 0 = postpone; 1 + d = run at region d (execute
when d == n, migrate otherwise); N + 1 = forced no-op when the region has
nothing to offer. Rewards are the shared utility increment per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .accounting import UtilityLedger
from .config import NormScales, World
from .core import (
    FAILED,
    FINISHED,
    IN_TRANSIT,
    QUEUED,
    RUNNING,
    Job,
    latest_feasible_start,
    link_delay_min,
)


class IllegalActionError(ValueError):
    """An agent submitted an action outside its legal mask."""


def noop_action(n_dcs: int) -> int:
    return n_dcs + 1


def n_actions(n_dcs: int) -> int:
    """Action-space size including the forced no-op slot."""
    return n_dcs + 2


@dataclass
class GlobalState:
    """Shared observation: head-job, capacity, queue, and venue features.

    Arrays are indexed by region. ``to_vector`` flattens to 7N + 2 floats
    (slot time and step-within-slot appended) scaled to near-unit range.
    """

    head_gpus: np.ndarray
    head_duration: np.ndarray
    head_slack: np.ndarray
    available_gpus: np.ndarray
    queued_demand: np.ndarray
    price: np.ndarray
    intensity: np.ndarray
    t: int
    k_in_slot: int

    @property
    def n_dcs(self) -> int:
        return int(self.head_gpus.size)

    def to_vector(self, scales: NormScales) -> np.ndarray:
        n = self.n_dcs
        out = np.empty(7 * n + 2)
        per_dc = np.stack(
            [
                self.head_gpus / scales.gpus,
                self.head_duration / scales.duration,
                self.head_slack / scales.duration,
                self.available_gpus / scales.gpus,
                self.queued_demand / scales.gpus,
                self.price / scales.price,
                self.intensity / scales.carbon,
            ],
            axis=1,
        )
        out[: 7 * n] = per_dc.reshape(-1)
        out[7 * n] = self.t / scales.time
        out[7 * n + 1] = self.k_in_slot / scales.step
        return out


@dataclass
class StepOutcome:
    next_state: GlobalState
    rewards: np.ndarray  # one identical USD value per agent
    done: bool
    info: dict = field(default_factory=dict)


@dataclass
class _Transit:
    deliver_min: int
    seq: int
    job: Job
    dest: int


class ClusterEnv:
    """One episode of the scheduling MDP; strictly single-threaded."""

    def __init__(self, world: World, jobs: list[Job], k_max: int = 0):
        if world.n_dcs < 1:
            raise ValueError("world must have at least one region")
        self.world = world
        self.k_max = int(k_max)  # 0 = no step limit
        self._pristine = [self._copy_job(j) for j in jobs]
        self.reset()

    @staticmethod
    def _copy_job(j: Job) -> Job:
        return Job(
            id=j.id, src_dc=j.src_dc, data_gb=j.data_gb, model_gb=j.model_gb,
            arrival_min=j.arrival_min, gpus=j.gpus, duration_min=j.duration_min,
            slack_min=j.slack_min,
        )

    # --- lifecycle ---

    def reset(self) -> GlobalState:
        self.dcs = [bp.make_dc() for bp in self.world.blueprints]
        self.jobs = [self._copy_job(j) for j in self._pristine]
        self._jobs_by_id = {}
        for j in self.jobs:
            if j.src_dc >= len(self.dcs):
                raise ValueError(f"job {j.id}: src_dc {j.src_dc} out of range")
            if j.id in self._jobs_by_id:
                raise ValueError(f"duplicate job id {j.id}")
            self._jobs_by_id[j.id] = j
        self._arrivals = {}
        for j in self.jobs:
            self._arrivals.setdefault(j.arrival_min, []).append(j)
        self.ledger = UtilityLedger(self.world.econ)
        self.t = 0
        self.k = 0
        self.k_in_slot = 0
        self._transits: list[_Transit] = []
        self._transit_seq = 0
        self._deferred: set[int] = set()
        self.done = False
        self.truncated = False
        self.counters = {
            "arrived": 0, "finished": 0, "failed": 0,
            "migrated": 0, "postponed": 0, "started": 0,
        }
        self.utilization_log: list[tuple[int, int, int, int]] = []
        self._enqueue_arrivals(0)
        if self.counters["arrived"] == len(self.jobs) == 0:
            self.done = True
        return self.observe()

    # --- observation and masks ---

    def observe(self) -> GlobalState:
        n = len(self.dcs)
        head_gpus = np.zeros(n)
        head_duration = np.zeros(n)
        head_slack = np.zeros(n)
        available = np.zeros(n)
        queued = np.zeros(n)
        price = np.zeros(n)
        intensity = np.zeros(n)
        t_lookup = min(self.t, self.world.horizon_min - 1)
        for dc in self.dcs:
            i = dc.id
            available[i] = dc.available_gpus
            queued[i] = sum(j.gpus for j in dc.queue)
            price[i] = dc.price_at(t_lookup)
            intensity[i] = dc.carbon_at(t_lookup)
            if dc.queue:
                head = dc.queue[0]
                head_gpus[i] = head.gpus
                head_duration[i] = head.duration_min
                head_slack[i] = latest_feasible_start(head, 0) - self.t
        return GlobalState(
            head_gpus, head_duration, head_slack, available, queued,
            price, intensity, self.t, self.k_in_slot,
        )

    def _schedulable(self, n: int) -> bool:
        return bool(self.dcs[n].queue) and n not in self._deferred and not self.done

    def _any_schedulable(self) -> bool:
        return any(self._schedulable(n) for n in range(len(self.dcs)))

    def legal_actions(self, n: int) -> np.ndarray:
        """Boolean mask over the N + 2 actions for region n's agent."""
        count = len(self.dcs)
        mask = np.zeros(n_actions(count), dtype=bool)
        if not self._schedulable(n):
            mask[noop_action(count)] = True
            return mask
        dc = self.dcs[n]
        head = dc.queue[0]
        mask[0] = True  # postpone is always available
        for d in range(count):
            if d == n:
                retrieval = self._retrieval_delay(head, d)
                fits = dc.available_gpus >= head.gpus
                in_time = self.t <= latest_feasible_start(head, retrieval)
                mask[1 + d] = fits and in_time
            else:
                mask[1 + d] = True
        return mask

    def legal_masks(self) -> np.ndarray:
        return np.stack([self.legal_actions(n) for n in range(len(self.dcs))])

    def _retrieval_delay(self, job: Job, dest: int) -> int:
        if dest == job.src_dc:
            return 0
        link = self.world.links[(dest, job.src_dc)]
        return link_delay_min(link, job.model_gb)

    # --- stepping ---

    def step(self, actions) -> StepOutcome:
        if self.done:
            raise RuntimeError("episode is done; call reset()")
        count = len(self.dcs)
        actions = list(actions)
        if len(actions) != count:
            raise IllegalActionError(
                f"expected {count} actions, got {len(actions)}"
            )
        masks = [self.legal_actions(n) for n in range(count)]
        for n, a in enumerate(actions):
            if a < 0 or a >= n_actions(count) or not masks[n][a]:
                raise IllegalActionError(
                    f"agent {n}: action {a} is illegal in the current state"
                )
        u_before = self.ledger.utility()
        step_k = self.k
        for n, a in enumerate(actions):
            if not self._schedulable(n):
                continue
            if a == 0:
                self._deferred.add(n)
                self.counters["postponed"] += 1
            else:
                dest = a - 1
                if dest == n:
                    self._start_job(n)
                else:
                    self._migrate_job(n, dest, step_k)
        if not self._any_schedulable():
            self._advance_slot(step_k)
            self.k_in_slot = 0
        else:
            self.k_in_slot += 1
        self.k += 1
        reward = self.ledger.utility() - u_before
        self.ledger.record_step(step_k, reward)
        if self.counters["finished"] + self.counters["failed"] == len(self.jobs):
            self.done = True
        if self.t >= self.world.horizon_min:
            self.done = True
        if self.k_max and self.k >= self.k_max and not self.done:
            self.done = True
            self.truncated = True
        self._check_conservation()
        info = {
            "t": self.t,
            "k": self.k,
            "truncated": self.truncated,
            "utilization": np.array(
                [dc.used_gpus / dc.r_max for dc in self.dcs]
            ),
            **self.counters,
        }
        rewards = np.full(count, reward)
        return StepOutcome(self.observe(), rewards, self.done, info)

    def _start_job(self, n: int) -> None:
        dc = self.dcs[n]
        job = dc.queue.popleft()
        retrieval = self._retrieval_delay(job, n)
        assert self.t <= latest_feasible_start(job, retrieval), (
            f"job {job.id} started past its slack at t={self.t}"
        )
        assert dc.available_gpus >= job.gpus, (
            f"job {job.id} overcommits region {n}"
        )
        job.set_status(RUNNING)
        job.start_min = self.t
        job.dest_dc = n
        dc.used_gpus += job.gpus
        dc.running[job.id] = self.t + job.duration_min
        self.counters["started"] += 1
        self.ledger.record_event(self.t, self.k, n, "start", job.id)

    def _migrate_job(self, n: int, dest: int, step_k: int) -> None:
        dc = self.dcs[n]
        job = dc.queue.popleft()
        link = self.world.links[(n, dest)]
        t_lookup = min(self.t, self.world.horizon_min - 1)
        self.ledger.charge_migration(
            job, link,
            self.dcs[n].carbon_at(t_lookup), self.dcs[dest].carbon_at(t_lookup),
            t=self.t, step=step_k,
        )
        delay = link_delay_min(link, job.payload_gb)
        job.add_delay(delay)
        job.set_status(IN_TRANSIT)
        self._transits.append(
            _Transit(self.t + delay, self._transit_seq, job, dest)
        )
        self._transit_seq += 1
        self.counters["migrated"] += 1

    # --- slot rollover ---

    def _advance_slot(self, step_k: int) -> None:
        t_old = self.t
        for dc in self.dcs:
            self.utilization_log.append((t_old, dc.id, dc.used_gpus, dc.r_max))
        self.ledger.settle_slot(self.dcs, t_old, step=step_k)
        self.t = t_new = t_old + 1
        # Release finished jobs and ship results home.
        for dc in self.dcs:
            due = sorted(jid for jid, rel in dc.running.items() if rel <= t_new)
            for jid in due:
                job = self._jobs_by_id[jid]
                del dc.running[jid]
                dc.used_gpus -= job.gpus
                assert job.start_min <= latest_feasible_start(
                    job, self._retrieval_delay(job, dc.id)
                ), f"job {jid} finished in breach of its slack"
                job.set_status(FINISHED)
                self.counters["finished"] += 1
                self.ledger.record_event(t_new, step_k, dc.id, "finish", jid)
                if dc.id != job.src_dc:
                    link = self.world.links[(dc.id, job.src_dc)]
                    # Priced at the job's final running slot, t_new - 1.
                    self.ledger.charge_retrieval(
                        job, link,
                        dc.carbon_at(t_new - 1),
                        self.dcs[job.src_dc].carbon_at(t_new - 1),
                        t=t_new, step=step_k,
                    )
        # Deliver transits due by now, in dispatch order.
        due_transits = [tr for tr in self._transits if tr.deliver_min <= t_new]
        self._transits = [tr for tr in self._transits if tr.deliver_min > t_new]
        for tr in sorted(due_transits, key=lambda x: (x.deliver_min, x.seq)):
            tr.job.set_status(QUEUED)
            self.dcs[tr.dest].queue.append(tr.job)
            self.ledger.record_event(t_new, step_k, tr.dest, "deliver", tr.job.id)
        self._enqueue_arrivals(t_new)
        # Drop queued jobs that can no longer start anywhere in time.
        for dc in self.dcs:
            survivors = []
            for job in dc.queue:
                if latest_feasible_start(job, 0) < t_new:
                    job.set_status(FAILED)
                    self.counters["failed"] += 1
                    self.ledger.record_event(t_new, step_k, dc.id, "fail", job.id)
                else:
                    survivors.append(job)
            if len(survivors) != len(dc.queue):
                dc.queue.clear()
                dc.queue.extend(survivors)
        self._deferred.clear()
        for dc in self.dcs:
            assert 0 <= dc.used_gpus <= dc.r_max, (
                f"region {dc.id} capacity breached: {dc.used_gpus}/{dc.r_max}"
            )

    def _enqueue_arrivals(self, t: int) -> None:
        for job in self._arrivals.get(t, ()):
            self.dcs[job.src_dc].queue.append(job)
            self.counters["arrived"] += 1

    def _check_conservation(self) -> None:
        queued = sum(len(dc.queue) for dc in self.dcs)
        running = sum(len(dc.running) for dc in self.dcs)
        transit = len(self._transits)
        terminal = self.counters["finished"] + self.counters["failed"]
        assert queued + running + transit + terminal == self.counters["arrived"], (
            "job conservation violated"
        )

    # --- exports ---

    def write_utilization_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["t", "dc", "used_gpus", "r_max", "utilization"])
            for t, dc, used, r_max in self.utilization_log:
                writer.writerow([t, dc, used, r_max, repr(used / r_max)])
