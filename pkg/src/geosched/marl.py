"""Per-agent discrete soft actor-critic, a DQN baseline, and the loops.

Every agent owns an actor over the N + 2 discrete actions, twin critics
with polyak-averaged targets, and its own replay buffer; all agents share
the global state and the global reward. Critic targets take the exact
expectation over the masked categorical (no sampling is needed with
discrete actions). The DQN baseline uses one online/target pair per agent
with epsilon-greedy exploration and periodic hard copies.
"""

from __future__ import annotations

import csv
import hashlib
import pickle
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import (
    DOMAIN_AGENT,
    DOMAIN_POLICY,
    DOMAIN_UPDATE,
    EVAL_WORKLOAD_INDEX,
    VALIDATION_WORKLOAD_INDEX,
    TrainingSettings,
    World,
    rng_for,
    seed_int,
    workload_digest,
)
from .environment import ClusterEnv
from .nets import Adam, DenseNet, load_net, polyak, save_net
from .policies import run_episode


# --- masked categorical helpers ---

def masked_log_probs(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Log softmax over legal actions; illegal entries come back -inf."""
    logits = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    mask = np.atleast_2d(mask)
    if not mask.any(axis=1).all():
        raise ValueError("a state with no legal action reached the policy")
    z = np.where(mask, logits, -np.inf)
    zmax = z.max(axis=1, keepdims=True)
    lse = zmax + np.log(np.exp(z - zmax).sum(axis=1, keepdims=True))
    return z - lse


def masked_probs(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    lp = masked_log_probs(logits, mask)
    return np.where(np.atleast_2d(mask), np.exp(lp), 0.0)


def sample_masked(logits: np.ndarray, mask: np.ndarray, rng) -> int:
    p = masked_probs(logits, mask)[0]
    return int(rng.choice(p.size, p=p / p.sum()))


def argmax_masked(values: np.ndarray, mask: np.ndarray) -> int:
    """Highest legal value; ties break to the lowest action index."""
    v = np.where(mask, np.asarray(values, dtype=np.float64), -np.inf)
    return int(np.argmax(v))


# --- replay ---

@dataclass
class Transition:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    terminal: bool
    mask: np.ndarray
    next_mask: np.ndarray


class ReplayBuffer:
    """Bounded FIFO ring with uniform sampling."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.data: list[Transition] = []
        self.pos = 0

    def __len__(self) -> int:
        return len(self.data)

    def append(self, tr: Transition) -> None:
        if len(self.data) < self.capacity:
            self.data.append(tr)
        else:
            self.data[self.pos] = tr
        self.pos = (self.pos + 1) % self.capacity

    def sample(self, batch_size: int, rng) -> list[Transition]:
        if not self.data:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, len(self.data), size=batch_size)
        return [self.data[i] for i in idx]

    def state_dict(self) -> dict:
        return {"capacity": self.capacity, "data": self.data, "pos": self.pos}

    def load_state_dict(self, state: dict) -> None:
        self.capacity = state["capacity"]
        self.data = state["data"]
        self.pos = state["pos"]


def _stack_batch(batch: list[Transition]):
    s = np.stack([tr.state for tr in batch])
    a = np.array([tr.action for tr in batch], dtype=np.int64)
    r = np.array([tr.reward for tr in batch])
    s2 = np.stack([tr.next_state for tr in batch])
    term = np.array([tr.terminal for tr in batch], dtype=np.float64)
    m = np.stack([tr.mask for tr in batch])
    m2 = np.stack([tr.next_mask for tr in batch])
    return s, a, r, s2, term, m, m2


# --- soft actor-critic ---

def sac_critic_target(
    rewards, next_states, terminal, next_masks,
    actor: DenseNet, q1_target: DenseNet, q2_target: DenseNet,
    temperature: float, gamma: float,
) -> np.ndarray:
    """y = r + gamma (1 - term) E_a~pi [min(Q1t, Q2t) - temp log pi]."""
    lp = masked_log_probs(actor.forward(next_states), next_masks)
    p = np.where(next_masks, np.exp(lp), 0.0)
    safe_lp = np.where(next_masks, lp, 0.0)
    qmin = np.minimum(q1_target.forward(next_states), q2_target.forward(next_states))
    soft_value = (p * (qmin - temperature * safe_lp)).sum(axis=1)
    return rewards + gamma * (1.0 - terminal) * soft_value


def critic_loss_grads(net: DenseNet, s, a, y):
    """Mean squared error of Q(s,a) against a fixed target, with grads."""
    rows = np.arange(len(a))
    qv, cache = net.forward_cached(s)
    diff = qv[rows, a] - y
    loss = float(np.mean(diff**2))
    dq = np.zeros_like(qv)
    dq[rows, a] = 2.0 * diff / len(a)
    gw, gb, _ = net.backward(cache, dq)
    return loss, gw, gb


def sac_actor_loss_grads(actor: DenseNet, s, masks, qmin, temperature: float):
    """Loss E_s sum_a pi (temp log pi - min Q) and its actor gradients.

    The softmax constant cancels, leaving dL/dz_j = p_j (g_j - sum_a p_a g_a)
    per state with g = temp log pi - qmin.
    """
    logits, cache = actor.forward_cached(s)
    lp = masked_log_probs(logits, masks)
    p = np.where(masks, np.exp(lp), 0.0)
    safe_lp = np.where(masks, lp, 0.0)
    g = temperature * safe_lp - qmin
    per_state = (p * g).sum(axis=1, keepdims=True)
    loss = float(np.mean(per_state))
    dlogits = p * (g - per_state) / len(s)
    gw, gb, _ = actor.backward(cache, dlogits)
    entropy = -(p * safe_lp).sum(axis=1)
    return loss, gw, gb, entropy


def dqn_critic_target(
    rewards, next_states, terminal, next_masks, q_target: DenseNet, gamma: float,
) -> np.ndarray:
    """y = r + gamma (1 - term) max over legal a' of Q_target(s', a')."""
    qt_next = np.where(next_masks, q_target.forward(next_states), -np.inf).max(axis=1)
    return rewards + gamma * (1.0 - terminal) * qt_next


class SacAgent:
    def __init__(self, obs_dim: int, n_actions: int, tr: TrainingSettings, seed: int):
        rng = np.random.default_rng(seed)
        sizes = (obs_dim, *tr.hidden_sizes, n_actions)
        self.actor = DenseNet.random(sizes, rng)
        self.q1 = DenseNet.random(sizes, rng)
        self.q2 = DenseNet.random(sizes, rng)
        self.q1t = self.q1.copy()
        self.q2t = self.q2.copy()
        self.opt_actor = Adam(self.actor, tr.actor_lr)
        self.opt_q1 = Adam(self.q1, tr.critic_lr)
        self.opt_q2 = Adam(self.q2, tr.critic_lr)
        self.log_temp = float(np.log(tr.init_temperature))
        self.temp_lr = tr.critic_lr
        self.auto_temperature = tr.auto_temperature
        self.target_entropy_scale = tr.target_entropy_scale
        self.gamma = tr.gamma
        self.tau = tr.tau
        self.buffer = ReplayBuffer(tr.buffer_capacity)

    @property
    def temperature(self) -> float:
        return float(np.exp(self.log_temp))

    def act(self, vec: np.ndarray, mask: np.ndarray, rng=None, greedy: bool = False) -> int:
        logits = self.actor.forward(vec)
        if greedy:
            p = masked_probs(logits, mask)[0]
            return int(np.argmax(p))
        return sample_masked(logits, mask, rng)

    def update(self, batch: list[Transition]) -> dict:
        s, a, r, s2, term, m, m2 = _stack_batch(batch)
        temp = self.temperature
        y = sac_critic_target(
            r, s2, term, m2, self.actor, self.q1t, self.q2t, temp, self.gamma
        )
        critic_losses = []
        for net, opt in ((self.q1, self.opt_q1), (self.q2, self.opt_q2)):
            loss, gw, gb = critic_loss_grads(net, s, a, y)
            critic_losses.append(loss)
            opt.step(net, gw, gb)
        qmin = np.minimum(self.q1.forward(s), self.q2.forward(s))
        actor_loss, gw, gb, h = sac_actor_loss_grads(self.actor, s, m, qmin, temp)
        self.opt_actor.step(self.actor, gw, gb)
        entropy = float(np.mean(h))
        if self.auto_temperature:
            target_h = self.target_entropy_scale * np.log(m.sum(axis=1))
            self.log_temp -= self.temp_lr * temp * float(np.mean(h - target_h))
        polyak(self.q1t, self.q1, self.tau)
        polyak(self.q2t, self.q2, self.tau)
        stats = {
            "critic1_loss": critic_losses[0],
            "critic2_loss": critic_losses[1],
            "actor_loss": actor_loss,
            "entropy": entropy,
            "temperature": self.temperature,
        }
        if not all(np.isfinite(v) for v in stats.values()):
            raise ArithmeticError(f"non-finite update statistics: {stats}")
        return stats

    def nets(self) -> dict:
        return {
            "actor": self.actor, "q1": self.q1, "q2": self.q2,
            "q1t": self.q1t, "q2t": self.q2t,
        }

    def params_finite(self) -> bool:
        return all(
            np.isfinite(w).all() for net in self.nets().values()
            for w in (*net.weights, *net.biases)
        )

    def state_dict(self) -> dict:
        return {
            "nets": {k: (v.sizes, v.weights, v.biases) for k, v in self.nets().items()},
            "opt_actor": self.opt_actor.state_dict(),
            "opt_q1": self.opt_q1.state_dict(),
            "opt_q2": self.opt_q2.state_dict(),
            "log_temp": self.log_temp,
            "buffer": self.buffer.state_dict(),
        }

    def load_state_dict(self, state: dict) -> None:
        for name, (sizes, weights, biases) in state["nets"].items():
            net = getattr(self, name)
            net.sizes = tuple(sizes)
            net.weights = [w.copy() for w in weights]
            net.biases = [b.copy() for b in biases]
        self.opt_actor.load_state_dict(state["opt_actor"])
        self.opt_q1.load_state_dict(state["opt_q1"])
        self.opt_q2.load_state_dict(state["opt_q2"])
        self.log_temp = state["log_temp"]
        self.buffer.load_state_dict(state["buffer"])


# --- DQN baseline ---

class DqnAgent:
    def __init__(self, obs_dim: int, n_actions: int, tr: TrainingSettings, seed: int):
        rng = np.random.default_rng(seed)
        sizes = (obs_dim, *tr.hidden_sizes, n_actions)
        self.q = DenseNet.random(sizes, rng)
        self.qt = self.q.copy()
        self.opt = Adam(self.q, tr.critic_lr)
        self.gamma = tr.gamma
        self.copy_every = tr.updates_per_epoch
        self.updates = 0
        self.epsilon = tr.epsilon_start
        self.buffer = ReplayBuffer(tr.buffer_capacity)

    def act(self, vec: np.ndarray, mask: np.ndarray, rng=None, greedy: bool = False) -> int:
        if not greedy and rng is not None and rng.random() < self.epsilon:
            return int(rng.choice(np.flatnonzero(mask)))
        return argmax_masked(self.q.forward(vec), mask)

    def update(self, batch: list[Transition]) -> dict:
        s, a, r, s2, term, _, m2 = _stack_batch(batch)
        y = dqn_critic_target(r, s2, term, m2, self.qt, self.gamma)
        loss, gw, gb = critic_loss_grads(self.q, s, a, y)
        self.opt.step(self.q, gw, gb)
        self.updates += 1
        if self.updates % self.copy_every == 0:
            self.qt = self.q.copy()
        if not np.isfinite(loss):
            raise ArithmeticError(f"non-finite DQN loss {loss}")
        return {"q_loss": loss}

    def nets(self) -> dict:
        return {"q1": self.q, "q1t": self.qt}

    def params_finite(self) -> bool:
        return all(
            np.isfinite(w).all() for net in self.nets().values()
            for w in (*net.weights, *net.biases)
        )

    def state_dict(self) -> dict:
        return {
            "nets": {"q": (self.q.sizes, self.q.weights, self.q.biases),
                     "qt": (self.qt.sizes, self.qt.weights, self.qt.biases)},
            "opt": self.opt.state_dict(),
            "updates": self.updates,
            "epsilon": self.epsilon,
            "buffer": self.buffer.state_dict(),
        }

    def load_state_dict(self, state: dict) -> None:
        for name, (sizes, weights, biases) in state["nets"].items():
            net = getattr(self, name)
            net.sizes = tuple(sizes)
            net.weights = [w.copy() for w in weights]
            net.biases = [b.copy() for b in biases]
        self.opt.load_state_dict(state["opt"])
        self.updates = state["updates"]
        self.epsilon = state["epsilon"]
        self.buffer.load_state_dict(state["buffer"])


# --- collection ---

def _spec_action(spec: dict, n: int, vec: np.ndarray, mask: np.ndarray, rng) -> int:
    if spec["algo"] == "masac":
        logits = spec["actors"][n].forward(vec)
        if spec.get("greedy"):
            return int(np.argmax(masked_probs(logits, mask)[0]))
        return sample_masked(logits, mask, rng)
    if not spec.get("greedy") and rng.random() < spec["epsilon"]:
        return int(rng.choice(np.flatnonzero(mask)))
    return argmax_masked(spec["qs"][n].forward(vec), mask)


def _joint_action(spec: dict, vec: np.ndarray, masks: np.ndarray, rng) -> list[int]:
    return [
        _spec_action(spec, n, vec, masks[n], rng) for n in range(masks.shape[0])
    ]


def _collect_episode(args) -> tuple[list, dict]:
    """Roll one full episode; returns shared-step tuples and episode stats.

    Module-level so process pools can run environments in parallel; results
    are merged in submission order, keeping training deterministic.
    """
    world, env_index, k_max, spec, sample_seed, reward_scale = args
    env = ClusterEnv(world, world.jobs_for(env_index), k_max=k_max)
    rng = np.random.default_rng(sample_seed)
    scales = world.scales
    steps = []
    vec = env.observe().to_vector(scales)
    masks = env.legal_masks()
    while not env.done:
        actions = _joint_action(spec, vec, masks, rng)
        out = env.step(actions)
        nvec = out.next_state.to_vector(scales)
        nmasks = env.legal_masks()
        terminal = out.done and not out.info["truncated"]
        steps.append(
            (vec, tuple(actions), float(out.rewards[0]) / reward_scale,
             nvec, terminal, masks, nmasks)
        )
        vec, masks = nvec, nmasks
    stats = {
        "steps": len(steps),
        "utility": env.ledger.utility(),
        "finished": env.counters["finished"],
        "failed": env.counters["failed"],
        "migrated": env.counters["migrated"],
    }
    return steps, stats


# --- training loop ---

TRAINER_STATE = "trainer_state.pkl"
TRAINING_LOG = "training_log.csv"


def make_agents(world: World, tr: TrainingSettings, algo: str, master_seed: int):
    obs_dim = 7 * world.n_dcs + 2
    n_act = world.n_dcs + 2
    cls = SacAgent if algo == "masac" else DqnAgent
    return [
        cls(obs_dim, n_act, tr, seed_int(master_seed, DOMAIN_AGENT, n))
        for n in range(world.n_dcs)
    ]


def _collection_spec(agents, algo: str, greedy: bool = False) -> dict:
    if algo == "masac":
        return {"algo": algo, "actors": [a.actor for a in agents], "greedy": greedy}
    return {
        "algo": algo, "qs": [a.q for a in agents],
        "epsilon": agents[0].epsilon, "greedy": greedy,
    }


def save_checkpoints(agents, ckpt_dir: Path) -> None:
    ckpt_dir.mkdir(parents=True, exist_ok=True)
    for n, agent in enumerate(agents):
        for name, net in agent.nets().items():
            save_net(net, ckpt_dir / f"agent{n}_{name}.npz")


def load_policy_from_checkpoints(ckpt_dir: Path, n_agents: int, algo: str):
    """Greedy evaluation policy from saved nets; no optimizer state needed."""
    ckpt_dir = Path(ckpt_dir)
    net_name = "actor" if algo == "masac" else "q1"
    nets = [load_net(ckpt_dir / f"agent{n}_{net_name}.npz") for n in range(n_agents)]
    if algo == "masac":
        return {"algo": "masac", "actors": nets, "greedy": True}
    return {"algo": "madqn", "qs": nets, "epsilon": 0.0, "greedy": True}


class SpecPolicy:
    """Adapts a collection spec to the (state, n, mask) policy interface."""

    def __init__(self, spec: dict, scales, rng=None):
        self.spec = spec
        self.scales = scales
        self.rng = rng

    def __call__(self, state, n, mask):
        vec = state.to_vector(self.scales)
        return _spec_action(self.spec, n, vec, mask, self.rng)


def _write_log(rows: list[dict], path: Path) -> None:
    if not rows:
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = list(rows[0].keys())
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [repr(v) if isinstance(v, float) else v for v in (row[c] for c in header)]
            )


def train(
    world: World,
    tr: TrainingSettings,
    algo: str,
    out_dir,
    master_seed: int,
    epochs: int | None = None,
    parallel: int = 1,
    resume: bool = False,
) -> dict:
    """Alternate collection epochs and update phases; checkpoint each epoch."""
    if algo not in ("masac", "madqn"):
        raise ValueError(f"unknown algorithm {algo!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ckpt_dir = out / "checkpoints"
    total_epochs = epochs if epochs is not None else tr.epochs
    state_path = out / TRAINER_STATE
    agents = make_agents(world, tr, algo, master_seed)
    start_epoch = 0
    log_rows: list[dict] = []
    if resume:
        if not state_path.exists():
            raise FileNotFoundError(f"no trainer state at {state_path}")
        with open(state_path, "rb") as fh:
            saved = pickle.load(fh)
        if saved["algo"] != algo:
            raise ValueError(f"checkpoint is for {saved['algo']}, not {algo}")
        for agent, st in zip(agents, saved["agents"]):
            agent.load_state_dict(st)
        start_epoch = saved["epoch"]
        log_rows = saved["log_rows"]
    half = max(1, total_epochs // 2)
    for epoch in range(start_epoch, total_epochs):
        if algo == "madqn":
            frac = min(1.0, epoch / half)
            eps = tr.epsilon_start + (tr.epsilon_end - tr.epsilon_start) * frac
            for agent in agents:
                agent.epsilon = eps
        spec = _collection_spec(agents, algo)
        tasks = [
            (world, i, tr.k_max, spec,
             seed_int(master_seed, DOMAIN_POLICY, epoch * tr.n_envs + i),
             tr.reward_scale)
            for i in range(tr.n_envs)
        ]
        if parallel > 1:
            with ProcessPoolExecutor(max_workers=parallel) as pool:
                episodes = list(pool.map(_collect_episode, tasks))
        else:
            episodes = [_collect_episode(t) for t in tasks]
        total_steps = 0
        total_reward = 0.0
        for steps, stats in episodes:
            total_steps += stats["steps"]
            total_reward += stats["utility"]
            for vec, actions, r, nvec, term, masks, nmasks in steps:
                for n, agent in enumerate(agents):
                    agent.buffer.append(
                        Transition(vec, actions[n], r, nvec, term, masks[n], nmasks[n])
                    )
        upd_rng = rng_for(master_seed, DOMAIN_UPDATE, epoch)
        agg: list[dict] = [dict() for _ in agents]
        n_upd = 0
        for _ in range(tr.updates_per_epoch):
            if any(len(a.buffer) < tr.batch_size for a in agents):
                continue
            n_upd += 1
            for n, agent in enumerate(agents):
                batch = agent.buffer.sample(tr.batch_size, upd_rng)
                for key, val in agent.update(batch).items():
                    agg[n][key] = agg[n].get(key, 0.0) + val
        for n, agent in enumerate(agents):
            if not agent.params_finite():
                raise ArithmeticError(
                    f"agent {n} diverged in epoch {epoch}; "
                    f"last good checkpoint kept in {ckpt_dir}"
                )
        val_steps, val_stats = _collect_episode(
            (world, VALIDATION_WORKLOAD_INDEX, tr.k_max,
             _collection_spec(agents, algo, greedy=True), 0, 1.0)
        )
        row = {
            "epoch": epoch,
            "steps": total_steps,
            "avg_step_reward": total_reward / max(1, total_steps),
            "validation_reward": val_stats["utility"],
        }
        if algo == "madqn":
            row["epsilon"] = agents[0].epsilon
        for n in range(len(agents)):
            for key in sorted(agg[n]):
                row[f"{key}_a{n}"] = agg[n][key] / max(1, n_upd)
        log_rows.append(row)
        save_checkpoints(agents, ckpt_dir)
        _write_log(log_rows, out / TRAINING_LOG)
        with open(state_path, "wb") as fh:
            pickle.dump(
                {
                    "algo": algo,
                    "epoch": epoch + 1,
                    "agents": [a.state_dict() for a in agents],
                    "log_rows": log_rows,
                },
                fh,
            )
    return {
        "log_path": out / TRAINING_LOG,
        "checkpoint_dir": ckpt_dir,
        "epochs_run": total_epochs - start_epoch,
        "log_rows": log_rows,
    }


# --- evaluation ---

COMPARISON_COLUMNS = [
    "scenario", "utility_usd", "u1_gpu_profit", "u2_idle_cost", "u3_carbon_cost",
    "u4_migration_cost", "u5_retrieval_cost", "gpu_hours",
    "cost_efficiency_usd_per_gpu_hour", "carbon_efficiency_g_per_gpu_hour",
    "jobs_finished", "jobs_failed", "migrations", "workload_digest",
]


def evaluate(
    world: World,
    policies: dict,
    n_envs: int,
    out_dir=None,
) -> list[dict]:
    """Run every scenario on the same held-out workloads; aggregate metrics.

    Episodes run without a step limit until every job is finished or
    dropped. Efficiency ratios are pooled over environments; additive
    metrics are means per environment.
    """
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    workloads = [world.jobs_for(EVAL_WORKLOAD_INDEX + i) for i in range(n_envs)]
    digest = hashlib.sha256(
        "".join(workload_digest(jobs) for jobs in workloads).encode()
    ).hexdigest()
    rows = []
    for name, policy in policies.items():
        acc = {key: 0.0 for key in COMPARISON_COLUMNS[1:-1]}
        energy_cost = 0.0
        carbon = 0.0
        for i, jobs in enumerate(workloads):
            env = ClusterEnv(world, jobs, k_max=0)
            run_episode(env, policy)
            led = env.ledger
            acc["utility_usd"] += led.utility()
            acc["u1_gpu_profit"] += led.u1_gpu_profit
            acc["u2_idle_cost"] += led.u2_idle_cost
            acc["u3_carbon_cost"] += led.u3_carbon_cost
            acc["u4_migration_cost"] += led.u4_migration_cost
            acc["u5_retrieval_cost"] += led.u5_retrieval_cost
            acc["gpu_hours"] += led.gpu_hours
            acc["jobs_finished"] += env.counters["finished"]
            acc["jobs_failed"] += env.counters["failed"]
            acc["migrations"] += env.counters["migrated"]
            energy_cost += led.energy_cost_usd
            carbon += led.carbon_grams
            if i == 0 and out is not None:
                env.write_utilization_csv(out / f"utilization_{name}.csv")
        row = {"scenario": name}
        for key in acc:
            row[key] = acc[key] / n_envs
        total_hours = acc["gpu_hours"]
        row["cost_efficiency_usd_per_gpu_hour"] = (
            energy_cost / total_hours if total_hours else 0.0
        )
        row["carbon_efficiency_g_per_gpu_hour"] = (
            carbon / total_hours if total_hours else 0.0
        )
        row["workload_digest"] = digest
        rows.append(row)
    if out is not None:
        with open(out / "comparison.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COMPARISON_COLUMNS)
            for row in rows:
                writer.writerow(
                    [
                        repr(row[c]) if isinstance(row[c], float) else row[c]
                        for c in COMPARISON_COLUMNS
                    ]
                )
    return rows
