"""Non-learned scheduling baselines and the shared policy interface.

A policy is a callable (state, region index, legal mask) -> action. All
baselines are stateless decision rules except RandomLegal, which owns a
seeded generator.
"""

from __future__ import annotations

import numpy as np

from .environment import ClusterEnv, GlobalState


class FcfsLocal:
    """Run every job at its source region as soon as GPUs allow; never migrate."""

    name = "local"
    stochastic = False

    def __call__(self, state: GlobalState, n: int, mask: np.ndarray) -> int:
        count = state.n_dcs
        if mask[count + 1]:
            return count + 1
        if mask[1 + n]:
            return 1 + n
        return 0


class _GreedyBase:
    """Execute locally when possible; otherwise migrate to the best remote
    region (by the subclass key) that has enough free GPUs; else postpone."""

    stochastic = False

    def _key(self, state: GlobalState) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, state: GlobalState, n: int, mask: np.ndarray) -> int:
        count = state.n_dcs
        if mask[count + 1]:
            return count + 1
        if mask[1 + n]:
            return 1 + n
        need = state.head_gpus[n]
        key = self._key(state)
        best = -1
        for d in range(count):
            if d == n or not mask[1 + d]:
                continue
            if state.available_gpus[d] < need:
                continue
            if best < 0 or key[d] < key[best]:
                best = d
        if best >= 0:
            return 1 + best
        return 0


class GreedyPrice(_GreedyBase):
    """Migration key: current energy price."""

    name = "price_greedy"

    def _key(self, state: GlobalState) -> np.ndarray:
        return state.price


class GreedyCarbon(_GreedyBase):
    """Migration key: current carbon intensity."""

    name = "carbon_greedy"

    def _key(self, state: GlobalState) -> np.ndarray:
        return state.intensity


class RandomLegal:
    """Uniform choice over the legal mask; exercises every code path."""

    name = "random"
    stochastic = True

    def __init__(self, seed=0):
        self.rng = np.random.default_rng(seed)

    def __call__(self, state: GlobalState, n: int, mask: np.ndarray) -> int:
        legal = np.flatnonzero(mask)
        return int(self.rng.choice(legal))


BASELINES = {
    "local": FcfsLocal,
    "price_greedy": GreedyPrice,
    "carbon_greedy": GreedyCarbon,
    "random": RandomLegal,
}


def run_episode(env: ClusterEnv, policy) -> ClusterEnv:
    """Roll one episode to completion under a single policy for all agents."""
    state = env.reset()
    while not env.done:
        actions = [
            policy(state, n, env.legal_actions(n)) for n in range(len(env.dcs))
        ]
        outcome = env.step(actions)
        state = outcome.next_state
    return env
