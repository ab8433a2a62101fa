# -*- coding: utf-8 -*-
r"""
Experience collection from a :class:`~expertac.environment.vector.VectorEnv`
and bootstrapped returns.

EXAMPLES::

    >>> import numpy as np
    >>> from expertac.learning.rollout import compute_returns, compute_advantages
    >>> compute_returns([[0.0, 0.0, 1.0]], [[False, False, True]], [5.0], 0.5).tolist()
    [[0.25, 0.5, 1.0]]
    >>> compute_returns([[0.0, 0.0, 0.0]], [[False, False, False]], [2.0], 0.9).round(12).tolist()
    [[1.458, 1.62, 1.8]]
    >>> compute_advantages([1.0, 2.0], [0.5, 3.0]).tolist()
    [0.5, -1.0]
"""
######################################################################
#  This file is part of expertac.
#
#        Copyright (C) 2026 The expertac developers
#
#  expertac is free software: you can redistribute it and/or modify
#  it under the terms of the GNU General Public License as published by
#  the Free Software Foundation, either version 2 of the License, or
#  (at your option) any later version.
#
#  expertac is distributed in the hope that it will be useful,
#  but WITHOUT ANY WARRANTY; without even the implied warranty of
#  MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#  GNU General Public License for more details.
#
#  You should have received a copy of the GNU General Public License
#  along with expertac. If not, see <https://www.gnu.org/licenses/>.
######################################################################
import dataclasses

import numpy as np

from .policy import forward, sample_actions


@dataclasses.dataclass(frozen=True, eq=False)
class RolloutBatch:
    r"""
    ``T`` steps of ``N`` actors.

    Per-step arrays have shape ``N x T`` (``observations`` has an extra
    trailing axis); ``bootstrap_values`` holds the value estimate of the
    state each actor reached after the last step. ``episodes`` lists the
    episodes that finished during collection.
    """
    observations: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    dones: np.ndarray
    values: np.ndarray
    bootstrap_values: np.ndarray
    returns: np.ndarray
    advantages: np.ndarray
    episodes: tuple = ()

    @property
    def num_actors(self):
        return self.actions.shape[0]

    @property
    def horizon(self):
        return self.actions.shape[1]

    @property
    def size(self):
        return self.actions.size

    def flat_observations(self):
        r"""
        Return the observations as a ``N*T x D`` matrix, actor-major, in the
        order of the ``flat_*`` accessors.
        """
        return self.observations.reshape(self.size, -1)

    def flat(self, name):
        return getattr(self, name).reshape(self.size)

    def permuted(self, order):
        r"""
        Return the batch with actor rows reordered by ``order``.
        """
        order = np.asarray(order)
        return dataclasses.replace(self,
                                   observations=self.observations[order],
                                   actions=self.actions[order],
                                   rewards=self.rewards[order],
                                   dones=self.dones[order],
                                   values=self.values[order],
                                   bootstrap_values=self.bootstrap_values[order],
                                   returns=self.returns[order],
                                   advantages=self.advantages[order])


def compute_returns(rewards, dones, bootstrap_values, gamma):
    r"""
    Return the ``n``-step bootstrapped returns along the last axis.

    ``R_t = r_t + gamma * (1 - done_t) * R_{t+1}`` with ``R_T`` the bootstrap
    value; a ``done`` step contributes no continuation, so nothing after an
    episode boundary leaks into the steps before it.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1], got {}".format(gamma))
    rewards = np.asarray(rewards, dtype=np.float64)
    dones = np.asarray(dones, dtype=bool)
    if dones.shape != rewards.shape:
        raise ValueError("rewards have shape {} but dones {}".format(rewards.shape, dones.shape))
    running = np.array(bootstrap_values, dtype=np.float64).reshape(rewards.shape[:-1])
    returns = np.empty_like(rewards)
    for t in reversed(range(rewards.shape[-1])):
        running = rewards[..., t] + gamma * np.where(dones[..., t], 0.0, running)
        returns[..., t] = running
    return returns


def compute_advantages(returns, values):
    r"""
    Return ``returns - values``.
    """
    returns = np.asarray(returns, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if returns.shape != values.shape:
        raise ValueError("returns have shape {} but values {}".format(returns.shape, values.shape))
    return returns - values


def collect(net, venv, horizon, gamma, rng):
    r"""
    Run every actor of ``venv`` for ``horizon`` steps with actions sampled
    from ``net`` and return a :class:`RolloutBatch`.

    EXAMPLES::

        >>> import numpy as np
        >>> from expertac.environment import grid_environments, VectorEnv
        >>> from expertac.learning.policy import PolicyNet
        >>> from expertac.learning.rollout import collect
        >>> spec = grid_environments.open_room(3, 3)
        >>> venv = VectorEnv(spec, num_envs=4, seed=0)
        >>> net = PolicyNet.initial(spec.stack_dim, spec.action_count, hidden=(8,), seed=0)
        >>> batch = collect(net, venv, 5, 0.99, np.random.default_rng(0))
        >>> batch.actions.shape, batch.observations.shape[2] == spec.stack_dim
        ((4, 5), True)
        >>> bool(np.array_equal(batch.advantages, batch.returns - batch.values))
        True
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1, got {}".format(horizon))
    n = venv.num_envs
    observations = np.empty((n, horizon, venv.spec.stack_dim))
    actions = np.empty((n, horizon), dtype=np.int64)
    rewards = np.empty((n, horizon))
    dones = np.empty((n, horizon), dtype=bool)
    values = np.empty((n, horizon))
    before = len(venv.completed)
    for t in range(horizon):
        trace = forward(net, venv.observations)
        chosen = sample_actions(trace.probabilities, rng)
        observations[:, t] = venv.observations
        actions[:, t] = chosen
        values[:, t] = trace.values
        results = venv.step(chosen)
        rewards[:, t] = [r.reward for r in results]
        dones[:, t] = [r.done for r in results]
    bootstrap = forward(net, venv.observations).values
    returns = compute_returns(rewards, dones, bootstrap, gamma)
    return RolloutBatch(observations=observations,
                        actions=actions,
                        rewards=rewards,
                        dones=dones,
                        values=values,
                        bootstrap_values=bootstrap,
                        returns=returns,
                        advantages=compute_advantages(returns, values),
                        episodes=tuple(venv.drain_completed()[before:]))
