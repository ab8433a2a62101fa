# -*- coding: utf-8 -*-
r"""
Evaluation of a policy by complete episodes from the fixed start.

EXAMPLES::

    >>> from expertac.harness.evaluation import EvalReport
    >>> r = EvalReport.from_episodes([0.0, 1.0, 1.0, 1.0, 1.0], [False, True, True, True, True], 'greedy')
    >>> r.mean, r.median, r.success_rate
    (0.8, 1.0, 0.8)
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
import logging

import numpy as np

from expertac.environment.dynamics import reset, step, is_success
from expertac.learning.policy import forward, sample_actions, greedy_actions

logger = logging.getLogger(__name__)

POLICY_MODES = ('stochastic', 'greedy')


@dataclasses.dataclass(frozen=True)
class EvalReport:
    r"""
    Statistics of the episode rewards of one evaluation.
    """
    episodes: int
    mean: float
    median: float
    min: float
    max: float
    success_rate: float
    policy_mode: str
    rewards: tuple = ()

    @staticmethod
    def from_episodes(rewards, successes, mode):
        if not len(rewards):
            raise ValueError("an evaluation needs at least one episode")
        if len(successes) != len(rewards):
            raise ValueError("{} success flags for {} episodes".format(len(successes), len(rewards)))
        if mode not in POLICY_MODES:
            raise ValueError("unknown policy mode {!r}".format(mode))
        r = np.asarray(rewards, dtype=np.float64)
        return EvalReport(episodes=len(r),
                          mean=float(np.mean(r)),
                          median=float(np.median(r)),
                          min=float(np.min(r)),
                          max=float(np.max(r)),
                          success_rate=float(np.mean(np.asarray(successes, dtype=bool))),
                          policy_mode=mode,
                          rewards=tuple(float(x) for x in r))


def run_episode(net, spec, mode, rng, position=None):
    r"""
    Play one episode of ``spec`` with ``net`` and return ``(reward, success)``.
    """
    state, obs = reset(spec, 0, position=position)
    total = 0.0
    while True:
        trace = forward(net, obs)
        if mode == 'greedy':
            action = int(greedy_actions(trace.logits)[0])
        else:
            action = int(sample_actions(trace.probabilities, rng)[0])
        state, result = step(spec, state, action, obs)
        obs = result.observation
        total += result.reward
        if result.done:
            return total, is_success(spec, state, result.cause)


def evaluate(net, spec, episodes, mode='stochastic', seed=0, starts=None):
    r"""
    Return an :class:`EvalReport` of ``episodes`` episodes of ``net`` on
    ``spec``.

    Episodes start from the fixed start of ``spec`` (the respawn curriculum is
    ignored) or, if ``starts`` is given, from ``starts[i % len(starts)]``.
    ``net`` is not modified.

    EXAMPLES::

        >>> from expertac.environment import grid_environments
        >>> from expertac.learning.policy import PolicyNet
        >>> from expertac.harness.evaluation import evaluate
        >>> spec = grid_environments.open_room(1, 2)
        >>> net = PolicyNet.initial(spec.stack_dim, spec.action_count, hidden=(4,), seed=0)
        >>> evaluate(net, spec, 3, 'greedy') == evaluate(net, spec, 3, 'greedy')
        True
    """
    if episodes < 1:
        raise ValueError("episodes must be at least 1, got {}".format(episodes))
    if mode not in POLICY_MODES:
        raise ValueError("unknown policy mode {!r}; expected one of {}".format(mode, POLICY_MODES))
    spec = spec.with_curriculum(False)
    rng = np.random.default_rng(seed)
    rewards = []
    successes = []
    for i in range(episodes):
        position = None if starts is None else tuple(starts[i % len(starts)])
        reward, success = run_episode(net, spec, mode, rng, position)
        rewards.append(reward)
        successes.append(success)
    report = EvalReport.from_episodes(rewards, successes, mode)
    logger.debug("%s evaluation on %s: mean %s, success rate %s", mode, spec.env_id, report.mean, report.success_rate)
    return report


def perturbed_starts(spec, count, seed=0):
    r"""
    Return ``count`` start cells drawn among the reachable floor cells of
    ``spec`` other than its fixed start; distinct as long as there are
    enough of them.

    EXAMPLES::

        >>> from expertac.environment import grid_environments
        >>> from expertac.harness.evaluation import perturbed_starts
        >>> starts = perturbed_starts(grid_environments.sparse_maze(), 20, seed=0)
        >>> len(starts), len(set(starts)), (2, 2) in starts
        (20, 20, False)
    """
    cells = [c for c in spec.spawn_cells if c != spec.start]
    if not cells:
        raise ValueError("{!r} has no reachable cell besides its start".format(spec.env_id))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(len(cells), size=count, replace=count > len(cells))
    return [cells[int(i)] for i in chosen]
