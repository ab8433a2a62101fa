# -*- coding: utf-8 -*-
r"""
A fixed number of independent actors stepped in lockstep.

Actors that finish an episode are reset immediately; the observation returned
for such an actor is the first observation of its next episode, while reward
and ``done`` refer to the finished one.

EXAMPLES::

    >>> from expertac.environment import grid_environments, VectorEnv
    >>> venv = VectorEnv(grid_environments.open_room(1, 2), num_envs=3, seed=7)
    >>> venv.observations.shape == (3, venv.spec.stack_dim)
    True
    >>> [r.done for r in venv.step([0, 1, 0])]
    [True, False, True]
    >>> [(e.index, e.reward, e.length, e.success) for e in venv.completed]
    [(0, 1.0, 1, True), (2, 1.0, 1, True)]
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

from .dynamics import reset, step, is_success


@dataclasses.dataclass(frozen=True)
class EpisodeRecord:
    r"""
    Summary of one finished episode of actor ``index``.
    """
    index: int
    reward: float
    length: int
    cause: str
    success: bool


def episode_seed(seed, index, episode):
    r"""
    Return the reset seed of episode number ``episode`` of actor ``index``.

    Seeds of different actors and episodes are derived independently from
    ``seed`` so that adding actors does not change the episodes of the others.
    """
    return int(np.random.SeedSequence([seed, index, episode]).generate_state(1)[0])


class VectorEnv:
    r"""
    ``num_envs`` actors on the same :class:`~expertac.environment.grid.EnvSpec`.

    INPUT:

    - ``spec`` -- the environment

    - ``num_envs`` -- a positive integer

    - ``seed`` -- a non-negative integer from which all reset seeds derive
    """
    def __init__(self, spec, num_envs, seed=0):
        if num_envs <= 0:
            raise ValueError("num_envs must be positive, got {}".format(num_envs))
        self._spec = spec
        self._seed = int(seed)
        self._episodes = [0] * num_envs
        self._returns = [0.0] * num_envs
        self.completed = []
        self.states = []
        observations = []
        for i in range(num_envs):
            state, obs = reset(spec, self.episode_seed(i, 0))
            self.states.append(state)
            observations.append(obs)
        self.observations = np.stack(observations)

    @property
    def spec(self):
        return self._spec

    @property
    def num_envs(self):
        return len(self.states)

    def episode_seed(self, index, episode):
        return episode_seed(self._seed, index, episode)

    def step(self, actions):
        r"""
        Advance every actor by one action and return the list of
        :class:`~expertac.environment.dynamics.StepResult`.

        Finished episodes are appended to ``completed``.
        """
        actions = [int(a) for a in actions]
        if len(actions) != self.num_envs:
            raise ValueError("got {} actions for {} actors".format(len(actions), self.num_envs))
        results = []
        for i, action in enumerate(actions):
            state, result = step(self._spec, self.states[i], action, self.observations[i])
            self._returns[i] += result.reward
            if result.done:
                self.completed.append(EpisodeRecord(index=i,
                                                    reward=self._returns[i],
                                                    length=state.step_count,
                                                    cause=result.cause,
                                                    success=is_success(self._spec, state, result.cause)))
                self._returns[i] = 0.0
                self._episodes[i] += 1
                state, obs = reset(self._spec, self.episode_seed(i, self._episodes[i]))
                result = dataclasses.replace(result, observation=obs)
            self.states[i] = state
            self.observations[i] = result.observation
            results.append(result)
        return results

    def drain_completed(self):
        r"""
        Return and forget the episodes finished so far.
        """
        completed, self.completed = self.completed, []
        return completed


def vector_step(venv, actions):
    r"""
    Step all actors of ``venv``; see :meth:`VectorEnv.step`.
    """
    return venv.step(actions)
