# -*- coding: utf-8 -*-
r"""
Episode dynamics on a grid: ``reset``, ``step`` and ``observe``.

All functions are pure: a state is never modified, a new one is returned.

EXAMPLES::

    >>> from expertac.environment import grid_environments, reset, step
    >>> spec = grid_environments.open_room(3, 4)
    >>> state, obs = reset(spec, seed=0)
    >>> state.agent_position, state.agent_heading, state.step_count
    ((1, 1), 1, 0)
    >>> obs.shape == (spec.stack_dim,)
    True
    >>> state, result = step(spec, state, 0, obs)
    >>> state.agent_position, result.reward, result.done
    ((1, 2), 0.0, False)
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

from expertac.errors import EpisodeFinishedError, GridSpecError
from .grid import (WALL, GOAL, KEY, DOOR, HAZARD, HEADINGS, STACK_DEPTH,
                   GOAL_EVENT, KEY_EVENT, DOOR_EVENT)

# Row and column offsets of one forward move for each heading.
_DELTAS = ((-1, 0), (0, 1), (1, 0), (0, -1))

CAUSE_NONE = 'none'
CAUSE_GOAL = 'goal'
CAUSE_DEATH = 'death'
CAUSE_TIMEOUT = 'timeout'


@dataclasses.dataclass(frozen=True)
class EnvState:
    r"""
    The changing part of an episode.

    ``inventory`` is a bit set indexed as in
    :meth:`~expertac.environment.grid.EnvSpec.key_bit` and
    :meth:`~expertac.environment.grid.EnvSpec.door_bit`.
    """
    agent_position: tuple
    agent_heading: int
    inventory: int = 0
    step_count: int = 0
    alive: bool = True
    done: bool = False

    def key(self):
        r"""
        The part of the state the planner searches over.
        """
        return (self.agent_position, self.agent_heading, self.inventory)


@dataclasses.dataclass(frozen=True)
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    info: dict

    @property
    def cause(self):
        return self.info['cause']


def ahead(position, heading, distance=1):
    dr, dc = _DELTAS[heading]
    return (position[0] + distance * dr, position[1] + distance * dc)


def is_passable(spec, position, inventory):
    r"""
    Whether the agent may enter ``position`` holding ``inventory``.

    Hazards are passable (entering one is fatal); closed doors are not.
    """
    kind = spec.cell(position)
    if kind == WALL:
        return False
    if kind == DOOR:
        return bool(inventory & spec.door_key_bit(position))
    return True


def _enter(spec, position, inventory):
    r"""
    Return ``(inventory, reward, cause)`` after entering ``position``.
    """
    kind = spec.cell(position)
    if kind == HAZARD:
        return inventory, 0.0, CAUSE_DEATH
    reward = 0.0
    if kind == KEY:
        bit = spec.key_bit(position)
        if not inventory & bit:
            inventory |= bit
            reward += spec.reward(KEY_EVENT)
    elif kind == DOOR:
        bit = spec.door_bit(position)
        if not inventory & bit:
            inventory |= bit
            reward += spec.reward(DOOR_EVENT)
    elif kind == GOAL:
        return inventory, reward + spec.reward(GOAL_EVENT), CAUSE_GOAL
    return inventory, reward, CAUSE_NONE


def transition(spec, state, action):
    r"""
    Apply ``action`` and return ``(state, reward, cause)``.

    This is the movement rule shared by :func:`step` and the planner; the step
    count advances and the step limit is enforced here.
    """
    if state.done:
        raise EpisodeFinishedError("the episode is already finished")
    if not 0 <= action < spec.action_count:
        raise ValueError("action {} out of range for {} actions".format(action, spec.action_count))

    name = spec.actions[action]
    position = state.agent_position
    heading = state.agent_heading
    inventory = state.inventory
    reward = 0.0
    cause = CAUSE_NONE

    if name == 'turn_left':
        heading = (heading - 1) % len(HEADINGS)
    elif name == 'turn_right':
        heading = (heading + 1) % len(HEADINGS)
    elif name == 'forward':
        target = ahead(position, heading)
        if is_passable(spec, target, inventory):
            position = target
            inventory, reward, cause = _enter(spec, position, inventory)
    elif name == 'jump':
        # the cell jumped over is never entered, so a hazard there is harmless
        middle = ahead(position, heading)
        target = ahead(position, heading, 2)
        if is_passable(spec, middle, inventory) and is_passable(spec, target, inventory):
            position = target
            inventory, reward, cause = _enter(spec, position, inventory)

    step_count = state.step_count + 1
    alive = cause != CAUSE_DEATH
    if cause == CAUSE_NONE and step_count >= spec.step_limit:
        cause = CAUSE_TIMEOUT

    new_state = EnvState(agent_position=position,
                         agent_heading=heading,
                         inventory=inventory,
                         step_count=step_count,
                         alive=alive,
                         done=cause != CAUSE_NONE)
    return new_state, reward, cause


def frame(state, spec):
    r"""
    Return the raw feature vector of ``state``.

    EXAMPLES::

        >>> from expertac.environment import grid_environments, EnvState
        >>> from expertac.environment.dynamics import frame
        >>> spec = grid_environments.open_room(2, 2)
        >>> f = frame(EnvState((1, 1), 2, step_count=3), spec)
        >>> [int(i) for i in f.nonzero()[0]], float(f[-1])
        ([5, 18, 20], 0.03)
    """
    f = np.zeros(spec.frame_dim, dtype=np.float64)
    r, c = state.agent_position
    cells = spec.rows * spec.cols
    f[r * spec.cols + c] = 1.0
    f[cells + state.agent_heading] = 1.0
    offset = cells + len(HEADINGS)
    for i in range(spec.item_bits):
        if state.inventory >> i & 1:
            f[offset + i] = 1.0
    f[-1] = state.step_count / spec.step_limit
    return f


def observe(state, spec, previous=None):
    r"""
    Return the observation stack after ``state``.

    The stack is the concatenation of the last ``STACK_DEPTH`` frames, oldest
    first. Without ``previous`` (at the start of an episode) every slot holds
    the current frame.
    """
    f = frame(state, spec)
    if previous is None:
        return np.tile(f, STACK_DEPTH)
    previous = np.asarray(previous, dtype=np.float64)
    if previous.shape != (spec.stack_dim,):
        raise ValueError("previous observation has shape {}, expected ({},)".format(previous.shape, spec.stack_dim))
    return np.concatenate([previous[spec.frame_dim:], f])


def initial_state(spec, position=None):
    if position is None:
        position = spec.start
    elif spec.cell(position) == WALL:
        raise ValueError("cannot start inside a wall at {}".format(position))
    return EnvState(agent_position=tuple(position), agent_heading=spec.start_heading)


def reset(spec, seed, position=None):
    r"""
    Start an episode and return ``(state, observation)``.

    With the respawn curriculum the start cell is drawn uniformly from
    ``spec.spawn_cells`` using ``seed``; otherwise (or when ``position`` is
    given explicitly) the seed is unused.
    """
    if seed < 0:
        raise ValueError("seed must be non-negative, got {}".format(seed))
    if position is None and spec.respawn_curriculum:
        cells = spec.spawn_cells
        if not cells:
            raise GridSpecError("no reachable floor cell to respawn on")
        rng = np.random.default_rng(seed)
        position = cells[int(rng.integers(len(cells)))]
    state = initial_state(spec, position)
    return state, observe(state, spec)


def step(spec, state, action, previous):
    r"""
    Apply ``action`` and return ``(state, StepResult)``.

    ``previous`` is the observation stack before the step.
    """
    new_state, reward, cause = transition(spec, state, action)
    observation = observe(new_state, spec, previous)
    return new_state, StepResult(observation=observation,
                                 reward=reward,
                                 done=new_state.done,
                                 info={'cause': cause})


def is_success(spec, state, cause):
    r"""
    Whether an episode that ended in ``state`` with ``cause`` is a success.

    With collectable items success means holding all of them; otherwise it
    means reaching a goal.
    """
    if spec.item_bits:
        return state.inventory == spec.full_inventory
    return cause == CAUSE_GOAL


class GridEnv:
    r"""
    A single stateful actor on top of the pure functions of this module.

    EXAMPLES::

        >>> from expertac.environment import grid_environments, GridEnv
        >>> env = GridEnv(grid_environments.open_room(1, 2), seed=5)
        >>> env.state.agent_position
        (1, 1)
        >>> env.step(0).cause
        'goal'
    """
    def __init__(self, spec, seed=0):
        self._spec = spec
        self.reset(seed)

    def reset(self, seed, position=None):
        self.state, self.observation = reset(self._spec, seed, position)
        return self.observation

    @property
    def spec(self):
        return self._spec

    def step(self, action):
        self.state, result = step(self._spec, self.state, action, self.observation)
        self.observation = result.observation
        return result
