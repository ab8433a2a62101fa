# -*- coding: utf-8 -*-
r"""
Breadth-first search over grid states.

The search space is ``(position, heading, inventory)``; the step count is not
part of it. Successors are produced by
:func:`~expertac.environment.dynamics.transition` itself so that plans and
reachability agree with the environment by construction.

The objective of a grid is to reach a goal cell holding every key and door
bit, which collects the largest reward available when all rewards of the
table are non-negative.
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
from collections import deque

from expertac.errors import GridSpecError, PlanningError
from .dynamics import EnvState, transition, initial_state, CAUSE_GOAL, CAUSE_NONE

logger = logging.getLogger(__name__)


def _search_state(state):
    # the step count is irrelevant to the search, and resetting it keeps
    # transition() from ending the search at the step limit
    return EnvState(agent_position=state.agent_position,
                    agent_heading=state.agent_heading,
                    inventory=state.inventory)


def _successors(spec, state):
    for action in range(spec.action_count):
        new_state, _, cause = transition(spec, state, action)
        yield action, _search_state(new_state), cause


def _is_objective(spec, state, cause):
    return cause == CAUSE_GOAL and state.inventory == spec.full_inventory


def reachable_states(spec, start=None):
    r"""
    Return the set of non-terminal search states reachable from ``start``
    (default: the spec's start configuration).
    """
    if start is None:
        start = initial_state(spec)
    start = _search_state(start)
    seen = {start.key()}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for _, new_state, cause in _successors(spec, state):
            if cause != CAUSE_NONE:
                continue
            k = new_state.key()
            if k not in seen:
                seen.add(k)
                queue.append(new_state)
    return seen


def reachable_cells(spec):
    r"""
    Return the set of cells the agent can stand on, alive, in some episode.

    EXAMPLES::

        >>> from expertac.environment import grid_environments
        >>> from expertac.environment.search import reachable_cells
        >>> sorted(reachable_cells(grid_environments.open_room(1, 3)))
        [(1, 1), (1, 2)]
    """
    return {position for position, _, _ in reachable_states(spec)}


def shortest_plan(spec, state=None):
    r"""
    Return a shortest list of action ids leading from ``state`` to the
    objective.

    Actions are expanded in increasing id order, so ties between equally
    short plans are broken deterministically. Plans never pass through a
    hazard and never end an episode early at a goal.

    EXAMPLES::

        >>> from expertac.environment import grid_environments
        >>> from expertac.environment.search import shortest_plan
        >>> shortest_plan(grid_environments.open_room(1, 2))
        [0]
        >>> shortest_plan(grid_environments.open_room(2, 1))
        [2, 0]
    """
    if state is None:
        state = initial_state(spec)
    if state.done:
        raise PlanningError("cannot plan from a finished episode")
    start = _search_state(state)
    parents = {start.key(): None}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for action, new_state, cause in _successors(spec, current):
            if _is_objective(spec, new_state, cause):
                plan = [action]
                k = current.key()
                while parents[k] is not None:
                    k, a = parents[k]
                    plan.append(a)
                plan.reverse()
                return plan
            if cause != CAUSE_NONE:
                continue
            k = new_state.key()
            if k not in parents:
                parents[k] = (current.key(), action)
                queue.append(new_state)
    raise PlanningError("no action sequence reaches the objective of {!r} from {}".format(
        spec.env_id, state.agent_position))


@dataclasses.dataclass(frozen=True)
class ReachabilityCertificate:
    r"""
    Summary of a successful reachability check.
    """
    env_id: str
    reachable_cells: int
    reachable_states: int
    solution_length: int
    objective: str

    def __str__(self):
        return ("{}: {} reachable cells ({} search states); objective '{}' reached "
                "in {} actions".format(self.env_id, self.reachable_cells, self.reachable_states,
                                       self.objective, self.solution_length))


def validate_spec(spec):
    r"""
    Check that the objective of ``spec`` is reachable from its start within
    the step limit and return a :class:`ReachabilityCertificate`.

    EXAMPLES::

        >>> from expertac.environment import load_grid
        >>> from expertac.environment.search import validate_spec
        >>> cert = validate_spec(load_grid('mini-montezuma'))
        >>> cert.objective
        'goal holding key+door'
    """
    if not spec.goals:
        raise GridSpecError("grid {!r} has no goal cell".format(spec.env_id))
    try:
        plan = shortest_plan(spec)
    except PlanningError as e:
        raise GridSpecError("unreachable objective: {}".format(e))
    if len(plan) > spec.step_limit:
        raise GridSpecError("shortest solution takes {} actions, more than the step limit {}".format(
            len(plan), spec.step_limit))
    states = reachable_states(spec)
    cells = {position for position, _, _ in states}
    items = []
    if spec.keys:
        items.append('key' if len(spec.keys) == 1 else '{} keys'.format(len(spec.keys)))
    if spec.doors:
        items.append('door' if len(spec.doors) == 1 else '{} doors'.format(len(spec.doors)))
    objective = 'goal holding ' + '+'.join(items) if items else 'goal'
    certificate = ReachabilityCertificate(env_id=spec.env_id,
                                          reachable_cells=len(cells),
                                          reachable_states=len(states),
                                          solution_length=len(plan),
                                          objective=objective)
    logger.debug("%s", certificate)
    return certificate
