# -*- coding: utf-8 -*-
r"""
Test the breadth-first planner and reachability certificates.
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

import pytest


def _replay(spec, plan):
    from expertac.environment import reset, step
    state, obs = reset(spec, 0)
    total = 0.0
    for i, action in enumerate(plan):
        state, result = step(spec, state, action, obs)
        obs = result.observation
        total += result.reward
        assert result.done == (i == len(plan) - 1)
    return state, result, total


@pytest.mark.parametrize("rows,cols,length", [(1, 2, 1), (1, 5, 4), (2, 2, 3), (3, 3, 5), (4, 2, 5)])
def test_open_room_plans(rows, cols, length):
    from expertac.environment import grid_environments, shortest_plan
    spec = grid_environments.open_room(rows, cols)
    plan = shortest_plan(spec)
    assert len(plan) == length
    _, result, total = _replay(spec, plan)
    assert result.cause == 'goal' and total == 1.0


@pytest.mark.parametrize("name", ['sparse-maze', 'mini-montezuma'])
def test_shipped_plans_reach_the_objective(name):
    from expertac.environment import load_grid, shortest_plan, is_success
    spec = load_grid(name)
    plan = shortest_plan(spec)
    assert len(plan) <= spec.step_limit
    state, result, _ = _replay(spec, plan)
    assert is_success(spec, state, result.cause)


def test_plan_collects_items():
    from expertac.environment import load_grid, shortest_plan
    spec = load_grid('mini-montezuma')
    _, result, total = _replay(spec, shortest_plan(spec))
    assert total == 400.0 and result.cause == 'goal'


def test_plan_is_deterministic():
    from expertac.environment import load_grid, shortest_plan
    spec = load_grid('sparse-maze')
    assert shortest_plan(spec) == shortest_plan(spec)


def test_plan_from_a_state():
    from expertac.environment import grid_environments, shortest_plan, EnvState
    spec = grid_environments.open_room(3, 3)
    assert shortest_plan(spec, EnvState((3, 2), 1)) == [0]
    assert shortest_plan(spec, EnvState((2, 3), 2)) == [0]


def test_no_plan():
    from expertac.environment import parse_grid, shortest_plan
    from expertac.errors import PlanningError
    spec = parse_grid("env_id=x\n---\n#####\n#S#G#\n#####\n", validate=False)
    with pytest.raises(PlanningError):
        shortest_plan(spec)


def test_certificate():
    from expertac.environment import grid_environments, validate_spec
    cert = validate_spec(grid_environments.open_room(2, 2))
    assert (cert.env_id, cert.reachable_cells, cert.reachable_states, cert.solution_length, cert.objective) == \
        ('open-room-2x2', 3, 12, 3, 'goal')
    assert str(cert) == "open-room-2x2: 3 reachable cells (12 search states); objective 'goal' reached in 3 actions"


def test_reachable_cells_with_hazard():
    from expertac.environment import parse_grid, reachable_cells
    spec = parse_grid("env_id=x\nactions=forward,turn_left,turn_right,jump\n---\n#######\n#S.H..#\n####G##\n#######\n")
    assert reachable_cells(spec) == {(1, 1), (1, 2), (1, 4), (1, 5)}
