r"""
Deterministic sparse-reward grid environments: grid specifications, episode
dynamics, observation stacking, a multi-actor wrapper and a breadth-first
planner.
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
from .grid import (EnvSpec, parse_grid, grid_to_string, save_grid, load_grid,
                   shipped_environments, ACTION_NAMES, HEADINGS, STACK_DEPTH)
from .dynamics import EnvState, StepResult, GridEnv, reset, step, observe, frame, is_success
from .generators import grid_environments
from .vector import VectorEnv, EpisodeRecord, vector_step
from .search import shortest_plan, reachable_cells, validate_spec, ReachabilityCertificate
