# -*- coding: utf-8 -*-
r"""
Ready-made grid environments.

EXAMPLES::

    >>> from expertac.environment import grid_environments
    >>> grid_environments.sparse_maze().env_id
    'sparse-maze'
    >>> grid_environments.mini_montezuma().item_bits
    2
    >>> print('\n'.join(grid_environments.open_room(2, 3).grid))
    #####
    #S..#
    #..G#
    #####
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
from .grid import EnvSpec, load_grid, WALL, FLOOR, START, GOAL


class GridEnvironmentGenerators:
    r"""
    The shipped benchmark grids and a few small rooms for experiments.
    """
    @staticmethod
    def sparse_maze(respawn_curriculum=False):
        r"""
        Return the 22x22 maze of nine rooms with a single rewarding goal in
        the far corner.

        The only reward is ``1`` on reaching the goal; reaching it by random
        exploration within the step limit is rare.

        EXAMPLES::

            >>> from expertac.environment import grid_environments
            >>> spec = grid_environments.sparse_maze()
            >>> spec.start, spec.goals, spec.actions
            ((2, 2), ((19, 19),), ('forward', 'turn_left', 'turn_right'))
        """
        return load_grid('sparse-maze').with_curriculum(respawn_curriculum)

    @staticmethod
    def mini_montezuma(respawn_curriculum=False):
        r"""
        Return the four-room grid where a key must be fetched past a column of
        hazards to open the door guarding the goal.

        Picking up the key is worth ``100`` and opening the door ``300``;
        stepping on a hazard ends the episode.

        EXAMPLES::

            >>> from expertac.environment import grid_environments
            >>> spec = grid_environments.mini_montezuma()
            >>> spec.keys, spec.doors, spec.reward('door')
            (((9, 3),), ((3, 12),), 300.0)
        """
        return load_grid('mini-montezuma').with_curriculum(respawn_curriculum)

    @staticmethod
    def open_room(rows, cols, step_limit=100):
        r"""
        Return an empty room with ``rows`` x ``cols`` floor cells surrounded by
        walls, starting in the top left corner facing east with the goal in
        the bottom right corner.

        EXAMPLES::

            >>> from expertac.environment import grid_environments
            >>> spec = grid_environments.open_room(1, 2)
            >>> spec.grid
            ('####', '#SG#', '####')

        TESTS::

            >>> grid_environments.open_room(1, 1)
            Traceback (most recent call last):
            ...
            ValueError: a room needs at least two cells, got 1x1
        """
        rows = int(rows)
        cols = int(cols)
        if rows < 1 or cols < 1 or rows * cols < 2:
            raise ValueError("a room needs at least two cells, got {}x{}".format(rows, cols))
        grid = [WALL * (cols + 2)]
        for r in range(1, rows + 1):
            row = [FLOOR] * cols
            if r == 1:
                row[0] = START
            if r == rows:
                row[-1] = GOAL
            grid.append(WALL + ''.join(row) + WALL)
        grid.append(WALL * (cols + 2))
        return EnvSpec(env_id='open-room-{}x{}'.format(rows, cols),
                       grid=tuple(grid),
                       step_limit=step_limit)


grid_environments = GridEnvironmentGenerators()
