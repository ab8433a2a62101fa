# -*- coding: utf-8 -*-
r"""
Grid specifications and their plain-text file format.

A grid file is a header of ``key=value`` lines, a separator line ``---`` and
one line per grid row with one character per cell:

- ``#`` wall, ``.`` floor, ``S`` start, ``G`` goal,
- ``K`` key, ``D`` door (passable once the matching key is held), ``H`` hazard.

Keys and doors are matched by their row-major order: the first door opens
with the first key and so on.

EXAMPLES::

    >>> from expertac.environment.grid import parse_grid, grid_to_string
    >>> text = '''env_id=tiny
    ... step_limit=10
    ... actions=forward,turn_left,turn_right
    ... start_heading=E
    ... respawn_curriculum=0
    ... reward.goal=1.0
    ... ---
    ... #####
    ... #S.G#
    ... #####
    ... '''
    >>> spec = parse_grid(text)
    >>> spec.rows, spec.cols, spec.action_count, spec.frame_dim
    (3, 5, 3, 20)
    >>> grid_to_string(spec) == text
    True
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
import os
from functools import cached_property
from importlib import resources

from expertac.errors import GridSpecError

WALL = '#'
FLOOR = '.'
START = 'S'
GOAL = 'G'
KEY = 'K'
DOOR = 'D'
HAZARD = 'H'

CELL_TYPES = (WALL, FLOOR, START, GOAL, KEY, DOOR, HAZARD)

# Headings in clockwise order; turning right adds one.
HEADINGS = ('N', 'E', 'S', 'W')

ACTION_NAMES = ('forward', 'turn_left', 'turn_right', 'jump', 'wait')

# Frames stacked into one observation.
STACK_DEPTH = 4

SEPARATOR = '---'

_DEFAULT_ACTIONS = ('forward', 'turn_left', 'turn_right')

_SHIPPED = {
    'sparse-maze': 'sparse_maze.grid',
    'mini-montezuma': 'mini_montezuma.grid',
}


@dataclasses.dataclass(frozen=True)
class EnvSpec:
    r"""
    A deterministic grid environment.

    The grid itself is never modified; everything an episode changes lives in
    :class:`~expertac.environment.dynamics.EnvState`.

    INPUT:

    - ``env_id`` -- a name, stored in trajectory files and checked on load

    - ``grid`` -- a tuple of equally long strings, one per row

    - ``actions`` -- a tuple of names taken from ``ACTION_NAMES``; the action id
      is the position in this tuple

    - ``step_limit`` -- a positive integer

    - ``reward_table`` -- a dictionary mapping ``'goal'``, ``'key'`` and
      ``'door'`` to real rewards (missing events are worth ``0``)

    - ``start_heading`` -- an index into ``HEADINGS``

    - ``respawn_curriculum`` -- whether ``reset`` draws the start cell
      uniformly among the reachable floor cells
    """
    env_id: str
    grid: tuple
    actions: tuple = _DEFAULT_ACTIONS
    step_limit: int = 100
    reward_table: dict = dataclasses.field(default_factory=lambda: {'goal': 1.0})
    start_heading: int = 1
    respawn_curriculum: bool = False

    def __post_init__(self):
        if not self.env_id or any(ch.isspace() for ch in self.env_id):
            raise GridSpecError("invalid env_id {!r}".format(self.env_id))
        if not self.grid:
            raise GridSpecError("empty grid")
        width = len(self.grid[0])
        for i, row in enumerate(self.grid):
            if len(row) != width:
                raise GridSpecError("row {} has {} cells, expected {}".format(i, len(row), width))
            for ch in row:
                if ch not in CELL_TYPES:
                    raise GridSpecError("unknown cell {!r} in row {}".format(ch, i))
        starts = self.cells_of(START)
        if len(starts) != 1:
            raise GridSpecError("grid must contain exactly one start cell, found {}".format(len(starts)))
        if not self.actions:
            raise GridSpecError("empty action set")
        for name in self.actions:
            if name not in ACTION_NAMES:
                raise GridSpecError("unknown action {!r}".format(name))
        if len(set(self.actions)) != len(self.actions):
            raise GridSpecError("repeated action in {}".format(self.actions))
        if self.step_limit <= 0:
            raise GridSpecError("step_limit must be positive, got {}".format(self.step_limit))
        for event in self.reward_table:
            if event not in (GOAL_EVENT, KEY_EVENT, DOOR_EVENT):
                raise GridSpecError("unknown reward event {!r}".format(event))
        if not 0 <= self.start_heading < len(HEADINGS):
            raise GridSpecError("invalid start heading {!r}".format(self.start_heading))
        if len(self.doors) > len(self.keys):
            raise GridSpecError("{} doors but only {} keys".format(len(self.doors), len(self.keys)))

    @property
    def rows(self):
        return len(self.grid)

    @property
    def cols(self):
        return len(self.grid[0])

    @property
    def action_count(self):
        return len(self.actions)

    def cell(self, position):
        r"""
        Return the cell type at ``position`` or ``WALL`` outside the grid.
        """
        r, c = position
        if 0 <= r < self.rows and 0 <= c < self.cols:
            return self.grid[r][c]
        return WALL

    def cells_of(self, kind):
        r"""
        Return the positions of all cells of type ``kind`` in row-major order.
        """
        return tuple((r, c) for r, row in enumerate(self.grid) for c, ch in enumerate(row) if ch == kind)

    @cached_property
    def start(self):
        return self.cells_of(START)[0]

    @cached_property
    def keys(self):
        return self.cells_of(KEY)

    @cached_property
    def doors(self):
        return self.cells_of(DOOR)

    @cached_property
    def goals(self):
        return self.cells_of(GOAL)

    @property
    def item_bits(self):
        return len(self.keys) + len(self.doors)

    @property
    def full_inventory(self):
        return (1 << self.item_bits) - 1

    def key_bit(self, position):
        return 1 << self.keys.index(position)

    def door_bit(self, position):
        return 1 << (len(self.keys) + self.doors.index(position))

    def door_key_bit(self, position):
        r"""
        Return the inventory bit of the key that opens the door at ``position``.
        """
        return 1 << self.doors.index(position)

    @property
    def frame_dim(self):
        r"""
        Length of one raw frame: agent cell one-hot, heading one-hot,
        inventory bits and the normalized step count.
        """
        return self.rows * self.cols + len(HEADINGS) + self.item_bits + 1

    @property
    def stack_dim(self):
        return STACK_DEPTH * self.frame_dim

    def reward(self, event):
        return float(self.reward_table.get(event, 0.0))

    @cached_property
    def spawn_cells(self):
        r"""
        The cells a curriculum reset may start from: reachable floor and start
        cells, in row-major order.
        """
        from .search import reachable_cells
        reachable = reachable_cells(self)
        return tuple(p for p in sorted(reachable) if self.cell(p) in (FLOOR, START))

    def with_curriculum(self, respawn=True):
        r"""
        Return a copy of this spec with the respawn curriculum switched on or off.
        """
        if bool(respawn) == self.respawn_curriculum:
            return self
        return dataclasses.replace(self, respawn_curriculum=bool(respawn))

    def __hash__(self):
        return hash((self.env_id, self.grid, self.actions, self.step_limit,
                     tuple(sorted(self.reward_table.items())), self.start_heading, self.respawn_curriculum))


GOAL_EVENT = 'goal'
KEY_EVENT = 'key'
DOOR_EVENT = 'door'


def _format_real(x):
    return repr(float(x))


def _parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise GridSpecError("invalid boolean {!r}".format(text))


def parse_grid(text, validate=True):
    r"""
    Build an :class:`EnvSpec` from the text of a grid file.

    If ``validate`` is set (the default) the spec is checked for reachability
    with :func:`~expertac.environment.search.validate_spec`.
    """
    lines = text.splitlines()
    try:
        sep = lines.index(SEPARATOR)
    except ValueError:
        raise GridSpecError("missing separator line {!r}".format(SEPARATOR))

    header = {}
    rewards = {}
    for lineno, line in enumerate(lines[:sep]):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        key, eq, value = line.partition('=')
        if not eq:
            raise GridSpecError("line {}: expected key=value, got {!r}".format(lineno + 1, line))
        key = key.strip()
        value = value.strip()
        if key.startswith('reward.'):
            try:
                rewards[key[len('reward.'):]] = float(value)
            except ValueError:
                raise GridSpecError("line {}: invalid reward {!r}".format(lineno + 1, value))
        elif key in header:
            raise GridSpecError("line {}: repeated key {!r}".format(lineno + 1, key))
        else:
            header[key] = value

    unknown = set(header) - {'env_id', 'step_limit', 'actions', 'start_heading', 'respawn_curriculum'}
    if unknown:
        raise GridSpecError("unknown header keys {}".format(sorted(unknown)))
    if 'env_id' not in header:
        raise GridSpecError("missing header key 'env_id'")

    kwds = {'env_id': header['env_id']}
    if 'step_limit' in header:
        try:
            kwds['step_limit'] = int(header['step_limit'])
        except ValueError:
            raise GridSpecError("invalid step_limit {!r}".format(header['step_limit']))
    if 'actions' in header:
        kwds['actions'] = tuple(a.strip() for a in header['actions'].split(','))
    if 'start_heading' in header:
        if header['start_heading'] not in HEADINGS:
            raise GridSpecError("invalid start_heading {!r}".format(header['start_heading']))
        kwds['start_heading'] = HEADINGS.index(header['start_heading'])
    if 'respawn_curriculum' in header:
        kwds['respawn_curriculum'] = _parse_bool(header['respawn_curriculum'])
    if rewards:
        kwds['reward_table'] = rewards

    grid = tuple(line.rstrip('\n') for line in lines[sep + 1:] if line.strip())
    spec = EnvSpec(grid=grid, **kwds)

    if validate:
        from .search import validate_spec
        validate_spec(spec)
    return spec


def grid_to_string(spec):
    r"""
    Return the canonical text of ``spec``; :func:`parse_grid` inverts it exactly.
    """
    output = []
    output.append('env_id={}'.format(spec.env_id))
    output.append('step_limit={}'.format(spec.step_limit))
    output.append('actions={}'.format(','.join(spec.actions)))
    output.append('start_heading={}'.format(HEADINGS[spec.start_heading]))
    output.append('respawn_curriculum={}'.format(int(spec.respawn_curriculum)))
    for event in sorted(spec.reward_table):
        output.append('reward.{}={}'.format(event, _format_real(spec.reward_table[event])))
    output.append(SEPARATOR)
    output.extend(spec.grid)
    return '\n'.join(output) + '\n'


def save_grid(spec, filename):
    with open(filename, 'w', encoding='utf-8') as f:
        f.write(grid_to_string(spec))


def load_grid(name, validate=True):
    r"""
    Load a shipped grid by name (``'sparse-maze'``, ``'mini-montezuma'``) or a
    grid file by path.

    EXAMPLES::

        >>> from expertac.environment.grid import load_grid
        >>> spec = load_grid('sparse-maze')
        >>> spec.env_id, spec.rows, spec.cols, spec.step_limit
        ('sparse-maze', 22, 22, 300)
        >>> load_grid('mini-montezuma').action_count
        5
    """
    if name in _SHIPPED:
        text = resources.files('expertac.environment').joinpath('maps').joinpath(_SHIPPED[name]).read_text()
    elif os.path.exists(name):
        try:
            with open(name, encoding='utf-8') as f:
                text = f.read()
        except UnicodeDecodeError as e:
            raise GridSpecError("{}: not a grid file ({})".format(name, e))
    else:
        raise GridSpecError("unknown environment {!r}; expected one of {} or a grid file".format(
            name, sorted(_SHIPPED)))
    return parse_grid(text, validate=validate)


def shipped_environments():
    return tuple(sorted(_SHIPPED))
