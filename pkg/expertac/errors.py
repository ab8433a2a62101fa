r"""
Exceptions raised by expertac.

Contract violations on plain arguments raise ``ValueError`` directly; the
classes below mark failures that belong to a specific part of the training
stack so that callers (most notably the command line) can tell them apart.
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


class ExpertACError(Exception):
    r"""
    Root of the expertac exception hierarchy.
    """


class GridSpecError(ExpertACError, ValueError):
    r"""
    A grid specification is malformed or its objective is unreachable.

    EXAMPLES::

        >>> from expertac.environment import parse_grid
        >>> parse_grid("env_id=x\nstep_limit=5\n---\n###\n#.#\n###\n")
        Traceback (most recent call last):
        ...
        expertac.errors.GridSpecError: grid must contain exactly one start cell, found 0
    """


class EpisodeFinishedError(ExpertACError):
    r"""
    An action was applied to an episode that is already done.
    """


class PlanningError(ExpertACError):
    r"""
    The breadth-first planner found no action sequence reaching the objective.
    """


class DatasetError(ExpertACError):
    r"""
    A trajectory file is malformed, truncated, fails its checksum or belongs
    to another environment.
    """


class CheckpointError(ExpertACError):
    r"""
    A checkpoint file is malformed or does not match the requested object.
    """


class StaleTraceError(ExpertACError):
    r"""
    A backward pass was requested for a trace recorded before the network
    was last modified.
    """


class TrainingDiverged(ExpertACError):
    r"""
    A loss or parameter became non-finite during training.

    The attribute ``checkpoint`` holds the path of the diagnostic checkpoint
    written before raising (or ``None`` when no output directory was set).
    """
    def __init__(self, message, checkpoint=None):
        super().__init__(message)
        self.checkpoint = checkpoint


class ConfigError(ExpertACError, ValueError):
    r"""
    A configuration key or value is invalid, or a required input is missing.
    """
