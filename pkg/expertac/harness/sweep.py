# -*- coding: utf-8 -*-
r"""
Parameter sweeps.

A sweep trains one run per ``(value, seed)`` cell of a single axis, evaluates
the final policy and collects the results in ``summary.csv``. Every cell
lives in its own directory ``<axis>=<value>/seed=<seed>/``; a cell whose
``result.csv`` exists is not run again, so an interrupted sweep resumes where
it stopped.

EXAMPLES::

    >>> from expertac.learning.config import TrainConfig
    >>> from expertac.harness.sweep import SweepSpec
    >>> sweep = SweepSpec(TrainConfig(), 'lambda_expert', [0.125, 0.25, 0.5], [0, 1, 2])
    >>> [sweep.cell_config(v, 0).lambda_expert for v in sweep.values]
    [0.125, 0.25, 0.5]
    >>> SweepSpec(TrainConfig(), 'horizon', [10], [0, 1, 2])
    Traceback (most recent call last):
    ...
    expertac.errors.ConfigError: unknown sweep axis 'horizon'
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
import csv
import dataclasses
import logging
import multiprocessing
import os
import warnings

import numpy as np

from expertac.errors import ConfigError, ExpertACError
from expertac.environment import load_grid
from expertac.learning.config import TrainConfig
from expertac.learning.expert import ADVANTAGE_VARIANTS, generate_dataset, save_dataset
from expertac.learning.trainer import train

from .evaluation import evaluate

logger = logging.getLogger(__name__)

SWEEP_AXES = ('advantage', 'gamma', 'lambda_expert', 'expert_trajectory_count', 'curriculum_vs_expert')

SUMMARY_COLUMNS = ('axis', 'value', 'seed', 'final_mean', 'final_median', 'final_min', 'final_max',
                   'expert_accuracy', 'env_steps')

FAILURE_COLUMNS = ('axis', 'value', 'seed', 'error')

MIN_SEEDS = 3

# lambda_expert of the expert arm of curriculum_vs_expert when the base config has none
DEFAULT_LAMBDA_EXPERT = 0.25


def format_value(value):
    r"""
    Return the text a sweep value is written as in directory names and CSV
    files.

    EXAMPLES::

        >>> from expertac.harness.sweep import format_value
        >>> format_value(0.995), format_value(4), format_value('critic'), format_value(True)
        ('0.995', '4', 'critic', '1')
    """
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    r"""
    A sweep over one axis.

    INPUT:

    - ``base`` -- the :class:`~expertac.learning.config.TrainConfig` every cell
      starts from

    - ``axis`` -- one of :data:`SWEEP_AXES`

    - ``values`` -- the values of the axis; for ``curriculum_vs_expert`` these
      are ``'curriculum'`` (respawn curriculum, no expert term) and
      ``'expert'`` (fixed start, expert term)

    - ``seeds`` -- the seeds run for every value

    - ``expert_trajectories`` -- the number of planned trajectories generated
      for cells that need expert data and have no ``base.expert`` file

    - ``expert_noise`` -- the noise of the generated trajectories

    - ``eval_mode`` -- the policy mode of the final evaluation
    """
    base: TrainConfig
    axis: str
    values: tuple
    seeds: tuple
    expert_trajectories: int = 1
    expert_noise: float = 0.0
    eval_mode: str = 'greedy'

    def __post_init__(self):
        object.__setattr__(self, 'values', tuple(self.values))
        object.__setattr__(self, 'seeds', tuple(int(s) for s in self.seeds))
        if self.axis not in SWEEP_AXES:
            raise ConfigError("unknown sweep axis {!r}".format(self.axis))
        if not self.values:
            raise ConfigError("a sweep needs at least one value")
        if not self.seeds:
            raise ConfigError("a sweep needs at least one seed")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("repeated seeds in {}".format(list(self.seeds)))
        if len(set(format_value(v) for v in self.values)) != len(self.values):
            raise ConfigError("repeated values in {}".format(list(self.values)))
        if len(self.seeds) < MIN_SEEDS:
            warnings.warn("sweep over {} with {} seed(s); at least {} are needed for a min-max band".format(
                self.axis, len(self.seeds), MIN_SEEDS))
        if self.expert_trajectories < 1:
            raise ConfigError("expert_trajectories must be at least 1, got {}".format(self.expert_trajectories))
        if not 0.0 <= self.expert_noise < 1.0:
            raise ConfigError("expert_noise must lie in [0, 1), got {}".format(self.expert_noise))
        if self.eval_mode not in ('stochastic', 'greedy'):
            raise ConfigError("unknown policy mode {!r}".format(self.eval_mode))
        for value in self.values:
            self.cell_config(value, self.seeds[0])

    @staticmethod
    def parse_values(axis, texts):
        r"""
        Convert the strings ``texts`` to values of ``axis``.

        EXAMPLES::

            >>> from expertac.harness.sweep import SweepSpec
            >>> SweepSpec.parse_values('gamma', ['0.99', '0.995'])
            (0.99, 0.995)
            >>> SweepSpec.parse_values('expert_trajectory_count', ['1', '4'])
            (1, 4)
        """
        try:
            if axis in ('gamma', 'lambda_expert'):
                return tuple(float(t) for t in texts)
            if axis == 'expert_trajectory_count':
                return tuple(int(t) for t in texts)
        except ValueError as e:
            raise ConfigError("invalid value for sweep axis {}: {}".format(axis, e))
        return tuple(t.strip() for t in texts)

    def cell_config(self, value, seed):
        r"""
        Return the configuration of the cell ``(value, seed)``.
        """
        cfg = self.base.with_overrides(seed=seed)
        if self.axis == 'advantage':
            if value not in ADVANTAGE_VARIANTS:
                raise ConfigError("advantage must be one of reward, critic, simple, got {!r}".format(value))
            return cfg.with_overrides(advantage=value)
        if self.axis == 'gamma':
            return cfg.with_overrides(gamma=float(value))
        if self.axis == 'lambda_expert':
            return cfg.with_overrides(lambda_expert=float(value))
        if self.axis == 'expert_trajectory_count':
            if int(value) < 1:
                raise ConfigError("expert_trajectory_count must be at least 1, got {}".format(value))
            if cfg.lambda_expert == 0:
                cfg = cfg.with_overrides(lambda_expert=DEFAULT_LAMBDA_EXPERT)
            return cfg.with_overrides(expert=None)
        if value == 'curriculum':
            return cfg.with_overrides(respawn_curriculum=True, lambda_expert=0.0, expert=None)
        if value == 'expert':
            return cfg.with_overrides(respawn_curriculum=False,
                                      lambda_expert=cfg.lambda_expert or DEFAULT_LAMBDA_EXPERT)
        raise ConfigError("curriculum_vs_expert takes 'curriculum' or 'expert', got {!r}".format(value))

    def trajectory_count(self, value):
        if self.axis == 'expert_trajectory_count':
            return int(value)
        return self.expert_trajectories

    def cells(self):
        r"""
        Return the ``(value, seed)`` cells, value-major.
        """
        return [(v, s) for v in self.values for s in self.seeds]

    def cell_directory(self, out_dir, value, seed):
        return os.path.join(out_dir, '{}={}'.format(self.axis, format_value(value)), 'seed={}'.format(seed))


def _write_csv(path, header, rows):
    tmp = path + '.tmp'
    with open(tmp, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
    os.replace(tmp, path)


def _read_result(path):
    with open(path, newline='') as f:
        rows = list(csv.reader(f))
    if len(rows) != 2 or tuple(rows[0]) != SUMMARY_COLUMNS:
        raise ExpertACError("malformed cell result {}".format(path))
    return rows[1]


def run_cell(sweep, value, seed, out_dir):
    r"""
    Train and evaluate the cell ``(value, seed)`` of ``sweep`` and return its
    summary row.

    The cell directory receives the run's output, the expert trajectories it
    trained on (when generated), ``episodes.csv`` with the reward of every
    final evaluation episode and ``result.csv``; an existing ``result.csv`` is
    read back instead of training again.
    """
    cell_dir = sweep.cell_directory(out_dir, value, seed)
    result = os.path.join(cell_dir, 'result.csv')
    if os.path.exists(result):
        logger.info("%s=%s seed %d already done", sweep.axis, format_value(value), seed)
        return _read_result(result)

    os.makedirs(cell_dir, exist_ok=True)
    cfg = sweep.cell_config(value, seed)
    spec = load_grid(cfg.env)
    dataset = None
    if cfg.lambda_expert > 0 and cfg.expert is None:
        dataset = generate_dataset(spec, trajectories=sweep.trajectory_count(value), noise=sweep.expert_noise,
                                   seed=seed, gamma=cfg.gamma)
        save_dataset(dataset, os.path.join(cell_dir, 'expert.traj'))

    net, metrics = train(cfg, out_dir=cell_dir, dataset=dataset)
    report = evaluate(net, spec, cfg.eval_episodes, sweep.eval_mode, seed=seed)
    accuracy = metrics[-1].expert_accuracy

    _write_csv(os.path.join(cell_dir, 'episodes.csv'), ('episode', 'reward'),
               [(i, repr(r)) for i, r in enumerate(report.rewards)])
    row = [sweep.axis, format_value(value), str(seed), repr(report.mean), repr(report.median),
           repr(report.min), repr(report.max), repr(float(accuracy)), str(metrics[-1].env_steps)]
    _write_csv(result, SUMMARY_COLUMNS, [row])
    logger.info("%s=%s seed %d: final mean %.4g, expert accuracy %.3f",
                sweep.axis, format_value(value), seed, report.mean, accuracy)
    return row


def _run_cell_safely(args):
    sweep, value, seed, out_dir = args
    try:
        return value, seed, run_cell(sweep, value, seed, out_dir), None
    except Exception as e:
        logger.error("%s=%s seed %d failed: %s", sweep.axis, format_value(value), seed, e)
        return value, seed, None, '{}: {}'.format(type(e).__name__, e)


def aggregate(rows):
    r"""
    Return the summary row over the seeds of one value: the mean of the final
    means, the median of the final medians, the smallest minimum, the largest
    maximum and the median expert accuracy.

    EXAMPLES::

        >>> from expertac.harness.sweep import aggregate
        >>> aggregate([['gamma', '0.99', '0', '1.0', '1.0', '0.0', '1.0', '0.5', '100'],
        ...            ['gamma', '0.99', '1', '0.5', '0.0', '0.0', '2.0', '0.75', '100']])
        ['gamma', '0.99', 'all', '0.75', '0.5', '0.0', '2.0', '0.625', '100']
    """
    columns = np.array([[float(x) for x in row[3:8]] for row in rows])
    return [rows[0][0], rows[0][1], 'all',
            repr(float(np.mean(columns[:, 0]))),
            repr(float(np.median(columns[:, 1]))),
            repr(float(np.min(columns[:, 2]))),
            repr(float(np.max(columns[:, 3]))),
            repr(float(np.median(columns[:, 4]))),
            str(max(int(row[8]) for row in rows))]


@dataclasses.dataclass(frozen=True)
class SweepResult:
    r"""
    The rows of ``summary.csv`` (per-cell rows, then one aggregate row per
    value) and the failed cells as ``(value, seed, error)``.
    """
    rows: tuple
    failures: tuple

    def aggregates(self):
        return [row for row in self.rows if row[2] == 'all']


def run_sweep(sweep, out_dir, workers=1):
    r"""
    Run every cell of ``sweep`` below ``out_dir`` and write ``summary.csv`` and
    ``failures.csv``.

    Cells run in a pool of ``workers`` processes. A failing cell is listed in
    ``failures.csv`` and left out of the summary; the other cells still run.
    The summary is assembled in the order of :meth:`SweepSpec.cells` whatever
    order the cells finish in.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1, got {}".format(workers))
    os.makedirs(out_dir, exist_ok=True)
    sweep.base.save(os.path.join(out_dir, 'config.resolved'))
    jobs = [(sweep, value, seed, out_dir) for value, seed in sweep.cells()]
    logger.info("sweep over %s: %d values, %d seeds, %d workers",
                sweep.axis, len(sweep.values), len(sweep.seeds), workers)
    if workers == 1 or len(jobs) == 1:
        outcomes = [_run_cell_safely(job) for job in jobs]
    else:
        with multiprocessing.get_context('spawn').Pool(min(workers, len(jobs))) as pool:
            outcomes = pool.map(_run_cell_safely, jobs, chunksize=1)

    finished = {}
    failures = []
    for value, seed, row, error in outcomes:
        if row is None:
            failures.append((value, seed, error))
        else:
            finished[(format_value(value), seed)] = row

    rows = []
    for value in sweep.values:
        per_value = [finished[(format_value(value), s)] for s in sweep.seeds if (format_value(value), s) in finished]
        rows.extend(per_value)
    for value in sweep.values:
        per_value = [finished[(format_value(value), s)] for s in sweep.seeds if (format_value(value), s) in finished]
        if per_value:
            rows.append(aggregate(per_value))

    _write_csv(os.path.join(out_dir, 'summary.csv'), SUMMARY_COLUMNS, rows)
    _write_csv(os.path.join(out_dir, 'failures.csv'), FAILURE_COLUMNS,
               [(sweep.axis, format_value(v), s, e) for v, s, e in failures])
    if failures:
        logger.warning("%d of %d sweep cells failed, see failures.csv", len(failures), len(jobs))
    return SweepResult(rows=tuple(tuple(r) for r in rows), failures=tuple(failures))


def read_summary(path):
    r"""
    Return the rows of a ``summary.csv`` as lists of strings.
    """
    with open(path, newline='') as f:
        rows = list(csv.reader(f))
    if not rows or tuple(rows[0]) != SUMMARY_COLUMNS:
        raise ExpertACError("{} is not a sweep summary".format(path))
    return rows[1:]
