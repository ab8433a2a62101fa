# -*- coding: utf-8 -*-
r"""
Test parameter sweeps: cell layout, resumption, aggregation and failures.
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


def _base(tmp_path, **kwds):
    from expertac.environment import grid_environments, save_grid
    from expertac.learning.config import TrainConfig
    path = str(tmp_path / "room.grid")
    save_grid(grid_environments.open_room(2, 3, step_limit=20), path)
    values = dict(env=path, lambda_expert=0.0, horizon=5, actors=2, hidden=8, depth=1,
                  total_env_steps=50, eval_every=5, eval_episodes=3, expert_k=4)
    values.update(kwds)
    return TrainConfig(**values)


def _read(path):
    with open(path, 'rb') as f:
        return f.read()


def test_single_cell_is_a_training_run(tmp_path):
    from expertac.environment import load_grid
    from expertac.harness.evaluation import evaluate
    from expertac.harness.sweep import SweepSpec, run_sweep
    from expertac.learning.trainer import train
    base = _base(tmp_path)
    with pytest.warns(UserWarning, match="at least 3 are needed"):
        sweep = SweepSpec(base, 'gamma', [0.99], [0])
    result = run_sweep(sweep, str(tmp_path / "sweep"))
    net, metrics = train(base)
    report = evaluate(net, load_grid(base.env), base.eval_episodes, 'greedy', seed=0)
    row = result.rows[0]
    assert row[:3] == ('gamma', '0.99', '0')
    assert float(row[3]) == report.mean
    assert float(row[5]) == report.min and float(row[6]) == report.max
    assert int(row[8]) == metrics[-1].env_steps == 50
    assert result.aggregates()[0][2] == 'all'
    assert result.failures == ()


def test_layout_and_resume(tmp_path):
    import os
    from expertac.harness.sweep import SweepSpec, run_sweep, read_summary
    sweep = SweepSpec(_base(tmp_path), 'lambda_expert', [0.0, 0.5], [0, 1, 2])
    out = str(tmp_path / "sweep")
    result = run_sweep(sweep, out)
    summary = _read(os.path.join(out, 'summary.csv'))
    cell = os.path.join(out, 'lambda_expert=0.5', 'seed=1')
    for name in ('result.csv', 'episodes.csv', 'expert.traj', 'metrics.csv', 'final.ckpt'):
        assert os.path.exists(os.path.join(cell, name)), name
    assert not os.path.exists(os.path.join(out, 'lambda_expert=0.0', 'seed=1', 'expert.traj'))
    assert [tuple(r) for r in read_summary(os.path.join(out, 'summary.csv'))] == list(result.rows)
    assert [r[1:3] for r in result.rows[:6]] == [(v, s) for v in ('0.0', '0.5') for s in ('0', '1', '2')]
    assert [r[1:3] for r in result.rows[6:]] == [('0.0', 'all'), ('0.5', 'all')]

    # a complete sweep is read back without training
    os.remove(os.path.join(out, 'summary.csv'))
    final = _read(os.path.join(cell, 'final.ckpt'))
    run_sweep(sweep, out)
    assert _read(os.path.join(out, 'summary.csv')) == summary
    assert _read(os.path.join(cell, 'final.ckpt')) == final

    # an interrupted cell is trained again with the same outcome
    os.remove(os.path.join(cell, 'result.csv'))
    run_sweep(sweep, out)
    assert _read(os.path.join(out, 'summary.csv')) == summary


def test_aggregates_match_episode_files(tmp_path):
    import csv
    import os
    import numpy as np
    from expertac.harness.sweep import SweepSpec, run_sweep
    sweep = SweepSpec(_base(tmp_path, lambda_expert=0.5), 'advantage', ['critic', 'simple'], [0, 1, 2])
    out = str(tmp_path / "sweep")
    result = run_sweep(sweep, out)
    for value, aggregate in zip(sweep.values, result.aggregates()):
        means, medians, lows, highs = [], [], [], []
        for seed in sweep.seeds:
            with open(os.path.join(sweep.cell_directory(out, value, seed), 'episodes.csv')) as f:
                rewards = [float(r['reward']) for r in csv.DictReader(f)]
            assert len(rewards) == 3
            means.append(np.mean(rewards))
            medians.append(np.median(rewards))
            lows.append(min(rewards))
            highs.append(max(rewards))
        assert aggregate[1] == value
        assert float(aggregate[3]) == pytest.approx(np.mean(means), abs=1e-12)
        assert float(aggregate[4]) == pytest.approx(np.median(medians), abs=1e-12)
        assert float(aggregate[5]) == min(lows)
        assert float(aggregate[6]) == max(highs)


def test_failing_cell_is_listed(tmp_path, monkeypatch):
    import csv
    import os
    from expertac.errors import TrainingDiverged
    from expertac.harness import sweep as sweeps
    train = sweeps.train

    def failing_train(cfg, out_dir=None, dataset=None):
        if cfg.seed == 1:
            raise TrainingDiverged("non-finite loss")
        return train(cfg, out_dir=out_dir, dataset=dataset)

    monkeypatch.setattr(sweeps, 'train', failing_train)
    sweep = sweeps.SweepSpec(_base(tmp_path), 'gamma', [0.9], [0, 1, 2])
    out = str(tmp_path / "sweep")
    result = sweeps.run_sweep(sweep, out)
    assert result.failures == ((0.9, 1, 'TrainingDiverged: non-finite loss'),)
    assert [r[2] for r in result.rows] == ['0', '2', 'all']
    with open(os.path.join(out, 'failures.csv')) as f:
        rows = list(csv.reader(f))
    assert rows == [list(sweeps.FAILURE_COLUMNS), ['gamma', '0.9', '1', 'TrainingDiverged: non-finite loss']]


def test_workers_give_the_same_summary(tmp_path):
    import os
    from expertac.harness.sweep import SweepSpec, run_sweep
    sweep = SweepSpec(_base(tmp_path), 'gamma', [0.9, 0.99], [0, 1, 2])
    run_sweep(sweep, str(tmp_path / "serial"))
    run_sweep(sweep, str(tmp_path / "parallel"), workers=2)
    assert (_read(os.path.join(str(tmp_path / "serial"), 'summary.csv')) ==
            _read(os.path.join(str(tmp_path / "parallel"), 'summary.csv')))


def test_curriculum_against_expert(tmp_path):
    from expertac.harness.sweep import SweepSpec
    sweep = SweepSpec(_base(tmp_path, lambda_expert=0.0), 'curriculum_vs_expert', ['curriculum', 'expert'], [0, 1, 2])
    curriculum = sweep.cell_config('curriculum', 1)
    expert = sweep.cell_config('expert', 1)
    assert curriculum.respawn_curriculum and curriculum.lambda_expert == 0.0 and curriculum.seed == 1
    assert not expert.respawn_curriculum and expert.lambda_expert == 0.25
    assert sweep.trajectory_count('expert') == 1


def test_trajectory_count_axis(tmp_path):
    from expertac.harness.sweep import SweepSpec
    sweep = SweepSpec(_base(tmp_path), 'expert_trajectory_count', SweepSpec.parse_values(
        'expert_trajectory_count', ['1', '4']), [0, 1, 2], expert_trajectories=2)
    assert sweep.values == (1, 4)
    assert [sweep.trajectory_count(v) for v in sweep.values] == [1, 4]
    assert sweep.cell_config(4, 0).lambda_expert == 0.25


@pytest.mark.parametrize("axis,values,seeds,kwds,message", [
    ('horizon', [1], [0, 1, 2], {}, "unknown sweep axis 'horizon'"),
    ('gamma', [], [0, 1, 2], {}, "at least one value"),
    ('gamma', [0.9], [], {}, "at least one seed"),
    ('gamma', [0.9], [0, 0, 1], {}, "repeated seeds"),
    ('gamma', [0.9, 0.9], [0, 1, 2], {}, "repeated values"),
    ('gamma', [1.5], [0, 1, 2], {}, "gamma must lie in"),
    ('advantage', ['gae'], [0, 1, 2], {}, "advantage must be one of"),
    ('curriculum_vs_expert', ['both'], [0, 1, 2], {}, "takes 'curriculum' or 'expert'"),
    ('gamma', [0.9], [0, 1, 2], {'expert_noise': 1.0}, r"expert_noise must lie in \[0, 1\)"),
    ('gamma', [0.9], [0, 1, 2], {'eval_mode': 'argmax'}, "unknown policy mode 'argmax'"),
])
def test_invalid_sweeps(tmp_path, axis, values, seeds, kwds, message):
    from expertac.errors import ConfigError
    from expertac.harness.sweep import SweepSpec
    with pytest.raises(ConfigError, match=message):
        SweepSpec(_base(tmp_path), axis, values, seeds, **kwds)
