# -*- coding: utf-8 -*-
r"""
Test the training loop and the combined actor-critic and expert update.
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


def _grid_file(tmp_path):
    from expertac.environment import grid_environments, save_grid
    path = str(tmp_path / "room.grid")
    save_grid(grid_environments.open_room(2, 3, step_limit=20), path)
    return path


def _config(tmp_path, **kwds):
    from expertac.learning.config import TrainConfig
    values = dict(env=_grid_file(tmp_path), lambda_expert=0.0, horizon=5, actors=2, hidden=8, depth=1,
                  total_env_steps=100, eval_every=5, eval_episodes=2, expert_k=4, eigen_refresh=3)
    values.update(kwds)
    return TrainConfig(**values)


def _dataset(cfg):
    from expertac.environment import load_grid
    from expertac.learning.expert import generate_dataset
    return generate_dataset(load_grid(cfg.env), trajectories=2, noise=0.2, seed=0, gamma=cfg.gamma)


def test_plain_actor_critic_path(tmp_path):
    r"""
    Without the expert term, training is the plain natural actor-critic loop.
    """
    import numpy as np
    from expertac.environment import load_grid, VectorEnv
    from expertac.learning.policy import forward
    from expertac.learning.rollout import collect
    from expertac.learning.kfac import (FisherState, TrustRegionConfig, sample_fisher_gradients,
                                        update_factors, precondition, trust_region_step)
    from expertac.learning.trainer import Trainer, a2c_gradient, run_seeds, initial_network
    cfg = _config(tmp_path, total_env_steps=1000, eval_every=1000)
    assert cfg.updates == 100

    trained, metrics = Trainer(cfg, dataset=_dataset(cfg)).run()
    assert len(metrics) == 100

    spec = load_grid(cfg.env)
    _, env_ss, train_ss, _ = run_seeds(cfg.seed)
    net = initial_network(spec, cfg)
    venv = VectorEnv(spec, cfg.actors, seed=int(env_ss.generate_state(1)[0]))
    rng = np.random.default_rng(train_ss)
    fs = FisherState.initial(net, ema_decay=cfg.ema_decay, damping=cfg.damping, eigen_refresh=cfg.eigen_refresh)
    tr = TrustRegionConfig(kl_radius=cfg.kl_radius, max_lr=cfg.max_lr)
    for _ in range(cfg.updates):
        batch = collect(net, venv, cfg.horizon, cfg.gamma, rng)
        trace = forward(net, batch.flat_observations())
        fs = update_factors(fs, trace, sample_fisher_gradients(net, trace, rng))
        nat = precondition(fs, a2c_gradient(net, batch, cfg.entropy_beta, trace))
        net, _ = trust_region_step(net, nat, fs, tr, cfg.base_lr)

    assert np.array_equal(trained.flat_parameters(), net.flat_parameters())
    assert all(m.expert_loss == 0.0 for m in metrics)


def test_no_expert_draws_without_expert_term(tmp_path):
    import numpy as np
    from expertac.environment import load_grid, VectorEnv
    from expertac.learning.kfac import FisherState
    from expertac.learning.policy import PolicyNet
    from expertac.learning.rollout import collect
    from expertac.learning.trainer import combined_update
    cfg = _config(tmp_path)
    ds = _dataset(cfg)
    spec = load_grid(cfg.env)

    def rng_after(lambda_expert, dataset):
        net = PolicyNet.initial(spec.stack_dim, spec.action_count, hidden=(8,), seed=0)
        batch = collect(net, VectorEnv(spec, 2, seed=0), 5, cfg.gamma, np.random.default_rng(1))
        rng = np.random.default_rng(2)
        combined_update(net, FisherState.initial(net), batch, dataset,
                        cfg.with_overrides(lambda_expert=lambda_expert), rng)
        return rng.random()

    assert rng_after(0.0, ds) == rng_after(0.0, None)
    assert rng_after(0.5, ds) != rng_after(0.0, ds)


def test_output_files_are_reproducible(tmp_path):
    import os
    from expertac.learning.trainer import train
    cfg = _config(tmp_path, lambda_expert=0.5, advantage='reward')
    ds = _dataset(cfg)
    first = str(tmp_path / "first")
    second = str(tmp_path / "second")
    train(cfg, out_dir=first, dataset=ds)
    train(cfg, out_dir=second, dataset=ds)
    names = ['config.resolved', 'metrics.csv', 'evaluations.csv', 'final.ckpt', 'final.fisher',
             os.path.join('checkpoints', 'update_000005.ckpt'), os.path.join('checkpoints', 'update_000010.ckpt')]
    for name in names:
        with open(os.path.join(first, name), 'rb') as a, open(os.path.join(second, name), 'rb') as b:
            assert a.read() == b.read(), name


def test_output_contents(tmp_path):
    import csv
    import os
    from expertac.learning.config import TrainConfig
    from expertac.learning.policy import load_checkpoint
    from expertac.learning.trainer import train, METRICS_COLUMNS, EVALUATION_COLUMNS
    cfg = _config(tmp_path, lambda_expert=0.5, advantage='simple')
    out = str(tmp_path / "run")
    net, metrics = train(cfg, out_dir=out, dataset=_dataset(cfg))
    assert TrainConfig.from_file(os.path.join(out, 'config.resolved')) == cfg
    assert load_checkpoint(os.path.join(out, 'final.ckpt')) == net
    with open(os.path.join(out, 'metrics.csv')) as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == METRICS_COLUMNS
    assert [int(r[0]) for r in rows[1:]] == list(range(1, 11))
    assert [int(r[1]) for r in rows[1:]] == [10 * u for u in range(1, 11)]
    assert all(0.0 <= m.expert_accuracy <= 1.0 for m in metrics)
    assert all(m.expert_loss > 0.0 for m in metrics)
    assert all(0 < m.eta <= cfg.max_lr for m in metrics)
    with open(os.path.join(out, 'evaluations.csv')) as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == EVALUATION_COLUMNS
    assert [(r[0], r[2]) for r in rows[1:]] == [('5', 'stochastic'), ('5', 'greedy'),
                                                ('10', 'stochastic'), ('10', 'greedy')]


def test_expert_term_requires_data(tmp_path):
    from expertac.errors import ConfigError
    from expertac.learning.trainer import Trainer
    with pytest.raises(ConfigError, match=r"lambda_expert = 0.5 requires an expert trajectory file \(--expert\)"):
        Trainer(_config(tmp_path, lambda_expert=0.5))


def test_expert_data_of_other_environment(tmp_path):
    from expertac.errors import DatasetError
    from expertac.environment import grid_environments
    from expertac.learning.expert import generate_dataset
    from expertac.learning.trainer import Trainer
    with pytest.raises(DatasetError, match="expert data recorded on 'open-room-3x3'"):
        Trainer(_config(tmp_path, lambda_expert=0.5), dataset=generate_dataset(grid_environments.open_room(3, 3)))


def test_expert_file_is_loaded(tmp_path):
    from expertac.learning.expert import save_dataset
    from expertac.learning.trainer import Trainer
    cfg = _config(tmp_path, lambda_expert=0.5, gamma=0.9)
    ds = _dataset(cfg.with_overrides(gamma=0.5))
    path = str(tmp_path / "expert.traj")
    save_dataset(ds, path)
    trainer = Trainer(cfg.with_overrides(expert=path))
    assert trainer.dataset.gamma == 0.9
    assert trainer.dataset == ds.with_gamma(0.9)


def test_divergence_keeps_a_checkpoint(tmp_path, monkeypatch):
    import os
    from expertac.errors import TrainingDiverged
    from expertac.learning import trainer
    from expertac.learning.policy import load_checkpoint
    monkeypatch.setattr(trainer, 'precondition', lambda fs, g: g * float('nan'))
    out = str(tmp_path / "run")
    t = trainer.Trainer(_config(tmp_path), out_dir=out)
    with pytest.raises(TrainingDiverged, match="update 1: non-finite preconditioned gradient") as e:
        t.run()
    assert e.value.checkpoint == os.path.join(out, 'checkpoints', 'diverged.ckpt')
    assert load_checkpoint(e.value.checkpoint) == t.net


def test_curriculum_training_runs(tmp_path):
    from expertac.learning.trainer import Trainer
    trainer = Trainer(_config(tmp_path, respawn_curriculum=True))
    assert trainer.spec.respawn_curriculum
    net, metrics = trainer.run()
    assert metrics[-1].env_steps == 100
