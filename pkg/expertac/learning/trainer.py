# -*- coding: utf-8 -*-
r"""
The training loop: actor-critic with an expert imitation term, optimized
with the Kronecker-factored natural gradient.

Every update

1. collects ``horizon`` steps of every actor,

2. computes the gradient of the actor-critic loss averaged over the batch,

3. updates the Kronecker factors from the rollout states,

4. adds ``lambda_expert`` times the gradient of the expert term on a
   minibatch of ``expert_k`` demonstrated steps,

5. preconditions the sum and takes a step of trust-region limited size.

EXAMPLES::

    >>> from expertac.learning.config import TrainConfig
    >>> from expertac.learning.trainer import train
    >>> cfg = TrainConfig(env='sparse-maze', lambda_expert=0.0, total_env_steps=100,
    ...                   actors=2, horizon=10, hidden=8, depth=1)
    >>> net, metrics = train(cfg)
    >>> [m.env_steps for m in metrics]
    [20, 40, 60, 80, 100]
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
import collections
import csv
import dataclasses
import logging
import os
import time

import numpy as np

from expertac.errors import ConfigError, DatasetError, TrainingDiverged
from expertac.environment import load_grid, VectorEnv

from .policy import (PolicyNet, forward, backward, one_hot, entropy_logit_gradient,
                     log_prob_and_entropy, weighted_log_likelihood_gradient, save_checkpoint)
from .rollout import collect
from .expert import expert_advantage, expert_accuracy, sample_batch, load_dataset
from .kfac import (FisherState, TrustRegionConfig, sample_fisher_gradients, update_factors,
                   precondition, trust_region_step, save_fisher)

logger = logging.getLogger(__name__)

RECENT_EPISODES = 100

METRICS_COLUMNS = ('update', 'env_steps', 'episodes', 'reward_mean', 'reward_median',
                   'policy_loss', 'value_loss', 'entropy', 'expert_loss', 'expert_accuracy', 'eta')

EVALUATION_COLUMNS = ('update', 'env_steps', 'mode', 'episodes', 'mean', 'median', 'min', 'max',
                      'success_rate')


def a2c_loss(net, batch, entropy_beta, trace=None):
    r"""
    Return ``(total, policy_loss, value_loss, entropy)`` of ``batch``.

    The total is the mean over the ``N*T`` samples of ``-adv log pi(a|s) +
    (R - V(s))^2 / 2 - entropy_beta H(pi(.|s))``; the advantages and returns
    are the constants stored in the batch.
    """
    if trace is None:
        trace = forward(net, batch.flat_observations())
    logp, entropy = log_prob_and_entropy(trace.logits, batch.flat('actions'))
    policy = float(-np.mean(batch.flat('advantages') * logp))
    value = float(np.mean(0.5 * (batch.flat('returns') - trace.values) ** 2))
    h = float(np.mean(entropy))
    return policy + value - entropy_beta * h, policy, value, h


def a2c_gradient(net, batch, entropy_beta, trace=None):
    r"""
    Return the gradient of the total of :func:`a2c_loss`.

    EXAMPLES::

        >>> import numpy as np
        >>> from expertac.environment import grid_environments, VectorEnv
        >>> from expertac.learning.policy import PolicyNet
        >>> from expertac.learning.rollout import collect
        >>> from expertac.learning.trainer import a2c_gradient
        >>> spec = grid_environments.open_room(2, 2)
        >>> net = PolicyNet.initial(spec.stack_dim, spec.action_count, hidden=(4,), seed=0)
        >>> batch = collect(net, VectorEnv(spec, 2, seed=0), 3, 0.9, np.random.default_rng(0))
        >>> a2c_gradient(net, batch, 0.01).is_finite()
        True
    """
    if trace is None:
        trace = forward(net, batch.flat_observations())
    size = trace.batch_size
    p = trace.probabilities
    advantages = batch.flat('advantages')
    logit_grads = advantages[:, None] * (p - one_hot(batch.flat('actions'), p.shape[1])) / size
    logit_grads -= entropy_beta * entropy_logit_gradient(trace.logits) / size
    value_grads = (trace.values - batch.flat('returns')) / size
    return backward(net, trace, logit_grads, value_grads)


def expert_loss(net, expert_batch, variant, weights=None):
    r"""
    Return ``-(1/k) sum_i w_i log pi(a_i | s_i)`` over the expert batch.

    The weights ``w`` are :func:`~expertac.learning.expert.expert_advantage`
    at the current value estimates unless given explicitly.
    """
    trace = forward(net, expert_batch.observations)
    if weights is None:
        weights = expert_advantage(variant, expert_batch, trace.values)
    logp, _ = log_prob_and_entropy(trace.logits, expert_batch.actions)
    return float(-np.mean(weights * logp))


def expert_gradient(net, expert_batch, variant, k=None):
    r"""
    Return ``(gradient, loss)`` of :func:`expert_loss`; the weights are held
    constant, in particular the value estimate inside the ``critic`` weight
    is not differentiated.
    """
    if k is not None and k != len(expert_batch):
        raise ValueError("expert batch has {} steps, expected {}".format(len(expert_batch), k))
    trace = forward(net, expert_batch.observations)
    weights = expert_advantage(variant, expert_batch, trace.values)
    logp, _ = log_prob_and_entropy(trace.logits, expert_batch.actions)
    grads = weighted_log_likelihood_gradient(net, trace, expert_batch.actions, weights)
    return grads, float(-np.mean(weights * logp))


@dataclasses.dataclass(frozen=True)
class UpdateStats:
    policy_loss: float
    value_loss: float
    entropy: float
    expert_loss: float
    eta: float


def combined_gradient(net, batch, expert_batch, lambda_expert, variant, entropy_beta, trace=None):
    r"""
    Return ``(g, losses)`` where ``g`` is the actor-critic gradient plus
    ``lambda_expert`` times the expert gradient on ``expert_batch``, before
    preconditioning.

    ``losses`` is ``(policy_loss, value_loss, entropy, expert_loss)``. With
    ``expert_batch=None`` the expert term is left out entirely.
    """
    if trace is None:
        trace = forward(net, batch.flat_observations())
    g = a2c_gradient(net, batch, entropy_beta, trace)
    _, policy, value, entropy = a2c_loss(net, batch, entropy_beta, trace)
    e_loss = 0.0
    if expert_batch is not None:
        ge, e_loss = expert_gradient(net, expert_batch, variant)
        g = g + lambda_expert * ge
    return g, (policy, value, entropy, e_loss)


def combined_update(net, fs, batch, expert_ds, cfg, rng, tr=None):
    r"""
    Perform one optimizer update and return ``(net, fs, UpdateStats)``.

    ``net`` is changed in place. Nothing is drawn from ``rng`` for the expert
    term when ``cfg.lambda_expert`` is zero, so such runs coincide with plain
    actor-critic runs.
    """
    if tr is None:
        tr = TrustRegionConfig(kl_radius=cfg.kl_radius, max_lr=cfg.max_lr)
    if cfg.lambda_expert > 0 and expert_ds is None:
        raise ConfigError("lambda_expert > 0 requires an expert dataset")
    trace = forward(net, batch.flat_observations())
    fs = update_factors(fs, trace, sample_fisher_gradients(net, trace, rng))
    expert_batch = None
    if cfg.lambda_expert > 0:
        expert_batch = sample_batch(expert_ds, cfg.expert_k, rng)
    g, (policy, value, entropy, e_loss) = combined_gradient(
        net, batch, expert_batch, cfg.lambda_expert, cfg.advantage, cfg.entropy_beta, trace)
    if not (np.isfinite([policy, value, entropy, e_loss]).all() and g.is_finite()):
        raise TrainingDiverged("non-finite loss or gradient (policy {}, value {}, expert {})".format(
            policy, value, e_loss))
    nat = precondition(fs, g)
    if not nat.is_finite():
        raise TrainingDiverged("non-finite preconditioned gradient")
    net, eta = trust_region_step(net, nat, fs, tr, cfg.base_lr)
    return net, fs, UpdateStats(policy_loss=policy, value_loss=value, entropy=entropy,
                                expert_loss=e_loss, eta=eta)


@dataclasses.dataclass(frozen=True)
class TrainMetrics:
    r"""
    One row of ``metrics.csv``; ``wall_clock`` (seconds since the start of
    the run) is only logged.
    """
    update: int
    env_steps: int
    episodes: int
    reward_mean: float
    reward_median: float
    policy_loss: float
    value_loss: float
    entropy: float
    expert_loss: float
    expert_accuracy: float
    eta: float
    wall_clock: float = 0.0

    def row(self):
        return [_format(getattr(self, c)) for c in METRICS_COLUMNS]


def run_seeds(seed):
    r"""
    Return the seed sequences of network initialization, environments,
    training and evaluation of a run with root ``seed``.
    """
    return np.random.SeedSequence(seed).spawn(4)


def initial_network(spec, cfg):
    r"""
    Return the freshly initialized network of a run of ``cfg`` on ``spec``.

    EXAMPLES::

        >>> from expertac.environment import load_grid
        >>> from expertac.learning.config import TrainConfig
        >>> from expertac.learning.trainer import initial_network
        >>> cfg = TrainConfig(hidden=8, depth=1)
        >>> initial_network(load_grid('sparse-maze'), cfg) == initial_network(load_grid('sparse-maze'), cfg)
        True
    """
    init_ss = run_seeds(cfg.seed)[0]
    return PolicyNet.initial(spec.stack_dim, spec.action_count, hidden=cfg.hidden_sizes,
                             seed=int(init_ss.generate_state(1)[0]))


def _format(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


class Trainer:
    r"""
    One training run of ``cfg``.

    INPUT:

    - ``cfg`` -- a :class:`~expertac.learning.config.TrainConfig`

    - ``out_dir`` -- a directory for ``config.resolved``, ``metrics.csv``,
      ``evaluations.csv`` and checkpoints, or ``None`` to write nothing

    - ``dataset`` -- an :class:`~expertac.learning.expert.ExpertDataset`
      used instead of loading ``cfg.expert``
    """
    def __init__(self, cfg, out_dir=None, dataset=None):
        self.cfg = cfg
        self.out_dir = out_dir
        self.spec = load_grid(cfg.env).with_curriculum(cfg.respawn_curriculum)
        self.dataset = self._resolve_dataset(dataset)

        _, env_ss, train_ss, eval_ss = run_seeds(cfg.seed)
        self.net = initial_network(self.spec, cfg)
        self.venv = VectorEnv(self.spec, cfg.actors, seed=int(env_ss.generate_state(1)[0]))
        self.rng = np.random.default_rng(train_ss)
        self._eval_seed = int(eval_ss.generate_state(1)[0])
        self.fisher = FisherState.initial(self.net, ema_decay=cfg.ema_decay, damping=cfg.damping,
                                          eigen_refresh=cfg.eigen_refresh)
        self.trust_region = TrustRegionConfig(kl_radius=cfg.kl_radius, max_lr=cfg.max_lr)
        self.metrics = []
        self._recent = collections.deque(maxlen=RECENT_EPISODES)
        self._episodes = 0

    def _resolve_dataset(self, dataset):
        cfg = self.cfg
        if dataset is None and cfg.expert is not None:
            dataset = load_dataset(cfg.expert, cfg.gamma, spec=self.spec)
        if dataset is None:
            if cfg.lambda_expert > 0:
                raise ConfigError("lambda_expert = {} requires an expert trajectory file (--expert)".format(
                    cfg.lambda_expert))
            return None
        if dataset.env_id != self.spec.env_id:
            raise DatasetError("expert data recorded on {!r}, training on {!r}".format(
                dataset.env_id, self.spec.env_id))
        if dataset.gamma != cfg.gamma:
            dataset = dataset.with_gamma(cfg.gamma)
        return dataset

    def _path(self, *parts):
        return os.path.join(self.out_dir, *parts)

    def _prepare_output(self):
        if self.out_dir is None:
            return
        os.makedirs(self._path('checkpoints'), exist_ok=True)
        self.cfg.save(self._path('config.resolved'))
        with open(self._path('metrics.csv'), 'w', newline='') as f:
            csv.writer(f, lineterminator='\n').writerow(METRICS_COLUMNS)
        with open(self._path('evaluations.csv'), 'w', newline='') as f:
            csv.writer(f, lineterminator='\n').writerow(EVALUATION_COLUMNS)

    def _append(self, name, row):
        if self.out_dir is None:
            return
        with open(self._path(name), 'a', newline='') as f:
            csv.writer(f, lineterminator='\n').writerow(row)

    def _evaluate(self, update, env_steps):
        from expertac.harness.evaluation import evaluate
        reports = []
        for mode in ('stochastic', 'greedy'):
            report = evaluate(self.net, self.spec, self.cfg.eval_episodes, mode, seed=self._eval_seed + update)
            reports.append(report)
            self._append('evaluations.csv', [update, env_steps, mode, report.episodes, repr(report.mean),
                                             repr(report.median), repr(report.min), repr(report.max),
                                             repr(report.success_rate)])
        return reports

    def run(self):
        r"""
        Train for ``cfg.updates`` updates and return ``(net, metrics)``.
        """
        cfg = self.cfg
        self._prepare_output()
        start = time.perf_counter()
        updates = cfg.updates
        logger.info("training on %s for %d updates of %d steps (lambda_expert=%s, advantage=%s)",
                    self.spec.env_id, updates, cfg.batch_size, cfg.lambda_expert, cfg.advantage)
        for update in range(1, updates + 1):
            batch = collect(self.net, self.venv, cfg.horizon, cfg.gamma, self.rng)
            for episode in batch.episodes:
                self._recent.append(episode.reward)
            self._episodes += len(batch.episodes)
            try:
                self.net, self.fisher, stats = combined_update(self.net, self.fisher, batch, self.dataset,
                                                               cfg, self.rng, self.trust_region)
            except TrainingDiverged as e:
                path = None
                if self.out_dir is not None:
                    path = self._path('checkpoints', 'diverged.ckpt')
                    save_checkpoint(self.net, path)
                logger.error("training diverged at update %d: %s", update, e)
                raise TrainingDiverged("update {}: {}".format(update, e), checkpoint=path)

            env_steps = update * cfg.batch_size
            recent = np.array(self._recent) if self._recent else np.zeros(1)
            metrics = TrainMetrics(update=update,
                                   env_steps=env_steps,
                                   episodes=self._episodes,
                                   reward_mean=float(np.mean(recent)),
                                   reward_median=float(np.median(recent)),
                                   policy_loss=stats.policy_loss,
                                   value_loss=stats.value_loss,
                                   entropy=stats.entropy,
                                   expert_loss=stats.expert_loss,
                                   expert_accuracy=expert_accuracy(self.net, self.dataset) if self.dataset is not None else 0.0,
                                   eta=stats.eta,
                                   wall_clock=time.perf_counter() - start)
            self.metrics.append(metrics)
            self._append('metrics.csv', metrics.row())

            if update % cfg.eval_every == 0 or update == updates:
                stochastic, greedy = self._evaluate(update, env_steps)
                logger.info("update %d, %d env steps: recent reward mean %.4g median %.4g, "
                            "eval mean %.4g (greedy %.4g, success %.2f), eta %.4g, %.1fs",
                            update, env_steps, metrics.reward_mean, metrics.reward_median,
                            stochastic.mean, greedy.mean, greedy.success_rate, stats.eta, metrics.wall_clock)
                if self.out_dir is not None:
                    save_checkpoint(self.net, self._path('checkpoints', 'update_{:06d}.ckpt'.format(update)))

        if self.out_dir is not None:
            save_checkpoint(self.net, self._path('final.ckpt'))
            save_fisher(self.fisher, self._path('final.fisher'))
        return self.net, self.metrics


def train(cfg, out_dir=None, dataset=None):
    r"""
    Run :class:`Trainer` and return ``(net, metrics)``.
    """
    return Trainer(cfg, out_dir=out_dir, dataset=dataset).run()
