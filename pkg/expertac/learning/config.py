# -*- coding: utf-8 -*-
r"""
Training configuration.

A :class:`TrainConfig` is read from and written to flat ``key=value`` text.
Keys are the field names; the dashed spelling used on the command line
(``lambda-expert``) is accepted as well. Lines starting with ``#`` and blank
lines are ignored.

EXAMPLES::

    >>> from expertac.learning.config import TrainConfig
    >>> cfg = TrainConfig.from_text("# a comment\nlambda-expert=0.5\nadvantage=simple\n")
    >>> cfg.lambda_expert, cfg.advantage, cfg.horizon
    (0.5, 'simple', 20)
    >>> TrainConfig.from_text(cfg.to_text()) == cfg
    True
    >>> TrainConfig.from_text("horizon=0")
    Traceback (most recent call last):
    ...
    expertac.errors.ConfigError: horizon must be at least 1, got 0
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

from expertac.errors import ConfigError

from .expert import ADVANTAGE_VARIANTS


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    r"""
    Every parameter of a training run.

    - ``env`` -- a shipped environment name or the path of a grid file

    - ``seed`` -- the root of every random stream of the run

    - ``gamma`` -- the discount

    - ``lambda_expert`` -- the weight of the expert term; ``0`` disables it

    - ``expert_k`` -- the expert minibatch size

    - ``advantage`` -- ``'reward'``, ``'critic'`` or ``'simple'``

    - ``horizon``, ``actors`` -- rollout length and number of actors

    - ``base_lr``, ``entropy_beta`` -- learning rate and entropy bonus

    - ``total_env_steps`` -- the environment steps budget of the run

    - ``eval_every``, ``eval_episodes`` -- evaluation and checkpoint period
      (in updates) and episodes per evaluation

    - ``expert`` -- path of a trajectory file, required when
      ``lambda_expert > 0``

    - ``respawn_curriculum`` -- start training episodes on random reachable
      cells

    - ``hidden``, ``depth`` -- width and number of trunk layers

    - ``ema_decay``, ``damping``, ``kl_radius``, ``max_lr``,
      ``eigen_refresh`` -- optimizer settings
    """
    env: str = 'sparse-maze'
    seed: int = 0
    gamma: float = 0.99
    lambda_expert: float = 0.25
    expert_k: int = 64
    advantage: str = 'critic'
    horizon: int = 20
    actors: int = 16
    base_lr: float = 0.03
    entropy_beta: float = 0.001
    total_env_steps: int = 200000
    eval_every: int = 50
    eval_episodes: int = 10
    expert: str = None
    respawn_curriculum: bool = False
    hidden: int = 64
    depth: int = 2
    ema_decay: float = 0.95
    damping: float = 0.01
    kl_radius: float = 0.002
    max_lr: float = 0.25
    eigen_refresh: int = 10

    def __post_init__(self):
        def check(condition, message, value):
            if not condition:
                raise ConfigError(message.format(value))
        check(0.0 < self.gamma <= 1.0, "gamma must lie in (0, 1], got {}", self.gamma)
        check(self.lambda_expert >= 0, "lambda_expert must be non-negative, got {}", self.lambda_expert)
        check(self.expert_k >= 1, "expert_k must be at least 1, got {}", self.expert_k)
        check(self.advantage in ADVANTAGE_VARIANTS,
              "advantage must be one of reward, critic, simple, got {!r}", self.advantage)
        check(self.horizon >= 1, "horizon must be at least 1, got {}", self.horizon)
        check(self.actors >= 1, "actors must be at least 1, got {}", self.actors)
        check(self.base_lr > 0, "base_lr must be positive, got {}", self.base_lr)
        check(self.entropy_beta >= 0, "entropy_beta must be non-negative, got {}", self.entropy_beta)
        check(self.total_env_steps >= 1, "total_env_steps must be at least 1, got {}", self.total_env_steps)
        check(self.eval_every >= 1, "eval_every must be at least 1, got {}", self.eval_every)
        check(self.eval_episodes >= 1, "eval_episodes must be at least 1, got {}", self.eval_episodes)
        check(self.seed >= 0, "seed must be non-negative, got {}", self.seed)
        check(self.hidden >= 1, "hidden must be at least 1, got {}", self.hidden)
        check(self.depth >= 0, "depth must be non-negative, got {}", self.depth)
        check(0.0 < self.ema_decay < 1.0, "ema_decay must lie in (0, 1), got {}", self.ema_decay)
        check(self.damping >= 0, "damping must be non-negative, got {}", self.damping)
        check(self.kl_radius > 0, "kl_radius must be positive, got {}", self.kl_radius)
        check(self.max_lr > 0, "max_lr must be positive, got {}", self.max_lr)
        check(self.eigen_refresh >= 1, "eigen_refresh must be at least 1, got {}", self.eigen_refresh)

    @property
    def hidden_sizes(self):
        return (self.hidden,) * self.depth

    @property
    def batch_size(self):
        return self.actors * self.horizon

    @property
    def updates(self):
        r"""
        The number of updates of a run: ``ceil(total_env_steps / (actors *
        horizon))``, at least one.
        """
        return max(1, -(-self.total_env_steps // self.batch_size))

    @staticmethod
    def field_names():
        return tuple(f.name for f in dataclasses.fields(TrainConfig))

    @staticmethod
    def convert(name, text):
        r"""
        Convert the string ``text`` to the type of field ``name``.
        """
        fields = {f.name: f for f in dataclasses.fields(TrainConfig)}
        key = name.strip().replace('-', '_')
        if key not in fields:
            raise ConfigError("unknown configuration key {!r}".format(name))
        default = fields[key].default
        text = text.strip()
        try:
            if isinstance(default, bool):
                lowered = text.lower()
                if lowered in ('1', 'true', 'yes', 'on'):
                    return key, True
                if lowered in ('0', 'false', 'no', 'off'):
                    return key, False
                raise ValueError(text)
            if isinstance(default, int):
                return key, int(text)
            if isinstance(default, float):
                return key, float(text)
        except ValueError:
            raise ConfigError("invalid value {!r} for {}".format(text, key))
        if default is None:
            return key, (text or None)
        return key, text

    @staticmethod
    def from_mapping(values):
        r"""
        Build a configuration from a mapping of keys to strings (or already
        converted values); missing keys keep their defaults.
        """
        return TrainConfig().with_overrides(values)

    @staticmethod
    def from_text(text):
        values = {}
        for lineno, line in enumerate(text.splitlines()):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            key, eq, value = line.partition('=')
            if not eq:
                raise ConfigError("line {}: expected key=value, got {!r}".format(lineno + 1, line))
            key = key.strip().replace('-', '_')
            if key in values:
                raise ConfigError("line {}: repeated key {!r}".format(lineno + 1, key))
            values[key] = value
        return TrainConfig.from_mapping(values)

    @staticmethod
    def from_file(path):
        try:
            with open(path, encoding='utf-8') as f:
                text = f.read()
        except OSError as e:
            raise ConfigError("cannot read configuration {}: {}".format(path, e))
        except UnicodeDecodeError as e:
            raise ConfigError("{}: not a configuration file ({})".format(path, e))
        return TrainConfig.from_text(text)

    def with_overrides(self, values=None, **kwds):
        r"""
        Return a copy with the fields in ``values`` (and ``kwds``) replaced;
        string values are converted to the field type.
        """
        changes = {}
        items = dict(values or {})
        items.update(kwds)
        for name, value in items.items():
            if isinstance(value, str):
                key, value = TrainConfig.convert(name, value)
            else:
                key = name.replace('-', '_')
                if key not in self.field_names():
                    raise ConfigError("unknown configuration key {!r}".format(name))
            changes[key] = value
        return dataclasses.replace(self, **changes)

    def to_text(self):
        r"""
        Return the configuration as ``key=value`` lines in field order; reading
        the text back gives an equal configuration.
        """
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None:
                value = ''
            elif isinstance(value, bool):
                value = int(value)
            elif isinstance(value, float):
                value = repr(value)
            lines.append('{}={}'.format(f.name, value))
        return '\n'.join(lines) + '\n'

    def save(self, path):
        with open(path, 'w', encoding='utf-8') as f:
            f.write(self.to_text())
