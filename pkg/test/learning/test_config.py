# -*- coding: utf-8 -*-
r"""
Test reading, writing and validating training configurations.
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


def test_defaults():
    from expertac.learning.config import TrainConfig
    cfg = TrainConfig()
    assert cfg.gamma == 0.99
    assert cfg.batch_size == 320
    assert cfg.hidden_sizes == (64, 64)
    assert cfg.updates == 625


def test_updates_round_up():
    from expertac.learning.config import TrainConfig
    assert TrainConfig(total_env_steps=321, actors=16, horizon=20).updates == 2
    assert TrainConfig(total_env_steps=1, actors=16, horizon=20).updates == 1


def test_text_round_trip(tmp_path):
    from expertac.learning.config import TrainConfig
    cfg = TrainConfig(env='mini-montezuma', lambda_expert=0.0, respawn_curriculum=True, expert='x.traj', seed=3)
    path = str(tmp_path / "config.resolved")
    cfg.save(path)
    assert TrainConfig.from_file(path) == cfg
    assert 'respawn_curriculum=1' in cfg.to_text().splitlines()
    assert 'expert=' in TrainConfig().to_text().splitlines()
    assert TrainConfig.from_text(TrainConfig().to_text()).expert is None


@pytest.mark.parametrize("text,message", [
    ("gamma=0", "gamma must lie in"),
    ("gamma=1.5", "gamma must lie in"),
    ("lambda-expert=-1", "lambda_expert must be non-negative"),
    ("advantage=gae", "advantage must be one of reward, critic, simple, got 'gae'"),
    ("actors=0", "actors must be at least 1"),
    ("ema_decay=1", "ema_decay must lie in"),
    ("learning_rate=0.1", "unknown configuration key 'learning_rate'"),
    ("horizon=ten", "invalid value 'ten' for horizon"),
    ("respawn_curriculum=maybe", "invalid value 'maybe' for respawn_curriculum"),
    ("horizon", "line 1: expected key=value"),
    ("seed=1\nseed=2", "line 2: repeated key 'seed'"),
])
def test_invalid(text, message):
    from expertac.errors import ConfigError
    from expertac.learning.config import TrainConfig
    with pytest.raises(ConfigError, match=message):
        TrainConfig.from_text(text)


def test_boolean_spellings():
    from expertac.learning.config import TrainConfig
    for text in ('1', 'true', 'Yes', 'on'):
        assert TrainConfig.from_text("respawn-curriculum=" + text).respawn_curriculum is True
    for text in ('0', 'false', 'No', 'off'):
        assert TrainConfig.from_text("respawn-curriculum=" + text).respawn_curriculum is False


def test_overrides():
    from expertac.errors import ConfigError
    from expertac.learning.config import TrainConfig
    cfg = TrainConfig().with_overrides({'lambda-expert': '0.5'}, horizon=5)
    assert cfg.lambda_expert == 0.5 and cfg.horizon == 5
    with pytest.raises(ConfigError, match="unknown configuration key 'bogus'"):
        TrainConfig().with_overrides(bogus=1)


def test_missing_file(tmp_path):
    from expertac.errors import ConfigError
    from expertac.learning.config import TrainConfig
    with pytest.raises(ConfigError, match="cannot read configuration"):
        TrainConfig.from_file(str(tmp_path / "missing.resolved"))


def test_undecodable_file(tmp_path):
    from expertac.errors import ConfigError
    from expertac.learning.config import TrainConfig
    path = tmp_path / "config.resolved"
    path.write_bytes(b'seed=1\n\xff\xfe\n')
    with pytest.raises(ConfigError, match="not a configuration file"):
        TrainConfig.from_file(str(path))
