# -*- coding: utf-8 -*-
r"""
Test expert demonstrations: planning, trajectory files, sampling and cloning.
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


def _saved(tmp_path, trajectories=3, noise=0.5):
    from expertac.environment import grid_environments
    from expertac.learning.expert import generate_dataset, save_dataset
    spec = grid_environments.open_room(2, 2)
    ds = generate_dataset(spec, trajectories=trajectories, noise=noise, seed=1, gamma=0.9)
    path = tmp_path / "expert.traj"
    save_dataset(ds, str(path))
    return spec, ds, path


def _rewrite(path, head, body):
    import hashlib
    lines = [line if not line.startswith('checksum=') else
             'checksum=' + hashlib.sha256(body.encode('utf-8')).hexdigest() for line in head.splitlines()]
    path.write_text('\n'.join(lines) + '\n---\n' + body)


def test_round_trip(tmp_path):
    from expertac.learning.expert import load_dataset
    spec, ds, path = _saved(tmp_path)
    loaded = load_dataset(str(path), 0.9, spec=spec)
    assert loaded == ds
    assert loaded.episode_boundaries == ds.episode_boundaries
    assert load_dataset(str(path), 0.5) == ds.with_gamma(0.5)


def test_truncated_file(tmp_path):
    from expertac.errors import DatasetError
    from expertac.learning.expert import load_dataset
    spec, _, path = _saved(tmp_path)
    text = path.read_text()
    path.write_text(text[:text.rindex('\n', 0, len(text) - 1) + 1])
    with pytest.raises(DatasetError, match="checksum mismatch"):
        load_dataset(str(path), 0.9, spec=spec)


def test_wrong_version(tmp_path):
    from expertac.errors import DatasetError
    from expertac.learning.expert import load_dataset
    spec, _, path = _saved(tmp_path)
    path.write_text(path.read_text().replace('version=1', 'version=2', 1))
    with pytest.raises(DatasetError, match="unsupported format version '2'"):
        load_dataset(str(path), 0.9, spec=spec)


def test_missing_separator(tmp_path):
    from expertac.errors import DatasetError
    from expertac.learning.expert import load_dataset
    path = tmp_path / "expert.traj"
    path.write_text("version=1\n")
    with pytest.raises(DatasetError, match="missing header separator"):
        load_dataset(str(path), 0.9)


def test_missing_file(tmp_path):
    from expertac.errors import DatasetError
    from expertac.learning.expert import load_dataset
    with pytest.raises(DatasetError, match="cannot read"):
        load_dataset(str(tmp_path / "nothing.traj"), 0.9)


def test_undecodable_file(tmp_path):
    from expertac.errors import DatasetError
    from expertac.learning.expert import load_dataset
    _, _, path = _saved(tmp_path)
    with open(path, 'ab') as f:
        f.write(b'\xff\xfe garbage\n')
    with pytest.raises(DatasetError, match="not a trajectory file"):
        load_dataset(str(path), 0.9)


def test_other_environment(tmp_path):
    from expertac.errors import DatasetError
    from expertac.environment import grid_environments
    from expertac.learning.expert import load_dataset
    _, _, path = _saved(tmp_path)
    with pytest.raises(DatasetError, match="recorded on 'open-room-2x2', training environment is 'open-room-3x3'"):
        load_dataset(str(path), 0.9, spec=grid_environments.open_room(3, 3))


def test_trajectory_count_mismatch(tmp_path):
    from expertac.errors import DatasetError
    from expertac.learning.expert import load_dataset
    spec, _, path = _saved(tmp_path)
    path.write_text(path.read_text().replace('trajectory_count=3', 'trajectory_count=5', 1))
    with pytest.raises(DatasetError, match="header announces 5 trajectories, found 3"):
        load_dataset(str(path), 0.9, spec=spec)


def test_tampered_reward_does_not_replay(tmp_path):
    from expertac.errors import DatasetError
    from expertac.learning.expert import load_dataset
    spec, _, path = _saved(tmp_path, trajectories=1, noise=0.0)
    head, _, body = path.read_text().partition('---\n')
    lines = body.splitlines()
    fields = lines[0].split(' ')
    fields[-2] = '7.0'
    lines[0] = ' '.join(fields)
    _rewrite(path, head, ''.join(line + '\n' for line in lines))
    # without an environment the file is only checked for consistency
    assert load_dataset(str(path), 0.9).rewards[0] == 7.0
    with pytest.raises(DatasetError, match="trajectory 0 does not replay"):
        load_dataset(str(path), 0.9, spec=spec)


def test_steps_out_of_order(tmp_path):
    from expertac.errors import DatasetError
    from expertac.learning.expert import load_dataset
    spec, _, path = _saved(tmp_path, trajectories=1, noise=0.0)
    head, _, body = path.read_text().partition('---\n')
    lines = body.splitlines()
    lines[0], lines[1] = lines[1], lines[0]
    _rewrite(path, head, ''.join(line + '\n' for line in lines))
    with pytest.raises(DatasetError, match="out of order"):
        load_dataset(str(path), 0.9, spec=spec)


def test_malformed_body(tmp_path):
    from expertac.errors import DatasetError
    from expertac.learning.expert import load_dataset
    spec, _, path = _saved(tmp_path, trajectories=1, noise=0.0)
    head, _, body = path.read_text().partition('---\n')
    _rewrite(path, head, body.replace(' ', ' x ', 1))
    with pytest.raises(DatasetError, match="body line 1 has"):
        load_dataset(str(path), 0.9, spec=spec)


def test_empty_dataset():
    import numpy as np
    from expertac.errors import DatasetError
    from expertac.learning.expert import ExpertDataset, sample_batch, save_dataset, dataset_score
    ds = ExpertDataset('empty', [], 0.9)
    assert len(ds) == 0 and ds.trajectory_count == 0
    with pytest.raises(DatasetError, match="empty dataset"):
        sample_batch(ds, 4, np.random.default_rng(0))
    with pytest.raises(DatasetError, match="refusing to save an empty dataset"):
        save_dataset(ds, "unused.traj")
    with pytest.raises(DatasetError, match="empty dataset"):
        dataset_score(ds)


def test_dataset_is_read_only():
    from expertac.environment import grid_environments
    from expertac.learning.expert import generate_dataset
    ds = generate_dataset(grid_environments.open_room(2, 3))
    with pytest.raises(ValueError):
        ds.actions[0] = 1
    with pytest.raises(ValueError):
        ds.reward_to_go[0] = 1.0


def test_reward_to_go_restarts_at_episode_end():
    from expertac.learning.expert import reward_to_go
    rtg = reward_to_go([1.0, 2.0, 4.0, 8.0], [False, True, False, True], 0.5)
    assert rtg.tolist() == [2.0, 2.0, 8.0, 8.0]


def test_observations_repeat_the_first_frame():
    import numpy as np
    from expertac.environment import grid_environments, reset
    from expertac.environment.grid import STACK_DEPTH
    from expertac.learning.expert import generate_dataset
    spec = grid_environments.open_room(2, 3)
    ds = generate_dataset(spec)
    _, obs = reset(spec, 0)
    assert np.array_equal(ds.observations[0], obs)
    first = ds.frames[0]
    assert np.array_equal(ds.observations[0], np.tile(first, STACK_DEPTH))
    assert np.array_equal(ds.observations[1][-spec.frame_dim:], ds.frames[1])


def test_noisy_expert_replays():
    from expertac.environment import grid_environments
    from expertac.learning.expert import plan_expert, replay_trajectory
    spec = grid_environments.open_room(3, 3)
    for seed in range(5):
        t = plan_expert(spec, noise=0.3, seed=seed)
        assert t.dones[-1] and not t.dones[:-1].any()
        replay_trajectory(spec, t)
    assert len(plan_expert(spec)) == 5


def test_noise_range():
    from expertac.environment import grid_environments
    from expertac.learning.expert import plan_expert
    with pytest.raises(ValueError, match=r"noise must lie in \[0, 1\), got 1.0"):
        plan_expert(grid_environments.open_room(2, 2), noise=1.0)


def test_mini_montezuma_expert():
    from expertac.environment import load_grid
    from expertac.learning.expert import generate_dataset, dataset_score
    ds = generate_dataset(load_grid('mini-montezuma'))
    assert dataset_score(ds) == 400.0
    assert sorted(r for r in ds.rewards if r) == [100.0, 300.0]


def test_uniform_sampling():
    import numpy as np
    from expertac.environment import grid_environments
    from expertac.learning.expert import generate_dataset, sample_batch
    ds = generate_dataset(grid_environments.open_room(2, 3), trajectories=2)
    batch = sample_batch(ds, 40000, np.random.default_rng(0))
    frequencies = np.bincount(batch.indices, minlength=len(ds)) / 40000
    assert np.allclose(frequencies, 1 / len(ds), atol=0.01)
    assert np.array_equal(batch.actions, ds.actions[batch.indices])
    assert np.array_equal(batch.observations, ds.observations[batch.indices])
    with pytest.raises(ValueError, match="batch size must be positive"):
        sample_batch(ds, 0, np.random.default_rng(0))


def test_behavioral_cloning_reports_steps():
    from expertac.environment import grid_environments
    from expertac.learning.policy import PolicyNet
    from expertac.learning.expert import generate_dataset, bc_train, expert_accuracy
    spec = grid_environments.open_room(3, 3)
    ds = generate_dataset(spec)
    net = PolicyNet.initial(spec.stack_dim, spec.action_count, hidden=(16,), seed=0)
    seen = []
    cloned = bc_train(net, ds, 300, 0.5, on_step=lambda *row: seen.append(row))
    assert [row[0] for row in seen] == list(range(1, 301))
    assert seen[-1][1] < seen[0][1]
    assert seen[-1][2] == expert_accuracy(cloned, ds)
    assert net.step == 0 and cloned.step == 300
