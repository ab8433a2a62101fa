# -*- coding: utf-8 -*-
r"""
Expert demonstrations.

Demonstrations are produced by the breadth-first planner of
:mod:`expertac.environment.search`, optionally perturbed by random actions,
and stored as trajectory files. An :class:`ExpertDataset` is immutable once
built; minibatches are drawn from it uniformly with replacement.

Three weightings of the expert log-likelihood term are available (see
:func:`expert_advantage`):

- ``reward`` -- the discounted reward-to-go of the expert step

- ``critic`` -- the reward-to-go in excess of the current value estimate,
  clamped at zero

- ``simple`` -- a constant ``1``, which turns the expert term into behavioral
  cloning

EXAMPLES::

    >>> from expertac.environment import grid_environments
    >>> from expertac.learning.expert import generate_dataset, dataset_score
    >>> ds = generate_dataset(grid_environments.open_room(2, 3), trajectories=2, gamma=0.5)
    >>> len(ds), ds.trajectory_count, ds.episode_boundaries
    (8, 2, (0, 4, 8))
    >>> ds.actions[:4].tolist(), ds.reward_to_go[:4].tolist()
    ([0, 0, 2, 0], [0.125, 0.25, 0.5, 1.0])
    >>> dataset_score(ds)
    1.0
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
import hashlib
import logging
import os

import numpy as np

from expertac.errors import DatasetError, PlanningError
from expertac.environment.grid import STACK_DEPTH
from expertac.environment.dynamics import reset, step, frame, transition, CAUSE_DEATH
from expertac.environment.search import shortest_plan

from .policy import forward, backward, greedy_actions, one_hot, log_prob_and_entropy

logger = logging.getLogger(__name__)

ADVANTAGE_VARIANTS = ('reward', 'critic', 'simple')

FORMAT_VERSION = 1


@dataclasses.dataclass(frozen=True)
class ExpertStep:
    r"""
    One demonstrated step: the stacked observation, the action taken, the
    reward received and the discounted reward-to-go from this step on.
    """
    observation: np.ndarray
    action: int
    reward: float
    done: bool
    reward_to_go: float


@dataclasses.dataclass(frozen=True, eq=False)
class Trajectory:
    r"""
    One demonstrated episode; ``frames[i]`` is the raw frame of the state in
    which ``actions[i]`` was taken.
    """
    frames: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    dones: np.ndarray

    def __len__(self):
        return len(self.actions)

    @property
    def score(self):
        return float(np.sum(self.rewards))


def reward_to_go(rewards, dones, gamma):
    r"""
    Return the discounted suffix sums of ``rewards`` restarted after every
    ``done`` step.

    EXAMPLES::

        >>> from expertac.learning.expert import reward_to_go
        >>> reward_to_go([1.0, 0.0, 2.0], [False, False, True], 0.5).tolist()
        [1.5, 1.0, 2.0]
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    dones = np.asarray(dones, dtype=bool)
    out = np.empty_like(rewards)
    running = 0.0
    for i in reversed(range(len(rewards))):
        if dones[i]:
            running = 0.0
        running = rewards[i] + gamma * running
        out[i] = running
    return out


def stack_frames(frames):
    r"""
    Rebuild the observation stacks of one episode from its raw frames,
    repeating the first frame where the episode has no history yet.
    """
    frames = np.asarray(frames, dtype=np.float64)
    n = len(frames)
    index = np.arange(n)[:, None] + np.arange(1 - STACK_DEPTH, 1)[None, :]
    return frames[np.maximum(index, 0)].reshape(n, -1)


def _read_only(array):
    array = np.array(array)
    array.setflags(write=False)
    return array


class ExpertDataset:
    r"""
    An immutable set of demonstrated episodes.

    INPUT:

    - ``env_id`` -- the environment the episodes were recorded in

    - ``trajectories`` -- a list of :class:`Trajectory`

    - ``gamma`` -- the discount used for ``reward_to_go``
    """
    def __init__(self, env_id, trajectories, gamma):
        if not 0.0 <= gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1], got {}".format(gamma))
        trajectories = list(trajectories)
        if any(len(t) == 0 for t in trajectories):
            raise DatasetError("empty trajectory")
        self._env_id = env_id
        self._gamma = float(gamma)
        boundaries = [0]
        for t in trajectories:
            boundaries.append(boundaries[-1] + len(t))
        self._boundaries = tuple(boundaries)
        if trajectories:
            frames = np.concatenate([t.frames for t in trajectories])
            observations = np.concatenate([stack_frames(t.frames) for t in trajectories])
            actions = np.concatenate([t.actions for t in trajectories]).astype(np.int64)
            rewards = np.concatenate([t.rewards for t in trajectories]).astype(np.float64)
            dones = np.concatenate([t.dones for t in trajectories]).astype(bool)
            rtg = np.concatenate([reward_to_go(t.rewards, t.dones, gamma) for t in trajectories])
        else:
            frames = observations = np.zeros((0, 0))
            actions = np.zeros(0, dtype=np.int64)
            rewards = rtg = np.zeros(0)
            dones = np.zeros(0, dtype=bool)
        self._frames = _read_only(frames)
        self.observations = _read_only(observations)
        self.actions = _read_only(actions)
        self.rewards = _read_only(rewards)
        self.dones = _read_only(dones)
        self.reward_to_go = _read_only(rtg)

    @property
    def env_id(self):
        return self._env_id

    @property
    def gamma(self):
        return self._gamma

    @property
    def frames(self):
        return self._frames

    @property
    def frame_dim(self):
        return self._frames.shape[1] if len(self) else 0

    @property
    def trajectory_count(self):
        return len(self._boundaries) - 1

    @property
    def episode_boundaries(self):
        r"""
        The offsets ``0 = b_0 < b_1 < ... < b_n = len(self)``; episode ``i``
        is made of the steps ``b_i, ..., b_{i+1} - 1``.
        """
        return self._boundaries

    def trajectory(self, i):
        lo, hi = self._boundaries[i], self._boundaries[i + 1]
        return Trajectory(frames=self._frames[lo:hi], actions=self.actions[lo:hi],
                          rewards=self.rewards[lo:hi], dones=self.dones[lo:hi])

    def trajectories(self):
        return [self.trajectory(i) for i in range(self.trajectory_count)]

    def __len__(self):
        return len(self.actions)

    def __getitem__(self, i):
        return ExpertStep(observation=self.observations[i],
                          action=int(self.actions[i]),
                          reward=float(self.rewards[i]),
                          done=bool(self.dones[i]),
                          reward_to_go=float(self.reward_to_go[i]))

    @property
    def steps(self):
        return [self[i] for i in range(len(self))]

    def with_gamma(self, gamma):
        r"""
        Return the same episodes with ``reward_to_go`` recomputed for ``gamma``.
        """
        return ExpertDataset(self._env_id, self.trajectories(), gamma)

    def __eq__(self, other):
        if not isinstance(other, ExpertDataset):
            return NotImplemented
        return (self._env_id == other._env_id and
                self._boundaries == other._boundaries and
                np.array_equal(self._frames, other._frames) and
                np.array_equal(self.actions, other.actions) and
                np.array_equal(self.rewards, other.rewards) and
                np.array_equal(self.dones, other.dones) and
                np.array_equal(self.reward_to_go, other.reward_to_go))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "ExpertDataset({!r}, {} trajectories, {} steps)".format(
            self._env_id, self.trajectory_count, len(self))


def _non_fatal_actions(spec, state):
    return [a for a in range(spec.action_count) if transition(spec, state, a)[2] != CAUSE_DEATH]


def plan_expert(spec, noise=0.0, seed=0):
    r"""
    Return one demonstrated :class:`Trajectory` from the fixed start of ``spec``.

    The expert follows a shortest plan to the objective. With probability
    ``noise`` per step it instead takes an action drawn uniformly among the
    actions that do not kill the agent, and then plans again from where it
    ended up. The result is checked by replaying it through the environment.

    EXAMPLES::

        >>> from expertac.environment import grid_environments
        >>> from expertac.learning.expert import plan_expert
        >>> plan_expert(grid_environments.open_room(1, 2)).actions.tolist()
        [0]
        >>> t = plan_expert(grid_environments.sparse_maze())
        >>> t.score, bool(t.dones[-1])
        (1.0, True)
    """
    if not 0.0 <= noise < 1.0:
        raise ValueError("noise must lie in [0, 1), got {}".format(noise))
    spec = spec.with_curriculum(False)
    rng = np.random.default_rng(seed)
    state, obs = reset(spec, 0)
    plan = shortest_plan(spec, state)
    frames, actions, rewards, dones = [], [], [], []
    while not state.done:
        if noise > 0 and rng.random() < noise:
            choices = _non_fatal_actions(spec, state)
            action = choices[int(rng.integers(len(choices)))]
            replan = True
        else:
            action = plan.pop(0)
            replan = False
        frames.append(frame(state, spec))
        state, result = step(spec, state, action, obs)
        obs = result.observation
        actions.append(action)
        rewards.append(result.reward)
        dones.append(result.done)
        if replan and not state.done:
            logger.debug("random action %d at step %d, replanning from %s",
                         action, state.step_count, state.agent_position)
            plan = shortest_plan(spec, state)
        elif not plan and not state.done:
            raise PlanningError("the plan ended before the episode did")
    trajectory = Trajectory(frames=np.array(frames), actions=np.array(actions, dtype=np.int64),
                            rewards=np.array(rewards), dones=np.array(dones, dtype=bool))
    replay_trajectory(spec, trajectory)
    return trajectory


def replay_trajectory(spec, trajectory):
    r"""
    Check that ``trajectory`` is reproduced exactly by ``spec`` from its fixed
    start: frames, rewards and done flags. Raise :class:`DatasetError`
    otherwise.
    """
    spec = spec.with_curriculum(False)
    state, obs = reset(spec, 0)
    for i, action in enumerate(trajectory.actions):
        if state.done:
            raise DatasetError("episode continues after its end at step {}".format(i))
        if not np.array_equal(frame(state, spec), trajectory.frames[i]):
            raise DatasetError("frame {} differs from the environment".format(i))
        if not 0 <= action < spec.action_count:
            raise DatasetError("invalid action {} at step {}".format(action, i))
        state, result = step(spec, state, int(action), obs)
        obs = result.observation
        if result.reward != trajectory.rewards[i] or result.done != bool(trajectory.dones[i]):
            raise DatasetError("step {} replays to reward {} done {}, stored {} {}".format(
                i, result.reward, result.done, trajectory.rewards[i], bool(trajectory.dones[i])))


def generate_dataset(spec, trajectories=1, noise=0.0, seed=0, gamma=0.99):
    r"""
    Return an :class:`ExpertDataset` of ``trajectories`` calls to
    :func:`plan_expert`, each with its own seed derived from ``seed``.
    """
    if trajectories < 1:
        raise ValueError("at least one trajectory is needed, got {}".format(trajectories))
    episodes = []
    for i in range(trajectories):
        episode_seed = int(np.random.SeedSequence([seed, i]).generate_state(1)[0])
        episodes.append(plan_expert(spec, noise, episode_seed))
    ds = ExpertDataset(spec.env_id, episodes, gamma)
    logger.info("generated %d expert trajectories on %s (%d steps, mean score %s)",
                trajectories, spec.env_id, len(ds), dataset_score(ds))
    return ds


def dataset_score(ds):
    r"""
    Return the mean total reward of the episodes of ``ds``.
    """
    if not ds.trajectory_count:
        raise DatasetError("empty dataset")
    return float(np.mean([t.score for t in ds.trajectories()]))


def _body(ds):
    lines = []
    for e in range(ds.trajectory_count):
        t = ds.trajectory(e)
        for i in range(len(t)):
            fields = [str(e), str(i)]
            fields.extend(repr(float(x)) for x in t.frames[i])
            fields.append(str(int(t.actions[i])))
            fields.append(repr(float(t.rewards[i])))
            fields.append('1' if t.dones[i] else '0')
            lines.append(' '.join(fields))
    return ''.join(line + '\n' for line in lines)


def save_dataset(ds, path):
    r"""
    Write ``ds`` to ``path`` as a trajectory file.

    The header holds the format version, ``env_id``, the trajectory count, the
    frame dimension and a SHA-256 checksum of the body. The body has one line
    per step: episode index, step index, the raw frame, action, reward and
    done flag, separated by single spaces.

    EXAMPLES::

        >>> import os, tempfile
        >>> from expertac.environment import grid_environments
        >>> from expertac.learning.expert import generate_dataset, save_dataset, load_dataset
        >>> spec = grid_environments.open_room(2, 2)
        >>> ds = generate_dataset(spec, trajectories=3, noise=0.5, seed=1, gamma=0.9)
        >>> path = os.path.join(tempfile.mkdtemp(), 'expert.traj')
        >>> save_dataset(ds, path)
        >>> load_dataset(path, 0.9, spec=spec) == ds
        True
    """
    if not len(ds):
        raise DatasetError("refusing to save an empty dataset")
    body = _body(ds)
    header = ['version={}'.format(FORMAT_VERSION),
              'env_id={}'.format(ds.env_id),
              'trajectory_count={}'.format(ds.trajectory_count),
              'frame_dim={}'.format(ds.frame_dim),
              'checksum={}'.format(hashlib.sha256(body.encode('utf-8')).hexdigest()),
              '---']
    tmp = '{}.tmp{}'.format(path, os.getpid())
    with open(tmp, 'w', encoding='utf-8') as f:
        f.write('\n'.join(header) + '\n' + body)
    os.replace(tmp, path)


def load_dataset(path, gamma, spec=None):
    r"""
    Read a trajectory file and return an :class:`ExpertDataset` whose
    ``reward_to_go`` uses ``gamma``.

    If ``spec`` is given, the file must have been recorded in that
    environment and every episode must replay exactly through it.
    """
    try:
        with open(path, encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise DatasetError("cannot read {}: {}".format(path, e))
    except UnicodeDecodeError as e:
        raise DatasetError("{}: not a trajectory file ({})".format(path, e))
    head, sep, body = text.partition('---\n')
    if not sep:
        raise DatasetError("{}: missing header separator".format(path))
    header = {}
    for line in head.splitlines():
        key, eq, value = line.partition('=')
        if not eq:
            raise DatasetError("{}: malformed header line {!r}".format(path, line))
        header[key.strip()] = value.strip()
    for key in ('version', 'env_id', 'trajectory_count', 'frame_dim', 'checksum'):
        if key not in header:
            raise DatasetError("{}: missing header key {!r}".format(path, key))
    if header['version'] != str(FORMAT_VERSION):
        raise DatasetError("{}: unsupported format version {!r}".format(path, header['version']))
    if hashlib.sha256(body.encode('utf-8')).hexdigest() != header['checksum']:
        raise DatasetError("{}: checksum mismatch (truncated or modified file)".format(path))
    try:
        count = int(header['trajectory_count'])
        frame_dim = int(header['frame_dim'])
    except ValueError:
        raise DatasetError("{}: malformed header".format(path))
    env_id = header['env_id']
    if spec is not None:
        if spec.env_id != env_id:
            raise DatasetError("{}: recorded on {!r}, training environment is {!r}".format(path, env_id, spec.env_id))
        if spec.frame_dim != frame_dim:
            raise DatasetError("{}: frame dimension {} does not match {} of {!r}".format(
                path, frame_dim, spec.frame_dim, env_id))

    episodes = []
    current = None
    width = 2 + frame_dim + 3
    for lineno, line in enumerate(body.splitlines()):
        fields = line.split(' ')
        if len(fields) != width:
            raise DatasetError("{}: body line {} has {} fields, expected {}".format(path, lineno + 1, len(fields), width))
        try:
            e, i = int(fields[0]), int(fields[1])
            values = [float(x) for x in fields[2:2 + frame_dim]]
            action = int(fields[-3])
            reward = float(fields[-2])
            done = {'0': False, '1': True}[fields[-1]]
        except (ValueError, KeyError):
            raise DatasetError("{}: malformed body line {}".format(path, lineno + 1))
        if i == 0:
            if e != len(episodes):
                raise DatasetError("{}: episode {} out of order".format(path, e))
            current = ([], [], [], [])
            episodes.append(current)
        elif current is None or e != len(episodes) - 1 or i != len(current[0]):
            raise DatasetError("{}: step {} of episode {} out of order".format(path, i, e))
        current[0].append(values)
        current[1].append(action)
        current[2].append(reward)
        current[3].append(done)
    if len(episodes) != count:
        raise DatasetError("{}: header announces {} trajectories, found {}".format(path, count, len(episodes)))

    trajectories = [Trajectory(frames=np.array(f, dtype=np.float64).reshape(len(f), frame_dim),
                               actions=np.array(a, dtype=np.int64),
                               rewards=np.array(r, dtype=np.float64),
                               dones=np.array(d, dtype=bool)) for f, a, r, d in episodes]
    if spec is not None:
        for n, t in enumerate(trajectories):
            try:
                replay_trajectory(spec, t)
            except DatasetError as err:
                raise DatasetError("{}: trajectory {} does not replay: {}".format(path, n, err))
    return ExpertDataset(env_id, trajectories, gamma)


@dataclasses.dataclass(frozen=True, eq=False)
class ExpertBatch:
    r"""
    ``k`` expert steps drawn by :func:`sample_batch`.
    """
    indices: np.ndarray
    observations: np.ndarray
    actions: np.ndarray
    reward_to_go: np.ndarray

    def __len__(self):
        return len(self.indices)


def sample_batch(ds, k, rng):
    r"""
    Draw ``k`` steps of ``ds`` uniformly with replacement.

    EXAMPLES::

        >>> import numpy as np
        >>> from expertac.environment import grid_environments
        >>> from expertac.learning.expert import generate_dataset, sample_batch
        >>> ds = generate_dataset(grid_environments.open_room(1, 2))
        >>> sample_batch(ds, 3, np.random.default_rng(0)).indices.tolist()
        [0, 0, 0]
    """
    if not len(ds):
        raise DatasetError("cannot sample from an empty dataset")
    if k < 1:
        raise ValueError("batch size must be positive, got {}".format(k))
    indices = rng.integers(0, len(ds), size=k)
    return ExpertBatch(indices=indices,
                       observations=ds.observations[indices],
                       actions=ds.actions[indices],
                       reward_to_go=ds.reward_to_go[indices])


def expert_advantage(variant, batch, values):
    r"""
    Return the weights of the expert log-likelihood terms.

    EXAMPLES::

        >>> import numpy as np
        >>> from expertac.learning.expert import ExpertBatch, expert_advantage
        >>> b = ExpertBatch(np.arange(2), np.zeros((2, 1)), np.zeros(2, dtype=int), np.array([10.0, 10.0]))
        >>> expert_advantage('critic', b, np.array([12.0, 4.0])).tolist()
        [0.0, 6.0]
        >>> expert_advantage('reward', b, np.array([12.0, 4.0])).tolist()
        [10.0, 10.0]
        >>> expert_advantage('simple', b, np.array([12.0, 4.0])).tolist()
        [1.0, 1.0]
    """
    rtg = np.asarray(batch.reward_to_go, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != rtg.shape:
        raise ValueError("{} values for a batch of {}".format(values.shape, rtg.shape))
    if variant == 'reward':
        return rtg.copy()
    if variant == 'critic':
        return np.maximum(rtg - values, 0.0)
    if variant == 'simple':
        return np.ones_like(rtg)
    raise ValueError("unknown advantage variant {!r}; expected one of {}".format(variant, ADVANTAGE_VARIANTS))


def expert_accuracy(net, ds):
    r"""
    Return the fraction of steps of ``ds`` where the most likely action of
    ``net`` (lowest id among ties) is the demonstrated one.
    """
    if not len(ds):
        raise DatasetError("empty dataset")
    trace = forward(net, ds.observations)
    return float(np.mean(greedy_actions(trace.logits) == ds.actions))


def bc_loss(net, observations, actions):
    r"""
    Return the mean negative log-likelihood of ``actions``.
    """
    trace = forward(net, observations)
    logp, _ = log_prob_and_entropy(trace.logits, actions)
    return float(-np.mean(logp))


def bc_gradient(net, observations, actions):
    r"""
    Return the gradient of :func:`bc_loss`.
    """
    trace = forward(net, observations)
    k = trace.batch_size
    p = trace.probabilities
    return backward(net, trace, (p - one_hot(actions, p.shape[1])) / k, np.zeros(k))


def bc_train(net, ds, steps, lr, on_step=None):
    r"""
    Return a copy of ``net`` trained by ``steps`` full-batch gradient steps of
    size ``lr`` on the negative log-likelihood of the expert actions.

    ``on_step(step, loss, accuracy)`` is called after every step with the
    loss before and the expert accuracy after the update.

    EXAMPLES::

        >>> from expertac.environment import grid_environments
        >>> from expertac.learning.policy import PolicyNet
        >>> from expertac.learning.expert import generate_dataset, bc_train, expert_accuracy
        >>> spec = grid_environments.open_room(2, 2)
        >>> ds = generate_dataset(spec)
        >>> net = PolicyNet.initial(spec.stack_dim, spec.action_count, hidden=(16,), seed=0)
        >>> expert_accuracy(bc_train(net, ds, 200, 0.5), ds)
        1.0
        >>> bc_train(net, ds, 0, 0.5) == net
        True
    """
    if not len(ds):
        raise DatasetError("empty dataset")
    if steps < 0:
        raise ValueError("steps must be non-negative, got {}".format(steps))
    net = net.copy()
    for s in range(steps):
        loss = bc_loss(net, ds.observations, ds.actions)
        net.apply_update(bc_gradient(net, ds.observations, ds.actions), lr)
        accuracy = expert_accuracy(net, ds)
        if on_step is not None:
            on_step(s + 1, loss, accuracy)
        if (s + 1) % 100 == 0 or s + 1 == steps:
            logger.info("behavioral cloning step %d: loss %.6f, expert accuracy %.4f", s + 1, loss, accuracy)
    return net
