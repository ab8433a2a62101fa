# -*- coding: utf-8 -*-
r"""
The two-headed policy and value network.

A :class:`PolicyNet` is a trunk of dense rectifier layers followed by two
linear heads on the last trunk activation: ``policy`` (one logit per action)
and ``value`` (a scalar). Forward and backward passes are written out by
hand; :func:`forward` records everything :func:`backward` and the
Kronecker-factored optimizer need in a :class:`ForwardTrace`.

Biases are treated through a homogeneous coordinate: the recorded input of
every layer carries a trailing ``1`` so that the gradient of a layer is a
single ``out x (in + 1)`` matrix.

EXAMPLES::

    >>> import numpy as np
    >>> from expertac.learning.policy import PolicyNet, forward, action_distribution
    >>> net = PolicyNet.initial(6, 3, hidden=(8, 8), seed=1)
    >>> [layer.name for layer in net.layers]
    ['hidden0', 'hidden1', 'policy', 'value']
    >>> trace = forward(net, np.ones((2, 6)))
    >>> trace.logits.shape, trace.values.shape
    ((2, 3), (2,))
    >>> bool(np.allclose(action_distribution(trace.logits).sum(axis=1), 1))
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
import itertools

import numpy as np
from scipy.special import softmax, log_softmax

from expertac.errors import StaleTraceError, CheckpointError

POLICY_HEAD = 'policy'
VALUE_HEAD = 'value'

_serials = itertools.count()


@dataclasses.dataclass(eq=False)
class DenseLayer:
    r"""
    An affine map ``x -> W x + b`` with ``W`` of shape ``out x in``.
    """
    name: str
    weight: np.ndarray
    bias: np.ndarray

    @property
    def shape(self):
        return self.weight.shape

    def homogeneous(self):
        r"""
        Return ``[W | b]``, the ``out x (in + 1)`` matrix acting on
        homogeneous inputs.
        """
        return np.hstack([self.weight, self.bias[:, None]])


def orthogonal(shape, gain, rng):
    r"""
    Return a ``shape`` matrix with orthonormal rows or columns scaled by ``gain``.

    EXAMPLES::

        >>> import numpy as np
        >>> from expertac.learning.policy import orthogonal
        >>> q = orthogonal((3, 5), 2.0, np.random.default_rng(0))
        >>> bool(np.allclose(q @ q.T, 4 * np.eye(3)))
        True
    """
    a = rng.normal(0.0, 1.0, shape)
    u, _, v = np.linalg.svd(a, full_matrices=False)
    q = u if u.shape == tuple(shape) else v
    return gain * q


class PolicyNet:
    r"""
    A dense trunk with a policy head and a value head.

    INPUT:

    - ``layers`` -- a list of :class:`DenseLayer`; all but the last two form
      the trunk, the last two are named ``'policy'`` and ``'value'``

    - ``seed`` -- the initialization seed (stored in checkpoints)

    - ``step`` -- the number of parameter updates applied so far

    Parameters are changed in place only by :meth:`apply_update`, which also
    bumps :attr:`version` so that traces recorded earlier can be recognized
    as stale.
    """
    def __init__(self, layers, seed=0, step=0):
        layers = list(layers)
        if len(layers) < 2 or layers[-2].name != POLICY_HEAD or layers[-1].name != VALUE_HEAD:
            raise ValueError("the last two layers must be the 'policy' and 'value' heads")
        width = layers[0].weight.shape[1]
        for layer in layers[:-2]:
            if layer.weight.shape[1] != width:
                raise ValueError("layer {!r} expects {} inputs, got {}".format(
                    layer.name, layer.weight.shape[1], width))
            width = layer.weight.shape[0]
        for layer in layers[-2:]:
            if layer.weight.shape[1] != width:
                raise ValueError("head {!r} expects {} inputs, got {}".format(
                    layer.name, layer.weight.shape[1], width))
        if layers[-1].weight.shape[0] != 1:
            raise ValueError("the value head must have a single output")
        for layer in layers:
            if layer.bias.shape != (layer.weight.shape[0],):
                raise ValueError("bias of {!r} has shape {}".format(layer.name, layer.bias.shape))
            if not (np.all(np.isfinite(layer.weight)) and np.all(np.isfinite(layer.bias))):
                raise ValueError("non-finite parameters in layer {!r}".format(layer.name))
        self._layers = layers
        self._index = {layer.name: i for i, layer in enumerate(layers)}
        self.seed = seed
        self.step = step
        self._serial = next(_serials)
        self._version = 0

    @staticmethod
    def initial(input_dim, action_count, hidden=(64, 64), seed=0):
        r"""
        Return a freshly initialized network.

        Trunk weights are orthogonal with gain ``sqrt(2)``, the policy head
        has gain ``0.01`` (an almost uniform initial policy) and the value
        head gain ``1``; all biases are zero.

        EXAMPLES::

            >>> from expertac.learning.policy import PolicyNet
            >>> net = PolicyNet.initial(10, 3, hidden=(4,), seed=0)
            >>> [layer.shape for layer in net.layers]
            [(4, 10), (3, 4), (1, 4)]
            >>> net.parameter_count
            64
        """
        if input_dim <= 0 or action_count <= 0:
            raise ValueError("invalid network dimensions {}, {}".format(input_dim, action_count))
        rng = np.random.default_rng(seed)
        layers = []
        width = input_dim
        for i, size in enumerate(hidden):
            layers.append(DenseLayer('hidden{}'.format(i),
                                     orthogonal((size, width), np.sqrt(2.0), rng),
                                     np.zeros(size)))
            width = size
        layers.append(DenseLayer(POLICY_HEAD, orthogonal((action_count, width), 0.01, rng), np.zeros(action_count)))
        layers.append(DenseLayer(VALUE_HEAD, orthogonal((1, width), 1.0, rng), np.zeros(1)))
        return PolicyNet(layers, seed=seed)

    @property
    def layers(self):
        return tuple(self._layers)

    @property
    def trunk(self):
        return tuple(self._layers[:-2])

    @property
    def layer_names(self):
        return tuple(layer.name for layer in self._layers)

    def layer(self, name):
        return self._layers[self._index[name]]

    @property
    def input_dim(self):
        return self._layers[0].weight.shape[1]

    @property
    def action_count(self):
        return self.layer(POLICY_HEAD).weight.shape[0]

    @property
    def hidden(self):
        return tuple(layer.weight.shape[0] for layer in self.trunk)

    @property
    def parameter_count(self):
        return sum(layer.weight.size + layer.bias.size for layer in self._layers)

    @property
    def version(self):
        return self._version

    def copy(self):
        r"""
        Return an independent copy with the same parameters.
        """
        layers = [DenseLayer(layer.name, layer.weight.copy(), layer.bias.copy()) for layer in self._layers]
        return PolicyNet(layers, seed=self.seed, step=self.step)

    def apply_update(self, grads, scale):
        r"""
        Replace every parameter ``p`` by ``p - scale * grad(p)`` in place.
        """
        for layer in self._layers:
            layer.weight -= scale * grads.weights[layer.name]
            layer.bias -= scale * grads.biases[layer.name]
        self.step += 1
        self._version += 1
        return self

    def flat_parameters(self):
        r"""
        Return all parameters as one vector, layer by layer, weights before biases.
        """
        return np.concatenate([np.concatenate([layer.weight.ravel(), layer.bias]) for layer in self._layers])

    def with_flat_parameters(self, vector):
        r"""
        Return a copy whose parameters are taken from ``vector`` (inverse of
        :meth:`flat_parameters`).
        """
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (self.parameter_count,):
            raise ValueError("expected {} parameters, got shape {}".format(self.parameter_count, vector.shape))
        layers = []
        pos = 0
        for layer in self._layers:
            n = layer.weight.size
            weight = vector[pos:pos + n].reshape(layer.weight.shape).copy()
            pos += n
            bias = vector[pos:pos + layer.bias.size].copy()
            pos += layer.bias.size
            layers.append(DenseLayer(layer.name, weight, bias))
        return PolicyNet(layers, seed=self.seed, step=self.step)

    def __eq__(self, other):
        if not isinstance(other, PolicyNet):
            return NotImplemented
        return (self.layer_names == other.layer_names and
                all(np.array_equal(a.weight, b.weight) and np.array_equal(a.bias, b.bias)
                    for a, b in zip(self._layers, other._layers)))

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "PolicyNet({} -> {} -> {} actions + value)".format(
            self.input_dim, list(self.hidden), self.action_count)


@dataclasses.dataclass(frozen=True, eq=False)
class ForwardTrace:
    r"""
    Everything recorded by :func:`forward` on a batch.

    ``inputs[name]`` is the homogeneous input of layer ``name`` (a trailing
    column of ones appended) and ``preactivations[name]`` its output before
    the rectifier.
    """
    inputs: dict
    preactivations: dict
    logits: np.ndarray
    values: np.ndarray
    serial: int
    version: int

    @property
    def batch_size(self):
        return self.logits.shape[0]

    @property
    def probabilities(self):
        return action_distribution(self.logits)


def _homogeneous(x):
    return np.hstack([x, np.ones((x.shape[0], 1))])


def forward(net, observations):
    r"""
    Evaluate ``net`` on a batch of observations (one per row).

    EXAMPLES::

        >>> import numpy as np
        >>> from expertac.learning.policy import PolicyNet, forward
        >>> net = PolicyNet.initial(4, 3, hidden=(5,), seed=0)
        >>> zero = net.with_flat_parameters(np.zeros(net.parameter_count))
        >>> t = forward(zero, np.ones((2, 4)))
        >>> t.logits.tolist(), t.values.tolist()
        ([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]], [0.0, 0.0])
        >>> forward(net, np.ones((2, 5)))
        Traceback (most recent call last):
        ...
        ValueError: observations have dimension 5, the network expects 4
    """
    x = np.asarray(observations, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise ValueError("observations have dimension {}, the network expects {}".format(
            x.shape[-1], net.input_dim))
    inputs = {}
    preactivations = {}
    h = x
    for layer in net.trunk:
        inputs[layer.name] = _homogeneous(h)
        z = h @ layer.weight.T + layer.bias
        preactivations[layer.name] = z
        h = np.maximum(z, 0.0)
    top = _homogeneous(h)
    policy = net.layer(POLICY_HEAD)
    value = net.layer(VALUE_HEAD)
    logits = h @ policy.weight.T + policy.bias
    values = (h @ value.weight.T + value.bias)[:, 0]
    inputs[POLICY_HEAD] = top
    inputs[VALUE_HEAD] = top
    preactivations[POLICY_HEAD] = logits
    preactivations[VALUE_HEAD] = values[:, None]
    return ForwardTrace(inputs=inputs, preactivations=preactivations, logits=logits, values=values,
                        serial=net._serial, version=net.version)


class GradientSet:
    r"""
    One gradient tensor per parameter tensor of a :class:`PolicyNet`.

    Gradient sets support addition, subtraction and multiplication by a
    scalar; ``preactivation_grads`` (filled by :func:`backward` only) holds
    the gradient with respect to each layer's pre-activation.

    EXAMPLES::

        >>> import numpy as np
        >>> from expertac.learning.policy import PolicyNet, GradientSet
        >>> net = PolicyNet.initial(3, 2, hidden=(2,), seed=0)
        >>> g = GradientSet.zeros_like(net)
        >>> h = 2 * (g + GradientSet.zeros_like(net))
        >>> float(np.abs(h.flat()).sum()), h.is_finite()
        (0.0, True)
    """
    def __init__(self, weights, biases, preactivation_grads=None):
        self.weights = dict(weights)
        self.biases = dict(biases)
        if set(self.weights) != set(self.biases):
            raise ValueError("weight and bias gradients name different layers")
        self.preactivation_grads = preactivation_grads

    @staticmethod
    def zeros_like(net):
        return GradientSet({layer.name: np.zeros_like(layer.weight) for layer in net.layers},
                           {layer.name: np.zeros_like(layer.bias) for layer in net.layers})

    @staticmethod
    def from_homogeneous(blocks):
        r"""
        Build a gradient set from ``out x (in + 1)`` matrices, the last column
        holding the bias gradient.
        """
        return GradientSet({name: np.array(g[:, :-1]) for name, g in blocks.items()},
                           {name: np.array(g[:, -1]) for name, g in blocks.items()})

    def homogeneous(self, name):
        return np.hstack([self.weights[name], self.biases[name][:, None]])

    @property
    def layer_names(self):
        return tuple(self.weights)

    def _combine(self, other, op):
        if not isinstance(other, GradientSet):
            return NotImplemented
        if set(self.weights) != set(other.weights):
            raise ValueError("gradient sets of different networks")
        return GradientSet({k: op(v, other.weights[k]) for k, v in self.weights.items()},
                           {k: op(v, other.biases[k]) for k, v in self.biases.items()})

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, scalar):
        scalar = float(scalar)
        return GradientSet({k: scalar * v for k, v in self.weights.items()},
                           {k: scalar * v for k, v in self.biases.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self

    def flat(self):
        r"""
        Return all entries as one vector in the order of
        :meth:`PolicyNet.flat_parameters`.
        """
        return np.concatenate([np.concatenate([self.weights[k].ravel(), self.biases[k]]) for k in self.weights])

    def is_finite(self):
        return all(np.all(np.isfinite(v)) for v in itertools.chain(self.weights.values(), self.biases.values()))

    def __repr__(self):
        return "GradientSet({})".format(', '.join(self.weights))


def backward(net, trace, logit_grads, value_grads):
    r"""
    Return the parameter gradients of a loss whose gradients with respect to
    the logits and values of ``trace`` are ``logit_grads`` (``batch x
    actions``) and ``value_grads`` (``batch``).

    EXAMPLES::

        >>> import numpy as np
        >>> from expertac.learning.policy import PolicyNet, forward, backward
        >>> net = PolicyNet.initial(3, 2, hidden=(4,), seed=2)
        >>> trace = forward(net, np.ones((5, 3)))
        >>> g = backward(net, trace, np.zeros((5, 2)), np.zeros(5))
        >>> float(np.abs(g.flat()).max())
        0.0

    A trace does not survive a parameter update::

        >>> net.apply_update(g, 0.1)
        PolicyNet(3 -> [4] -> 2 actions + value)
        >>> backward(net, trace, np.zeros((5, 2)), np.zeros(5))
        Traceback (most recent call last):
        ...
        expertac.errors.StaleTraceError: the trace was recorded before the last parameter update
    """
    if trace.serial != net._serial:
        raise StaleTraceError("the trace was recorded on a different network")
    if trace.version != net.version:
        raise StaleTraceError("the trace was recorded before the last parameter update")
    batch = trace.batch_size
    logit_grads = np.asarray(logit_grads, dtype=np.float64)
    value_grads = np.asarray(value_grads, dtype=np.float64).reshape(-1)
    if logit_grads.shape != trace.logits.shape:
        raise ValueError("logit gradients have shape {}, expected {}".format(logit_grads.shape, trace.logits.shape))
    if value_grads.shape != (batch,):
        raise ValueError("value gradients have shape {}, expected ({},)".format(value_grads.shape, batch))

    weights = {}
    biases = {}
    pre = {POLICY_HEAD: logit_grads, VALUE_HEAD: value_grads[:, None]}

    top = trace.inputs[POLICY_HEAD]
    for name in (POLICY_HEAD, VALUE_HEAD):
        g = pre[name].T @ top
        weights[name] = g[:, :-1]
        biases[name] = g[:, -1]

    dh = logit_grads @ net.layer(POLICY_HEAD).weight + value_grads[:, None] @ net.layer(VALUE_HEAD).weight
    for layer in reversed(net.trunk):
        dz = dh * (trace.preactivations[layer.name] > 0)
        pre[layer.name] = dz
        g = dz.T @ trace.inputs[layer.name]
        weights[layer.name] = g[:, :-1]
        biases[layer.name] = g[:, -1]
        dh = dz @ layer.weight

    order = net.layer_names
    return GradientSet({k: weights[k] for k in order}, {k: biases[k] for k in order},
                       preactivation_grads={k: pre[k] for k in order})


def action_distribution(logits):
    r"""
    Return the softmax of ``logits`` along the last axis.

    EXAMPLES::

        >>> from expertac.learning.policy import action_distribution
        >>> action_distribution([0.0, 0.0, 0.0, 0.0]).tolist()
        [0.25, 0.25, 0.25, 0.25]
        >>> action_distribution([1000.0, 0.0]).tolist()
        [1.0, 0.0]
    """
    return softmax(np.asarray(logits, dtype=np.float64), axis=-1)


def log_prob_and_entropy(logits, actions):
    r"""
    Return the log-probabilities of ``actions`` and the entropies of the
    distributions given by the rows of ``logits``.

    EXAMPLES::

        >>> import numpy as np
        >>> from expertac.learning.policy import log_prob_and_entropy
        >>> logp, h = log_prob_and_entropy(np.zeros((1, 3)), [0])
        >>> bool(np.isclose(logp[0], -np.log(3))), round(float(h[0]), 6)
        (True, 1.098612)
        >>> log_prob_and_entropy(np.zeros((1, 2)), [2])
        Traceback (most recent call last):
        ...
        ValueError: action ids must lie in [0, 2)
    """
    logits = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    actions = np.asarray(actions, dtype=np.int64).reshape(-1)
    count = logits.shape[1]
    if actions.shape[0] != logits.shape[0]:
        raise ValueError("{} actions for {} rows of logits".format(actions.shape[0], logits.shape[0]))
    if np.any(actions < 0) or np.any(actions >= count):
        raise ValueError("action ids must lie in [0, {})".format(count))
    logp = log_softmax(logits, axis=1)
    p = np.exp(logp)
    entropy = -np.sum(p * logp, axis=1)
    return logp[np.arange(len(actions)), actions], np.clip(entropy, 0.0, np.log(count))


def entropy_logit_gradient(logits):
    r"""
    Return the gradient of the entropy of each row of ``logits`` with respect
    to that row: ``-p (log p + H)``.
    """
    logp = log_softmax(np.atleast_2d(logits), axis=1)
    p = np.exp(logp)
    entropy = -np.sum(p * logp, axis=1, keepdims=True)
    return -p * (logp + entropy)


def one_hot(actions, count):
    actions = np.asarray(actions, dtype=np.int64).reshape(-1)
    out = np.zeros((actions.shape[0], count))
    out[np.arange(actions.shape[0]), actions] = 1.0
    return out


def sample_actions(probabilities, rng):
    r"""
    Draw one action per row of ``probabilities`` with the generator ``rng``.

    EXAMPLES::

        >>> import numpy as np
        >>> from expertac.learning.policy import sample_actions
        >>> sample_actions(np.array([[0.0, 1.0], [1.0, 0.0]]), np.random.default_rng(0)).tolist()
        [1, 0]
    """
    probabilities = np.atleast_2d(probabilities)
    u = rng.random(probabilities.shape[0])
    cdf = np.cumsum(probabilities, axis=1)
    actions = np.sum(u[:, None] >= cdf, axis=1)
    return np.minimum(actions, probabilities.shape[1] - 1).astype(np.int64)


def greedy_actions(logits):
    r"""
    Return the argmax of each row; ties go to the lowest action id.
    """
    return np.argmax(np.atleast_2d(logits), axis=1).astype(np.int64)


def weighted_log_likelihood_gradient(net, trace, actions, weights):
    r"""
    Return the gradient of ``-(1/k) sum_i w_i log pi(a_i | s_i)`` over the
    ``k`` rows of ``trace``.

    ``weights`` are constants; the value head receives no gradient.
    """
    weights = np.asarray(weights, dtype=np.float64).reshape(-1)
    k = trace.batch_size
    if weights.shape != (k,):
        raise ValueError("{} weights for a batch of {}".format(weights.shape[0], k))
    p = trace.probabilities
    logit_grads = weights[:, None] * (p - one_hot(actions, p.shape[1])) / k
    return backward(net, trace, logit_grads, np.zeros(k))


def save_checkpoint(net, path):
    r"""
    Write the parameters of ``net`` to ``path``.

    EXAMPLES::

        >>> import os, tempfile
        >>> from expertac.learning.policy import PolicyNet, save_checkpoint, load_checkpoint
        >>> net = PolicyNet.initial(5, 3, hidden=(4, 4), seed=3)
        >>> path = os.path.join(tempfile.mkdtemp(), 'net.ckpt')
        >>> save_checkpoint(net, path)
        >>> load_checkpoint(path) == net
        True
    """
    from .checkpoint import write_checkpoint
    tensors = []
    for layer in net.layers:
        tensors.append((layer.name + '.weight', layer.weight))
        tensors.append((layer.name + '.bias', layer.bias))
    meta = {'seed': net.seed, 'step': net.step, 'layers': ','.join(net.layer_names)}
    write_checkpoint(path, 'policy', meta, tensors)


def load_checkpoint(path):
    r"""
    Read a network written by :func:`save_checkpoint`.
    """
    from .checkpoint import read_checkpoint
    _, meta, tensors = read_checkpoint(path, kind='policy')
    try:
        names = meta['layers'].split(',')
        layers = [DenseLayer(name, tensors[name + '.weight'], tensors[name + '.bias']) for name in names]
        seed = int(meta['seed'])
        step = int(meta['step'])
    except (KeyError, ValueError) as e:
        raise CheckpointError("{}: incomplete policy checkpoint ({})".format(path, e))
    if len(tensors) != 2 * len(layers):
        raise CheckpointError("{}: unexpected tensors in policy checkpoint".format(path))
    try:
        return PolicyNet(layers, seed=seed, step=step)
    except ValueError as e:
        raise CheckpointError("{}: {}".format(path, e))
