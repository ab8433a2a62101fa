# -*- coding: utf-8 -*-
r"""
Kronecker-factored approximate natural gradient with a trust region.

For a dense layer with homogeneous input ``a`` and pre-activation gradient
``g`` the Fisher block is approximated by ``A (x) S`` where ``A = E[a a^T]``
and ``S = E[g g^T]``. The gradients ``g`` are taken with respect to actions
sampled from the policy itself, so that ``A (x) S`` approximates the true
Fisher rather than the empirical one. The value head uses the same ``A`` as
the policy head and ``S = [[1]]``.

Gradients ``G`` (``out x (in + 1)``) are preconditioned with the damped
factors::

    X = (S + sqrt(damping) / pi I)^-1  G  (A + pi sqrt(damping) I)^-1

where ``pi = sqrt((tr A / dim A) / (tr S / dim S))``, and the step size is
chosen so that the quadratic model of the KL divergence of one step stays
below a radius.

EXAMPLES::

    >>> import numpy as np
    >>> from expertac.learning.kfac import FisherState, precondition
    >>> from expertac.learning.policy import GradientSet
    >>> fs = FisherState.from_factors({'w': np.diag([1.0, 2.0, 4.0])}, {'w': np.diag([1.0, 0.5])}, damping=0.0)
    >>> g = GradientSet.from_homogeneous({'w': np.ones((2, 3))})
    >>> precondition(fs, g).homogeneous('w').round(12).tolist()
    [[1.0, 0.5, 0.25], [2.0, 1.0, 0.5]]
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
import logging

import numpy as np
from scipy.linalg import eigh

from expertac.errors import CheckpointError

from .policy import GradientSet, VALUE_HEAD, backward, one_hot, sample_actions

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class TrustRegionConfig:
    r"""
    ``kl_radius`` bounds the quadratic KL model of one step; ``max_lr`` caps
    the step size.
    """
    kl_radius: float = 0.002
    max_lr: float = 0.25

    def __post_init__(self):
        if not self.kl_radius > 0 or not self.max_lr > 0:
            raise ValueError("trust region parameters must be positive, got {}, {}".format(
                self.kl_radius, self.max_lr))


def _symmetrize(m):
    return 0.5 * (m + m.T)


def _eigen(m):
    if not np.all(np.isfinite(m)):
        raise ValueError("non-finite entries in a Kronecker factor")
    e, q = eigh(m)
    return np.maximum(e, 0.0), q


@dataclasses.dataclass(frozen=True, eq=False)
class FisherState:
    r"""
    Running Kronecker factors of every layer.

    ``eigen`` caches the eigendecompositions ``(e_A, Q_A, e_S, Q_S)`` of the
    factors; they are recomputed every ``eigen_refresh`` factor updates and
    reused in between.
    """
    layer_names: tuple
    a_factors: dict
    s_factors: dict
    ema_decay: float = 0.95
    damping: float = 0.01
    update_count: int = 0
    eigen_refresh: int = 10
    eigen: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.ema_decay < 1.0:
            raise ValueError("ema_decay must lie in (0, 1), got {}".format(self.ema_decay))
        if self.damping < 0:
            raise ValueError("damping must be non-negative, got {}".format(self.damping))
        if self.eigen_refresh < 1:
            raise ValueError("eigen_refresh must be positive, got {}".format(self.eigen_refresh))

    @staticmethod
    def initial(net, ema_decay=0.95, damping=0.01, eigen_refresh=10):
        r"""
        Return the state before any statistics were seen: identity factors
        and ``update_count = 0``.
        """
        a = {}
        s = {}
        for layer in net.layers:
            out, inp = layer.shape
            a[layer.name] = np.eye(inp + 1)
            s[layer.name] = np.eye(out)
        return FisherState(layer_names=net.layer_names, a_factors=a, s_factors=s,
                           ema_decay=ema_decay, damping=damping, eigen_refresh=eigen_refresh)

    @staticmethod
    def from_factors(a_factors, s_factors, damping=0.01, ema_decay=0.95, eigen_refresh=10):
        r"""
        Return a state with the given factors as if they had been estimated
        by one update, with fresh eigendecompositions.
        """
        names = tuple(a_factors)
        a = {k: np.array(a_factors[k], dtype=np.float64) for k in names}
        s = {k: np.array(s_factors[k], dtype=np.float64) for k in names}
        eigen = {k: _eigen(a[k]) + _eigen(s[k]) for k in names}
        return FisherState(layer_names=names, a_factors=a, s_factors=s, ema_decay=ema_decay,
                           damping=damping, update_count=1, eigen_refresh=eigen_refresh, eigen=eigen)

    def with_eigen(self):
        r"""
        Return this state with freshly computed eigendecompositions.
        """
        eigen = {k: _eigen(self.a_factors[k]) + _eigen(self.s_factors[k]) for k in self.layer_names}
        return dataclasses.replace(self, eigen=eigen)

    def damped_factors(self, name):
        r"""
        Return ``(A + pi sqrt(damping) I, S + sqrt(damping) / pi I)`` for layer
        ``name``, computed from the cached eigendecompositions.
        """
        ea, qa, es, qs = self.eigen[name]
        da, ds = _damped_eigenvalues(ea, es, self.damping)
        return (qa * da) @ qa.T, (qs * ds) @ qs.T


def _damping_ratio(ea, es):
    ta = np.sum(ea) / len(ea)
    ts = np.sum(es) / len(es)
    if ta <= 0 or ts <= 0:
        return 1.0
    return float(np.sqrt(ta / ts))


def _damped_eigenvalues(ea, es, damping):
    pi = _damping_ratio(ea, es)
    root = np.sqrt(damping)
    return ea + pi * root, es + root / pi


def sample_fisher_gradients(net, trace, rng):
    r"""
    Return, per layer, the per-sample pre-activation gradients of
    ``log pi(a | s)`` for actions ``a`` freshly sampled from the policy at
    the states of ``trace``.

    Only the policy log-likelihood is used; the value head is not part of
    the returned dictionary.
    """
    p = trace.probabilities
    sampled = sample_actions(p, rng)
    grads = backward(net, trace, p - one_hot(sampled, p.shape[1]), np.zeros(trace.batch_size))
    return {name: g for name, g in grads.preactivation_grads.items() if name != VALUE_HEAD}


def update_factors(fs, trace, sampled_grads):
    r"""
    Return ``fs`` with its factors moved towards the moments of the batch.

    ``A <- rho A + (1 - rho) mean(a a^T)`` and ``S <- rho S + (1 - rho)
    mean(g g^T)``; the first update sets the factors to the batch moments.

    EXAMPLES::

        >>> import numpy as np
        >>> from expertac.learning.policy import PolicyNet, forward
        >>> from expertac.learning.kfac import FisherState, sample_fisher_gradients, update_factors
        >>> net = PolicyNet.initial(3, 2, hidden=(4,), seed=0)
        >>> fs = FisherState.initial(net)
        >>> x = np.array([[1.0, 2.0, 3.0]] * 5)
        >>> trace = forward(net, x)
        >>> fs = update_factors(fs, trace, sample_fisher_gradients(net, trace, np.random.default_rng(0)))
        >>> a = np.array([1.0, 2.0, 3.0, 1.0])
        >>> bool(np.allclose(fs.a_factors['hidden0'], np.outer(a, a), rtol=0, atol=1e-14)), fs.update_count
        (True, 1)
    """
    first = fs.update_count == 0
    rho = fs.ema_decay
    a_new = {}
    s_new = {}
    for name in fs.layer_names:
        inputs = trace.inputs[name]
        if inputs.shape[1] != fs.a_factors[name].shape[0]:
            raise ValueError("layer {!r} has {} homogeneous inputs, its factor expects {}".format(
                name, inputs.shape[1], fs.a_factors[name].shape[0]))
        moment = _symmetrize(inputs.T @ inputs / inputs.shape[0])
        a_new[name] = moment if first else _symmetrize(rho * fs.a_factors[name] + (1 - rho) * moment)
        if name == VALUE_HEAD:
            s_new[name] = np.ones((1, 1))
            continue
        g = sampled_grads[name]
        if g.shape[1] != fs.s_factors[name].shape[0]:
            raise ValueError("layer {!r} has {} outputs, its factor expects {}".format(
                name, g.shape[1], fs.s_factors[name].shape[0]))
        moment = _symmetrize(g.T @ g / g.shape[0])
        s_new[name] = moment if first else _symmetrize(rho * fs.s_factors[name] + (1 - rho) * moment)
    count = fs.update_count + 1
    fs = dataclasses.replace(fs, a_factors=a_new, s_factors=s_new, update_count=count)
    if (count - 1) % fs.eigen_refresh == 0:
        logger.debug("refreshing Kronecker factor eigendecompositions at update %d", count)
        fs = fs.with_eigen()
    return fs


def precondition(fs, grads):
    r"""
    Return the natural gradient approximation of ``grads``.
    """
    if fs.update_count == 0 or not fs.eigen:
        raise ValueError("cannot precondition before the first factor update")
    blocks = {}
    for name in grads.layer_names:
        ea, qa, es, qs = fs.eigen[name]
        da, ds = _damped_eigenvalues(ea, es, fs.damping)
        g = grads.homogeneous(name)
        rotated = qs.T @ g @ qa
        blocks[name] = qs @ (rotated / np.outer(ds, da)) @ qa.T
    return GradientSet.from_homogeneous(blocks)


def quadratic_kl(fs, nat_grads):
    r"""
    Return ``sum_l vec(X_l)^T (A_l (x) S_l) vec(X_l)``, the quadratic model
    of the KL divergence of a unit step along ``nat_grads``.
    """
    q = 0.0
    for name in nat_grads.layer_names:
        x = nat_grads.homogeneous(name)
        q += float(np.sum((fs.s_factors[name] @ x @ fs.a_factors[name]) * x))
    return q


def step_size(q, base_lr, tr):
    r"""
    Return ``min(max_lr, base_lr, sqrt(2 kl_radius / q))``.

    EXAMPLES::

        >>> from expertac.learning.kfac import TrustRegionConfig, step_size
        >>> step_size(4.0, 1.0, TrustRegionConfig(kl_radius=0.5, max_lr=1.0))
        0.5
        >>> step_size(0.0, 0.1, TrustRegionConfig())
        0.1
    """
    if not np.isfinite(q):
        raise ValueError("non-finite quadratic KL estimate {}".format(q))
    eta = min(tr.max_lr, base_lr)
    if q > 0:
        eta = min(eta, float(np.sqrt(2 * tr.kl_radius / q)))
    return eta


def trust_region_step(net, nat_grads, fs, tr, base_lr):
    r"""
    Apply ``-eta * nat_grads`` to ``net`` in place and return ``(net, eta)``.
    """
    eta = step_size(quadratic_kl(fs, nat_grads), base_lr, tr)
    net.apply_update(nat_grads, eta)
    return net, eta


def save_fisher(fs, path):
    r"""
    Write ``fs`` to ``path`` in the checkpoint format of
    :mod:`expertac.learning.checkpoint`.
    """
    from .checkpoint import write_checkpoint
    tensors = []
    for name in fs.layer_names:
        tensors.append((name + '.A', fs.a_factors[name]))
        tensors.append((name + '.S', fs.s_factors[name]))
        if name in fs.eigen:
            for label, t in zip(('eA', 'QA', 'eS', 'QS'), fs.eigen[name]):
                tensors.append(('{}.{}'.format(name, label), t))
    meta = {'layers': ','.join(fs.layer_names),
            'ema_decay': repr(fs.ema_decay),
            'damping': repr(fs.damping),
            'update_count': fs.update_count,
            'eigen_refresh': fs.eigen_refresh}
    write_checkpoint(path, 'fisher', meta, tensors)


def load_fisher(path):
    r"""
    Read a state written by :func:`save_fisher`.

    EXAMPLES::

        >>> import os, tempfile
        >>> import numpy as np
        >>> from expertac.learning.kfac import FisherState, save_fisher, load_fisher
        >>> fs = FisherState.from_factors({'w': np.eye(2)}, {'w': 2 * np.eye(3)}, damping=0.5)
        >>> path = os.path.join(tempfile.mkdtemp(), 'f.fisher')
        >>> save_fisher(fs, path)
        >>> gs = load_fisher(path)
        >>> gs.damping, gs.update_count, gs.s_factors['w'].tolist()[0]
        (0.5, 1, [2.0, 0.0, 0.0])
    """
    from .checkpoint import read_checkpoint
    _, meta, tensors = read_checkpoint(path, kind='fisher')
    try:
        names = tuple(meta['layers'].split(','))
        a = {k: tensors[k + '.A'] for k in names}
        s = {k: tensors[k + '.S'] for k in names}
        eigen = {k: tuple(tensors['{}.{}'.format(k, label)] for label in ('eA', 'QA', 'eS', 'QS'))
                 for k in names if k + '.eA' in tensors}
        return FisherState(layer_names=names, a_factors=a, s_factors=s,
                           ema_decay=float(meta['ema_decay']), damping=float(meta['damping']),
                           update_count=int(meta['update_count']),
                           eigen_refresh=int(meta['eigen_refresh']), eigen=eigen)
    except (KeyError, ValueError) as e:
        raise CheckpointError("{}: incomplete Fisher checkpoint ({})".format(path, e))
