# -*- coding: utf-8 -*-
r"""
Test the Kronecker-factored preconditioner and the trust region step.
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


def _random_factor(rng, dim, rank=None):
    rank = dim + 3 if rank is None else rank
    m = rng.normal(size=(dim, rank))
    return m @ m.T / rank


def _random_state(rng, damping, shapes=None, rank_deficient=False):
    from expertac.learning.kfac import FisherState
    shapes = shapes or {'first': tuple(rng.integers(1, 9, size=2)), 'second': tuple(rng.integers(1, 9, size=2))}
    a = {}
    s = {}
    for name, (out, inp) in shapes.items():
        a[name] = _random_factor(rng, inp, 1 if rank_deficient else None)
        s[name] = _random_factor(rng, out, 1 if rank_deficient else None)
    return FisherState.from_factors(a, s, damping=damping)


def _random_gradients(rng, fs):
    from expertac.learning.policy import GradientSet
    return GradientSet.from_homogeneous({name: rng.normal(size=(fs.s_factors[name].shape[0],
                                                                fs.a_factors[name].shape[0]))
                                         for name in fs.layer_names})


def _dense_solve(a, s, g, damping):
    import numpy as np
    pi = np.sqrt((np.trace(a) / len(a)) / (np.trace(s) / len(s)))
    ad = a + pi * np.sqrt(damping) * np.eye(len(a))
    sd = s + np.sqrt(damping) / pi * np.eye(len(s))
    # vec(S X A) = (A^T (x) S) vec(X) for column-major vec
    x = np.linalg.solve(np.kron(ad.T, sd), g.flatten(order='F'))
    return x.reshape(g.shape, order='F')


@pytest.mark.parametrize("seed", range(20))
def test_preconditioning_against_dense_solve(seed):
    import numpy as np
    from expertac.learning.kfac import precondition
    rng = np.random.default_rng(seed)
    fs = _random_state(rng, damping=0.01)
    grads = _random_gradients(rng, fs)
    nat = precondition(fs, grads)
    for name in fs.layer_names:
        expected = _dense_solve(fs.a_factors[name], fs.s_factors[name], grads.homogeneous(name), 0.01)
        error = np.abs(nat.homogeneous(name) - expected).max() / np.abs(expected).max()
        assert error < 1e-8


@pytest.mark.parametrize("seed", range(10))
def test_exact_minimization_of_matched_quadratic(seed):
    import numpy as np
    from expertac.learning.kfac import precondition
    from expertac.learning.policy import GradientSet
    rng = np.random.default_rng(seed)
    fs = _random_state(rng, damping=0.0, shapes={'w': (3, 5)})
    a, s = fs.a_factors['w'], fs.s_factors['w']
    optimum = rng.normal(size=(3, 5))
    w = rng.normal(size=(3, 5))
    # the gradient of 1/2 vec(W - W*)^T (A (x) S) vec(W - W*)
    g = GradientSet.from_homogeneous({'w': s @ (w - optimum) @ a})
    stepped = w - precondition(fs, g).homogeneous('w')
    assert np.abs(stepped - optimum).max() < 1e-8 * max(1.0, np.abs(optimum).max())


@pytest.mark.parametrize("seed", range(10))
def test_preconditioning_is_linear_in_scale(seed):
    import numpy as np
    from expertac.learning.kfac import precondition
    from expertac.learning.policy import GradientSet
    rng = np.random.default_rng(seed)
    fs = _random_state(rng, damping=0.01)
    grads = _random_gradients(rng, fs)
    c = float(rng.uniform(-5, 5))
    scaled = GradientSet.from_homogeneous({name: c * grads.homogeneous(name) for name in fs.layer_names})
    expected = c * precondition(fs, grads).flat()
    assert np.allclose(precondition(fs, scaled).flat(), expected, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_identity_factors_give_a_plain_gradient_step(seed):
    import numpy as np
    from expertac.learning.kfac import FisherState, TrustRegionConfig, precondition, trust_region_step
    from expertac.learning.policy import PolicyNet
    rng = np.random.default_rng(seed)
    net = PolicyNet.initial(4, 3, hidden=(5,), seed=seed)
    shapes = {layer.name: (layer.shape[0], layer.shape[1] + 1) for layer in net.layers}
    fs = FisherState.from_factors({name: np.eye(inp) for name, (out, inp) in shapes.items()},
                                  {name: np.eye(out) for name, (out, inp) in shapes.items()}, damping=0.0)
    grads = _random_gradients(rng, fs)
    nat = precondition(fs, grads)
    assert np.allclose(nat.flat(), grads.flat(), rtol=0, atol=1e-12)

    before = net.flat_parameters()
    net, eta = trust_region_step(net, nat, fs, TrustRegionConfig(kl_radius=1e6, max_lr=1.0), base_lr=0.1)
    assert eta == 0.1
    assert np.allclose(net.flat_parameters(), before - 0.1 * grads.flat(), rtol=0, atol=1e-12)


@pytest.mark.parametrize("damping", [0.0, 0.01, 1.0])
@pytest.mark.parametrize("seed", range(5))
def test_damped_factors_are_positive_semidefinite(seed, damping):
    import numpy as np
    rng = np.random.default_rng(seed)
    fs = _random_state(rng, damping=damping, rank_deficient=True)
    for name in fs.layer_names:
        for factor in fs.damped_factors(name):
            assert np.allclose(factor, factor.T, rtol=0, atol=1e-12)
            assert np.linalg.eigvalsh(factor).min() >= -1e-10


def test_damping_ratio_falls_back_to_one():
    import numpy as np
    from expertac.learning.kfac import FisherState
    fs = FisherState.from_factors({'w': np.zeros((2, 2))}, {'w': np.eye(3)}, damping=0.04)
    a, s = fs.damped_factors('w')
    assert np.allclose(a, 0.2 * np.eye(2), rtol=0, atol=1e-15)
    assert np.allclose(s, 1.2 * np.eye(3), rtol=0, atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_quadratic_kl(seed):
    import numpy as np
    from expertac.learning.kfac import quadratic_kl
    rng = np.random.default_rng(seed)
    fs = _random_state(rng, damping=0.01)
    x = _random_gradients(rng, fs)
    expected = 0.0
    for name in fs.layer_names:
        v = x.homogeneous(name).flatten(order='F')
        expected += v @ np.kron(fs.a_factors[name], fs.s_factors[name]) @ v
    assert quadratic_kl(fs, x) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_step_respects_trust_region(seed):
    import numpy as np
    from expertac.learning.kfac import TrustRegionConfig, precondition, quadratic_kl, trust_region_step
    from expertac.learning.policy import PolicyNet
    rng = np.random.default_rng(seed)
    net = PolicyNet.initial(4, 3, hidden=(5,), seed=seed)
    shapes = {layer.name: (layer.shape[0], layer.shape[1] + 1) for layer in net.layers}
    fs = _random_state(rng, damping=0.01, shapes=shapes)
    nat = precondition(fs, _random_gradients(rng, fs))
    tr = TrustRegionConfig(kl_radius=1e-4, max_lr=0.25)
    before = net.flat_parameters()
    net, eta = trust_region_step(net, nat, fs, tr, base_lr=0.25)
    assert 0 < eta <= 0.25
    assert 0.5 * eta ** 2 * quadratic_kl(fs, nat) <= 1e-4 * (1 + 1e-12)
    assert np.allclose(net.flat_parameters(), before - eta * nat.flat(), rtol=0, atol=1e-14)


def test_step_size():
    from expertac.learning.kfac import TrustRegionConfig, step_size
    tr = TrustRegionConfig(kl_radius=0.5, max_lr=0.3)
    assert step_size(0.0, 1.0, tr) == 0.3
    assert step_size(1e-6, 0.1, tr) == 0.1
    assert step_size(100.0, 1.0, tr) == pytest.approx(0.1)
    with pytest.raises(ValueError, match="non-finite quadratic KL estimate"):
        step_size(float('nan'), 1.0, tr)
    with pytest.raises(ValueError, match="trust region parameters must be positive"):
        TrustRegionConfig(kl_radius=0.0)


def _trace(net, rows):
    import numpy as np
    from expertac.learning.policy import forward
    return forward(net, np.array(rows, dtype=float))


def test_moving_averages():
    import numpy as np
    from expertac.learning.kfac import FisherState, sample_fisher_gradients, update_factors
    from expertac.learning.policy import PolicyNet
    net = PolicyNet.initial(2, 2, hidden=(3,), seed=0)
    fs = FisherState.initial(net, ema_decay=0.75)
    rng = np.random.default_rng(0)
    first = _trace(net, [[1.0, 0.0]] * 4)
    fs = update_factors(fs, first, sample_fisher_gradients(net, first, rng))
    second = _trace(net, [[0.0, 2.0]] * 4)
    sampled = sample_fisher_gradients(net, second, rng)
    fs = update_factors(fs, second, sampled)
    expected = 0.75 * np.outer([1.0, 0.0, 1.0], [1.0, 0.0, 1.0]) + 0.25 * np.outer([0.0, 2.0, 1.0], [0.0, 2.0, 1.0])
    assert np.allclose(fs.a_factors['hidden0'], expected, rtol=0, atol=1e-14)
    assert fs.update_count == 2
    assert fs.s_factors['value'].tolist() == [[1.0]]
    assert set(sampled) == {'hidden0', 'policy'}


def test_identity_before_statistics():
    import numpy as np
    from expertac.learning.kfac import FisherState, precondition
    from expertac.learning.policy import PolicyNet, GradientSet
    net = PolicyNet.initial(2, 2, hidden=(3,), seed=0)
    fs = FisherState.initial(net)
    assert np.array_equal(fs.a_factors['hidden0'], np.eye(3))
    assert np.array_equal(fs.s_factors['policy'], np.eye(2))
    with pytest.raises(ValueError, match="cannot precondition before the first factor update"):
        precondition(fs, GradientSet.zeros_like(net))


def test_eigen_refresh_schedule():
    import numpy as np
    from expertac.learning.kfac import FisherState, sample_fisher_gradients, update_factors
    from expertac.learning.policy import PolicyNet
    net = PolicyNet.initial(2, 2, hidden=(3,), seed=0)
    fs = FisherState.initial(net, eigen_refresh=3)
    rng = np.random.default_rng(1)
    caches = []
    factors = []
    for _ in range(5):
        trace = _trace(net, rng.normal(size=(6, 2)))
        fs = update_factors(fs, trace, sample_fisher_gradients(net, trace, rng))
        caches.append(fs.eigen)
        factors.append(fs.a_factors['hidden0'])
    # refreshed at the first and fourth update only
    assert caches[1] is caches[0] and caches[2] is caches[0]
    assert caches[3] is not caches[0] and caches[4] is caches[3]
    ea, qa, _, _ = caches[4]['hidden0']
    assert np.allclose((qa * ea) @ qa.T, factors[3], rtol=0, atol=1e-12)


def test_invalid_state():
    import numpy as np
    from expertac.learning.kfac import FisherState
    with pytest.raises(ValueError, match="ema_decay must lie in"):
        FisherState.from_factors({'w': np.eye(1)}, {'w': np.eye(1)}, ema_decay=1.0)
    with pytest.raises(ValueError, match="damping must be non-negative"):
        FisherState.from_factors({'w': np.eye(1)}, {'w': np.eye(1)}, damping=-1.0)
    with pytest.raises(ValueError, match="non-finite entries"):
        FisherState.from_factors({'w': np.full((1, 1), np.nan)}, {'w': np.eye(1)})


def test_save_and_load(tmp_path):
    import numpy as np
    from expertac.learning.kfac import save_fisher, load_fisher, precondition
    rng = np.random.default_rng(3)
    fs = _random_state(rng, damping=0.02)
    path = str(tmp_path / "state.fisher")
    save_fisher(fs, path)
    loaded = load_fisher(path)
    assert loaded.layer_names == fs.layer_names
    assert loaded.damping == 0.02 and loaded.update_count == 1
    for name in fs.layer_names:
        assert np.array_equal(loaded.a_factors[name], fs.a_factors[name])
        assert all(np.array_equal(x, y) for x, y in zip(loaded.eigen[name], fs.eigen[name]))
    grads = _random_gradients(rng, fs)
    assert np.array_equal(precondition(loaded, grads).flat(), precondition(fs, grads).flat())


def test_load_rejects_policy_checkpoint(tmp_path):
    from expertac.errors import CheckpointError
    from expertac.learning.kfac import load_fisher
    from expertac.learning.policy import PolicyNet, save_checkpoint
    path = str(tmp_path / "net.ckpt")
    save_checkpoint(PolicyNet.initial(2, 2, hidden=(3,)), path)
    with pytest.raises(CheckpointError, match="expected a 'fisher' checkpoint, found 'policy'"):
        load_fisher(path)
