import numpy as np
import pytest

from entangled_graphs.autodiff import Tensor
from entangled_graphs.optim import DecoupledAdam, OptimConfig


def test_warmup_schedule():
    cfg = OptimConfig(learning_rate=1.0, warmup_steps=4)
    opt = DecoupledAdam([Tensor(np.zeros(1))], cfg)
    seen = []
    for _ in range(6):
        seen.append(opt.current_lr())
        opt.step()
    assert seen == pytest.approx([0.25, 0.5, 0.75, 1.0, 1.0, 1.0])


def test_no_warmup():
    cfg = OptimConfig(learning_rate=0.3, warmup_steps=0)
    opt = DecoupledAdam([Tensor(np.zeros(1))], cfg)
    assert opt.current_lr() == 0.3


def test_first_step_hand_computed():
    # with bias correction the first update direction is g / (|g| + eps)
    cfg = OptimConfig(learning_rate=0.1, weight_decay=0.0, warmup_steps=0)
    p = Tensor(np.array([1.0, -2.0]))
    p.grad = np.array([0.5, -3.0])
    opt = DecoupledAdam([p], cfg)
    opt.step()
    m_hat = np.array([0.5, -3.0])
    v_hat = np.array([0.25, 9.0])
    want = np.array([1.0, -2.0]) - 0.1 * m_hat / (np.sqrt(v_hat) + cfg.eps)
    assert np.allclose(p.data, want, atol=1e-15)
    assert np.allclose(p.data, [1.0 - 0.1, -2.0 + 0.1], atol=1e-8)


def test_second_step_hand_computed():
    cfg = OptimConfig(learning_rate=0.1, weight_decay=0.0, warmup_steps=0)
    p = Tensor(np.array([0.0]))
    g1, g2 = 1.0, -0.5
    p.grad = np.array([g1])
    opt = DecoupledAdam([p], cfg)
    opt.step()
    p.grad = np.array([g2])
    opt.step()

    m = 0.9 * (0.1 * g1) + 0.1 * g2
    v = 0.999 * (0.001 * g1 * g1) + 0.001 * g2 * g2
    m_hat = m / (1 - 0.9 ** 2)
    v_hat = v / (1 - 0.999 ** 2)
    step1 = -0.1 * (0.1 * g1 / (1 - 0.9)) / (np.sqrt(0.001 * g1 * g1 / (1 - 0.999)) + cfg.eps)
    want = step1 - 0.1 * m_hat / (np.sqrt(v_hat) + cfg.eps)
    assert p.data[0] == pytest.approx(want, abs=1e-12)


def test_decay_is_decoupled():
    # zero gradient: the only movement is the decay shrinkage, multiplicative
    # in the parameter and independent of any moment state
    cfg = OptimConfig(learning_rate=0.5, weight_decay=0.1, warmup_steps=0)
    p = Tensor(np.array([2.0, -4.0]))
    opt = DecoupledAdam([p], cfg)
    opt.step()
    assert np.allclose(p.data, [2.0 * (1 - 0.05), -4.0 * (1 - 0.05)], atol=1e-12)


def test_warmup_scales_decay_too():
    cfg = OptimConfig(learning_rate=0.5, weight_decay=0.1, warmup_steps=5)
    p = Tensor(np.array([1.0]))
    DecoupledAdam([p], cfg).step()
    assert p.data[0] == pytest.approx(1.0 - 0.5 * 0.2 * 0.1, abs=1e-12)


def test_zero_grad_clears_all_params():
    ps = [Tensor(np.ones(3)), Tensor(np.ones((2, 2)))]
    for p in ps:
        p.grad = np.ones_like(p.data)
    DecoupledAdam(ps, OptimConfig()).zero_grad()
    assert all(np.all(p.grad == 0) for p in ps)


def test_descends_a_quadratic():
    p = Tensor(np.array([5.0]))
    opt = DecoupledAdam([p], OptimConfig(learning_rate=0.2, weight_decay=0.0,
                                         warmup_steps=0))
    for _ in range(400):
        opt.zero_grad()
        loss = (p * p).sum()
        loss.backward()
        opt.step()
    assert abs(p.data[0]) < 1e-2
