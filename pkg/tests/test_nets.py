import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geosched.nets import (
    Adam,
    DenseNet,
    check_gradients,
    finite_difference_grads,
    load_net,
    max_relative_error,
    polyak,
    save_net,
)


class TestForward:
    def test_zero_net_outputs_zero(self):
        net = DenseNet.zeros((4, 8, 3))
        assert np.all(net.forward(np.ones(4)) == 0.0)

    def test_identity_hidden_layer_is_relu(self):
        net = DenseNet.zeros((3, 3, 3))
        net.weights[0] = np.eye(3)
        net.weights[1] = np.eye(3)
        x = np.array([-2.0, 0.5, 3.0])
        assert np.array_equal(net.forward(x), np.array([0.0, 0.5, 3.0]))

    def test_batch_matches_single_rows(self):
        rng = np.random.default_rng(0)
        net = DenseNet.random((5, 7, 2), rng)
        xs = rng.normal(size=(6, 5))
        batch = net.forward(xs)
        assert batch.shape == (6, 2)
        for i in range(6):
            # blas fold order differs between gemm and gemv, so not bit-equal
            np.testing.assert_allclose(batch[i], net.forward(xs[i]), rtol=1e-13)

    def test_rejects_wrong_input_width(self):
        net = DenseNet.zeros((4, 2))
        with pytest.raises(ValueError, match="input width"):
            net.forward(np.zeros(3))

    def test_param_count(self):
        net = DenseNet.zeros((7, 5, 3))
        assert net.n_params == 7 * 5 + 5 + 5 * 3 + 3

    @given(st.floats(min_value=0.01, max_value=100.0))
    @settings(max_examples=30, deadline=None)
    def test_positive_homogeneity_with_zero_biases(self, c):
        # rectifiers commute with positive scaling when biases are zero
        rng = np.random.default_rng(7)
        net = DenseNet.random((3, 6, 2), rng)
        x = np.array([0.3, -1.2, 0.8])
        np.testing.assert_allclose(net.forward(c * x), c * net.forward(x),
                                   rtol=1e-9, atol=1e-12)


class TestBackward:
    def test_linear_net_quadratic_loss_closed_form(self):
        # single affine layer, L = (w.x + b - y)^2: dL/dw = 2e x, dL/db = 2e
        net = DenseNet.zeros((2, 1))
        net.weights[0][:, 0] = [0.7, -0.3]
        net.biases[0][0] = 0.1
        x = np.array([2.0, 1.0])
        target = 0.5
        out, cache = net.forward_cached(x)
        err = out[0] - target
        gw, gb, dx = net.backward(cache, np.array([2.0 * err]))
        np.testing.assert_allclose(gw[0][:, 0], 2.0 * err * x, rtol=1e-15)
        assert gb[0][0] == pytest.approx(2.0 * err, rel=1e-15)
        np.testing.assert_allclose(dx, 2.0 * err * net.weights[0][:, 0], rtol=1e-15)

    def test_relu_blocks_gradient_for_inactive_units(self):
        net = DenseNet.zeros((1, 1, 1))
        net.weights[0][0, 0] = 1.0
        net.weights[1][0, 0] = 1.0
        _, cache = net.forward_cached(np.array([-3.0]))
        gw, gb, _ = net.backward(cache, np.array([1.0]))
        assert gw[0][0, 0] == 0.0   # pre-activation negative, unit dead
        assert gb[0][0] == 0.0
        assert gb[1][0] == 1.0      # output bias always reachable

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        net = DenseNet.random((4, 6, 3), rng)
        xs = rng.normal(size=(5, 4))
        ys = rng.normal(size=(5, 3))

        def loss(candidate):
            return float(np.mean((candidate.forward(xs) - ys) ** 2))

        out, cache = net.forward_cached(xs)
        gw, gb, _ = net.backward(cache, 2.0 * (out - ys) / out.size)
        fw, fb = finite_difference_grads(net, loss)
        assert max_relative_error(gw + gb, fw + fb) < 1e-6

    def test_gradient_accumulates_over_batch(self):
        rng = np.random.default_rng(4)
        net = DenseNet.random((3, 2), rng)
        xs = rng.normal(size=(4, 3))
        _, cache = net.forward_cached(xs)
        gw, _, _ = net.backward(cache, np.ones((4, 2)))
        np.testing.assert_allclose(gw[0], xs.sum(axis=0)[:, None] @ np.ones((1, 2)),
                                   rtol=1e-12)


class TestAdam:
    def test_zero_gradient_is_a_no_op(self):
        net = DenseNet.random((3, 4, 2), np.random.default_rng(5))
        before = net.copy()
        opt = Adam(net, lr=1e-3)
        gw = [np.zeros_like(w) for w in net.weights]
        gb = [np.zeros_like(b) for b in net.biases]
        opt.step(net, gw, gb)
        for w0, w1 in zip(before.weights, net.weights):
            assert np.array_equal(w0, w1)

    def test_first_step_is_signed_lr(self):
        net = DenseNet.zeros((2, 2))
        opt = Adam(net, lr=1e-3)
        g = np.array([[1.0, -2.0], [0.5, -0.25]])
        opt.step(net, [g], [np.zeros(2)])
        np.testing.assert_allclose(net.weights[0], -1e-3 * np.sign(g), atol=1e-9)

    def test_descends_convex_quadratic(self):
        rng = np.random.default_rng(6)
        net = DenseNet.random((3, 1), rng)
        opt = Adam(net, lr=1e-2)
        xs = rng.normal(size=(16, 3))
        ys = xs @ np.array([[1.0], [-2.0], [0.5]])

        def loss_and_grads():
            out, cache = net.forward_cached(xs)
            gw, gb, _ = net.backward(cache, 2.0 * (out - ys) / out.size)
            return float(np.mean((out - ys) ** 2)), gw, gb

        start, gw, gb = loss_and_grads()
        for _ in range(500):
            opt.step(net, gw, gb)
            _, gw, gb = loss_and_grads()
        end, _, _ = loss_and_grads()
        assert end < 1e-3 * start

    def test_state_dict_round_trip_resumes_identically(self):
        rng = np.random.default_rng(8)
        net_a = DenseNet.random((3, 4, 1), rng)
        net_b = net_a.copy()
        opt_a = Adam(net_a, lr=1e-3)
        g = ([rng.normal(size=w.shape) for w in net_a.weights],
             [rng.normal(size=b.shape) for b in net_a.biases])
        opt_a.step(net_a, *g)
        opt_b = Adam(net_b, lr=1e-3)
        opt_b.load_state_dict(opt_a.state_dict())
        # one warmed step must match between original and restored optimizer
        follow = ([rng.normal(size=w.shape) for w in net_a.weights],
                  [rng.normal(size=b.shape) for b in net_a.biases])
        net_b.weights = [w.copy() for w in net_a.weights]
        net_b.biases = [b.copy() for b in net_a.biases]
        opt_a.step(net_a, *follow)
        opt_b.step(net_b, *follow)
        for wa, wb in zip(net_a.weights, net_b.weights):
            assert np.array_equal(wa, wb)


class TestPolyak:
    def test_tau_one_copies(self):
        rng = np.random.default_rng(9)
        target = DenseNet.random((2, 3, 2), rng)
        online = DenseNet.random((2, 3, 2), rng)
        polyak(target, online, 1.0)
        for tw, ow in zip(target.weights, online.weights):
            assert np.array_equal(tw, ow)

    def test_tau_zero_freezes(self):
        rng = np.random.default_rng(10)
        target = DenseNet.random((2, 3), rng)
        before = target.copy()
        polyak(target, DenseNet.random((2, 3), rng), 0.0)
        assert np.array_equal(target.weights[0], before.weights[0])

    def test_two_steps_compound_geometrically(self):
        tau = 0.25
        target = DenseNet.zeros((1, 1))
        online = DenseNet.zeros((1, 1))
        target.weights[0][0, 0] = 8.0
        online.weights[0][0, 0] = 2.0
        polyak(target, online, tau)
        polyak(target, online, tau)
        keep = (1.0 - tau) ** 2
        expected = keep * 8.0 + (1.0 - keep) * 2.0
        assert target.weights[0][0, 0] == pytest.approx(expected, rel=1e-15)


class TestCheckpoints:
    def test_save_load_bit_exact(self, tmp_path):
        net = DenseNet.random((5, 9, 4), np.random.default_rng(11))
        net.biases[0][:] = np.random.default_rng(12).normal(size=9)
        path = tmp_path / "net.npz"
        save_net(net, path)
        back = load_net(path)
        assert back.sizes == net.sizes
        for a, b in zip(net.weights + net.biases, back.weights + back.biases):
            assert np.array_equal(a, b)


class TestGradientChecker:
    def test_quick_run_passes(self):
        report = check_gradients(seed=0, trials=10)
        assert report["passed"]
        assert report["trials"] == 10
        assert report["max_rel_err"] <= report["tol"] == 1e-4

    def test_reproducible_for_fixed_seed(self):
        a = check_gradients(seed=5, trials=5)
        b = check_gradients(seed=5, trials=5)
        assert a["max_rel_err"] == b["max_rel_err"]

    def test_floor_caps_noise_on_tiny_gradients(self):
        a = [np.array([0.0])]
        b = [np.array([1e-6])]
        assert max_relative_error(a, b) == pytest.approx(1e-3, rel=1e-12)
