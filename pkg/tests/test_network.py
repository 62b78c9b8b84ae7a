"""Dense layers: forward shapes, hand-checked backward pass, initialization."""

import numpy as np
import numpy.testing as npt
import pytest

from latent_cpt.autoencoder import MlpLayer, init_layer, network_backward, network_forward
from latent_cpt.errors import LengthMismatch, NonFiniteInput


class TestLayer:
    def test_identity_forward(self):
        layer = MlpLayer(np.array([[2.0, 0.0], [0.0, 3.0]]), np.array([1.0, -1.0]),
                         "identity")
        out, _ = layer.forward(np.array([[1.0, 1.0]]))
        npt.assert_allclose(out, [[3.0, 2.0]])

    def test_relu_clips(self):
        layer = MlpLayer(np.array([[1.0]]), np.array([0.0]), "relu")
        out, _ = layer.forward(np.array([[-2.0], [2.0]]))
        npt.assert_allclose(out, [[0.0], [2.0]])

    def test_backward_hand_example(self):
        # y = w*x + b with identity activation; loss gradient dL/dy given.
        layer = MlpLayer(np.array([[3.0]]), np.array([0.5]), "identity")
        x = np.array([[2.0]])
        _, cache = layer.forward(x)
        grad_x, grad_w, grad_b = layer.backward(cache, np.array([[1.0]]))
        npt.assert_allclose(grad_x, [[3.0]])   # dL/dx = w
        npt.assert_allclose(grad_w, [[2.0]])   # dL/dw = x
        npt.assert_allclose(grad_b, [0.5 * 0 + 1.0])

    def test_relu_gradient_gate(self):
        layer = MlpLayer(np.array([[1.0]]), np.array([0.0]), "relu")
        _, cache = layer.forward(np.array([[-1.0], [1.0]]))
        grad_x, _, _ = layer.backward(cache, np.array([[1.0], [1.0]]))
        npt.assert_allclose(grad_x, [[0.0], [1.0]])

    def test_rejects_bad_shapes_and_values(self):
        with pytest.raises(LengthMismatch):
            MlpLayer(np.ones((2, 2)), np.ones(3), "relu")
        with pytest.raises(LengthMismatch):
            MlpLayer(np.ones((2, 2)), np.ones(2), "tanh")
        with pytest.raises(NonFiniteInput):
            MlpLayer(np.array([[np.nan]]), np.zeros(1), "relu")


class TestNetwork:
    def test_forward_chain(self):
        rng = np.random.default_rng(0)
        layers = [init_layer(4, 3, "relu", rng), init_layer(3, 2, "identity", rng)]
        out, caches = network_forward(layers, rng.standard_normal((5, 4)))
        assert out.shape == (5, 2) and len(caches) == 2

    def test_backward_matches_finite_difference(self):
        rng = np.random.default_rng(1)
        layers = [init_layer(3, 4, "relu", rng), init_layer(4, 2, "identity", rng)]
        x = rng.standard_normal((6, 3))

        def loss():
            out, _ = network_forward(layers, x)
            return 0.5 * float(np.sum(out**2))

        out, caches = network_forward(layers, x)
        _, grads = network_backward(layers, caches, out)

        h = 1e-6
        for layer, (gw, gb) in zip(layers, grads):
            for arr, grad in ((layer.weights, gw), (layer.biases, gb)):
                flat = arr.reshape(-1)
                gflat = grad.reshape(-1)
                for idx in range(0, flat.size, max(1, flat.size // 5)):
                    orig = flat[idx]
                    flat[idx] = orig + h
                    up = loss()
                    flat[idx] = orig - h
                    down = loss()
                    flat[idx] = orig
                    fd = (up - down) / (2 * h)
                    assert abs(fd - gflat[idx]) < 1e-4 * max(1.0, abs(fd))

    def test_init_is_fan_in_bounded_and_seeded(self):
        a = init_layer(100, 5, "relu", np.random.default_rng(7))
        b = init_layer(100, 5, "relu", np.random.default_rng(7))
        npt.assert_array_equal(a.weights, b.weights)
        assert np.all(np.abs(a.weights) <= 0.1)
        npt.assert_array_equal(a.biases, np.zeros(5))
