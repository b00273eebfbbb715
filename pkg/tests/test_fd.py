"""Finite-difference helper checks against closed-form derivatives."""
import numpy as np
import pytest

from syl import fd


def quadratic(x):
    A = np.array([[2.0, 0.5, 0.0],
                  [0.5, 1.0, -0.3],
                  [0.0, -0.3, 4.0]])
    b = np.array([1.0, -2.0, 0.5])
    return 0.5 * float(x @ A @ x) + float(b @ x)


QUAD_A = np.array([[2.0, 0.5, 0.0],
                   [0.5, 1.0, -0.3],
                   [0.0, -0.3, 4.0]])
QUAD_B = np.array([1.0, -2.0, 0.5])


@pytest.mark.parametrize("x", [np.zeros(3), np.array([1.0, -2.0, 3.0]),
                               np.array([100.0, 0.01, -50.0])])
def test_gradient_on_quadratic(x):
    got = fd.gradient(quadratic, x)
    want = QUAD_A @ x + QUAD_B
    np.testing.assert_allclose(got, want, rtol=1e-7, atol=1e-7 * (1 + np.abs(want).max()))


def test_hessian_on_quadratic_is_exact_matrix():
    # roundoff floor for double-differenced values is eps |f| / h^2,
    # a few 1e-5 at the default step
    x = np.array([0.3, -1.2, 2.0])
    H = fd.hessian(quadratic, x)
    np.testing.assert_allclose(H, QUAD_A, atol=1e-4)
    np.testing.assert_allclose(H, H.T)  # symmetric by construction


def test_gradient_scales_steps_with_coordinates():
    # exp is scale-sensitive: a fixed absolute step at x = 20 would lose
    # most digits, the relative step keeps eight
    got = fd.gradient(lambda x: float(np.exp(x).sum()), np.array([20.0]))
    want = np.exp(20.0)
    assert abs(got[0] - want) / want < 1e-8


def test_jacobian_of_vector_map():
    def F(x):
        return np.array([x[0] * x[1], np.sin(x[1]), x[0] ** 3])

    x = np.array([0.7, -0.4])
    J = fd.jacobian(F, x)
    want = np.array([[x[1], x[0]],
                     [0.0, np.cos(x[1])],
                     [3 * x[0] ** 2, 0.0]])
    np.testing.assert_allclose(J, want, atol=1e-8)


def test_jacobian_of_gradient_recovers_hessian_tightly():
    """Differencing an analytic gradient is far more accurate than
    differencing the value twice; this is what the concavity audits use."""
    def value(x):
        return float(np.sqrt(np.prod(x)))

    def gradient(x):
        return np.sqrt(np.prod(x)) / (2.0 * x)

    x = np.array([1.3, 0.8, 2.1])
    H = fd.jacobian(gradient, x)
    v = value(x)
    want = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            want[i, j] = v / (4.0 * x[i] * x[j]) * (1.0 - 2.0 * (i == j))
    np.testing.assert_allclose(0.5 * (H + H.T), want, atol=1e-9)
