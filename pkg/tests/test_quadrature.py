import numpy as np
import pytest

from floquet_cg.config import QuadratureError
from floquet_cg.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, integrate_panels, seeded_edges


def test_rule_exactness():
    # Kronrod part is exact to degree 22, Gauss part to degree 13
    for deg in range(0, 23):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert np.isclose(KRONROD_WEIGHTS @ NODES**deg, exact, atol=1e-14)
    for deg in range(0, 14):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert np.isclose(GAUSS_WEIGHTS @ NODES**deg, exact, atol=1e-14)


def test_polynomial_and_oscillatory():
    val, _ = integrate_panels(lambda x: x**7 - 3 * x**2, [0.0, 1.0, 2.0])
    assert np.isclose(val, 24.0, rtol=1e-14)
    val, _ = integrate_panels(lambda x: np.cos(50 * x), seeded_edges(0.0, 3.0, 0.05))
    assert np.isclose(val, np.sin(150.0) / 50.0, rtol=1e-10)


def test_sinc_squared_normalization():
    tau = 7.0
    f = lambda w: tau / (2 * np.pi) * np.sinc(w * tau / (2 * np.pi)) ** 2  # noqa: E731
    val, _ = integrate_panels(f, seeded_edges(-4000.0, 4000.0, np.pi / tau, [0.0]))
    # tails beyond |w| = 4000 carry about 2 / (pi tau 4000)
    assert abs(val - 1.0) < 3e-5


def test_seeded_edges_contains_breakpoints():
    e = seeded_edges(-1.0, 1.0, 0.3, [0.123, 5.0])
    assert e[0] == -1.0 and e[-1] == 1.0
    assert 0.123 in e
    assert np.all(np.diff(e) > 0)


def test_nonconvergence_raises():
    with pytest.raises(QuadratureError) as info:
        integrate_panels(lambda x: 1.0 / np.abs(x - 0.3) ** 0.99, [0.0, 1.0], rtol=1e-14, max_sweeps=5)
    assert info.value.estimate is not None
