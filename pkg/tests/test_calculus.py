"""Derivatives of maps between uniform carriers."""

import numpy as np
import pytest

from emergent_irq.calculus import (MapBetweenCarriers,
                                   check_derivative_morphism, derivative)
from emergent_irq.carriers import (make_dihedral_quandle, make_euclidean,
                                   make_heisenberg)
from emergent_irq.errors import (CarrierConstructionError,
                                 NonConvergenceError,
                                 UnsupportedCarrierError)


def test_affine_map_derivative():
    # For f(p) = c + A p between flat carriers the derivative is exactly
    # the affine approximation f(x) + A (u - x), at every level.
    eu2, eu3 = make_euclidean(2, 0.5), make_euclidean(3, 0.5)
    A = np.array([[2.0, -1.0], [0.5, 3.0], [1.0, 1.0]])
    c = np.array([0.3, -0.2, 0.7])

    def f(p):
        return c + np.asarray(p, dtype=float) @ A.T

    m = MapBetweenCarriers(eu2, eu3, f, name="affine")
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.uniform(-2, 2, size=2)
        u = rng.uniform(-2, 2, size=2)
        val, rep = derivative(m, x, u)
        assert rep.converged
        assert float(np.max(np.abs(val - (f(x) + A @ (u - x))))) <= 1e-9


def test_identity_map_derivative_is_bitwise_exact():
    # On dyadic points with epsilon = 1/2 every iterate is computed in
    # exact binary arithmetic, so the trail is identically zero and the
    # value comes back bit for bit.
    eu = make_euclidean(2, 0.5)
    ident = MapBetweenCarriers(eu, eu, lambda p: p, name="id")
    xs = np.array([[0.0, 0.0], [1 / 64, -3 / 64], [17 / 64, 5 / 64]])
    us = np.array([[5 / 64, 9 / 64], [-11 / 64, 1 / 2], [1.0, -63 / 64]])
    for x, u in zip(xs, us):
        val, rep = derivative(ident, x, u)
        assert np.array_equal(val, u)
        assert rep.converged and rep.stop_k == 4
        assert rep.residual_trail == (0.0, 0.0, 0.0)
        assert np.isnan(rep.estimated_rate)


def test_heisenberg_dilation_derivative():
    # The dilation is a group morphism commuting with itself, so its
    # derivative in the iterated-operation sense is the dilation again.
    heis = make_heisenberg(0.5)
    ops = heis.group
    m = MapBetweenCarriers(heis, heis, lambda p: ops.power(1, p),
                           name="dilation")
    x = np.array([0.5, -0.3, 0.2])
    u = np.array([-0.7, 0.4, 0.9])
    val, rep = derivative(m, x, u)
    assert rep.converged
    assert float(heis.metric(val, ops.power(1, u))) <= 1e-9
    report = check_derivative_morphism(m, x, samples=40)
    assert report.identity == "Tf-morphism"
    assert report.samples == 40 and report.tolerance == 1e-7
    assert report.passed and report.max_residual <= 1e-9


def _quad(p):
    p = np.asarray(p, dtype=float)
    return np.stack([p[..., 0], p[..., 1], p[..., 2] + p[..., 0] ** 2],
                    axis=-1)


def test_quadratic_map_derivative_at_neutral():
    # At the neutral point the quadratic correction scales like the square
    # of the dilation and survives in the center layer: Tf(e, u) =
    # (u1, u2, u3 + u1^2), a graded but non-linear derivative.
    heis = make_heisenberg(0.5)
    m = MapBetweenCarriers(heis, heis, _quad, name="quad")
    u = np.array([0.3, -0.2, 0.1])
    val, rep = derivative(m, np.zeros(3), u)
    assert rep.converged
    assert float(np.max(np.abs(val - [u[0], u[1], u[2] + u[0] ** 2]))) <= 1e-12


def test_quadratic_map_not_differentiable_off_center():
    # Away from the center axis the same map has no derivative: the
    # iterates' trail bottoms out at order one and regrows, which must
    # surface as an error, not a fabricated limit.
    heis = make_heisenberg(0.5)
    m = MapBetweenCarriers(heis, heis, _quad, name="quad")
    with pytest.raises(NonConvergenceError) as excinfo:
        derivative(m, np.array([1.0, 1.0, 0.0]), np.array([0.3, -0.2, 0.1]))
    assert "bottomed out" in str(excinfo.value)
    assert len(excinfo.value.trail) > 0


def test_map_probe_validation():
    eu2, eu3 = make_euclidean(2, 0.5), make_euclidean(3, 0.5)
    with pytest.raises(CarrierConstructionError, match="dimension"):
        MapBetweenCarriers(eu2, eu3, lambda p: p, name="wrong-dim")
    with pytest.raises(CarrierConstructionError, match="non-finite"):
        MapBetweenCarriers(eu2, eu2, lambda p: np.full_like(
            np.asarray(p, dtype=float), np.nan), name="nan-map")


def test_derivative_needs_uniform_carriers():
    dq = make_dihedral_quandle(5)
    eu = make_euclidean(1, 0.5)
    m = MapBetweenCarriers(dq, dq, lambda p: p, name="id")
    with pytest.raises(UnsupportedCarrierError):
        derivative(m, 0, 1)
    m2 = MapBetweenCarriers(eu, dq, lambda p: np.zeros(1, dtype=int),
                            name="collapse")
    with pytest.raises(UnsupportedCarrierError):
        check_derivative_morphism(m2, np.zeros(1))
