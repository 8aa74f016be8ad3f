"""Right division, loop isotopes, and the symmetric-space layer."""

import numpy as np
import pytest

from emergent_irq.carriers import (GroupOps, make_dihedral_quandle,
                                   make_euclidean, make_group_irq,
                                   make_heisenberg, make_hyperbolic,
                                   make_perturbed_plane, reflect)
from emergent_irq.core import inverse_k, star_k
from emergent_irq.division import (DivisionMethod, check_involution,
                                   check_loos_axioms,
                                   default_division_method, inv_k,
                                   loop_isotope_k, right_divide_k, t_map,
                                   underline_inv_k)
from emergent_irq.errors import NonConvergenceError, UnsupportedCarrierError
from emergent_irq.limits import LimitConfig, emergent_inverse, emergent_sum


def test_division_method_validation():
    m = DivisionMethod("fixed_point")
    assert m.max_terms == 200 and m.tol == 1e-10
    with pytest.raises(UnsupportedCarrierError):
        DivisionMethod("newton")
    with pytest.raises(ValueError):
        DivisionMethod("fixed_point", max_terms=0)
    with pytest.raises(ValueError):
        DivisionMethod("fixed_point", tol=0.0)


def test_default_division_method():
    assert default_division_method(make_euclidean(1, 0.5)).kind == "closed_form"
    assert default_division_method(make_dihedral_quandle(5)).kind == "closed_form"
    assert default_division_method(make_heisenberg(0.5)).kind == "truncated_product"
    assert default_division_method(make_perturbed_plane(0.5, 0.1)).kind == "fixed_point"
    # No divide, no morphism delta, not uniform: nothing applies.
    group = GroupOps(mul=lambda a, b: np.asarray(a, dtype=float) + b,
                     inv=lambda a: -np.asarray(a, dtype=float),
                     neutral=np.zeros(1))
    bare = make_group_irq(group, lambda g: 0.5 * np.asarray(g, dtype=float),
                          lambda g: 2.0 * np.asarray(g, dtype=float),
                          name="bare", dim=1)
    with pytest.raises(UnsupportedCarrierError):
        default_division_method(bare)


def test_euclidean_division_all_methods_agree():
    eu = make_euclidean(2, 0.5)
    rng = np.random.default_rng(1)
    a = rng.uniform(-2, 2, size=(15, 2))
    b = rng.uniform(-2, 2, size=(15, 2))
    for k in (-2, -1, 1, 2, 3):
        closed = right_divide_k(eu, k, b, a)
        assert float(np.max(eu.metric(star_k(eu, k, closed, a), b))) <= 1e-10
        for kind in ("truncated_product", "fixed_point"):
            got = right_divide_k(eu, k, b, a, DivisionMethod(kind))
            assert float(np.max(eu.metric(got, closed))) <= 1e-9


def test_negative_level_swaps_arguments():
    # star_k at -k is back_k at k, so y *_{-k} a = b rewrites to a = y *_k b
    # with the roles of a and b exchanged: b /_{-k} a = a /_k b.
    eu = make_euclidean(1, 0.5)
    a, b = np.array([0.7]), np.array([-0.4])
    lhs = right_divide_k(eu, -2, b, a)
    rhs = right_divide_k(eu, 2, a, b)
    assert float(np.max(np.abs(lhs - rhs))) <= 1e-12


def test_dihedral_division_exhaustive():
    dq = make_dihedral_quandle(5)
    a = np.repeat(np.arange(5), 5)
    b = np.tile(np.arange(5), 5)
    for k in (1, -1, 3):
        y = right_divide_k(dq, k, b, a)
        assert np.array_equal(star_k(dq, k, y, a), b)
    with pytest.raises(UnsupportedCarrierError):
        right_divide_k(dq, 2, b, a)
    with pytest.raises(UnsupportedCarrierError):
        right_divide_k(make_dihedral_quandle(6), 1, 1, 0)


def test_heisenberg_division_methods():
    heis = make_heisenberg(0.5)
    pts = heis.sample(2, 30, 2.0)
    a, b = pts[:15], pts[15:]
    for k in (1, 2, 3):
        y = right_divide_k(heis, k, b, a)
        assert float(np.max(heis.metric(star_k(heis, k, y, a), b))) <= 1e-10
        alt = right_divide_k(heis, k, b, a,
                             DivisionMethod("fixed_point", max_terms=500))
        assert float(np.max(heis.metric(y, alt))) <= 1e-9


def test_division_post_condition_failure():
    # One fixed-point sweep cannot reach a 1e-12 residual from scratch; the
    # mandatory post-condition must refuse to return the bad quotient.
    heis = make_heisenberg(0.5)
    a = np.array([0.5, -0.3, 0.2])
    b = np.array([-0.8, 0.1, 0.6])
    with pytest.raises(NonConvergenceError, match="division residual"):
        right_divide_k(heis, 1, b, a,
                       DivisionMethod("fixed_point", max_terms=1, tol=1e-12))


def test_truncated_product_needs_morphism():
    pert = make_perturbed_plane(0.5, 0.1)
    with pytest.raises(UnsupportedCarrierError):
        right_divide_k(pert, 1, np.zeros(2), np.array([0.5, 0.5]),
                       DivisionMethod("truncated_product"))
    dq = make_dihedral_quandle(5)
    with pytest.raises(UnsupportedCarrierError):
        right_divide_k(dq, 1, 1, 0, DivisionMethod("fixed_point"))


def test_loop_isotope_identity_laws():
    # x is a two-sided identity of the loop at x: x o v = v and u o x = u.
    dq = make_dihedral_quandle(5)
    x = np.repeat(np.arange(5), 5)
    w = np.tile(np.arange(5), 5)
    for k in (1, 3):
        assert np.array_equal(loop_isotope_k(dq, k, x, x, w), w)
        assert np.array_equal(loop_isotope_k(dq, k, x, w, x), w)
    heis = make_heisenberg(0.5)
    pts = heis.sample(4, 30, 1.5)
    x, w = pts[:15], pts[15:]
    for k in (1, 2):
        assert float(np.max(heis.metric(loop_isotope_k(heis, k, x, x, w),
                                        w))) <= 1e-10
        assert float(np.max(heis.metric(loop_isotope_k(heis, k, x, w, x),
                                        w))) <= 1e-10


def test_loop_isotope_converges_to_tangent_sum():
    heis = make_heisenberg(0.5)
    x = np.array([0.3, -0.2, 0.4])
    u = np.array([1.0, 0.5, -0.3])
    v = np.array([-0.4, 0.8, 0.2])
    s, _ = emergent_sum(heis, x, u, v)
    assert float(heis.metric(loop_isotope_k(heis, 30, x, u, v), s)) <= 1e-10


def test_t_map_frozen_euclidean_value():
    # With epsilon = 1/2 on the line: star(1, 3) = 2 and the level-one
    # inversion of 3 through 1 lands at 0, so T(3, 1) = (0, 2).
    eu = make_euclidean(1, 0.5)
    first, second = t_map(eu, np.array([3.0]), np.array([1.0]))
    assert np.allclose(first, [0.0])
    assert np.allclose(second, [2.0])


def test_check_involution():
    rep = check_involution(make_dihedral_quandle(5))
    assert rep.identity == "6.5"
    assert rep.samples == 25 and rep.tolerance == 0.0
    assert rep.max_residual == 0.0 and rep.passed
    for make in (lambda: make_euclidean(2, 0.5),
                 lambda: make_heisenberg(0.5),
                 lambda: make_hyperbolic(0.5),
                 lambda: make_perturbed_plane(0.5, 0.1)):
        rep = check_involution(make())
        assert rep.samples == 200 and rep.tolerance == 1e-12
        assert rep.passed


def test_hyperbolic_underline_inversion_is_reflection():
    hyp = make_hyperbolic(0.5)
    pts = hyp.sample(7, 60, 1.5)
    u, v = pts[:30], pts[30:]
    base = underline_inv_k(hyp, 1, u, v)
    assert float(np.max(hyp.metric(base, reflect(u, v)))) <= 1e-8
    # The defining property of a uniform symmetric quasigroup: the same
    # value at every level.
    for k in (2, 3):
        assert float(np.max(hyp.metric(underline_inv_k(hyp, k, u, v),
                                       base))) <= 1e-8


def test_perturbed_inversion_closed_forms():
    # delta is odd, so s delta^-k(-s) telescopes: the level-k inversion is
    # exactly 2x - u + delta^k(u - x) and the underline inversion collapses
    # to the flat reflection 2u - v at every level.
    pert = make_perturbed_plane(0.5, 0.1)
    rng = np.random.default_rng(3)
    x = rng.uniform(-2, 2, size=(40, 2))
    u = rng.uniform(-2, 2, size=(40, 2))
    v = rng.uniform(-2, 2, size=(40, 2))
    ops = pert.group
    for k in (1, 2, 3):
        flat = 2 * x - u + ops.power(k, u - x)
        assert float(np.max(np.abs(inverse_k(pert, k, x, u) - flat))) <= 1e-13
        assert float(np.max(np.abs(underline_inv_k(pert, k, u, v)
                                   - (2 * u - v)))) <= 1e-9
    # The limit inversion is therefore the flat reflection as well.
    got, _ = emergent_inverse(pert, x[0], u[0], LimitConfig(tol=1e-8))
    assert float(np.max(np.abs(got - (2 * x[0] - u[0])))) <= 1e-7


def test_perturbed_loos_axioms():
    pert = make_perturbed_plane(0.5, 0.1)
    reports = check_loos_axioms(pert, LimitConfig(tol=1e-8), samples=30)
    assert [r.identity for r in reports] == [
        "L1", "L2", "L3", "L4", "L2-underline", "6.6", "6.8"]
    for r in reports:
        assert r.passed
    l4 = reports[3]
    assert "min ratio" in l4.note
    # Asking the inner limits for accuracy below the carrier's numerical
    # floor must surface as non-convergence, not as silent bad rows.
    with pytest.raises(NonConvergenceError, match="bottomed out"):
        check_loos_axioms(pert, LimitConfig(tol=2.5e-9), samples=30)


def test_hyperbolic_loos_axioms():
    hyp = make_hyperbolic(0.5)
    reports = check_loos_axioms(hyp, samples=30)
    names = [r.identity for r in reports]
    assert names == ["L1", "L2", "L3", "L4", "L2-underline", "6.6", "6.8",
                     "6.8-oracle", "6.8-iso"]
    for r in reports:
        assert r.passed, (r.identity, r.max_residual)


def test_loos_axioms_need_uniform_carrier():
    with pytest.raises(UnsupportedCarrierError):
        check_loos_axioms(make_dihedral_quandle(5))
