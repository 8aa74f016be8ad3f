"""Heisenberg group carrier with its intrinsic dilations, hand-coded law.

Coordinates (a, b, c) multiply by

    (a, b, c)(a', b', c') = (a + a', b + b', c + c' + (a b' - a' b) / 2)

and the dilation delta_eps(a, b, c) = (eps a, eps b, eps^2 c) is a group
morphism.  This module writes the law out directly; the structure-constant
route in :mod:`emergent_irq.carriers.carnot` builds the same group from its
Lie algebra, and the two must agree.
"""

from __future__ import annotations

import numpy as np

from ..errors import CarrierConstructionError
from .group import GroupOps, make_group_irq

__all__ = ["make_heisenberg", "heisenberg_mul", "heisenberg_inv"]


def heisenberg_mul(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a, b = p[..., 0], p[..., 1]
    ap, bp = q[..., 0], q[..., 1]
    c = p[..., 2] + q[..., 2] + 0.5 * (a * bp - ap * b)
    return np.stack([a + ap, b + bp, c], axis=-1)


def heisenberg_inv(p):
    return -np.asarray(p, dtype=float)


def _dilate(eps_pow1, eps_pow2, p):
    p = np.asarray(p, dtype=float)
    return np.stack([eps_pow1 * p[..., 0], eps_pow1 * p[..., 1],
                     eps_pow2 * p[..., 2]], axis=-1)


def make_heisenberg(epsilon, name="heisenberg"):
    """Heisenberg irq: star(x, u) = x delta_eps(x^-1 u), 0 < epsilon < 1.

    The metric is the layer-max norm of the group difference,
    d(x, y) = max(||first layer of x^-1 y||_2, |center of x^-1 y|); the
    sampler rejection-samples that metric's ball around the origin.
    """
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise CarrierConstructionError(f"epsilon must lie in (0, 1), got {epsilon}")

    def delta(g):
        return _dilate(epsilon, epsilon ** 2, g)

    def delta_inverse(g):
        return _dilate(1.0 / epsilon, epsilon ** -2, g)

    def delta_power(m, g):
        return _dilate(epsilon ** m, epsilon ** (2 * m), g)

    def layer_max(g):
        return np.maximum(np.hypot(g[..., 0], g[..., 1]), np.abs(g[..., 2]))

    def metric(x, y):
        return layer_max(heisenberg_mul(heisenberg_inv(x), y))

    def sample(seed, count, radius):
        rng = np.random.default_rng(seed)
        out = np.empty((0, 3))
        while out.shape[0] < count:
            cand = rng.uniform(-radius, radius, size=(2 * count + 8, 3))
            out = np.concatenate([out, cand[layer_max(cand) <= radius]])
        return out[:count]

    def point_reflection(x, y):
        return heisenberg_mul(heisenberg_mul(x, heisenberg_inv(y)), x)

    group = GroupOps(mul=heisenberg_mul, inv=heisenberg_inv,
                     neutral=np.zeros(3))
    return make_group_irq(group, delta, delta_inverse, name=name, dim=3,
                          metric=metric, sample=sample, contractive=True,
                          epsilon=epsilon, is_morphism=True,
                          delta_power=delta_power, layer_dims=(2, 1),
                          point_reflection=point_reflection)
