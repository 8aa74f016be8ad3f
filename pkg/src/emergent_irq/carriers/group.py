r"""Irq carriers built from a group with a distinguished endomorphism.

Given a group (G, mul, inv, e) and an injective map ``delta`` fixing e, the
operations

    x * u = x delta(x^-1 u)          x \ u = x delta^-1(x^-1 u)

form an irq.  When delta is contractive the carrier is uniform; when delta
is additionally a group morphism, all level-k operations have closed forms
(see :func:`group_difference_k` and friends) that the numerical limits must
reproduce, which makes these carriers the main oracle family.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from ..core import Irq
from ..errors import CarrierConstructionError, UnsupportedCarrierError

__all__ = [
    "GroupOps",
    "make_group_irq",
    "make_perturbed_plane",
    "group_star_k",
    "group_back_k",
    "group_difference_k",
    "group_sum_k",
    "group_inverse_k",
]


@dataclass(frozen=True)
class GroupOps:
    """Group structure with an optional endomorphism delta.

    ``delta_power(m, g)`` applies delta m times (m may be negative when the
    inverse exists); carriers with dilations supply an exact closed form.
    ``is_morphism`` declares delta(gh) = delta(g)delta(h).
    """

    mul: Callable[..., Any]
    inv: Callable[..., Any]
    neutral: Any
    delta: Callable[..., Any] | None = None
    delta_inv: Callable[..., Any] | None = None
    delta_power: Callable[..., Any] | None = None
    is_morphism: bool = False

    def power(self, m, g):
        if self.delta_power is not None:
            return self.delta_power(m, g)
        if m >= 0:
            fn, times = self.delta, m
        else:
            fn, times = self.delta_inv, -m
        if fn is None:
            raise UnsupportedCarrierError("carrier has no delta in that direction")
        out = g
        for _ in range(times):
            out = fn(out)
        return out


def _conjugate(group, x, u):
    return group.mul(group.inv(x), u)


def make_group_irq(group, delta, delta_inverse, *, name, dim, metric=None,
                   sample=None, contractive=False, epsilon=None,
                   is_morphism=False, delta_power=None, layer_dims=None,
                   divide=None, point_reflection=None,
                   reflection_isometry=False):
    r"""Build the irq ``x * u = x delta(x^-1 u)`` over a coordinate group.

    :param group: :class:`GroupOps` without delta (any delta fields ignored).
    :param delta: the endomorphism; must fix the neutral element.
    :param delta_inverse: its inverse map.
    :param metric: distance; defaults to Euclidean on coordinates.
    :param sample: seeded ball sampler; defaults to a Euclidean ball
        around the neutral element.
    :param contractive: declares the carrier uniform.
    :raises CarrierConstructionError: if delta moves the neutral element.
    """
    neutral = np.asarray(group.neutral, dtype=float)
    moved = float(np.max(np.abs(np.asarray(delta(neutral)) - neutral)))
    if not np.isfinite(moved) or moved > 1e-12:
        raise CarrierConstructionError(
            f"delta must fix the neutral element; moved it by {moved:.3e}")

    ops = GroupOps(group.mul, group.inv, neutral, delta=delta,
                   delta_inv=delta_inverse, delta_power=delta_power,
                   is_morphism=is_morphism)

    def star(x, u):
        return ops.mul(x, delta(_conjugate(ops, x, u)))

    def back(x, u):
        return ops.mul(x, delta_inverse(_conjugate(ops, x, u)))

    if metric is None:
        def metric(x, y):
            return np.linalg.norm(np.asarray(x) - np.asarray(y), axis=-1)

    if sample is None:
        def sample(seed, count, radius):
            rng = np.random.default_rng(seed)
            direction = rng.standard_normal((count, dim))
            direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
            r = radius * rng.random((count, 1)) ** (1.0 / dim)
            return neutral + direction * r

    # Iterating star cancels the basepoint inside each step, so for any
    # delta (morphism or not) x *_k u = x delta^k(x^-1 u), and the derived
    # operations rearrange to products of displacements:
    #
    #     difference_k(x,u,v) = x (s delta^-k(s^-1 t))
    #     sum_k(x,u,v)        = x delta^-k(s delta^k((x s)^-1 v))
    #     inverse_k(x,u)      = x (s delta^-k(s^-1))
    #
    # with s = delta^k(x^-1 u), t = delta^k(x^-1 v).  Composing the point
    # operations instead would round each intermediate at the basepoint's
    # magnitude and re-amplify the rounding by delta^-k; these forms keep
    # every small factor at its own scale.

    def level_difference(k, x, u, v):
        s = ops.power(k, _conjugate(ops, x, u))
        t = ops.power(k, _conjugate(ops, x, v))
        return ops.mul(x, ops.mul(s, ops.power(-k, ops.mul(ops.inv(s), t))))

    def level_sum(k, x, u, v):
        s = ops.power(k, _conjugate(ops, x, u))
        w = _conjugate(ops, ops.mul(x, s), v)
        return ops.mul(x, ops.power(-k, ops.mul(s, ops.power(k, w))))

    def level_inverse(k, x, u):
        s = ops.power(k, _conjugate(ops, x, u))
        return ops.mul(x, ops.mul(s, ops.power(-k, ops.inv(s))))

    return Irq(name=name, star=star, back=back, metric=metric, sample=sample,
               base=neutral, dim=dim, is_uniform=contractive, epsilon=epsilon,
               group=ops, layer_dims=layer_dims, divide=divide,
               point_reflection=point_reflection,
               reflection_isometry=reflection_isometry,
               level_difference=level_difference, level_sum=level_sum,
               level_inverse=level_inverse)


def _check_morphism_group(irq):
    ops = irq.group
    if ops is None or not ops.is_morphism:
        raise UnsupportedCarrierError(
            "closed forms need a group carrier with morphism delta")
    return ops


def group_star_k(irq, k, x, u):
    """Closed form x *_k u = x delta^k(x^-1 u) on morphism-delta carriers."""
    g = _check_morphism_group(irq)
    return g.mul(x, g.power(k, _conjugate(g, x, u)))


def group_back_k(irq, k, x, u):
    """Closed form x \\_k u = x delta^-k(x^-1 u) on morphism-delta carriers."""
    g = _check_morphism_group(irq)
    return g.mul(x, g.power(-k, _conjugate(g, x, u)))


def group_difference_k(irq, k, x, u, v):
    """Closed form difference_k(x, u, v) = x delta^k(x^-1 u) u^-1 v."""
    g = _check_morphism_group(irq)
    return g.mul(g.mul(x, g.power(k, _conjugate(g, x, u))),
                 _conjugate(g, u, v))


def group_sum_k(irq, k, x, u, v):
    """Closed form sum_k(x, u, v) = u delta^k(u^-1 x) x^-1 v."""
    g = _check_morphism_group(irq)
    return g.mul(g.mul(u, g.power(k, _conjugate(g, u, x))),
                 _conjugate(g, x, v))


def group_inverse_k(irq, k, x, u):
    """Closed form inverse_k(x, u) = x delta^k(x^-1 u) u^-1 x."""
    g = _check_morphism_group(irq)
    return g.mul(g.mul(x, g.power(k, _conjugate(g, x, u))),
                 _conjugate(g, u, x))


def make_perturbed_plane(epsilon=0.5, eta=0.1, name="perturbed"):
    r"""Uniform but non-distributive irq on R^2.

    Uses the abelian group (R^2, +) with the non-linear, non-morphism
    contraction

        delta(x1, x2) = (eps x1 + eta sin x2, eps x2 + eta sin x1)

    which fixes 0 and is invertible by Picard iteration (the inversion map
    is a contraction with factor eta/eps).  Limits of iterated operations
    exist, but the level-k operations are not distributive, so group
    reconstruction must reject this carrier.

    Requires 0 < eta < eps and eps + eta < 1.
    """
    epsilon = float(epsilon)
    eta = float(eta)
    if not 0.0 < epsilon < 1.0:
        raise CarrierConstructionError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < eta < epsilon or epsilon + eta >= 1.0:
        raise CarrierConstructionError(
            f"need 0 < eta < epsilon and epsilon + eta < 1, got {epsilon}, {eta}")

    def swap(p):
        return np.stack([np.sin(p[..., 1]), np.sin(p[..., 0])], axis=-1)

    def delta(p):
        p = np.asarray(p, dtype=float)
        return epsilon * p + eta * swap(p)

    def delta_inverse(q):
        # The stop must be relative to the input scale: iterated delta^-k
        # chains feed tiny intermediate values through here, and an absolute
        # floor would inject errors that later inverse steps amplify.
        q = np.asarray(q, dtype=float)
        scale = float(np.max(np.abs(q)))
        if scale == 0.0:
            return q
        x = q / epsilon
        for _ in range(200):
            nxt = (q - eta * swap(x)) / epsilon
            if np.max(np.abs(nxt - x)) <= 1e-15 * scale:
                return nxt
            x = nxt
        return x

    group = GroupOps(mul=lambda a, b: np.asarray(a, dtype=float) + b,
                     inv=lambda a: -np.asarray(a, dtype=float),
                     neutral=np.zeros(2))
    return make_group_irq(group, delta, delta_inverse, name=name, dim=2,
                          contractive=True, epsilon=epsilon + eta,
                          is_morphism=False, layer_dims=(2,))
