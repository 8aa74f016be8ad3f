r"""Idempotent right quasigroups (irqs) and their iterated operations.

An irq is a set X with two binary operations, ``star`` (written ``*``) and
``back`` (written ``\``), satisfying

    x * (x \ y) = x \ (x * y) = y        (P1)
    x * x = x \ x = x                    (P2)

so for each x the map ``star(x, .)`` is a bijection with inverse
``back(x, .)`` and x is a fixed point of both.

A carrier (:class:`Irq`) bundles the two operations with a metric, used to
measure identity residuals and convergence, and a seeded sampler drawing
points from a compact ball.  All operations broadcast over leading axes, so
one point and a batch of points take the same code path.

Iterating the operations gives, for a nonzero integer level k,

    x *_k u = star(x, .) applied |k| times to u     (k > 0)
    x *_k u = back(x, .) applied |k| times to u     (k < 0)

and ``back_k`` is the same with the roles of star and back exchanged, so
``star_k(x, .)`` and ``back_k(x, .)`` are mutually inverse at every level.
From these, three derived operations at level k:

    difference_k(x, u, v) = back_k(star_k(x, u), star_k(x, v))
    sum_k(x, u, v)        = back_k(x, star_k(star_k(x, u), v))
    inverse_k(x, u)       = back_k(star_k(x, u), x)

The level-k identities checked by :func:`check_irq_axioms` (labels P1, P2,
3.4a-g, 3.5h-k match the names used in experiment reports) are algebraic
consequences of P1 and P2, so they hold on every carrier up to numerical
error; their residuals are a direct measure of implementation fidelity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import InvalidExponentError

__all__ = [
    "MAX_ITER_EXPONENT",
    "DEFAULT_LEVELS",
    "Irq",
    "AxiomReport",
    "star_k",
    "back_k",
    "difference_k",
    "sum_k",
    "inverse_k",
    "check_irq_axioms",
    "identity_names",
]

# Iteration levels are plain nonzero ints; the cap keeps runaway loops out.
MAX_ITER_EXPONENT = 10**6

# Level grid used by the identity checks (zero excluded by definition).
DEFAULT_LEVELS = (-2, -1, 1, 2, 3)


@dataclass(frozen=True)
class Irq:
    """An idempotent right quasigroup carrier.

    :param name: short identifier used in reports.
    :param star: ``(x, u) -> x * u``, broadcasting over leading axes.
    :param back: ``(x, u) -> x \\ u``, inverse of ``star`` in u.
    :param metric: ``(x, y) -> float array``, distance on the carrier.
    :param sample: ``(seed, count, radius) -> points`` in the metric ball of
        the given radius around ``base``; deterministic in the seed.
    :param base: distinguished point (group neutral, ball center).
    :param dim: coordinate dimension, or None for labeled finite carriers.
    :param size: cardinality for finite carriers, else None.
    :param is_uniform: whether the iterated operations admit limits
        (contractive star), enabling the emergent operations.
    :param is_exact: whether the operations are exact (integer) arithmetic;
        identity checks then demand zero residual and may enumerate.
    :param epsilon: contraction ratio of ``star(x, .)`` when there is one.
    :param group: optional group structure behind the operations
        (a ``carriers.group.GroupOps``), used by oracles and division.
    :param layer_dims: graded-coordinate layout for carriers with dilations
        (Euclidean: one layer; Carnot: one entry per layer).
    :param divide: optional closed-form right division ``(k, b, a) -> y``
        with ``star_k(y, a) = b``.
    :param point_reflection: optional closed-form reflection oracle
        ``(x, y) -> y reflected through x``, an independent check of the
        limit-based symmetric-space inversion.
    :param reflection_isometry: whether that reflection preserves the
        carrier metric exactly (geodesic symmetry), enabling the isometry
        check in the symmetric-space reports.
    :param level_difference: optional stable evaluator ``(k, x, u, v)`` for
        ``difference_k``.  The composed definition forms intermediate points
        whose displacement from the basepoint shrinks like eps^k and is then
        re-amplified by back_k, so float rounding grows like eps^-k; a
        carrier that can rearrange the same expression to keep small
        quantities separate (group carriers, geodesic carriers) supplies the
        rearrangement here.  Must equal the composed definition exactly in
        real arithmetic.
    :param level_sum: optional stable evaluator ``(k, x, u, v)`` for
        ``sum_k``, same contract.
    :param level_inverse: optional stable evaluator ``(k, x, u)`` for
        ``inverse_k``, same contract.
    """

    name: str
    star: Callable[..., Any]
    back: Callable[..., Any]
    metric: Callable[..., Any]
    sample: Callable[..., Any]
    base: Any
    dim: int | None = None
    size: int | None = None
    is_uniform: bool = False
    is_exact: bool = False
    epsilon: float | None = None
    group: Any = None
    layer_dims: tuple[int, ...] | None = None
    divide: Callable[..., Any] | None = None
    point_reflection: Callable[..., Any] | None = None
    reflection_isometry: bool = False
    level_difference: Callable[..., Any] | None = None
    level_sum: Callable[..., Any] | None = None
    level_inverse: Callable[..., Any] | None = None


def _require_level(k):
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise InvalidExponentError(f"iteration level must be an int, got {k!r}")
    if k == 0:
        raise InvalidExponentError("iteration level 0 is not defined")
    if abs(int(k)) > MAX_ITER_EXPONENT:
        raise InvalidExponentError(
            f"|k| = {abs(int(k))} exceeds the supported cap {MAX_ITER_EXPONENT}")
    return int(k)


def _iterate(op, x, u, times):
    out = u
    for _ in range(times):
        out = op(x, out)
    return out


def star_k(irq, k, x, u):
    """Level-k star: |k|-fold star for k > 0, |k|-fold back for k < 0."""
    k = _require_level(k)
    op = irq.star if k > 0 else irq.back
    return _iterate(op, x, u, abs(k))


def back_k(irq, k, x, u):
    """Level-k back, the inverse of ``star_k(x, .)``."""
    k = _require_level(k)
    op = irq.back if k > 0 else irq.star
    return _iterate(op, x, u, abs(k))


def difference_k(irq, k, x, u, v):
    """Level-k difference of v and u based at x: back_k(x *_k u, x *_k v)."""
    k = _require_level(k)
    if irq.level_difference is not None:
        return irq.level_difference(k, x, u, v)
    return back_k(irq, k, star_k(irq, k, x, u), star_k(irq, k, x, v))


def sum_k(irq, k, x, u, v):
    """Level-k sum of u and v based at x: back_k(x, (x *_k u) *_k v)."""
    k = _require_level(k)
    if irq.level_sum is not None:
        return irq.level_sum(k, x, u, v)
    return back_k(irq, k, x, star_k(irq, k, star_k(irq, k, x, u), v))


def inverse_k(irq, k, x, u):
    """Level-k inverse of u based at x: back_k(x *_k u, x)."""
    k = _require_level(k)
    if irq.level_inverse is not None:
        return irq.level_inverse(k, x, u)
    return back_k(irq, k, star_k(irq, k, x, u), x)


@dataclass(frozen=True)
class AxiomReport:
    """Result of checking one identity over a sample set.

    ``passed`` is ``max_residual <= tolerance``; ``note`` carries optional
    measured context (for example an observed expansion constant).
    """

    identity: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool = field(default=False)
    note: str = ""

    @staticmethod
    def from_residual(identity, samples, max_residual, tolerance, note=""):
        max_residual = float(max_residual)
        return AxiomReport(identity, int(samples), max_residual,
                           float(tolerance), max_residual <= tolerance, note)


class _Level:
    """Operations of one irq bound to one iteration level."""

    __slots__ = ("irq", "k")

    def __init__(self, irq, k):
        self.irq = irq
        self.k = k

    def star(self, x, u):
        return star_k(self.irq, self.k, x, u)

    def back(self, x, u):
        return back_k(self.irq, self.k, x, u)

    def dif(self, x, u, v):
        return difference_k(self.irq, self.k, x, u, v)

    def sum(self, x, u, v):
        return sum_k(self.irq, self.k, x, u, v)

    def inv(self, x, u):
        return inverse_k(self.irq, self.k, x, u)


# Each identity maps bound level operations and a point tuple to a list of
# (lhs, rhs) pairs that should coincide.  Arity is the tuple length.
_IDENTITIES = (
    ("P1", 2, lambda o, x, u: [(o.star(x, o.back(x, u)), u),
                               (o.back(x, o.star(x, u)), u)]),
    ("P2", 1, lambda o, x: [(o.star(x, x), x), (o.back(x, x), x)]),
    ("3.4a", 3, lambda o, x, u, v: [(o.dif(x, u, o.sum(x, u, v)), v)]),
    ("3.4b", 3, lambda o, x, u, v: [(o.sum(x, u, o.dif(x, u, v)), v)]),
    ("3.4c", 3, lambda o, x, u, v: [
        (o.dif(x, u, v), o.sum(o.star(x, u), o.inv(x, u), v))]),
    ("3.4d", 2, lambda o, x, u: [(o.inv(o.star(x, u), o.inv(x, u)), u)]),
    ("3.4e", 4, lambda o, x, u, v, w: [
        (o.sum(x, u, o.sum(o.star(x, u), v, w)), o.sum(x, o.sum(x, u, v), w))]),
    ("3.4f", 2, lambda o, x, u: [(o.inv(x, u), o.dif(x, u, x))]),
    ("3.4g", 2, lambda o, x, u: [(o.sum(x, x, u), u)]),
    ("3.5h", 2, lambda o, x, u: [(o.dif(x, u, u), o.star(x, u))]),
    ("3.5i", 2, lambda o, x, u: [(o.dif(x, x, u), u)]),
    ("3.5j", 4, lambda o, x, u, v, w: [
        (o.dif(o.dif(x, u, u), o.dif(x, u, v), o.dif(x, u, w)),
         o.dif(x, v, w))]),
)


def identity_names():
    """Names of all checked identities, in report order."""
    return [name for name, _, _ in _IDENTITIES] + ["3.5k"]


def _max_residual(irq, pairs):
    worst = 0.0
    for lhs, rhs in pairs:
        worst = max(worst, float(np.max(irq.metric(lhs, rhs))))
    return worst


def _sample_tuples(irq, seed, count, radius, arity):
    pts = irq.sample(seed, arity * count, radius)
    return [pts[i * count:(i + 1) * count] for i in range(arity)]


def _exhaustive_tuples(irq, arity):
    labels = np.arange(irq.size)
    grids = np.meshgrid(*([labels] * arity), indexing="ij")
    return [g.reshape(-1) for g in grids]


def check_irq_axioms(irq, seed=0, count=250, radius=2.0, tol=1e-9,
                     levels=DEFAULT_LEVELS):
    """Check every level-k irq identity on sampled (or enumerated) tuples.

    Levels run over ``levels`` for the single-level identities and over all
    ordered pairs from ``levels`` for the two-level identity 3.5k.  Exact
    carriers are held to zero residual and are enumerated exhaustively when
    the tuple space is small; float carriers use ``count`` seeded tuples per
    identity.

    :returns: one :class:`AxiomReport` per identity, in declaration order.
    """
    for k in levels:
        _require_level(k)
    eff_tol = 0.0 if irq.is_exact else float(tol)

    def tuples(arity):
        if irq.is_exact and irq.size is not None and irq.size ** arity <= 20000:
            return _exhaustive_tuples(irq, arity)
        return _sample_tuples(irq, seed, count, radius, arity)

    reports = []
    for name, arity, fn in _IDENTITIES:
        pts = tuples(arity)
        n = int(np.shape(pts[0])[0])
        worst = 0.0
        for k in levels:
            worst = max(worst, _max_residual(irq, fn(_Level(irq, k), *pts)))
        reports.append(AxiomReport.from_residual(name, n, worst, eff_tol))

    # 3.5k, the two-level grid identity.  Iterated operations at a common
    # basepoint compose additively, star_p(x, star_q(x, u)) = star_{p+q}(x, u),
    # so the compound level is p + q; pairs with p + q = 0 would need the
    # trivial level-0 operation and are skipped.
    pts = tuples(3)
    x, u, v = pts[0], pts[1], pts[2]
    n = int(np.shape(x)[0])
    worst = 0.0
    for p, q in itertools.product(levels, levels):
        if p + q == 0:
            continue
        xu = star_k(irq, q, x, u)
        xv = star_k(irq, q, x, v)
        lhs = difference_k(irq, p, x, xu, xv)
        rhs = star_k(irq, q, star_k(irq, p + q, x, u),
                     difference_k(irq, p + q, x, u, v))
        worst = max(worst, float(np.max(irq.metric(lhs, rhs))))
    reports.append(AxiomReport.from_residual("3.5k", n, worst, eff_tol))
    return reports
