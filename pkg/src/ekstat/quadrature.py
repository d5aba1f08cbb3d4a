"""Jacobi-weighted Gaussian quadrature on (0,1) and tensor-product integration.

The operator kernels in this library carry endpoint factors
``(1-t)^edge1 * t^edge0`` with exponents that may approach -1 (weak
singularities) or grow very large (pathway limits).  Rules are therefore
built from the Jacobi three-term recurrence by Golub-Welsch
eigendecomposition, with the weight mass kept in log space: ``weights_unit``
always sums to 1 and ``exp(log_mass)`` restores the true scale.

The module also provides double-exponential node layouts for semi-infinite
integrals (used by the Mellin transform), parameterized by the tail type of
the integrand.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln

from .errors import EvaluationError, ParameterError, ShapeError

DEFAULT_NODES = 64

# Double-exponential windows, sized so float64 covers both tails.
_EXP_SINH_LO = -4.45
_EXP_SINH_HI = 6.8
_SINH_HALF_WIDTH = 3.4


@dataclass(frozen=True)
class QuadratureRule:
    """Gaussian rule for ``integral_0^1 (1-t)^edge1 t^edge0 h(t) dt``.

    Attributes
    ----------
    nodes : ndarray
        Strictly increasing points inside (0,1).
    weights_unit : ndarray
        Positive weights normalized to sum to 1.
    log_mass : float
        Log of the weight-function mass ``B(edge0+1, edge1+1)``.
    exponents : tuple of float
        ``(edge1, edge0)`` of the weight function.
    """

    nodes: np.ndarray
    weights_unit: np.ndarray
    log_mass: float
    exponents: tuple[float, float]

    @property
    def weights(self) -> np.ndarray:
        """True quadrature weights (may underflow for extreme exponents)."""
        return self.weights_unit * math.exp(self.log_mass) if self.log_mass > -700 \
            else self.weights_unit * 0.0

    def __len__(self) -> int:
        return self.nodes.size


@lru_cache(maxsize=512)
def _jacobi_rule_cached(n: int, edge1: float, edge0: float) -> QuadratureRule:
    a, b = edge1, edge0
    k = np.arange(n, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        diag = np.where(
            k == 0,
            (b - a) / (a + b + 2.0),
            (b * b - a * a) / ((2.0 * k + a + b) * (2.0 * k + a + b + 2.0)),
        )
    kk = np.arange(1, n, dtype=float)
    off = (
        4.0 * kk * (kk + a) * (kk + b) * (kk + a + b)
        / ((2.0 * kk + a + b) ** 2 * (2.0 * kk + a + b + 1.0) * (2.0 * kk + a + b - 1.0))
    )
    if n > 1:
        # k=1 coefficient in cancellation-safe form; the generic expression is
        # 0/0 when a+b = -1.
        off[0] = 4.0 * (1.0 + a) * (1.0 + b) / ((a + b + 2.0) ** 2 * (a + b + 3.0))
    x, vec = eigh_tridiagonal(diag, np.sqrt(off))
    nodes = 0.5 * (x + 1.0)
    w = vec[0, :] ** 2
    w = w / w.sum()
    nodes.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(nodes, w, float(betaln(b + 1.0, a + 1.0)), (a, b))


def jacobi_rule(n: int, edge1: float, edge0: float) -> QuadratureRule:
    """n-point Gauss rule for the weight ``(1-t)^edge1 t^edge0`` on (0,1).

    Parameters
    ----------
    n : int
        Number of nodes; the rule integrates polynomials of degree
        ``<= 2n - 1`` exactly against the weight.
    edge1, edge0 : float
        Weight exponents at t=1 and t=0; both must exceed -1.
    """
    if n < 1:
        raise ParameterError("rule size must be at least 1")
    if edge1 <= -1.0 or edge0 <= -1.0:
        raise ParameterError(
            f"weight exponents must exceed -1, got edge1={edge1}, edge0={edge0}"
        )
    return _jacobi_rule_cached(int(n), float(edge1), float(edge0))


def integrate_unit(rule: QuadratureRule, h: Callable[[np.ndarray], np.ndarray]) -> float:
    """Apply ``rule`` to a function of the node array.

    ``h`` is evaluated once on all nodes; a non-finite value aborts with an
    :class:`EvaluationError` naming the first offending node.
    """
    vals = np.asarray(h(rule.nodes), dtype=float)
    if vals.shape != rule.nodes.shape:
        raise ShapeError("integrand must return one value per node")
    bad = ~np.isfinite(vals)
    if bad.any():
        node = float(rule.nodes[np.argmax(bad)])
        raise EvaluationError(f"integrand is not finite at node t={node!r}", point=node)
    return float(np.dot(rule.weights, vals))


@dataclass(frozen=True)
class TensorRule:
    """Tensor product of per-dimension quadrature rules."""

    rules: tuple[QuadratureRule, ...]

    def __post_init__(self):
        if len(self.rules) < 1:
            raise ShapeError("a tensor rule needs at least one dimension")

    @property
    def dim(self) -> int:
        return len(self.rules)

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Full tensor grid as points (N, k) and combined true weights (N,)."""
        axes = [r.nodes for r in self.rules]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        w = self.rules[0].weights
        for r in self.rules[1:]:
            w = np.multiply.outer(w, r.weights)
        return pts, w.ravel()


def tensor_integrate(
    rules: TensorRule | Sequence[QuadratureRule],
    h: Callable[[np.ndarray], np.ndarray],
    workers: int = 1,
    chunk: int = 1 << 14,
) -> float:
    """Tensor-product quadrature of ``h`` over the unit cube weights.

    ``h`` receives points of shape (m, k) and must return (m,) values.  The
    grid is traversed in a fixed C order and chunk sums are combined with
    ``math.fsum``, so the result is reproducible to well under 1e-13 relative
    regardless of ``workers``.
    """
    if not isinstance(rules, TensorRule):
        rules = TensorRule(tuple(rules))
    pts, w = rules.grid()
    n = pts.shape[0]
    spans = [(i, min(i + chunk, n)) for i in range(0, n, chunk)]

    def piece(span):
        i, j = span
        vals = np.asarray(h(pts[i:j]), dtype=float)
        if vals.shape != (j - i,):
            raise ShapeError("integrand must return one value per point")
        if not np.isfinite(vals).all():
            k = int(np.argmax(~np.isfinite(vals)))
            raise EvaluationError(
                f"integrand is not finite at {pts[i + k]!r}", point=pts[i + k]
            )
        return float(np.dot(w[i:j], vals))

    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            partials = list(pool.map(piece, spans))
    else:
        partials = [piece(s) for s in spans]
    return math.fsum(partials)


def semiaxis_log_rule(
    n: int,
    tail: str = "exp",
    log_scale: float = 0.0,
    half_width: float = _SINH_HALF_WIDTH,
) -> tuple[np.ndarray, np.ndarray]:
    """Double-exponential nodes for ``integral_0^inf g(x) dx`` in log form.

    Returns arrays ``(log_x, log_w)`` such that the integral is approximated
    by ``sum(exp(log_x + log_w) * g(exp(log_x)))``; callers typically fold
    ``log_x + log_w`` into a fused log-space integrand instead.

    ``tail`` selects the variable change: ``"exp"`` (x = s*e^(w - e^-w))
    suits integrands with exponential decay at infinity, ``"algebraic"``
    (x = s*e^(pi sinh w)) suits two-sided power-law behavior.  ``log_scale``
    shifts the node layout to match an integrand living at scale
    ``s = exp(log_scale)``.
    """
    if n < 2:
        raise ParameterError("semi-axis rules need at least 2 nodes")
    if tail == "exp":
        w = np.linspace(_EXP_SINH_LO, _EXP_SINH_HI, n)
        h = w[1] - w[0]
        log_x = log_scale + w - np.exp(-w)
        log_w = np.log1p(np.exp(-w)) + math.log(h)
    elif tail == "algebraic":
        w = np.linspace(-half_width, half_width, n)
        h = w[1] - w[0]
        log_x = log_scale + np.pi * np.sinh(w)
        log_w = np.log(np.pi * np.cosh(w) * h)
    else:
        raise ParameterError(f"unknown tail type {tail!r}")
    return log_x, log_w
