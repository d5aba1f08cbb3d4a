"""Triangular change of variables on the nested simplex.

The map sends a point ``x`` with ``0 < x_1 + ... + x_j < 1`` for every j to
ratios ``y_j = x_j / (1 - x_1 - ... - x_{j-1})`` in the open unit cube.  It
is the coordinate change under which the Dirichlet-type densities of
:mod:`ekstat.densities` factor into independent beta laws; the derived beta
parameter pairs for each catalogued identity live here as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, ParameterError, UsageError

VARIANTS = ("thm1_2", "thm1_3", "thm2_4", "thm2_5")


def _as_points(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] < 1:
        raise DomainError(f"{name} must have at least one coordinate")
    return arr


def forward(x) -> np.ndarray:
    """Map nested-simplex points to ratio coordinates in (0,1)^k.

    Accepts a single point of shape (k,) or a batch (..., k); the last axis
    is the coordinate axis.
    """
    x = _as_points(x, "x")
    if np.any(x <= 0.0) or np.any(np.cumsum(x, axis=-1) >= 1.0):
        raise DomainError("partial sums of x must lie strictly inside (0,1)")
    # running-product denominator d_{j+1} = d_j * (d_j - x_j)/d_j: the
    # product keeps d relatively accurate near the simplex boundary, and the
    # direct subtraction avoids amplifying rounding when y_j is close to 1
    y = np.empty_like(x)
    denom = np.ones_like(x[..., 0])
    for j in range(x.shape[-1]):
        y[..., j] = x[..., j] / denom
        denom = denom * ((denom - x[..., j]) / denom)
    return y


def inverse(y) -> np.ndarray:
    """Map ratio coordinates in (0,1)^k back to the nested simplex."""
    y = _as_points(y, "y")
    if np.any(y <= 0.0) or np.any(y >= 1.0):
        raise DomainError("all ratio coordinates must lie strictly inside (0,1)")
    lead = np.cumprod(1.0 - y[..., :-1], axis=-1)
    prefix = np.concatenate([np.ones_like(y[..., :1]), lead], axis=-1)
    return y * prefix


def jacobian(y) -> np.ndarray:
    """Volume factor of :func:`inverse`: prod_j (1 - y_j)^(k-j), j < k."""
    y = _as_points(y, "y")
    if np.any(y <= 0.0) or np.any(y >= 1.0):
        raise DomainError("all ratio coordinates must lie strictly inside (0,1)")
    k = y.shape[-1]
    if k == 1:
        return np.ones(y.shape[:-1]) if y.ndim > 1 else 1.0
    powers = np.arange(k - 1, 0, -1, dtype=float)
    out = np.prod((1.0 - y[..., :-1]) ** powers, axis=-1)
    return out if y.ndim > 1 else float(out)


@dataclass(frozen=True)
class DerivedBetaParams:
    """Beta parameter pairs that decouple the ratio coordinates.

    ``pairs`` holds the derivation-consistent (first, second) parameters of
    the independent beta laws of y_1..y_k.  For catalogue entries whose
    printed parameter sums disagree with the derivation, ``alt_pairs``
    records the as-printed alternative for adjudication; it is None when no
    alternative exists and equals ``pairs`` when the two readings coincide.
    """

    variant: str
    pairs: tuple[tuple[float, float], ...]
    alt_pairs: tuple[tuple[float, float], ...] | None = None
    alt_note: str = ""

    @property
    def alternative_differs(self) -> bool:
        return self.alt_pairs is not None and self.alt_pairs != self.pairs


def _tail_sums(values: Sequence[float]) -> np.ndarray:
    """tail_sums(v)[j] = v_{j+1} + ... + v_{k-1} (0-based, excludes index j)."""
    v = np.asarray(values, dtype=float)
    return np.concatenate([np.cumsum(v[::-1])[::-1][1:], [0.0]])


def derived_beta_params(
    variant: str,
    alphas: Sequence[float],
    alpha_last: float | None = None,
    betas: Sequence[float] | None = None,
) -> DerivedBetaParams:
    """Beta pairs rendering the ratio coordinates independent.

    Parameters
    ----------
    variant : str
        One of ``thm1_2``/``thm2_4`` (simplex-weight families, need
        ``alpha_last``) or ``thm1_3``/``thm2_5`` (partial-sum-weight
        families, need ``betas``).
    alphas : sequence of float
        Per-coordinate power exponents.
    alpha_last : float
        Exponent parameter of the final simplex factor.
    betas : sequence of float
        Per-partial-sum exponents.
    """
    if variant not in VARIANTS:
        raise UsageError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    a = np.asarray(alphas, dtype=float)
    k = a.size
    if k < 1:
        raise ParameterError("at least one alpha is required")
    tails_a = _tail_sums(a)
    offsets = np.arange(k - 1, -1, -1, dtype=float)  # (k-j) with j 1-based

    if variant in ("thm1_2", "thm2_4"):
        if alpha_last is None:
            raise UsageError(f"{variant} requires alpha_last")
        if variant == "thm1_2":
            firsts = a + 1.0
            seconds = tails_a + offsets + alpha_last
            alt, note = None, ""
        else:
            firsts = a
            seconds = tails_a + alpha_last
            alt = tuple(zip(firsts.tolist(), tails_a.tolist()))
            note = (
                "printed second parameters omit the final simplex exponent; "
                "the last pair degenerates to zero there"
            )
    else:
        if betas is None:
            raise UsageError(f"{variant} requires betas")
        b = np.asarray(betas, dtype=float)
        if b.size != k:
            raise ParameterError("betas must have the same length as alphas")
        tails_b = np.cumsum(b[::-1])[::-1]  # inclusive: b_j + ... + b_k
        if variant == "thm1_3":
            firsts = a + 1.0
            seconds = tails_a + tails_b + offsets
            # printed display equation truncates the alpha sum one term early
            trunc = tails_a - np.where(np.arange(k) < k - 1, a[-1], 0.0)
            alt = tuple(zip(firsts.tolist(), (trunc + tails_b + offsets).tolist()))
            note = "printed running sum stops one alpha term early"
        else:
            firsts = a
            seconds = tails_a + tails_b
            alt = tuple(zip(firsts.tolist(), seconds.tolist()))
            note = "printed and derivation-consistent parameter sums coincide"

    if np.any(firsts <= 0.0) or np.any(seconds <= 0.0):
        raise ParameterError(
            f"derived beta parameters must be positive, got firsts={firsts}, "
            f"seconds={seconds}"
        )
    return DerivedBetaParams(
        variant=variant,
        pairs=tuple(zip(firsts.tolist(), seconds.tolist())),
        alt_pairs=alt,
        alt_note=note,
    )
