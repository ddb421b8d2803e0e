"""Adaptive composite Gauss-Legendre quadrature on an interval.

Used for jump-measure integrals against a density and for the numeric
path of the ordered-simplex integrator.  The rule bisects any segment
whose two-panel refinement disagrees with the single-panel value and
trusts the refined value once the disagreement is below tolerance.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import IntegrationError

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)


def _panel(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> float:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _NODES
    return half * float(np.dot(_WEIGHTS, np.asarray(f(x), dtype=float)))


def adaptive_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-9,
    abs_tol: float = 1e-12,
    max_depth: int = 40,
    knots: Sequence[float] = (),
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]``; returns ``(value, error_estimate)``.

    ``f`` must accept a 1-d numpy array of evaluation points.  ``knots``
    are interior points where the integrand may be non-smooth (e.g.
    breakpoints of a step function); segments are pre-split there.
    """
    if b == a:
        return 0.0, 0.0
    if b < a:
        value, err = adaptive_gauss_legendre(f, b, a, rel_tol, abs_tol, max_depth, knots)
        return -value, err

    cuts = sorted({float(k) for k in knots if a < k < b})
    edges = [a, *cuts, b]
    total = 0.0
    err_total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, err = _adaptive_segment(f, lo, hi, rel_tol, abs_tol, max_depth)
        total += value
        err_total += err
    return total, err_total


def _adaptive_segment(f, a, b, rel_tol, abs_tol, max_depth) -> tuple[float, float]:
    coarse = _panel(f, a, b)
    stack = [(a, b, coarse, 0)]
    total = 0.0
    err_total = 0.0
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid)
        right = _panel(f, mid, hi)
        refined = left + right
        disagreement = abs(refined - whole)
        if disagreement <= abs_tol + rel_tol * abs(refined) or hi - lo < 1e-14 * (abs(a) + abs(b) + 1.0):
            total += refined
            err_total += disagreement
        elif depth >= max_depth:
            raise IntegrationError(
                f"quadrature failed to converge on [{lo!r}, {hi!r}] "
                f"(residual {disagreement:.3e})"
            )
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total, err_total


def merge_knots(*knot_groups: Iterable[float]) -> tuple[float, ...]:
    """Union of knot collections, sorted."""
    out: set[float] = set()
    for group in knot_groups:
        out.update(float(k) for k in group)
    return tuple(sorted(out))
