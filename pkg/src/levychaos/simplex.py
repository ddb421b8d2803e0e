"""Integration over the ordered simplex ``0 <= t_1 < ... < t_k < t``.

The exact path applies iterated polynomial antiderivatives, innermost
variable first, and returns a polynomial in the outer time.  The numeric
path nests adaptive Gauss-Legendre quadrature level by level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import CapacityError, UnsupportedIntegrandError
from .functions import IdentifiedIntegrand
from .quadrature import adaptive_gauss_legendre

DEGREE_CAP = 60
DIMENSION_CAP = 6


@dataclass(frozen=True)
class SimplexEstimate:
    """Numeric simplex integral with an error estimate."""

    value: float
    error: float
    dimension: int


def integrate_exact(identified: IdentifiedIntegrand, degree_cap: int = DEGREE_CAP) -> Polynomial:
    """Exact simplex integral of an all-polynomial identified integrand,
    as a polynomial in the upper limit."""
    total = Polynomial([0.0])
    for coeff, funcs in identified.terms:
        running = Polynomial([1.0])
        for g in funcs:
            p = g.as_polynomial()
            if p is None:
                raise UnsupportedIntegrandError(
                    "exact simplex integration needs polynomial factors"
                )
            running = (running * p).integ(lbnd=0.0)
            if running.degree() > degree_cap:
                raise CapacityError(
                    f"simplex integrand degree {running.degree()} exceeds cap {degree_cap}"
                )
        total = total + coeff * running
    return total


def integrate_numeric(
    identified: IdentifiedIntegrand,
    t: float,
    rel_tol: float = 1e-9,
    dimension_cap: int = DIMENSION_CAP,
) -> SimplexEstimate:
    """Nested adaptive quadrature of the identified integrand up to ``t``."""
    k = identified.dimension
    if k > dimension_cap:
        raise CapacityError(f"simplex dimension {k} exceeds cap {dimension_cap}")
    total = 0.0
    err = 0.0
    for coeff, funcs in identified.terms:

        def level(r: int, upper: float, tol: float) -> tuple[float, float]:
            g = funcs[r - 1]

            def integrand(s):
                s = np.atleast_1d(np.asarray(s, dtype=float))
                vals = np.asarray(g(s), dtype=float)
                if r > 1:
                    # inner levels run tighter so the outer error dominates
                    vals = vals * np.array(
                        [level(r - 1, float(si), tol * 0.25)[0] for si in s]
                    )
                return vals

            return adaptive_gauss_legendre(
                integrand, 0.0, upper, rel_tol=tol, knots=g.knots
            )

        value, e = level(k, float(t), rel_tol)
        total += coeff * value
        err += abs(coeff) * e
    return SimplexEstimate(total, err, k)
