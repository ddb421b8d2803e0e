"""Driving-process description: characteristic triplet and jump-measure integrals.

The jump measure is one of three concrete representations:

* ``AtomicMeasure`` -- finitely many weighted atoms (compound-Poisson case);
  integrals are exact weighted sums.
* ``DensityMeasure`` -- a density on declared intervals away from zero;
  integrals go through adaptive Gauss-Legendre quadrature.
* ``MomentTableMeasure`` -- only the monomial integrals ``x^k`` are known;
  anything else is rejected.

The control measure adds ``sigma2`` as a point mass at zero, so a
generator function is integrated as ``sigma2 * f(0) + nu(f)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Mapping, Union

import numpy as np

from .errors import ConfigError, UnsupportedIntegrandError
from .quadrature import adaptive_gauss_legendre

Finiteness = Literal["finite", "infinite", "unknown"]


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite sum of point masses ``sum w_i * delta(x_i)`` with all ``x_i != 0``."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        for x, w in self.atoms:
            if x == 0.0:
                raise ConfigError("jump measure cannot carry an atom at 0")
            if not w > 0.0:
                raise ConfigError(f"atom mass must be positive, got {w!r} at {x!r}")

    @property
    def total_mass(self) -> float:
        return math.fsum(w for _, w in self.atoms)

    @property
    def locations(self) -> tuple[float, ...]:
        return tuple(x for x, _ in self.atoms)

    def integrate(self, f: Callable[[float], float]) -> float:
        # fsum keeps the atom sum reproducible across engines.
        return math.fsum(w * float(f(x)) for x, w in self.atoms)


@dataclass(frozen=True)
class DensityMeasure:
    """Jump measure with density ``h`` supported on the declared intervals.

    Intervals must not contain 0 in their interior; an endpoint at 0 is
    allowed and the quadrature then stops ``zero_gap`` away from it.
    """

    density: Callable[[np.ndarray], np.ndarray]
    intervals: tuple[tuple[float, float], ...]
    rel_tol: float = 1e-9
    zero_gap: float = 1e-10

    def __post_init__(self) -> None:
        for a, b in self.intervals:
            if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
                raise ConfigError(f"bad density interval [{a!r}, {b!r}]")
            if a < 0.0 < b:
                raise ConfigError("density interval must not straddle 0")

    def clipped_intervals(self, gap: float | None = None) -> tuple[tuple[float, float], ...]:
        g = self.zero_gap if gap is None else gap
        out = []
        for a, b in self.intervals:
            lo = max(a, g) if a >= 0.0 else a
            hi = min(b, -g) if b <= 0.0 else b
            if lo < hi:
                out.append((lo, hi))
        return tuple(out)

    def integrate(self, f, gap: float | None = None) -> float:
        total = 0.0
        for a, b in self.clipped_intervals(gap):
            value, _ = adaptive_gauss_legendre(
                lambda x: _vector_eval(f, x) * np.asarray(self.density(x), dtype=float),
                a,
                b,
                rel_tol=self.rel_tol,
                knots=getattr(f, "knots", ()),
            )
            total += value
        return total


@dataclass(frozen=True)
class MomentTableMeasure:
    """Holds ``nu(x^k)`` for selected exponents; nothing else is evaluable."""

    values: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for k in self.values:
            if not isinstance(k, int) or k < 0:
                raise ConfigError(f"moment-table exponent must be a nonnegative int, got {k!r}")

    def monomial(self, degree: int) -> float:
        try:
            return float(self.values[degree])
        except KeyError:
            raise UnsupportedIntegrandError(
                f"moment table has no entry for x^{degree}"
            ) from None


LevyMeasure = Union[AtomicMeasure, DensityMeasure, MomentTableMeasure]

#: The zero jump measure (pure-Gaussian processes).
ZERO_MEASURE = AtomicMeasure(())


@dataclass(frozen=True)
class LevyTriplet:
    """Characteristic triplet (drift, Gaussian variance, jump measure)."""

    gamma: float
    sigma2: float
    nu: LevyMeasure

    def __post_init__(self) -> None:
        if self.sigma2 < 0.0:
            raise ConfigError(f"sigma2 must be >= 0, got {self.sigma2!r}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def _vector_eval(f, x: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on an array, falling back to a scalar loop."""
    try:
        out = np.asarray(f(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(f(xi)) for xi in x], dtype=float)


def nu_integrate(nu: LevyMeasure, f) -> float:
    """Integral of the jump-part function ``f`` against the jump measure.

    ``f`` is evaluated away from zero only.  For a ``MomentTableMeasure``
    the function must declare a ``monomial_degree`` (products of power
    functions do), otherwise the integrand is unsupported.
    """
    if isinstance(nu, AtomicMeasure):
        return nu.integrate(f)
    if isinstance(nu, DensityMeasure):
        return nu.integrate(f)
    if isinstance(nu, MomentTableMeasure):
        degree = getattr(f, "monomial_degree", None)
        if degree is None:
            raise UnsupportedIntegrandError(
                "moment-table measures can integrate pure power functions only"
            )
        return nu.monomial(degree)
    raise TypeError(f"not a jump measure: {nu!r}")


def nu_moment(nu: LevyMeasure, k: int) -> float:
    """``nu(x^k)``, the k-th power integral of the jump measure."""
    if isinstance(nu, MomentTableMeasure):
        return nu.monomial(k)
    return nu_integrate(nu, lambda x: x**k)


def nu_truncated_mean(nu: LevyMeasure) -> float:
    """``nu( x * 1{|x| > 1} )`` -- the large-jump mean used for raw moments."""
    if isinstance(nu, AtomicMeasure):
        return math.fsum(w * x for x, w in nu.atoms if abs(x) > 1.0)
    if isinstance(nu, DensityMeasure):
        total = 0.0
        for a, b in nu.clipped_intervals():
            lo, hi = (max(a, 1.0), b) if a >= 0.0 else (a, min(b, -1.0))
            if lo < hi:
                value, _ = adaptive_gauss_legendre(
                    lambda x: x * np.asarray(nu.density(x), dtype=float),
                    lo,
                    hi,
                    rel_tol=nu.rel_tol,
                )
                total += value
        return total
    raise UnsupportedIntegrandError(
        "truncated mean needs an atomic or density jump measure"
    )


def mu_integrate(triplet: LevyTriplet, f) -> float:
    """Integral against the control measure ``sigma2 * delta_0 + nu``."""
    return triplet.sigma2 * float(f(0.0)) + nu_integrate(triplet.nu, f)


def check_moment_finiteness(nu: LevyMeasure, f, p: int) -> Finiteness:
    """Advisory check whether ``nu(|f|^p)`` is finite.

    Atomic measures are always fine.  Moment tables answer by entry
    presence.  For densities the integral is probed on a sequence of
    shrinking gaps around zero and the tail trend is extrapolated; the
    check never raises and says ``unknown`` when undecided.
    """
    if p < 2:
        raise ConfigError("finiteness check is meant for p >= 2")
    if isinstance(nu, AtomicMeasure):
        return "finite"
    if isinstance(nu, MomentTableMeasure):
        degree = getattr(f, "monomial_degree", None)
        if degree is None:
            return "unknown"
        return "finite" if p * degree in nu.values else "unknown"

    def integrand(x: np.ndarray) -> np.ndarray:
        return np.abs(_vector_eval(f, x)) ** p * np.asarray(nu.density(x), dtype=float)

    try:
        gaps = [nu.zero_gap * 4.0**i for i in range(8, -1, -1)]
        pieces = []
        for wide, narrow in zip(gaps[:-1], gaps[1:]):
            shell = 0.0
            for a, b in nu.intervals:
                lo = max(a, narrow) if a >= 0.0 else max(a, -wide)
                hi = min(b, wide) if a >= 0.0 else min(b, -narrow)
                if lo < hi:
                    value, _ = adaptive_gauss_legendre(integrand, lo, hi, rel_tol=1e-6)
                    shell += value
            pieces.append(shell)
        bulk = 0.0
        for a, b in nu.clipped_intervals(gaps[0]):
            value, _ = adaptive_gauss_legendre(integrand, a, b, rel_tol=1e-6)
            bulk += value
    except Exception:
        return "unknown"

    scale = abs(bulk) + sum(abs(s) for s in pieces) + 1e-300
    tail = [s for s in pieces if abs(s) > 1e-12 * scale]
    if len(tail) < 2:
        return "finite"
    ratios = [abs(b / a) for a, b in zip(tail[:-1], tail[1:]) if a != 0.0]
    last = ratios[-1]
    if last >= 1.0:
        return "infinite"
    if last <= 0.9:
        return "finite"
    return "unknown"
