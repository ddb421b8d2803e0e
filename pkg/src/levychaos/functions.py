"""Generator functions, time functions and tensor-product time integrands.

A martingale is described by a generator function: its value at zero
loads the Brownian part, its values away from zero load the jump part.
Time integrands are sums of tensor products of univariate time functions;
applying an identification rule collapses a tensor product onto fewer
time variables by multiplying together the factors that share a block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ConfigError, UnsupportedIntegrandError
from .measures import DensityMeasure
from .partitions import IdentificationRule

# ---------------------------------------------------------------------------
# generator functions (x-space)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorFunction:
    """A function on the real line split into its value at 0 and a jump part.

    ``jump`` is never consulted at 0.  ``monomial_degree`` marks jump
    parts that are exactly ``x**k``; it lets moment-table measures
    integrate products of power functions, and it propagates through
    :func:`product`.
    """

    zero_value: float
    jump: Callable[[float], float]
    name: str = ""
    monomial_degree: int | None = None

    def __call__(self, x):
        if np.ndim(x) == 0:
            return self.zero_value if x == 0.0 else float(self.jump(x))
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        zero = x == 0.0
        out[zero] = self.zero_value
        if (~zero).any():
            out[~zero] = _eval_jump(self.jump, x[~zero])
        return out

    def jump_values(self, x: np.ndarray) -> np.ndarray:
        """Vectorized jump-part evaluation (callers guarantee x != 0)."""
        return _eval_jump(self.jump, np.asarray(x, dtype=float))


def _eval_jump(jump, x: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(jump(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError, KeyError):
        pass
    return np.array([float(jump(xi)) for xi in x], dtype=float)


def product(alphas: Sequence[GeneratorFunction]) -> GeneratorFunction:
    """Pointwise product of generator functions."""
    if not alphas:
        raise ConfigError("product of generators needs at least one factor")
    if len(alphas) == 1:
        return alphas[0]
    zero = math.prod(a.zero_value for a in alphas)
    degrees = [a.monomial_degree for a in alphas]
    degree = sum(degrees) if all(d is not None for d in degrees) else None
    jumps = [a.jump for a in alphas]

    def jump(x):
        out = _eval_jump(jumps[0], np.atleast_1d(np.asarray(x, dtype=float)))
        for j in jumps[1:]:
            out = out * _eval_jump(j, np.atleast_1d(np.asarray(x, dtype=float)))
        return out if np.ndim(x) else float(out[0])

    name = "*".join(a.name or "?" for a in alphas)
    return GeneratorFunction(zero, jump, name=name, monomial_degree=degree)


def restrict_jump(alpha: GeneratorFunction) -> GeneratorFunction:
    """Same jump part, zero loading on the Brownian component."""
    if alpha.zero_value == 0.0:
        return alpha
    return GeneratorFunction(
        0.0, alpha.jump, name=f"{alpha.name or '?'}|jump", monomial_degree=alpha.monomial_degree
    )


# -- named families ---------------------------------------------------------


def monomial(degree: int, zero_value: float = 0.0) -> GeneratorFunction:
    """``x**degree`` away from zero with an explicit value at zero."""
    if degree < 0:
        raise ConfigError("monomial degree must be >= 0")
    return GeneratorFunction(
        float(zero_value),
        lambda x: np.asarray(x, dtype=float) ** degree,
        name=f"x^{degree}",
        monomial_degree=degree,
    )


def teugels(n: int) -> GeneratorFunction:
    """Power-jump generator: ``x**n`` off zero; n=1 additionally loads the
    Brownian part with weight 1 so that the driving process itself is
    recovered."""
    if n < 1:
        raise ConfigError("teugels index must be >= 1")
    g = monomial(n, zero_value=1.0 if n == 1 else 0.0)
    return GeneratorFunction(g.zero_value, g.jump, name=f"h{n}", monomial_degree=n)


def dyadic_indicator(a: float, b: float, c: float = 0.0) -> GeneratorFunction:
    """Indicator of the interval ``(a, b]`` off zero, value ``c`` at zero."""
    if not a < b:
        raise ConfigError(f"need a < b, got ({a!r}, {b!r})")
    if a <= 0.0 <= b:
        raise ConfigError("indicator interval must not contain 0")

    def jump(x):
        x = np.asarray(x, dtype=float)
        return ((x > a) & (x <= b)).astype(float)

    return GeneratorFunction(float(c), jump, name=f"1({a},{b}]")


def table_generator(
    values: Mapping[float, float], zero_value: float = 0.0, name: str = "table"
) -> GeneratorFunction:
    """Generator known only at finitely many jump sizes (atomic measures)."""
    table = {float(x): float(v) for x, v in values.items()}
    if 0.0 in table:
        raise ConfigError("table generator must not list the point 0")

    def jump(x):
        try:
            return table[float(x)]
        except (TypeError, KeyError):
            pass
        x = np.asarray(x, dtype=float)
        try:
            return np.array([table[float(xi)] for xi in x])
        except KeyError as exc:
            raise UnsupportedIntegrandError(
                f"table generator {name!r} has no value at {exc.args[0]!r}"
            ) from None

    return GeneratorFunction(float(zero_value), jump, name=name)


def hermite_weighted(n: int, nu: DensityMeasure) -> GeneratorFunction:
    """Probabilists' Hermite polynomial times ``h(x)**-1/2 * exp(-x^2/2)``."""
    if not isinstance(nu, DensityMeasure):
        raise ConfigError("hermite generators need a density jump measure")
    if n < 1:
        raise ConfigError("hermite index must be >= 1")
    he = np.polynomial.hermite_e.HermiteE.basis(n)

    def jump(x):
        x = np.asarray(x, dtype=float)
        h = np.asarray(nu.density(x), dtype=float)
        return he(x) * np.exp(-0.5 * x**2) / np.sqrt(h)

    return GeneratorFunction(float(he(0.0)), jump, name=f"He{n}w")


def haar_weighted(j: int, k: int, nu: DensityMeasure) -> GeneratorFunction:
    """Haar wavelet ``psi_{jk}`` times ``h(x)**-1/2`` off zero."""
    if not isinstance(nu, DensityMeasure):
        raise ConfigError("haar generators need a density jump measure")
    lo = k / 2.0**j
    mid = (2 * k + 1) / 2.0 ** (j + 1)
    hi = (k + 1) / 2.0**j
    amp = 2.0 ** (j / 2.0)

    def psi(x):
        x = np.asarray(x, dtype=float)
        return amp * (((x >= lo) & (x < mid)).astype(float) - ((x >= mid) & (x < hi)).astype(float))

    def jump(x):
        x = np.asarray(x, dtype=float)
        out = psi(x)
        live = out != 0.0
        if np.any(live):
            h = np.asarray(nu.density(x[live]), dtype=float)
            out[live] = out[live] / np.sqrt(h)
        return out

    zero = amp if lo <= 0.0 < mid else (-amp if mid <= 0.0 < hi else 0.0)
    g = GeneratorFunction(float(zero), jump, name=f"haar({j},{k})w")
    object.__setattr__(g, "knots", (lo, mid, hi))
    return g


# ---------------------------------------------------------------------------
# univariate time functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialFunction:
    """Polynomial in time, coefficients in ascending degree."""

    coefficients: tuple[float, ...]

    def __call__(self, u):
        return Polynomial(self.coefficients)(np.asarray(u, dtype=float))

    def as_polynomial(self) -> Polynomial:
        return Polynomial(self.coefficients)

    def bound_on(self, horizon: float) -> float:
        return float(sum(abs(c) * horizon**k for k, c in enumerate(self.coefficients)))

    @property
    def knots(self) -> tuple[float, ...]:
        return ()


@dataclass(frozen=True)
class PiecewiseConstantFunction:
    """Right-open step function: ``values[i]`` on ``[breakpoints[i-1], breakpoints[i])``."""

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.breakpoints) + 1:
            raise ConfigError("need exactly one more value than breakpoints")
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise ConfigError("breakpoints must be strictly increasing")

    def __call__(self, u):
        idx = np.searchsorted(np.asarray(self.breakpoints), np.asarray(u, dtype=float), side="right")
        return np.asarray(self.values)[idx]

    def as_polynomial(self) -> Polynomial | None:
        if all(v == self.values[0] for v in self.values):
            return Polynomial([self.values[0]])
        return None

    def bound_on(self, horizon: float) -> float:
        return float(max(abs(v) for v in self.values))

    @property
    def knots(self) -> tuple[float, ...]:
        return self.breakpoints


@dataclass(frozen=True)
class CallableFunction:
    """Black-box time function; integrable only numerically.

    ``bound`` is the caller-declared sup-norm on the horizon, consumed by
    the advisory integrability check.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    bound: float

    def __call__(self, u):
        return np.asarray(self.fn(np.asarray(u, dtype=float)), dtype=float)

    def as_polynomial(self) -> None:
        return None

    def bound_on(self, horizon: float) -> float:
        return float(self.bound)

    @property
    def knots(self) -> tuple[float, ...]:
        return ()


TimeFunction = Union[PolynomialFunction, PiecewiseConstantFunction, CallableFunction]

ONE = PolynomialFunction((1.0,))


@dataclass(frozen=True)
class ProductTimeFunction:
    """Pointwise product of time functions (one identified block variable)."""

    factors: tuple[TimeFunction, ...]

    def __call__(self, u):
        out = np.asarray(self.factors[0](u), dtype=float)
        for f in self.factors[1:]:
            out = out * np.asarray(f(u), dtype=float)
        return out

    def as_polynomial(self) -> Polynomial | None:
        poly = Polynomial([1.0])
        for f in self.factors:
            p = f.as_polynomial()
            if p is None:
                return None
            poly = poly * p
        return poly

    def bound_on(self, horizon: float) -> float:
        return float(math.prod(f.bound_on(horizon) for f in self.factors))

    @property
    def knots(self) -> tuple[float, ...]:
        out: set[float] = set()
        for f in self.factors:
            out.update(f.knots)
        return tuple(sorted(out))


# ---------------------------------------------------------------------------
# tensor-product integrands and identification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimeIntegrand:
    """Sum of tensor products ``c * F_1 x ... x F_m`` of a fixed order m."""

    order: int
    terms: tuple[tuple[float, tuple[TimeFunction, ...]], ...]

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ConfigError("integrand order must be >= 1")
        for _, factors in self.terms:
            if len(factors) != self.order:
                raise ConfigError(
                    f"every tensor term needs {self.order} factors, got {len(factors)}"
                )

    @staticmethod
    def tensor(factors: Sequence[TimeFunction], coefficient: float = 1.0) -> "TimeIntegrand":
        return TimeIntegrand(len(factors), ((float(coefficient), tuple(factors)),))

    @staticmethod
    def ones(order: int) -> "TimeIntegrand":
        return TimeIntegrand.tensor([ONE] * order)

    def scaled(self, c: float) -> "TimeIntegrand":
        return TimeIntegrand(self.order, tuple((c * w, fs) for w, fs in self.terms))

    def __add__(self, other: "TimeIntegrand") -> "TimeIntegrand":
        if other.order != self.order:
            raise ConfigError("can only add integrands of equal order")
        return TimeIntegrand(self.order, self.terms + other.terms)

    def is_polynomial(self) -> bool:
        return all(
            f.as_polynomial() is not None for _, factors in self.terms for f in factors
        )


@dataclass(frozen=True)
class IdentifiedIntegrand:
    """A tensor-sum integrand with block variables substituted in.

    Each term carries one product function per block of the rule; the
    r-th function is evaluated at the r-th ordered time variable.
    """

    rule: IdentificationRule
    terms: tuple[tuple[float, tuple[ProductTimeFunction, ...]], ...]

    @property
    def dimension(self) -> int:
        return len(self.rule.blocks)

    def is_polynomial(self) -> bool:
        return all(
            g.as_polynomial() is not None for _, funcs in self.terms for g in funcs
        )


def identify(
    integrands: Sequence[TimeIntegrand], rule: IdentificationRule
) -> IdentifiedIntegrand:
    """Collapse the tensor product of the integrands along the rule's blocks.

    Global position j (1-based, factors concatenated in order) lands in
    the block containing j; all positions sharing a block multiply into
    that block's single time variable.  Linear combinations distribute.
    """
    total = sum(ti.order for ti in integrands)
    if total != rule.ground_size:
        raise ConfigError(
            f"integrand orders sum to {total}, rule covers {rule.ground_size} positions"
        )
    out: list[tuple[float, tuple[ProductTimeFunction, ...]]] = []
    stack: list[tuple[int, float, tuple[TimeFunction, ...]]] = [(0, 1.0, ())]
    while stack:
        j, coeff, chosen = stack.pop()
        if j == len(integrands):
            per_block = tuple(
                ProductTimeFunction(tuple(chosen[i - 1] for i in sorted(block)))
                for block in rule.blocks
            )
            out.append((coeff, per_block))
            continue
        for w, factors in reversed(integrands[j].terms):
            stack.append((j + 1, coeff * w, chosen + factors))
    return IdentifiedIntegrand(rule, tuple(out))
