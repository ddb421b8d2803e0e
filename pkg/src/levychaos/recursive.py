"""Recursion engines for moments, independent of the combinatorial formula.

The product recursion peels one integration level off a chosen subset of
factors at a time: the expectation of a product of iterated integrals is
a time integral of expectations of strictly smaller products, weighted by
the bracket rate of the peeled generators

    w(S) = nu(prod of generators) + [|S| = 2] * sigma2 * prod of values at 0.

Specializing every factor to one level with constant time functions gives
the classical central-moment recursion of the driving process itself.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Sequence

from numpy.polynomial import Polynomial

from .chaos import BlockWeights, ProblemSpec
from .errors import UnsupportedIntegrandError
from .measures import LevyTriplet, MomentTableMeasure, nu_moment, nu_truncated_mean

_ZERO = Polynomial([0.0])
_ONE = Polynomial([1.0])


def recursive_product_moment(spec: ProblemSpec, t: float | None = None):
    """Expected value of the product of iterated integrals by depth recursion.

    Requires polynomial time integrands.  Returns a polynomial in time,
    or its value when ``t`` is given.  Tensor-sum integrands distribute:
    the recursion runs once per combination of tensor terms.
    """
    if not spec.is_polynomial():
        raise UnsupportedIntegrandError("the depth recursion needs polynomial integrands")

    weights = BlockWeights(spec)
    orders = spec.orders
    offsets = []
    start = 0
    for m in orders:
        offsets.append(start)
        start += m
    sigma2 = spec.triplet.sigma2

    total = _ZERO
    combos: list[tuple[float, tuple[tuple, ...]]] = [(1.0, ())]
    for factor in spec.factors:
        combos = [
            (c * w, chosen + (funcs,))
            for c, chosen in combos
            for w, funcs in factor.integrand.terms
        ]
    for combo_coeff, funcs_per_factor in combos:
        if combo_coeff == 0.0:
            continue
        polys = [
            tuple(f.as_polynomial() for f in funcs) for funcs in funcs_per_factor
        ]
        memo: dict[tuple[int, ...], Polynomial] = {}

        def value(depths: tuple[int, ...]) -> Polynomial:
            got = memo.get(depths)
            if got is not None:
                return got
            active = [j for j, d in enumerate(depths) if d > 0]
            if not active:
                out = _ONE
            elif len(active) == 1:
                # a lone iterated integral is a martingale started at 0
                out = _ZERO
            else:
                out = _ZERO
                for size in range(2, len(active) + 1):
                    for subset in combinations(active, size):
                        block = frozenset(offsets[j] + depths[j] for j in subset)
                        w = weights.jump_weight(block)
                        if size == 2:
                            w += sigma2 * weights.block_generator(block).zero_value
                        if w == 0.0:
                            continue
                        integrand = value(_peel(depths, subset))
                        for j in subset:
                            integrand = integrand * polys[j][depths[j] - 1]
                        out = out + w * integrand.integ(lbnd=0.0)
            memo[depths] = out
            return out

        total = total + combo_coeff * value(orders)
    return total if t is None else float(total(t))


def _peel(depths: tuple[int, ...], subset: Sequence[int]) -> tuple[int, ...]:
    out = list(depths)
    for j in subset:
        out[j] -= 1
    return tuple(out)


# ---------------------------------------------------------------------------
# moments of the driving process
# ---------------------------------------------------------------------------


def levy_central_moments(triplet: LevyTriplet, n_max: int) -> list[Polynomial]:
    """Central moments E[(X_t - E X_t)^n] for n = 1..n_max, as polynomials
    in t, built bottom-up from the one-step recursion."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    moments = [_ONE, _ZERO]
    for n in range(2, n_max + 1):
        out = _ZERO
        for i in range(2, n + 1):
            rate = nu_moment(triplet.nu, i)
            if i == 2:
                rate += triplet.sigma2
            if rate == 0.0:
                continue
            out = out + math.comb(n, i) * rate * moments[n - i].integ(lbnd=0.0)
        moments.append(out)
    return moments[1:]


def levy_raw_moments(triplet: LevyTriplet, n_max: int) -> list[Polynomial]:
    """Raw moments E[X_t^n] for n = 1..n_max via binomial recombination of
    the central moments with the mean  (gamma + nu(x 1{|x|>1})) t."""
    central = [_ONE] + levy_central_moments(triplet, n_max)
    mean = Polynomial([0.0, triplet.gamma + nu_truncated_mean(triplet.nu)])
    out = []
    for n in range(1, n_max + 1):
        total = _ZERO
        for i in range(0, n + 1):
            total = total + math.comb(n, i) * central[i] * mean ** (n - i)
        out.append(total)
    return out


def teugels_power_moment(triplet: LevyTriplet, n: int, power: int) -> Polynomial:
    """E[(n-th compensated power-jump martingale at t)^power].

    Works through the image process: its jump measure has monomial
    integrals nu(x^(n*i)) and its Gaussian variance survives only for
    n = 1.
    """
    if n < 1:
        raise ValueError("power-jump index must be >= 1")
    if power < 1:
        raise ValueError("power must be >= 1")
    table = MomentTableMeasure({i: nu_moment(triplet.nu, n * i) for i in range(2, power + 1)})
    image = LevyTriplet(0.0, triplet.sigma2 if n == 1 else 0.0, table)
    return levy_central_moments(image, power)[-1]
