"""Closed-form engines: symbolic product expansion and the moment formula.

A problem is a product of iterated stochastic integrals, one factor per
entry: factor j pairs a tensor-sum time integrand of order m_j with m_j
generator functions.  Globally the generators are numbered 1..m_1+...+m_N
in factor order.

``expand_product`` rewrites the product as a sum of mixed iterated
integrals indexed by (identification rule, per-block label, per-block
integrator kind).  ``moment`` takes the expectation: only terms whose
blocks all carry deterministic integrators survive, which restricts to
rules without singleton blocks and turns each block into a scalar weight

* jump block:      nu(product of its generators),
* Gaussian pair:   sigma2 * (product of its generators)(0).

The sum over admissible labelings factorizes per block, so each rule
contributes (product over blocks of its weight options summed) times the
simplex integral of the identified integrand.  The literal sum over
Brownian-position subsets is kept behind ``engine="bsum"`` as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

from numpy.polynomial import Polynomial

from .errors import ConfigError, UnsupportedIntegrandError
from .functions import GeneratorFunction, IdentifiedIntegrand, TimeIntegrand, identify, product
from .measures import (
    AtomicMeasure,
    Finiteness,
    LevyTriplet,
    check_moment_finiteness,
    nu_integrate,
)
from .partitions import (
    GAUSSIAN,
    JUMP,
    IdentificationRule,
    enumerate_rules,
    filter_moment,
    subsets,
)

MOMENT_CAP = 10
EXPAND_CAP = 8


@dataclass(frozen=True)
class FactorSpec:
    """One iterated-integral factor: generators plus its time integrand."""

    generators: tuple[GeneratorFunction, ...]
    integrand: TimeIntegrand

    def __post_init__(self) -> None:
        if len(self.generators) != self.integrand.order:
            raise ConfigError(
                f"factor has {len(self.generators)} generators but an order-"
                f"{self.integrand.order} integrand"
            )


@dataclass(frozen=True)
class ProblemSpec:
    """A product of iterated integrals over a common driving process."""

    triplet: LevyTriplet
    factors: tuple[FactorSpec, ...]
    horizon: float

    def __post_init__(self) -> None:
        if not self.factors:
            raise ConfigError("need at least one factor")
        if not self.horizon > 0.0:
            raise ConfigError(f"horizon must be positive, got {self.horizon!r}")

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(f.integrand.order for f in self.factors)

    @property
    def total_order(self) -> int:
        return sum(self.orders)

    @property
    def global_generators(self) -> tuple[GeneratorFunction, ...]:
        out: list[GeneratorFunction] = []
        for f in self.factors:
            out.extend(f.generators)
        return tuple(out)

    @property
    def integrands(self) -> tuple[TimeIntegrand, ...]:
        return tuple(f.integrand for f in self.factors)

    def is_polynomial(self) -> bool:
        return all(f.integrand.is_polynomial() for f in self.factors)


class BlockWeights:
    """Per-spec cache of block generator products and their weights."""

    def __init__(self, spec: ProblemSpec):
        self.spec = spec
        self._gens = spec.global_generators
        self._products: dict[frozenset[int], GeneratorFunction] = {}
        self._nu: dict[frozenset[int], float] = {}

    def block_generator(self, block: frozenset[int]) -> GeneratorFunction:
        got = self._products.get(block)
        if got is None:
            got = product([self._gens[j - 1] for j in sorted(block)])
            self._products[block] = got
        return got

    def jump_weight(self, block: frozenset[int]) -> float:
        """nu of the block's generator product."""
        got = self._nu.get(block)
        if got is None:
            got = nu_integrate(self.spec.triplet.nu, self.block_generator(block))
            self._nu[block] = got
        return got

    def gaussian_weight(self, block: frozenset[int]) -> float:
        """sigma2 times the block's generator product at zero."""
        return self.spec.triplet.sigma2 * self.block_generator(block).zero_value

    def jump_martingale_vanishes(self, block: frozenset[int]) -> bool:
        """True when the block's jump martingale is the zero process."""
        nu = self.spec.triplet.nu
        if isinstance(nu, AtomicMeasure):
            gen = self.block_generator(block)
            return all(float(gen(x)) == 0.0 for x, _ in nu.atoms)
        return False


# ---------------------------------------------------------------------------
# product expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChaosTerm:
    """One mixed iterated integral of the product expansion.

    ``kinds[r] == 0`` means block r integrates against dt with the
    deterministic weight ``block_weights[r]`` (already multiplied into
    ``coefficient``); ``kinds[r] == 1`` means block r integrates against
    the block's martingale (Gaussian or jump part per ``labels[r]``).
    """

    rule: IdentificationRule
    labels: tuple[str, ...]
    kinds: tuple[int, ...]
    coefficient: float
    block_generators: tuple[GeneratorFunction, ...]
    block_weights: tuple[float | None, ...]
    integrand: IdentifiedIntegrand

    @property
    def is_deterministic(self) -> bool:
        return all(k == 0 for k in self.kinds)


@dataclass(frozen=True)
class ChaosExpansion:
    spec: ProblemSpec
    terms: tuple[ChaosTerm, ...]

    def expectation(self, t: float | None = None, rel_tol: float = 1e-9):
        """Expected value of the expansion: martingale terms vanish, the
        rest integrate over the simplex."""
        from .simplex import integrate_exact, integrate_numeric

        if t is None:
            total = Polynomial([0.0])
            for term in self.terms:
                if term.is_deterministic:
                    total = total + term.coefficient * integrate_exact(term.integrand)
            return total
        total = 0.0
        for term in self.terms:
            if term.is_deterministic:
                if term.integrand.is_polynomial():
                    total += term.coefficient * float(integrate_exact(term.integrand)(t))
                else:
                    total += term.coefficient * integrate_numeric(term.integrand, t, rel_tol).value
        return total


def _block_options(
    block: frozenset[int], weights: BlockWeights
) -> list[tuple[str, int, float | None]]:
    """Admissible (label, kind, deterministic weight) choices for a block."""
    sigma2 = weights.spec.triplet.sigma2
    options: list[tuple[str, int, float | None]] = []
    if len(block) == 1:
        if sigma2 > 0.0 and weights.block_generator(block).zero_value != 0.0:
            options.append((GAUSSIAN, 1, None))
        if not weights.jump_martingale_vanishes(block):
            options.append((JUMP, 1, None))
        return options
    if len(block) == 2:
        w = weights.gaussian_weight(block)
        if w != 0.0:
            options.append((GAUSSIAN, 0, w))
    w = weights.jump_weight(block)
    if w != 0.0:
        options.append((JUMP, 0, w))
    if not weights.jump_martingale_vanishes(block):
        options.append((JUMP, 1, None))
    return options


def expand_product(spec: ProblemSpec, cap: int = EXPAND_CAP) -> ChaosExpansion:
    """Full symbolic expansion of the product of iterated integrals.

    Enumerates every identification rule and every admissible per-block
    (label, kind) assignment; blocks whose contribution is identically
    zero (zero weight, vanishing martingale) are pruned eagerly.
    """
    weights = BlockWeights(spec)
    terms: list[ChaosTerm] = []
    for rule in enumerate_rules(spec.orders, cap=cap):
        identified = identify(spec.integrands, rule)
        per_block = [_block_options(b, weights) for b in rule.blocks]
        if any(not opts for opts in per_block):
            continue
        combos: list[tuple[tuple[str, int, float | None], ...]] = [()]
        for opts in per_block:
            combos = [c + (o,) for c in combos for o in opts]
        for combo in combos:
            coeff = 1.0
            for _, kind, w in combo:
                if kind == 0:
                    coeff *= w
            terms.append(
                ChaosTerm(
                    rule=rule,
                    labels=tuple(label for label, _, _ in combo),
                    kinds=tuple(kind for _, kind, _ in combo),
                    coefficient=coeff,
                    block_generators=tuple(
                        weights.block_generator(b) for b in rule.blocks
                    ),
                    block_weights=tuple(w for _, _, w in combo),
                    integrand=identified,
                )
            )
    return ChaosExpansion(spec, tuple(terms))


# ---------------------------------------------------------------------------
# moment formula
# ---------------------------------------------------------------------------


def moment(
    spec: ProblemSpec,
    t: float | None = None,
    engine: Literal["factored", "bsum"] = "factored",
    cap: int = MOMENT_CAP,
    rel_tol: float = 1e-9,
):
    """Expected value of the product of iterated integrals.

    With ``t=None`` returns a polynomial in time (requires polynomial
    integrands); with a numeric ``t`` returns a float, using exact
    integration whenever possible and nested quadrature otherwise.
    """
    from .simplex import integrate_exact, integrate_numeric

    if t is None and not spec.is_polynomial():
        raise UnsupportedIntegrandError(
            "symbolic-in-time moments need polynomial integrands; pass a numeric t"
        )

    weights = BlockWeights(spec)

    def rule_integral(rule: IdentificationRule):
        identified = identify(spec.integrands, rule)
        if t is None:
            return integrate_exact(identified)
        if identified.is_polynomial():
            return float(integrate_exact(identified)(t))
        return integrate_numeric(identified, t, rel_tol).value

    if engine == "factored":
        total = Polynomial([0.0]) if t is None else 0.0
        for rule in enumerate_rules(spec.orders, cap=cap, min_block_size=2):
            # sum over admissible labelings, factorized block by block
            weight = 1.0
            for block in rule.blocks:
                options = weights.jump_weight(block)
                if len(block) == 2:
                    options += weights.gaussian_weight(block)
                weight *= options
                if weight == 0.0:
                    break
            if weight == 0.0:
                continue
            total = total + weight * rule_integral(rule)
        return total

    if engine == "bsum":
        rules = [
            r for r in enumerate_rules(spec.orders, cap=cap) if not r.has_singleton()
        ]
        integrals: dict[IdentificationRule, object] = {}
        total = Polynomial([0.0]) if t is None else 0.0
        for brownian in subsets(range(1, spec.total_order + 1)):
            for rule in filter_moment(rules, brownian):
                weight = 1.0
                for block in rule.blocks:
                    if block <= brownian:
                        weight *= weights.gaussian_weight(block)
                    else:
                        weight *= weights.jump_weight(block)
                if weight == 0.0:
                    continue
                if rule not in integrals:
                    integrals[rule] = rule_integral(rule)
                total = total + weight * integrals[rule]
        return total

    raise ConfigError(f"unknown moment engine {engine!r}")


# ---------------------------------------------------------------------------
# advisory integrability check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegrabilityReport:
    """Advisory answer to 'do the closed-form formulas apply here?'."""

    time_part_ok: bool
    generator_status: Finiteness
    notes: tuple[str, ...]
    warnings: tuple[str, ...]

    @property
    def satisfied(self) -> bool:
        return self.time_part_ok and self.generator_status == "finite"


def check_integrability(spec: ProblemSpec) -> IntegrabilityReport:
    """Check the sufficient conditions: every time factor must lie in
    L^(2N) of the simplex (automatic for bounded factors on a compact
    horizon) and every generator must have jump moments of all orders.
    """
    notes: list[str] = []
    warnings: list[str] = []
    n_factors = len(spec.factors)
    time_ok = True
    for j, factor in enumerate(spec.factors):
        for _, funcs in factor.integrand.terms:
            for f in funcs:
                bound = f.bound_on(spec.horizon)
                if not math.isfinite(bound):
                    time_ok = False
                    warnings.append(f"factor {j + 1}: unbounded time function")
                elif f.as_polynomial() is None and not hasattr(f, "breakpoints"):
                    notes.append(
                        f"factor {j + 1}: callable accepted via declared bound {bound:g}"
                    )
    status: Finiteness = "finite"
    probes = sorted({2, 4, 2 * n_factors})
    for i, gen in enumerate(spec.global_generators, start=1):
        for p in probes:
            got = check_moment_finiteness(spec.triplet.nu, gen, p)
            if got == "infinite":
                status = "infinite"
                warnings.append(f"generator {i}: nu(|.|^{p}) diverges")
            elif got == "unknown" and status == "finite":
                status = "unknown"
                warnings.append(f"generator {i}: nu(|.|^{p}) undecided")
    return IntegrabilityReport(time_ok, status, tuple(notes), tuple(warnings))
