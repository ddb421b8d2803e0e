"""Statistical oracle: path simulation of the driving martingales and of
their iterated integrals.

The jump measure must be atomic (compound Poisson), so jumps are
simulated exactly: a Poisson number of uniform jump times with atom-
distributed sizes.  The integration grid is the union of a uniform base
grid and the jump times; the only bias left is the O(dt) rectangle rule
for the compensator and Brownian brackets.

Iterated integrals update left-continuously.  On each grid cell

    dJ_k = J_(k-1)(cell left) * [ F_k(left) * (Gaussian + compensator part)
                                  + F_k(jump time) * jump part ],

and the running left value of a level is the shifted cumulative sum of
its increments, so every level is one vectorized pass over the cells.

Each path draws from its own counter-derived substream
(SeedSequence(seed, spawn_key=(path,))), and results reduce in path
order, so estimates are bitwise reproducible for any worker count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chaos import ChaosExpansion, FactorSpec, ProblemSpec, expand_product
from .errors import ConfigError, UnsupportedIntegrandError
from .functions import GeneratorFunction, TimeIntegrand
from .measures import AtomicMeasure, LevyTriplet
from .partitions import GAUSSIAN


@dataclass(frozen=True)
class SimulationConfig:
    n_paths: int = 100_000
    n_grid_steps: int = 512
    seed: int = 0
    antithetic: bool = False

    def __post_init__(self) -> None:
        if self.n_paths <= 0 or self.n_grid_steps <= 0:
            raise ConfigError("n_paths and n_grid_steps must be positive")


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    stderr: float
    n_paths: int
    elapsed_s: float

    def z_score(self, reference: float) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.estimate == reference else math.inf
        return (self.estimate - reference) / self.stderr


@dataclass(frozen=True)
class PathwiseReport:
    """Pathwise product-formula discrepancy at two grid resolutions."""

    grid_steps: tuple[int, int]
    max_discrepancy: tuple[float, float]
    n_paths: int
    n_terms: int

    @property
    def improvement(self) -> float:
        coarse, fine = self.max_discrepancy
        return math.inf if fine == 0.0 else coarse / fine


def _path_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
    )


class _JumpModel:
    """Atom table lookups for fast exact evaluation at jump sizes."""

    def __init__(self, nu: AtomicMeasure):
        self.locations = np.array([x for x, _ in nu.atoms], dtype=float)
        weights = np.array([w for _, w in nu.atoms], dtype=float)
        self.intensity = float(weights.sum())
        self.probabilities = weights / self.intensity if self.intensity > 0 else weights
        self._weights = weights
        self._tables: dict[int, tuple[np.ndarray, float]] = {}

    def table(self, gen: GeneratorFunction) -> tuple[np.ndarray, float]:
        """(values at the atoms, nu(gen)) for a generator's jump part."""
        got = self._tables.get(id(gen))
        if got is None:
            if self.locations.size:
                values = gen.jump_values(self.locations)
                rate = float(np.dot(self._weights, values))
            else:
                values = np.zeros(0)
                rate = 0.0
            got = (values, rate)
            self._tables[id(gen)] = got
        return got


def _require_atomic(spec: ProblemSpec) -> AtomicMeasure:
    nu = spec.triplet.nu
    if not isinstance(nu, AtomicMeasure):
        raise UnsupportedIntegrandError("simulation needs an atomic jump measure")
    return nu


@dataclass
class _PathRandomness:
    grid: np.ndarray
    delta: np.ndarray
    d_brownian: np.ndarray  # standard-normal scaled by sqrt(delta), unsigned
    jump_cells: np.ndarray
    jump_atom: np.ndarray
    jump_times: np.ndarray


def _draw_jumps(rng: np.random.Generator, model: _JumpModel, t: float):
    if model.intensity == 0.0:
        return np.zeros(0), np.zeros(0, dtype=int)
    count = rng.poisson(model.intensity * t)
    times = np.sort(rng.uniform(0.0, t, size=count))
    atoms = rng.choice(model.locations.size, size=count, p=model.probabilities)
    return times, atoms


def _build_grid(base: np.ndarray, jump_times: np.ndarray) -> np.ndarray:
    if jump_times.size == 0:
        return base
    return np.sort(np.concatenate([base, jump_times]))


def _randomness(
    rng: np.random.Generator, model: _JumpModel, t: float, base: np.ndarray
) -> _PathRandomness:
    jump_times, jump_atom = _draw_jumps(rng, model, t)
    grid = _build_grid(base, jump_times)
    delta = np.diff(grid)
    d_brownian = rng.standard_normal(delta.size) * np.sqrt(delta)
    cells = np.maximum(np.searchsorted(grid, jump_times) - 1, 0)
    return _PathRandomness(grid, delta, d_brownian, cells, jump_atom, jump_times)


def _level_pass(
    j_left: np.ndarray,
    f_left: np.ndarray,
    f_jump: np.ndarray,
    continuous: np.ndarray,
    jump_part: np.ndarray,
) -> np.ndarray:
    """Increments of one integration level given the running lower level."""
    return j_left * (f_left * continuous + f_jump * jump_part)


def _left_values(increments: np.ndarray) -> np.ndarray:
    out = np.empty_like(increments)
    if increments.size:
        out[0] = 0.0
        np.cumsum(increments[:-1], out=out[1:])
    return out


class _ProductSimulator:
    """Evaluates the product of the factors' iterated integrals on a path."""

    def __init__(self, spec: ProblemSpec):
        self.spec = spec
        self.model = _JumpModel(_require_atomic(spec))
        self.sigma = spec.triplet.sigma
        # per factor: list of tensor terms, each term a list of per-level
        # (time function, generator zero value, atom table, compensator rate)
        self.factors = []
        for factor in spec.factors:
            terms = []
            for coeff, funcs in factor.integrand.terms:
                levels = []
                for f, gen in zip(funcs, factor.generators):
                    values, rate = self.model.table(gen)
                    levels.append((f, gen.zero_value, values, rate))
                terms.append((coeff, levels))
            self.factors.append(terms)

    def product_at(self, rnd: _PathRandomness, sign: float = 1.0) -> float:
        grid, delta = rnd.grid, rnd.delta
        left = grid[:-1]
        d_w = sign * rnd.d_brownian
        value = 1.0
        for terms in self.factors:
            factor_value = 0.0
            for coeff, levels in terms:
                j_incr = None
                for f, zero_value, atom_values, rate in levels:
                    continuous = zero_value * self.sigma * d_w - rate * delta
                    jump_part = np.zeros_like(delta)
                    f_jump = np.zeros_like(delta)
                    if rnd.jump_cells.size:
                        jump_part[rnd.jump_cells] = atom_values[rnd.jump_atom]
                        f_jump[rnd.jump_cells] = np.asarray(
                            f(rnd.jump_times), dtype=float
                        )
                    f_left = np.asarray(f(left), dtype=float)
                    j_left = (
                        np.ones_like(delta) if j_incr is None else _left_values(j_incr)
                    )
                    j_incr = _level_pass(j_left, f_left, f_jump, continuous, jump_part)
                factor_value += coeff * float(j_incr.sum())
            value *= factor_value
        return value


class _ExpansionSimulator:
    """Evaluates the right-hand side of the product formula on a path."""

    def __init__(self, expansion: ChaosExpansion):
        self.spec = expansion.spec
        self.model = _JumpModel(_require_atomic(expansion.spec))
        self.sigma = expansion.spec.triplet.sigma
        # per chaos term: coefficient and per tensor term the per-block
        # (time function, kind, label, zero value, atom table, rate)
        self.terms = []
        for term in expansion.terms:
            blocks_static = []
            for gen, kind, label in zip(term.block_generators, term.kinds, term.labels):
                values, rate = self.model.table(gen)
                blocks_static.append((kind, label == GAUSSIAN, gen.zero_value, values, rate))
            tensor = []
            for coeff, funcs in term.integrand.terms:
                tensor.append((coeff, list(zip(funcs, blocks_static))))
            self.terms.append((term.coefficient, tensor))

    def value_at(self, rnd: _PathRandomness, sign: float = 1.0) -> float:
        grid, delta = rnd.grid, rnd.delta
        left = grid[:-1]
        d_w = sign * rnd.d_brownian
        total = 0.0
        for coefficient, tensor in self.terms:
            if coefficient == 0.0:
                continue
            term_value = 0.0
            for coeff, blocks in tensor:
                j_incr = None
                for f, (kind, is_gaussian, zero_value, atom_values, rate) in blocks:
                    if kind == 0:
                        continuous = delta
                        jump_part = None
                    elif is_gaussian:
                        continuous = zero_value * self.sigma * d_w
                        jump_part = None
                    else:
                        continuous = -rate * delta
                        jump_part = np.zeros_like(delta)
                        if rnd.jump_cells.size:
                            jump_part[rnd.jump_cells] = atom_values[rnd.jump_atom]
                    f_left = np.asarray(f(left), dtype=float)
                    j_left = (
                        np.ones_like(delta) if j_incr is None else _left_values(j_incr)
                    )
                    if jump_part is None:
                        j_incr = j_left * f_left * continuous
                    else:
                        f_jump = np.zeros_like(delta)
                        f_jump[rnd.jump_cells] = np.asarray(
                            f(rnd.jump_times), dtype=float
                        )
                        j_incr = _level_pass(
                            j_left, f_left, f_jump, continuous, jump_part
                        )
                term_value += coeff * float(j_incr.sum())
            total += coefficient * term_value
        return total


def _run_paths(worker, n_paths: int, n_workers: int) -> np.ndarray:
    """Fill values[i] = worker(i) with a fixed path order."""
    values = np.empty(n_paths)

    def fill(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            values[i] = worker(i)

    if n_workers <= 1 or n_paths < 2 * n_workers:
        fill(0, n_paths)
        return values
    chunk = (n_paths + n_workers - 1) // n_workers
    bounds = [(lo, min(lo + chunk, n_paths)) for lo in range(0, n_paths, chunk)]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        futures = [pool.submit(fill, lo, hi) for lo, hi in bounds]
        for f in futures:
            f.result()
    return values


def simulate_moment(
    spec: ProblemSpec,
    t: float,
    config: SimulationConfig,
    n_workers: int = 1,
) -> MCEstimate:
    """Monte Carlo estimate of the expected product of iterated integrals."""
    if not 0.0 < t <= spec.horizon:
        raise ConfigError(f"t must lie in (0, horizon], got {t!r}")
    simulator = _ProductSimulator(spec)
    base = np.linspace(0.0, t, config.n_grid_steps + 1)
    started = time.perf_counter()

    def one_path(i: int) -> float:
        rng = _path_rng(config.seed, i)
        rnd = _randomness(rng, simulator.model, t, base)
        value = simulator.product_at(rnd)
        if config.antithetic:
            value = 0.5 * (value + simulator.product_at(rnd, sign=-1.0))
        return value

    values = _run_paths(one_path, config.n_paths, n_workers)
    elapsed = time.perf_counter() - started
    stderr = float(values.std(ddof=1) / math.sqrt(config.n_paths)) if config.n_paths > 1 else math.inf
    return MCEstimate(float(values.mean()), stderr, config.n_paths, elapsed)


def pathwise_product_check(
    spec: ProblemSpec,
    t: float,
    config: SimulationConfig,
    refined_steps: int | None = None,
    n_workers: int = 1,
) -> PathwiseReport:
    """Compare both sides of the product formula pathwise at two grid
    resolutions.

    The refined grid nests the coarse one (default 4x the steps) and the
    Brownian increments are aggregated from the fine grid, so each path
    sees the same underlying noise at both resolutions and the
    discrepancy trend isolates the discretization error.
    """
    if not 0.0 < t <= spec.horizon:
        raise ConfigError(f"t must lie in (0, horizon], got {t!r}")
    coarse_steps = config.n_grid_steps
    fine_steps = refined_steps or 4 * coarse_steps
    if fine_steps % coarse_steps:
        raise ConfigError("refined step count must be a multiple of the base count")
    expansion = expand_product(spec)
    lhs_engine = _ProductSimulator(spec)
    rhs_engine = _ExpansionSimulator(expansion)
    base_coarse = np.linspace(0.0, t, coarse_steps + 1)
    base_fine = np.linspace(0.0, t, fine_steps + 1)

    def one_path(i: int) -> tuple[float, float]:
        rng = _path_rng(config.seed, i)
        jump_times, jump_atom = _draw_jumps(rng, lhs_engine.model, t)
        fine_grid = _build_grid(base_fine, jump_times)
        fine_dw = rng.standard_normal(fine_grid.size - 1) * np.sqrt(np.diff(fine_grid))
        discs = []
        for base in (base_coarse, base_fine):
            grid = _build_grid(base, jump_times)
            # aggregate the fine Brownian increments onto this grid
            idx = np.searchsorted(fine_grid, grid)
            d_w = np.add.reduceat(fine_dw, idx[:-1])
            cells = np.maximum(np.searchsorted(grid, jump_times) - 1, 0)
            rnd = _PathRandomness(
                grid, np.diff(grid), d_w, cells, jump_atom, jump_times
            )
            lhs = lhs_engine.product_at(rnd)
            rhs = rhs_engine.value_at(rnd)
            discs.append(abs(lhs - rhs))
        return discs[0], discs[1]

    pairs = [one_path(i) for i in range(config.n_paths)]
    coarse = max(p[0] for p in pairs)
    fine = max(p[1] for p in pairs)
    return PathwiseReport(
        (coarse_steps, fine_steps), (coarse, fine), config.n_paths, len(expansion.terms)
    )


def quadratic_variation_estimate(
    triplet: LevyTriplet,
    generator: GeneratorFunction,
    t: float,
    config: SimulationConfig,
) -> MCEstimate:
    """Estimate of the realized quadratic variation of the generator's
    martingale over [0, t], divided by t (targets the control-measure
    integral of the squared generator)."""
    spec = ProblemSpec(
        triplet, (FactorSpec((generator,), TimeIntegrand.ones(1)),), horizon=t
    )
    simulator = _ProductSimulator(spec)
    base = np.linspace(0.0, t, config.n_grid_steps + 1)
    started = time.perf_counter()

    def one_path(i: int) -> float:
        rng = _path_rng(config.seed, i)
        rnd = _randomness(rng, simulator.model, t, base)
        values, rate = simulator.model.table(generator)
        continuous = generator.zero_value * simulator.sigma * rnd.d_brownian - rate * rnd.delta
        increments = continuous.copy()
        if rnd.jump_cells.size:
            increments[rnd.jump_cells] += values[rnd.jump_atom]
        return float(np.dot(increments, increments) / t)

    values = _run_paths(one_path, config.n_paths, 1)
    elapsed = time.perf_counter() - started
    stderr = float(values.std(ddof=1) / math.sqrt(config.n_paths)) if config.n_paths > 1 else math.inf
    return MCEstimate(float(values.mean()), stderr, config.n_paths, elapsed)
