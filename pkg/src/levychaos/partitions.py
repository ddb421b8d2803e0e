"""Ordered block partitions that identify time variables across factors.

With N factors of orders (m_1, ..., m_N) the global positions
1..m_1+...+m_N are split into consecutive runs, one per factor.  An
identification rule is an ordered sequence of disjoint blocks covering
all positions such that

* no block holds two positions of the same factor, and
* the positions of each factor appear in increasing order along the
  block sequence.

Block r is bound to the r-th smallest time variable of the ordered
simplex.  Enumeration runs the defining backward induction: the last
block is chosen among the per-factor maxima, removed, and the procedure
recurses on what is left; the collected choices are then reversed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import CapacityError, ConfigError

DEFAULT_RULE_CAP = 10


@dataclass(frozen=True)
class IdentificationRule:
    """Ordered partition ``(S_1, ..., S_k)`` of the global positions."""

    blocks: tuple[frozenset[int], ...]
    orders: tuple[int, ...]

    @property
    def ground_size(self) -> int:
        return sum(self.orders)

    @property
    def factor_runs(self) -> tuple[range, ...]:
        runs = []
        start = 1
        for m in self.orders:
            runs.append(range(start, start + m))
            start += m
        return tuple(runs)

    def factor_of(self, position: int) -> int:
        """0-based factor index owning a 1-based global position."""
        upper = 0
        for r, m in enumerate(self.orders):
            upper += m
            if position <= upper:
                return r
        raise ConfigError(f"position {position} outside 1..{self.ground_size}")

    def has_singleton(self) -> bool:
        return any(len(s) == 1 for s in self.blocks)

    def validate(self) -> None:
        seen: set[int] = set()
        for block in self.blocks:
            if not block:
                raise ConfigError("empty block in identification rule")
            if block & seen:
                raise ConfigError("blocks overlap")
            seen |= block
        if seen != set(range(1, self.ground_size + 1)):
            raise ConfigError("blocks do not cover all positions")
        for run in self.factor_runs:
            run_set = set(run)
            last = 0
            for block in self.blocks:
                hit = block & run_set
                if len(hit) > 1:
                    raise ConfigError("block holds two positions of one factor")
                if hit:
                    (pos,) = hit
                    if pos < last:
                        raise ConfigError("factor positions out of order across blocks")
                    last = pos

    def as_lists(self) -> list[list[int]]:
        return [sorted(block) for block in self.blocks]


def enumerate_rules(
    orders: Sequence[int],
    cap: int = DEFAULT_RULE_CAP,
    min_block_size: int = 1,
) -> list[IdentificationRule]:
    """All identification rules for the given factor orders.

    ``min_block_size=2`` restricts to rules without singleton blocks
    (blocks never grow once chosen, so pruning during the induction is
    exact).  Output order is deterministic: depth-first over the
    backward-induction choices, subsets of the available maxima in
    binary-counting order over the ascending position list.
    """
    orders = tuple(int(m) for m in orders)
    if not orders or any(m < 1 for m in orders):
        raise ConfigError(f"factor orders must be positive, got {orders!r}")
    total = sum(orders)
    if total > cap:
        raise CapacityError(f"ground set of size {total} exceeds cap {cap}")

    offsets = []
    start = 0
    for m in orders:
        offsets.append(start)
        start += m
    remaining = list(orders)
    chosen_last_first: list[frozenset[int]] = []
    rules: list[IdentificationRule] = []

    def recurse() -> None:
        avail = [offsets[r] + remaining[r] for r in range(len(orders)) if remaining[r] > 0]
        if not avail:
            rules.append(IdentificationRule(tuple(reversed(chosen_last_first)), orders))
            return
        for mask in range(1, 1 << len(avail)):
            subset = [avail[i] for i in range(len(avail)) if mask >> i & 1]
            if len(subset) < min_block_size:
                continue
            for pos in subset:
                remaining[_factor_index(offsets, pos)] -= 1
            chosen_last_first.append(frozenset(subset))
            recurse()
            chosen_last_first.pop()
            for pos in subset:
                remaining[_factor_index(offsets, pos)] += 1

    recurse()
    return rules


def _factor_index(offsets: list[int], position: int) -> int:
    for r in range(len(offsets) - 1, -1, -1):
        if position > offsets[r]:
            return r
    raise ConfigError(f"bad position {position}")


def filter_product(
    rules: Iterable[IdentificationRule], gaussian_positions: Iterable[int]
) -> list[IdentificationRule]:
    """Rules compatible with the given Brownian-position set in a product
    expansion: blocks inside the set must be pairs or singletons, all
    other blocks must avoid the set entirely."""
    b = frozenset(gaussian_positions)
    return [
        rule
        for rule in rules
        if all((s <= b and len(s) <= 2) or s.isdisjoint(b) for s in rule.blocks)
    ]


def filter_moment(
    rules: Iterable[IdentificationRule], gaussian_positions: Iterable[int]
) -> list[IdentificationRule]:
    """Rules contributing to a moment for the given Brownian-position set:
    blocks inside the set must be exact pairs, blocks outside must have
    at least two positions."""
    b = frozenset(gaussian_positions)
    return [
        rule
        for rule in rules
        if all(
            (s <= b and len(s) == 2) or (s.isdisjoint(b) and len(s) >= 2)
            for s in rule.blocks
        )
    ]


GAUSSIAN = "gauss"
JUMP = "jump"


@dataclass(frozen=True)
class BlockLabeling:
    """One Gaussian/jump assignment for the blocks of a singleton-free rule."""

    labels: tuple[str, ...]

    def induced_positions(self, rule: IdentificationRule) -> frozenset[int]:
        """The Brownian-position set this labeling corresponds to."""
        out: set[int] = set()
        for label, block in zip(self.labels, rule.blocks):
            if label == GAUSSIAN:
                out |= block
        return frozenset(out)


def moment_labelings(rule: IdentificationRule) -> list[BlockLabeling]:
    """Every admissible label vector for a rule without singleton blocks:
    pairs may be Gaussian or jump, larger blocks are jump only.  The
    induced position sets are exactly the Brownian sets for which the
    rule survives :func:`filter_moment`."""
    if rule.has_singleton():
        raise ConfigError("moment labelings need a rule without singleton blocks")
    choice_lists = [
        (GAUSSIAN, JUMP) if len(block) == 2 else (JUMP,) for block in rule.blocks
    ]
    labelings: list[BlockLabeling] = []
    stack: list[tuple[str, ...]] = [()]
    while stack:
        partial = stack.pop()
        depth = len(partial)
        if depth == len(rule.blocks):
            labelings.append(BlockLabeling(partial))
            continue
        for choice in reversed(choice_lists[depth]):
            stack.append(partial + (choice,))
    return labelings


def subsets(positions: Sequence[int]) -> Iterable[frozenset[int]]:
    """All subsets of a position collection (used by the literal-sum oracle)."""
    items = sorted(positions)
    for size in range(len(items) + 1):
        for combo in combinations(items, size):
            yield frozenset(combo)
