"""Exhaustive ground truth for small instances."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .base import check_instance
from .exceptions import CapacityError
from .model import Instance
from .rules import N_RULES, DecodeParams, evaluate
from .schedule import DEFAULT_W_DEMAND, Schedule, band_mask


@dataclass(frozen=True)
class OracleLimits:
    max_search_space: int = 10**7

    def __post_init__(self):
        if self.max_search_space < 1:
            raise ValueError("max_search_space must be positive")


def assignment_space(inst: Instance) -> int:
    return math.prod(len(f) for f in inst.feasible_ids)


def exact_optimum(inst: Instance, w_demand: float = DEFAULT_W_DEMAND,
                  limits: OracleLimits | None = None, prune: bool = True) -> tuple[Schedule, float]:
    """Global minimiser of the penalised fitness by depth-first enumeration.

    Branches whose partial preference cost already reaches the incumbent are
    cut (the penalty is never negative). Patterns are tried in ascending id
    order and only strict improvements replace the incumbent, so ties resolve
    to the lexicographically smallest assignment.
    """
    if not w_demand > 0:
        raise ValueError(f"w_demand must be > 0, got {w_demand}")
    inst = check_instance(inst)
    limits = limits or OracleLimits()
    size = assignment_space(inst)
    if size > limits.max_search_space:
        raise CapacityError(size, limits.max_search_space)

    n = inst.n
    demand = inst.demand_matrix.ravel().astype(np.int64)
    feasible = inst.feasible_ids
    costs = [inst.pref_matrix[i, feasible[i] - 1] for i in range(n)]
    contrib = [
        [np.outer(inst.cover_matrix[j - 1], band_mask(int(inst.grades[i]), inst.p)).ravel()
         for j in feasible[i]]
        for i in range(n)
    ]

    best_f = math.inf
    best_a: tuple[int, ...] = ()
    chosen = [0] * n
    tally = np.zeros_like(demand)

    def dfs(i, partial):
        nonlocal best_f, best_a
        if prune and partial >= best_f:
            return
        if i == n:
            f = partial + w_demand * float(np.maximum(demand - tally, 0).sum())
            if f < best_f:
                best_f = f
                best_a = tuple(chosen)
            return
        for idx, j in enumerate(feasible[i]):
            chosen[i] = int(j)
            np.add(tally, contrib[i][idx], out=tally)
            dfs(i + 1, partial + float(costs[i][idx]))
            np.subtract(tally, contrib[i][idx], out=tally)

    dfs(0, 0.0)
    return Schedule(best_a), float(best_f)


def exhaustive_rule_strings(inst: Instance, params: DecodeParams | None = None,
                            limits: OracleLimits | None = None) -> tuple[tuple[int, ...], float]:
    """Best rule string over all ``4 ** n`` strings, each decoded with ``params.seed``.

    Ties resolve to the lexicographically smallest string.
    """
    params = params or DecodeParams()
    inst = check_instance(inst)
    limits = limits or OracleLimits()
    size = N_RULES ** inst.n
    if size > limits.max_search_space:
        raise CapacityError(size, limits.max_search_space)

    best_f, best_rs = math.inf, ()
    for rs in itertools.product(range(1, N_RULES + 1), repeat=inst.n):
        f = evaluate(inst, rs, params)[1]
        if f < best_f:
            best_f, best_rs = f, rs
    return best_rs, float(best_f)
