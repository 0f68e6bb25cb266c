"""Adapted classifier system: per-(nurse, rule) strengths with shared rewards.

A single solution evolves. Every iteration draws one rule per nurse by
roulette over that nurse's strengths, decodes, and pays the reward (or
the penalty) evenly to the nodes that built the solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import BaseScheduler, HistoryRow, SolverResult, check_instance
from .model import Instance
from .rules import N_RULES, DecodeParams, check_rule_string, evaluate_batch
from .schedule import DEFAULT_W_DEMAND, Schedule


@dataclass(frozen=True)
class AcsParams:
    initial_strength: float = 10.0
    reward: float = 3.0
    penalty: float | None = None  # defaults to ``reward``
    floor: float = 1.0
    max_iterations: int = 500
    seed: int = 0
    decode: DecodeParams = DecodeParams()

    def __post_init__(self):
        if not self.floor > 0:
            raise ValueError("floor must be > 0")
        if self.initial_strength < self.floor:
            raise ValueError("initial_strength must be >= floor")
        if not self.reward > 0:
            raise ValueError("reward must be > 0")
        if self.penalty is not None and self.penalty < 0:
            raise ValueError("penalty must be >= 0")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")


def initial_strengths(n: int, value: float = 10.0, r: int = N_RULES) -> np.ndarray:
    return np.full((n, r), float(value))


def select_rules(strengths: np.ndarray, rng) -> np.ndarray:
    """One 1-based rule per row, drawn proportionally to the row's strengths."""
    s = np.asarray(strengths, dtype=float)
    cum = np.cumsum(s, axis=1)
    u = rng.random(len(s)) * cum[:, -1]
    picks = (cum <= u[:, None]).sum(axis=1)
    return np.minimum(picks, s.shape[1] - 1) + 1


def update(strengths: np.ndarray, rs, improved: bool, reward: float,
           floor: float = 1.0) -> np.ndarray:
    """Return a new matrix with ``+-reward / n`` added to each node in ``rs``.

    Touched entries are clamped from below at ``floor``.
    """
    s = np.array(strengths, dtype=float)
    n = s.shape[0]
    rs = check_rule_string(rs, n)
    if n == 0:
        return s
    rows = np.arange(n)
    cols = np.asarray(rs) - 1
    delta = reward / n if improved else -reward / n
    s[rows, cols] = np.maximum(s[rows, cols] + delta, floor)
    return s


def run_acs(inst: Instance, params: AcsParams | None = None) -> SolverResult:
    """Single-solution strength learning.

    An iteration counts as improved only when its fitness is strictly lower
    than the previous iteration's. The initial random solution is rewarded.
    """
    params = params or AcsParams()
    inst = check_instance(inst)
    rng = np.random.default_rng(params.seed)
    dp = params.decode
    penalty = params.reward if params.penalty is None else params.penalty

    strengths = initial_strengths(inst.n, params.initial_strength)
    rs = rng.integers(1, N_RULES + 1, size=inst.n)
    assign, fit, under = evaluate_batch(inst, rs[None, :], dp)
    prev = float(fit[0])
    best = (prev, tuple(int(r) for r in rs), Schedule(tuple(assign[0].tolist())), under[0] == 0)
    strengths = update(strengths, rs, True, params.reward, params.floor)
    history = [HistoryRow(0, prev, prev, 1)]

    for t in range(1, params.max_iterations + 1):
        rs = select_rules(strengths, rng)
        assign, fit, under = evaluate_batch(inst, rs[None, :], dp)
        f = float(fit[0])
        improved = f < prev
        strengths = update(strengths, rs, improved, params.reward if improved else penalty,
                           params.floor)
        prev = f
        if f < best[0]:
            best = (f, tuple(int(r) for r in rs), Schedule(tuple(assign[0].tolist())),
                    under[0] == 0)
        history.append(HistoryRow(t, best[0], f, t + 1))

    return SolverResult(schedule=best[2], fitness=best[0], rule_string=best[1],
                        feasible=bool(best[3]), evaluations=params.max_iterations + 1,
                        history=history, model=strengths)


class ACSScheduler(BaseScheduler):
    """Estimator wrapper around :func:`run_acs`."""

    def __init__(self, initial_strength=10.0, reward=3.0, penalty=None, floor=1.0,
                 max_iterations=500, w_demand=DEFAULT_W_DEMAND, k_cheapest_len=5, w_p=1.0,
                 w_s=None, random_state=0):
        self.initial_strength = initial_strength
        self.reward = reward
        self.penalty = penalty
        self.floor = floor
        self.max_iterations = max_iterations
        self.w_demand = w_demand
        self.k_cheapest_len = k_cheapest_len
        self.w_p = w_p
        self.w_s = w_s
        self.random_state = random_state

    def _run(self, inst):
        dp = DecodeParams(k_cheapest_len=self.k_cheapest_len, w_p=self.w_p, w_s=self.w_s,
                          w_demand=self.w_demand, seed=self.random_state)
        params = AcsParams(initial_strength=self.initial_strength, reward=self.reward,
                           penalty=self.penalty, floor=self.floor,
                           max_iterations=self.max_iterations, seed=self.random_state,
                           decode=dp)
        result = run_acs(inst, params)
        self.strengths_ = result.model
        return result
