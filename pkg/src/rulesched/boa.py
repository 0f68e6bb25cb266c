"""Chain Bayesian-network optimisation over rule strings.

Each nurse position is a node whose only parent is the previous position.
The network is re-estimated every generation from roulette-selected rule
strings and sampled to produce offspring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .base import BaseScheduler, HistoryRow, SolverResult, check_instance
from .model import Instance
from .rules import N_RULES, DecodeParams, evaluate_batch
from .schedule import DEFAULT_W_DEMAND, Schedule


def _cumulative(probs: np.ndarray) -> np.ndarray:
    """Cumulative sums along the last axis, pinned to 1.0 from the last
    positive entry on so zero-probability tails can never be drawn."""
    cum = np.cumsum(probs, axis=-1)
    positive = probs > 0
    last = probs.shape[-1] - 1 - np.argmax(positive[..., ::-1], axis=-1)
    cols = np.arange(probs.shape[-1])
    return np.where(cols >= last[..., None], 1.0, cum)


@dataclass
class ChainBayesNet:
    root: np.ndarray                     # (r,)
    cond: np.ndarray                     # (n - 1, r, r); cond[i, a, b] = P(pos i+1 = b | pos i = a)
    _cum_root: np.ndarray = field(init=False, repr=False)
    _cum_cond: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.root = np.asarray(self.root, dtype=float)
        self.cond = np.asarray(self.cond, dtype=float).reshape(-1, len(self.root), len(self.root))
        self._cum_root = _cumulative(self.root)
        self._cum_cond = _cumulative(self.cond) if self.cond.size else self.cond

    @property
    def n(self) -> int:
        return self.cond.shape[0] + 1

    @property
    def r(self) -> int:
        return len(self.root)

    def probability(self, rs) -> float:
        """Joint probability of a rule string (1-based rule ids)."""
        idx = np.asarray(rs, dtype=np.int64) - 1
        prob = self.root[idx[0]]
        for i in range(len(idx) - 1):
            prob *= self.cond[i, idx[i], idx[i + 1]]
        return float(prob)

    @classmethod
    def uniform(cls, n: int, r: int = N_RULES) -> "ChainBayesNet":
        return cls(np.full(r, 1 / r), np.full((max(n - 1, 0), r, r), 1 / r))


def estimate(selected, alpha: float = 1.0, r: int = N_RULES) -> ChainBayesNet:
    """Frequency estimate of the chain network with additive smoothing ``alpha``.

    Parent rows that were never visited (zero count with ``alpha == 0``)
    fall back to the uniform distribution.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    if len(selected) == 0:
        raise ValueError("cannot estimate from an empty selection")
    lengths = {len(rs) for rs in selected}
    if len(lengths) != 1:
        raise ValueError(f"rule strings differ in length: {sorted(lengths)}")
    a = np.asarray(selected, dtype=np.int64) - 1
    t, n = a.shape
    if n == 0:
        return ChainBayesNet(np.full(r, 1 / r), np.zeros((0, r, r)))
    if a.min() < 0 or a.max() >= r:
        raise ValueError(f"rule ids must lie in 1..{r}")

    root = (np.bincount(a[:, 0], minlength=r) + alpha) / (t + r * alpha)

    counts = np.zeros((n - 1, r, r))
    if n > 1:
        pos = np.broadcast_to(np.arange(n - 1), (t, n - 1))
        np.add.at(counts, (pos, a[:, :-1], a[:, 1:]), 1)
    num = counts + alpha
    den = num.sum(axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(den > 0, num / np.where(den > 0, den, 1), 1 / r)
    return ChainBayesNet(root, cond)


def sample(net: ChainBayesNet, rng, size: int | None = None) -> np.ndarray:
    """Draw rule strings position by position (roulette wheel per node).

    Returns a length-n array of 1-based rule ids, or ``(size, n)`` if
    ``size`` is given.
    """
    k = 1 if size is None else size
    n = net.n if net.r else 0
    out = np.empty((k, n), dtype=np.int64)
    if n:
        u = rng.random((k, n))
        out[:, 0] = (net._cum_root[None, :] <= u[:, :1]).sum(axis=1)
        for i in range(n - 1):
            cum = net._cum_cond[i, out[:, i]]
            out[:, i + 1] = (cum <= u[:, i + 1:i + 2]).sum(axis=1)
    out += 1
    return out[0] if size is None else out


def selection_weights(fitnesses, delta: float = 1.0) -> np.ndarray:
    """Minimisation weights ``(worst - f) + delta``."""
    f = np.asarray(fitnesses, dtype=float)
    return (f.max() - f) + delta


def select(population, count: int, rng, delta: float = 1.0) -> list:
    """Roulette-wheel selection with replacement from ``(rule_string, fitness)`` pairs."""
    if len(population) == 0:
        raise ValueError("cannot select from an empty population")
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    fits = [f for _, f in population]
    if not all(math.isfinite(f) for f in fits):
        raise ValueError("fitness values must be finite")
    w = selection_weights(fits, delta)
    idx = rng.choice(len(population), size=count, p=w / w.sum())
    return [population[i][0] for i in idx]


@dataclass(frozen=True)
class BoaParams:
    pop_size: int = 140
    select_count: int = 70
    offspring_count: int = 70
    smoothing: float = 1.0
    delta: float = 1.0
    max_iterations: int = 200
    eval_budget: int | None = None
    seed: int = 0
    decode: DecodeParams = DecodeParams()
    stop_when_feasible: bool = False

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        if not 1 <= self.select_count <= self.pop_size:
            raise ValueError("select_count must lie in 1..pop_size")
        if not 1 <= self.offspring_count <= self.pop_size:
            raise ValueError("offspring_count must lie in 1..pop_size")
        if self.smoothing < 0:
            raise ValueError("smoothing must be >= 0")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.eval_budget is not None and self.eval_budget < 1:
            raise ValueError("eval_budget must be >= 1")


def run_boa(inst: Instance, params: BoaParams | None = None) -> SolverResult:
    """Evolve a population of rule strings with the chain network.

    Each generation selects ``select_count`` strings by roulette wheel,
    re-estimates the network, samples ``offspring_count`` new strings and
    lets them replace the worst members of the population.
    """
    params = params or BoaParams()
    inst = check_instance(inst)
    rng = np.random.default_rng(params.seed)
    dp = params.decode
    budget = params.eval_budget if params.eval_budget is not None else math.inf
    n = inst.n

    evals = 0
    best = None  # (fitness, rule string, schedule, feasible)

    def evaluate_all(strings):
        nonlocal evals, best
        assign, fits, under = evaluate_batch(inst, strings, dp)
        evals += len(strings)
        b = int(np.argmin(fits))
        if best is None or fits[b] < best[0]:
            best = (float(fits[b]), tuple(int(r) for r in strings[b]),
                    Schedule(tuple(assign[b].tolist())), bool(under[b] == 0))
        return fits

    pop = rng.integers(1, N_RULES + 1, size=(int(min(params.pop_size, budget)), n))
    fits = evaluate_all(pop)
    history = [HistoryRow(0, best[0], float(fits.mean()), evals)]
    net = None

    for t in range(1, params.max_iterations + 1):
        if params.stop_when_feasible and best[3]:
            break
        k = int(min(params.offspring_count, budget - evals, len(pop)))
        if k <= 0:
            break
        selected = select(list(zip(pop, fits)), params.select_count, rng, params.delta)
        net = estimate(selected, params.smoothing)
        offspring = sample(net, rng, size=k)
        child_fits = evaluate_all(offspring)
        worst = np.argsort(fits, kind="stable")[len(fits) - k:]
        pop[worst] = offspring
        fits[worst] = child_fits
        history.append(HistoryRow(t, best[0], float(fits.mean()), evals))

    return SolverResult(schedule=best[2], fitness=best[0], rule_string=best[1],
                        feasible=best[3], evaluations=evals, history=history, model=net)


class BOAScheduler(BaseScheduler):
    """Estimator wrapper around :func:`run_boa`.

    Parameters mirror :class:`BoaParams` and :class:`DecodeParams`;
    ``random_state`` is the run seed.
    """

    def __init__(self, pop_size=140, select_count=70, offspring_count=70, smoothing=1.0,
                 delta=1.0, max_iterations=200, eval_budget=None, stop_when_feasible=False,
                 w_demand=DEFAULT_W_DEMAND, k_cheapest_len=5, w_p=1.0, w_s=None,
                 random_state=0):
        self.pop_size = pop_size
        self.select_count = select_count
        self.offspring_count = offspring_count
        self.smoothing = smoothing
        self.delta = delta
        self.max_iterations = max_iterations
        self.eval_budget = eval_budget
        self.stop_when_feasible = stop_when_feasible
        self.w_demand = w_demand
        self.k_cheapest_len = k_cheapest_len
        self.w_p = w_p
        self.w_s = w_s
        self.random_state = random_state

    def _run(self, inst):
        dp = DecodeParams(k_cheapest_len=self.k_cheapest_len, w_p=self.w_p, w_s=self.w_s,
                          w_demand=self.w_demand, seed=self.random_state)
        params = BoaParams(pop_size=self.pop_size, select_count=self.select_count,
                           offspring_count=self.offspring_count, smoothing=self.smoothing,
                           delta=self.delta, max_iterations=self.max_iterations,
                           eval_budget=self.eval_budget, seed=self.random_state, decode=dp,
                           stop_when_feasible=self.stop_when_feasible)
        result = run_boa(inst, params)
        self.network_ = result.model
        return result
