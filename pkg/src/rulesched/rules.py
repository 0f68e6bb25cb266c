"""Construction rules and the rule-string decoder.

A rule string holds one :class:`RuleId` per nurse. Decoding walks the
nurses in instance order and lets each nurse's rule pick a pattern from
its feasible set, given the coverage built so far.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from ._kernel import decode_batch
from .exceptions import InfeasibleNurseError
from .model import N_SLOTS, Instance, Nurse
from .schedule import DEFAULT_W_DEMAND, Schedule


class RuleId(IntEnum):
    RANDOM = 1
    K_CHEAPEST = 2
    COVER = 3
    CONTRIBUTION = 4


N_RULES = len(RuleId)


@dataclass(frozen=True)
class DecodeParams:
    k_cheapest_len: int = 5
    w_p: float = 1.0
    w_s: tuple[float, ...] | None = None
    w_demand: float = DEFAULT_W_DEMAND
    seed: int = 0

    def __post_init__(self):
        if self.k_cheapest_len < 1:
            raise ValueError(f"k_cheapest_len must be >= 1, got {self.k_cheapest_len}")
        if self.w_p < 0 or (self.w_s is not None and min(self.w_s, default=0) < 0):
            raise ValueError("rule weights must be non-negative")
        if not self.w_demand > 0:
            raise ValueError(f"w_demand must be > 0, got {self.w_demand}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.w_s is not None:
            object.__setattr__(self, "w_s", tuple(float(w) for w in self.w_s))

    def band_weights(self, p: int) -> np.ndarray:
        """Per-band cover weights, truncated or extended (halving) to ``p`` bands."""
        w = list(self.w_s) if self.w_s else [4.0]
        while len(w) < p:
            w.append(w[-1] / 2)
        return np.array(w[:p], dtype=float)


class BuildState:
    """Partial schedule plus its running coverage tally."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.assignment: list[int] = []
        self.tally = np.zeros((N_SLOTS, inst.p), dtype=np.int64)
        self._remaining = inst.demand_matrix.copy()  # demand minus tally, may go negative

    @property
    def undercover(self) -> np.ndarray:
        return np.maximum(self._remaining, 0)

    @property
    def needed(self) -> np.ndarray:
        """Boolean (14, p): slot/band cells still short of demand."""
        return self._remaining > 0

    @property
    def next_nurse(self) -> Nurse:
        return self.inst.nurses[len(self.assignment)]

    def assign(self, pattern_id: int):
        i = len(self.assignment)
        add = np.outer(self.inst.cover_matrix[pattern_id - 1], self.inst.band_masks[i])
        self.tally += add
        self._remaining -= add
        self.assignment.append(int(pattern_id))

    def preference_cost(self) -> float:
        pref = self.inst.pref_matrix
        return float(sum(pref[i, j - 1] for i, j in enumerate(self.assignment)))

    def fitness(self, w_demand: float = DEFAULT_W_DEMAND) -> float:
        return self.preference_cost() + float(w_demand) * float(self.undercover.sum())


def _feasible(state: BuildState, nurse: Nurse) -> int:
    i = nurse.id - 1
    if len(state.inst.feasible_ids[i]) == 0:
        raise InfeasibleNurseError(nurse.id)
    return i


def _pick_random(state: BuildState, nurse: Nurse, u: float) -> int:
    f = state.inst.feasible_ids[_feasible(state, nurse)]
    return int(f[min(int(u * len(f)), len(f) - 1)])


def _pick_k_cheapest(state: BuildState, nurse: Nurse, k: int, u: float) -> int:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    i = _feasible(state, nurse)
    kk = min(k, len(state.inst.feasible_ids[i]))
    pick = state.inst.cost_orders[i][min(int(u * kk), kk - 1)]
    return int(state.inst.feasible_ids[i][pick])


def apply_random(state: BuildState, nurse: Nurse, rng) -> int:
    """Uniform draw over the nurse's feasible set (consumes one uniform from ``rng``)."""
    return _pick_random(state, nurse, rng.random())


def apply_k_cheapest(state: BuildState, nurse: Nurse, k: int, rng) -> int:
    """Uniform draw among the ``k`` cheapest feasible patterns (ties by id)."""
    return _pick_k_cheapest(state, nurse, k, rng.random())


def apply_cover(state: BuildState, nurse: Nurse) -> int:
    """Pattern covering most still-uncovered slots of the active band.

    The active band is the nurse's own grade, or the next lower one while
    the higher bands have nothing left uncovered.
    """
    i = _feasible(state, nurse)
    inst = state.inst
    order = inst.cost_orders[i]
    needed = state.needed
    open_bands = np.flatnonzero(needed[:, nurse.grade - 1:].any(axis=0))
    if len(open_bands) == 0:
        return int(inst.feasible_ids[i][order[0]])
    active = nurse.grade - 1 + open_bands[0]
    score = inst.feasible_covers[i][order] @ needed[:, active]
    # argmax takes the first maximum, i.e. the cheapest, then lowest id
    return int(inst.feasible_ids[i][order[np.argmax(score)]])


def contribution_scores(state: BuildState, nurse: Nurse, params: DecodeParams) -> tuple[np.ndarray, np.ndarray]:
    """Feasible ids and their preference-plus-cover scores."""
    i = _feasible(state, nurse)
    inst = state.inst
    slot_weight = state.needed @ (params.band_weights(inst.p) * inst.band_masks[i])
    scores = params.w_p * (100.0 - inst.feasible_costs[i]) + inst.feasible_covers[i] @ slot_weight
    return inst.feasible_ids[i], scores


def apply_contribution(state: BuildState, nurse: Nurse, params: DecodeParams) -> int:
    f, scores = contribution_scores(state, nurse, params)
    return int(f[np.argmax(scores)])


def apply_rule(state: BuildState, rule: int, params: DecodeParams, u: float) -> int:
    """Pick a pattern for the next nurse with ``rule`` and commit it to ``state``.

    ``u`` is the nurse's uniform draw; deterministic rules ignore it.
    """
    nurse = state.next_nurse
    if rule == RuleId.RANDOM:
        j = _pick_random(state, nurse, u)
    elif rule == RuleId.K_CHEAPEST:
        j = _pick_k_cheapest(state, nurse, params.k_cheapest_len, u)
    elif rule == RuleId.COVER:
        j = apply_cover(state, nurse)
    elif rule == RuleId.CONTRIBUTION:
        j = apply_contribution(state, nurse, params)
    else:
        raise ValueError(f"unknown rule id {rule!r}")
    state.assign(j)
    return j


def check_rule_string(rs, n: int) -> tuple[int, ...]:
    rs = tuple(int(r) for r in rs)
    if len(rs) != n:
        raise ValueError(f"rule string has length {len(rs)}, expected {n}")
    bad = [r for r in rs if not 1 <= r <= N_RULES]
    if bad:
        raise ValueError(f"unknown rule id(s) {sorted(set(bad))}")
    return rs


def _check_feasible_sets(inst: Instance):
    for i, f in enumerate(inst.feasible_ids):
        if len(f) == 0:
            raise InfeasibleNurseError(i + 1)


_DIGITS_PER_WORD = 31  # base-4 digits packed into one 62-bit entropy word


def string_uniforms(rule_strings, seed: int) -> np.ndarray:
    """Per-nurse uniforms for each rule string, shape ``(K, n)``.

    Each string gets its own stream seeded from ``(seed, n, string)``, so a
    decode depends only on the string and the seed. Two different strings
    never share a stream, and re-decoding a string reproduces it exactly.
    """
    rules = np.asarray(rule_strings, dtype=np.int64)
    k, n = rules.shape
    pad = -n % _DIGITS_PER_WORD
    digits = np.pad(rules - 1, ((0, 0), (0, pad))).reshape(k, -1, _DIGITS_PER_WORD)
    powers = np.uint64(4) ** np.arange(_DIGITS_PER_WORD, dtype=np.uint64)
    words = (digits.astype(np.uint64) * powers).sum(axis=-1, dtype=np.uint64)
    out = np.empty((k, n))
    for row in range(k):
        entropy = [int(seed), n, *map(int, words[row])]
        out[row] = np.random.default_rng(entropy).random(n)
    return out


def build_state(inst: Instance, rs, params: DecodeParams | None = None) -> BuildState:
    """Decode ``rs`` nurse by nurse through :class:`BuildState`.

    Slow reference path; :func:`decode` gives identical results.
    """
    params = params or DecodeParams()
    rs = check_rule_string(rs, inst.n)
    u = string_uniforms([rs], params.seed)[0]
    state = BuildState(inst)
    for i, rule in enumerate(rs):
        apply_rule(state, rule, params, u[i])
    return state


def evaluate_batch(inst: Instance, rule_strings, params: DecodeParams | None = None):
    """Decode and score many rule strings at once.

    Returns ``(assignments (K, n), fitness (K,), undercover totals (K,))``.
    Row ``i`` equals ``evaluate(inst, rule_strings[i], params)``.
    """
    params = params or DecodeParams()
    rules = np.asarray(rule_strings, dtype=np.int64)
    if rules.ndim != 2 or rules.shape[1] != inst.n:
        raise ValueError(f"expected rule strings of length {inst.n}, got shape {rules.shape}")
    if rules.size and (rules.min() < 1 or rules.max() > N_RULES):
        raise ValueError(f"rule ids must lie in 1..{N_RULES}")
    _check_feasible_sets(inst)
    u = string_uniforms(rules, params.seed)
    pk = inst.packed
    assign, pref, under = decode_batch(
        rules, u, pk.ptr, pk.ids, pk.covers, pk.costs, pk.cost_order, pk.grades, pk.demand,
        params.k_cheapest_len, float(params.w_p), params.band_weights(inst.p),
    )
    return assign, pref + float(params.w_demand) * under, under


def evaluate(inst: Instance, rs, params: DecodeParams | None = None) -> tuple[Schedule, float]:
    """Decode one rule string and return ``(schedule, fitness)``."""
    rs = check_rule_string(rs, inst.n)
    assign, fit, _ = evaluate_batch(inst, [rs], params)
    return Schedule(tuple(assign[0].tolist())), float(fit[0])


def decode(inst: Instance, rs, params: DecodeParams | None = None) -> Schedule:
    """Map a rule string to a schedule.

    The result depends only on (instance, rule string, params), so the
    stochastic rules behave as a fixed function of the string for a given
    ``params.seed``.
    """
    return evaluate(inst, rs, params)[0]
