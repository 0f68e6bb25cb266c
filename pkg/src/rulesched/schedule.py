"""Schedules, coverage accounting and the penalised fitness.

Coverage and undercover matrices have shape ``(14, p)``; column ``s``
is band ``s + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractViolation
from .model import N_SLOTS, Instance

DEFAULT_W_DEMAND = 200.0


@dataclass(frozen=True)
class Schedule:
    """One pattern id per nurse, in nurse order."""

    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(j) for j in self.assignment))

    def __len__(self):
        return len(self.assignment)

    def __iter__(self):
        return iter(self.assignment)


def _assignment(inst: Instance, sched) -> tuple[int, ...]:
    a = sched.assignment if isinstance(sched, Schedule) else tuple(int(j) for j in sched)
    if len(a) != inst.n:
        raise ContractViolation(f"schedule has {len(a)} entries for {inst.n} nurses")
    for i, j in enumerate(a):
        f = inst.feasible_ids[i]
        # feasible_ids is sorted ascending
        pos = np.searchsorted(f, j)
        if pos >= len(f) or f[pos] != j:
            raise ContractViolation(f"nurse {i + 1}: pattern {j} not in feasible set")
    return a


def band_mask(grade: int, p: int) -> np.ndarray:
    """0/1 vector over bands, 1 where a nurse of ``grade`` qualifies."""
    return (np.arange(1, p + 1) >= grade).astype(np.int64)


def coverage(inst: Instance, sched) -> np.ndarray:
    """Tally (k, s): qualified nurses working slot k, counted per band s."""
    a = _assignment(inst, sched)
    tally = np.zeros((N_SLOTS, inst.p), dtype=np.int64)
    for i, j in enumerate(a):
        tally += np.outer(inst.cover_matrix[j - 1], band_mask(int(inst.grades[i]), inst.p))
    return tally


def preference_cost(inst: Instance, sched) -> float:
    a = _assignment(inst, sched)
    return float(sum(inst.pref_matrix[i, j - 1] for i, j in enumerate(a)))


def undercover(inst: Instance, tally: np.ndarray) -> np.ndarray:
    return np.maximum(inst.demand_matrix - np.asarray(tally), 0)


def fitness(inst: Instance, sched, w_demand: float = DEFAULT_W_DEMAND) -> float:
    """Preference cost plus ``w_demand`` per uncovered (slot, band) unit. Lower is better."""
    if not w_demand > 0:
        raise ValueError(f"w_demand must be > 0, got {w_demand}")
    missing = undercover(inst, coverage(inst, sched)).sum()
    return preference_cost(inst, sched) + float(w_demand) * float(missing)


def is_feasible(inst: Instance, sched) -> bool:
    return not undercover(inst, coverage(inst, sched)).any()
