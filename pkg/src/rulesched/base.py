"""Solver results, input validation helpers and the estimator base class."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .exceptions import InstanceError
from .model import Instance, instance_from_dict, load_instance, validate
from .schedule import Schedule, fitness


def check_instance(inst) -> Instance:
    """Coerce ``inst`` (Instance, dict, path or JSON bytes) to a validated Instance."""
    if isinstance(inst, dict):
        inst = instance_from_dict(inst)
    elif isinstance(inst, (str, bytes, os.PathLike)):
        if isinstance(inst, str) and inst.lstrip().startswith("{"):
            inst = inst.encode("utf-8")
        inst = load_instance(inst)
    if not isinstance(inst, Instance):
        raise TypeError(f"expected an Instance, got {type(inst).__name__}")
    report = validate(inst)
    if not report.ok:
        raise InstanceError("invalid instance:\n" + str(report))
    return inst


def check_rng(seed) -> np.random.Generator:
    """Generator from an int seed, a SeedSequence, None or an existing Generator."""
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class HistoryRow:
    iteration: int
    best: float        # best-ever fitness after this iteration
    mean: float        # population mean (BOA) or current solution (ACS)
    evaluations: int


@dataclass
class SolverResult:
    schedule: Schedule
    fitness: float
    rule_string: tuple[int, ...]
    feasible: bool
    evaluations: int
    history: list[HistoryRow] = field(default_factory=list)
    model: Any = None  # final ChainBayesNet or strength matrix

    @property
    def best_trajectory(self) -> np.ndarray:
        return np.array([row.best for row in self.history])


class BaseScheduler(BaseEstimator):
    """Estimator-style wrapper: ``fit`` searches, ``predict`` returns the best schedule.

    Subclasses implement ``_run(instance) -> SolverResult``.
    """

    def fit(self, X, y=None):
        inst = check_instance(X)
        result = self._run(inst)
        self.result_ = result
        self.best_schedule_ = result.schedule
        self.best_fitness_ = result.fitness
        self.best_rule_string_ = result.rule_string
        self.history_ = result.history
        self.n_evaluations_ = result.evaluations
        self.instance_name_ = inst.name
        return self

    def predict(self, X=None):
        """Best assignment found, as an array of pattern ids (one per nurse)."""
        check_is_fitted(self, "best_schedule_")
        if X is not None:
            inst = check_instance(X)
            if inst.name != self.instance_name_ or inst.n != len(self.best_schedule_):
                raise ValueError("predict called with a different instance than fit")
        return np.array(self.best_schedule_.assignment, dtype=np.int64)

    def score(self, X, y=None):
        """Negated fitness of the fitted schedule on ``X`` (higher is better)."""
        check_is_fitted(self, "best_schedule_")
        return -fitness(check_instance(X), self.best_schedule_, self.w_demand)
