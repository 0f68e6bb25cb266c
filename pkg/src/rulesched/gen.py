"""Synthetic instances with a planted feasible schedule."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import GenerationError
from .model import N_DAYS, N_SLOTS, Instance, Nurse, ShiftPattern
from .schedule import Schedule, coverage

# enumerating 1..6 days and 1..6 nights gives 252 patterns
HOSPITAL_SCALE_DAYS = (1, 2, 3, 4, 5, 6)
HOSPITAL_SCALE_NIGHTS = (1, 2, 3, 4, 5, 6)


@dataclass(frozen=True)
class GenSpec:
    n: int = 30
    p: int = 3
    days_values: tuple[int, ...] = (4, 5)
    nights_values: tuple[int, ...] = (3,)
    night_fraction: float = 0.2
    combined_fraction: float = 0.0
    grade_mix: tuple[float, ...] | None = None
    tightness: float = 0.9
    cost_low: int = 0
    cost_high: int = 100
    seed: int = 0
    name: str | None = None
    rounding: str = "floor"  # or "ceil"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not 0 < self.tightness <= 1:
            raise ValueError(f"tightness must lie in (0, 1], got {self.tightness}")
        if not 0 <= self.cost_low <= self.cost_high <= 100:
            raise ValueError("cost bounds must satisfy 0 <= low <= high <= 100")
        for v in (*self.days_values, *self.nights_values):
            if not 1 <= v <= N_DAYS:
                raise ValueError(f"shifts per week {v} outside 1..{N_DAYS}")
        fractions = (self.night_fraction, self.combined_fraction)
        if min(fractions) < 0 or sum(fractions) > 1:
            raise ValueError("night/combined fractions must be >= 0 and sum to <= 1")
        if self.rounding not in ("floor", "ceil"):
            raise ValueError(f"rounding must be 'floor' or 'ceil', got {self.rounding!r}")
        if self.grade_mix is not None and len(self.grade_mix) != self.p:
            raise ValueError(f"grade_mix needs {self.p} entries")

    def grade_probabilities(self) -> np.ndarray:
        if self.grade_mix is not None:
            mix = np.asarray(self.grade_mix, dtype=float)
        elif self.p == 3:
            mix = np.array([0.2, 0.3, 0.5])
        else:
            mix = np.ones(self.p)
        return mix / mix.sum()


def pattern_catalog(spec: GenSpec) -> tuple[ShiftPattern, ...]:
    """All day patterns with ``D`` of 7 days, then all night patterns with ``N`` of 7 nights."""
    covers: dict[tuple[int, ...], None] = {}
    for offset, values in ((0, spec.days_values), (N_DAYS, spec.nights_values)):
        for count in values:
            for slots in itertools.combinations(range(N_DAYS), count):
                cover = [0] * N_SLOTS
                for k in slots:
                    cover[offset + k] = 1
                covers.setdefault(tuple(cover))
    return tuple(ShiftPattern(id=j + 1, cover=c) for j, c in enumerate(covers))


def generate_with_plant(spec: GenSpec, rng=None) -> tuple[Instance, Schedule]:
    """Generate an instance and return the hidden schedule its demand came from.

    Demand per (slot, band) is ``tightness`` times the planted coverage,
    rounded down by default. Rounding up leaves no slack at all on cells
    covered by fewer than ``1 / (1 - tightness)`` nurses.
    """
    rng = np.random.default_rng(spec.seed if rng is None else rng)
    patterns = pattern_catalog(spec)
    m = len(patterns)
    day_sum = np.array([pat.n_days for pat in patterns])
    night_sum = np.array([pat.n_nights for pat in patterns])
    combined_values = tuple(sorted(set(spec.days_values) | set(spec.nights_values)))

    grades = rng.choice(np.arange(1, spec.p + 1), size=spec.n, p=spec.grade_probabilities())
    nurses, planted = [], []
    for i in range(spec.n):
        u = rng.random()
        days = nights = both = 0
        if u < spec.night_fraction:
            if not spec.nights_values:
                raise GenerationError("night workers requested but no night pattern sizes given")
            nights = int(rng.choice(spec.nights_values))
            mask = (night_sum == nights) & (day_sum == 0)
        elif u < spec.night_fraction + spec.combined_fraction:
            if not combined_values:
                raise GenerationError("combined workers requested but no pattern sizes given")
            both = int(rng.choice(combined_values))
            mask = (day_sum + night_sum) == both
        else:
            if not spec.days_values:
                raise GenerationError("day workers requested but no day pattern sizes given")
            days = int(rng.choice(spec.days_values))
            mask = (day_sum == days) & (night_sum == 0)
        feasible = np.flatnonzero(mask) + 1
        if len(feasible) == 0:
            raise GenerationError(f"nurse {i + 1} has no feasible pattern")
        planted.append(int(rng.choice(feasible)))
        costs = rng.integers(spec.cost_low, spec.cost_high + 1, size=m).astype(float)
        nurses.append(Nurse(id=i + 1, grade=int(grades[i]), days=days, nights=nights,
                            both=both, pref_cost=tuple(costs.tolist())))

    name = spec.name or f"gen-n{spec.n}-p{spec.p}-t{spec.tightness:g}-s{spec.seed}"
    zero = tuple((0,) * spec.p for _ in range(N_SLOTS))
    draft = Instance(name=name, p=spec.p, patterns=patterns, nurses=tuple(nurses), demand=zero)
    plant = Schedule(tuple(planted))
    # round first so 0.9 * 10 = 9.000000000000002 does not ceil to 10
    scaled = np.round(spec.tightness * coverage(draft, plant), 9)
    demand = (np.floor(scaled) if spec.rounding == "floor" else np.ceil(scaled)).astype(int)
    inst = Instance(name=name, p=spec.p, patterns=patterns, nurses=tuple(nurses),
                    demand=tuple(tuple(int(x) for x in row) for row in demand))
    return inst, plant


def generate(spec: GenSpec, rng=None) -> Instance:
    return generate_with_plant(spec, rng)[0]
