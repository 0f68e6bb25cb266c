"""Problem data: shift patterns, nurses, grade bands and demand.

Slots are numbered 1..14 in the external format (1..7 days, 8..14 nights)
and 0..13 internally. Grade 1 is the highest grade; a nurse of grade ``g``
counts toward every demand band ``s >= g``.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .exceptions import InfeasibleNurseError, InstanceError

N_SLOTS = 14
N_DAYS = 7
MAX_PREF_COST = 100.0


@dataclass(frozen=True)
class ShiftPattern:
    id: int
    cover: tuple[int, ...]

    @property
    def n_days(self) -> int:
        return sum(self.cover[:N_DAYS])

    @property
    def n_nights(self) -> int:
        return sum(self.cover[N_DAYS:])


@dataclass(frozen=True)
class Nurse:
    id: int
    grade: int
    days: int = 0
    nights: int = 0
    both: int = 0
    pref_cost: tuple[float, ...] = ()

    @property
    def mode(self) -> str | None:
        """Contract mode ``"day"``, ``"night"`` or ``"both"``; None if ambiguous."""
        active = [name for name, v in (("day", self.days), ("night", self.nights),
                                       ("both", self.both)) if v > 0]
        return active[0] if len(active) == 1 else None


@dataclass(frozen=True)
class Instance:
    name: str
    p: int
    patterns: tuple[ShiftPattern, ...]
    nurses: tuple[Nurse, ...]
    demand: tuple[tuple[int, ...], ...]  # 14 rows of p cumulative band demands

    def __post_init__(self):
        # accept lists from callers, store tuples so instances stay hashable
        object.__setattr__(self, "patterns", tuple(self.patterns))
        object.__setattr__(self, "nurses", tuple(self.nurses))
        object.__setattr__(self, "demand", tuple(tuple(row) for row in self.demand))

    @property
    def n(self) -> int:
        return len(self.nurses)

    @property
    def m(self) -> int:
        return len(self.patterns)

    # Cached numeric views. They are read-only and excluded from equality.

    @cached_property
    def cover_matrix(self) -> np.ndarray:
        """(m, 14) 0/1 matrix, row ``j`` is pattern ``j + 1``."""
        a = np.array([pat.cover for pat in self.patterns], dtype=np.int64).reshape(self.m, N_SLOTS)
        a.flags.writeable = False
        return a

    @cached_property
    def pref_matrix(self) -> np.ndarray:
        a = np.array([nurse.pref_cost for nurse in self.nurses], dtype=float).reshape(self.n, self.m)
        a.flags.writeable = False
        return a

    @cached_property
    def demand_matrix(self) -> np.ndarray:
        a = np.array(self.demand, dtype=np.int64).reshape(N_SLOTS, self.p)
        a.flags.writeable = False
        return a

    @cached_property
    def grades(self) -> np.ndarray:
        a = np.array([nurse.grade for nurse in self.nurses], dtype=np.int64)
        a.flags.writeable = False
        return a

    @cached_property
    def feasible_ids(self) -> tuple[np.ndarray, ...]:
        """Feasible pattern ids per nurse, possibly empty (no error raised)."""
        a = self.cover_matrix
        day_sum = a[:, :N_DAYS].sum(axis=1)
        night_sum = a[:, N_DAYS:].sum(axis=1)
        ids = np.array([pat.id for pat in self.patterns], dtype=np.int64)
        out = []
        for nurse in self.nurses:
            mode = nurse.mode
            if mode == "day":
                mask = (day_sum == nurse.days) & (night_sum == 0)
            elif mode == "night":
                mask = (night_sum == nurse.nights) & (day_sum == 0)
            elif mode == "both":
                mask = (day_sum + night_sum) == nurse.both
            else:
                mask = np.zeros(len(ids), dtype=bool)
            f = ids[mask]
            f.flags.writeable = False
            out.append(f)
        return tuple(out)

    @cached_property
    def feasible_covers(self) -> tuple[np.ndarray, ...]:
        """Per nurse, the (|F(i)|, 14) cover rows of its feasible patterns."""
        return tuple(self.cover_matrix[f - 1] for f in self.feasible_ids)

    @cached_property
    def feasible_costs(self) -> tuple[np.ndarray, ...]:
        return tuple(self.pref_matrix[i, f - 1] for i, f in enumerate(self.feasible_ids))

    @cached_property
    def cost_orders(self) -> tuple[np.ndarray, ...]:
        """Per nurse, positions into its feasible set sorted by (cost, id)."""
        return tuple(np.lexsort((f, c)) for f, c in zip(self.feasible_ids, self.feasible_costs))

    @cached_property
    def band_masks(self) -> np.ndarray:
        """(n, p) 0/1 matrix, entry (i, s) = 1 iff nurse i counts toward band s + 1."""
        return (np.arange(1, self.p + 1)[None, :] >= self.grades[:, None]).astype(np.int64)

    @cached_property
    def packed(self) -> "PackedFeasible":
        """Feasible sets concatenated in CSR layout for compiled kernels."""
        sizes = [len(f) for f in self.feasible_ids]
        ptr = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)

        def cat(parts, shape_tail, dtype):
            return (np.concatenate(parts).astype(dtype) if parts and ptr[-1]
                    else np.zeros((0, *shape_tail), dtype=dtype))

        return PackedFeasible(
            ptr=ptr,
            ids=cat(self.feasible_ids, (), np.int64),
            covers=cat(self.feasible_covers, (N_SLOTS,), np.int64),
            costs=cat(self.feasible_costs, (), np.float64),
            cost_order=cat(self.cost_orders, (), np.int64),
            grades=np.asarray(self.grades, dtype=np.int64),
            demand=np.ascontiguousarray(self.demand_matrix, dtype=np.int64),
        )


class PackedFeasible(NamedTuple):
    ptr: np.ndarray         # (n + 1,) offsets into the arrays below
    ids: np.ndarray         # pattern ids, ascending within each nurse
    covers: np.ndarray      # (total, 14)
    costs: np.ndarray
    cost_order: np.ndarray  # local positions sorted by (cost, id) within each nurse
    grades: np.ndarray
    demand: np.ndarray      # (14, p)


def qualifies(nurse: Nurse, band: int, p: int | None = None) -> bool:
    """True if ``nurse`` counts toward demand band ``band``.

    Pass ``p`` to range-check the band against the instance's grade count.
    """
    upper = p if p is not None else band
    if not 1 <= band <= upper:
        raise ValueError(f"band {band} outside 1..{upper}")
    return nurse.grade <= band


def feasible_set(inst: Instance, nurse: Nurse | int) -> tuple[int, ...]:
    """Pattern ids the nurse may work, ascending.

    ``nurse`` may be a :class:`Nurse` of ``inst`` or a 1-based nurse id.
    """
    idx = (nurse if isinstance(nurse, int) else nurse.id) - 1
    f = inst.feasible_ids[idx]
    if len(f) == 0:
        raise InfeasibleNurseError(idx + 1)
    return tuple(int(j) for j in f)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "valid"
        return "\n".join(self.violations)


def validate(inst: Instance) -> ValidationReport:
    """Collect every invariant violation; an empty report means valid."""
    v: list[str] = []
    if inst.p < 1:
        v.append(f"p: grade count {inst.p} must be >= 1")

    for j, pat in enumerate(inst.patterns):
        where = f"patterns[{j}]"
        if pat.id != j + 1:
            v.append(f"{where}.id: expected {j + 1}, got {pat.id}")
        if len(pat.cover) != N_SLOTS:
            v.append(f"{where}.cover: expected {N_SLOTS} entries, got {len(pat.cover)}")
        if any(c not in (0, 1) for c in pat.cover):
            v.append(f"{where}.cover: entries must be 0 or 1")
        elif not any(pat.cover):
            v.append(f"{where}.cover: pattern covers no slot")

    for i, nurse in enumerate(inst.nurses):
        where = f"nurses[{i}]"
        if nurse.id != i + 1:
            v.append(f"{where}.id: expected {i + 1}, got {nurse.id}")
        if not 1 <= nurse.grade <= max(inst.p, 1):
            v.append(f"{where}.grade: {nurse.grade} outside 1..{inst.p}")
        if min(nurse.days, nurse.nights, nurse.both) < 0:
            v.append(f"{where}: shift counts must be non-negative")
        if nurse.mode is None:
            v.append(f"{where}: exactly one of days/nights/both must be positive "
                     f"(got {nurse.days}/{nurse.nights}/{nurse.both})")
        if len(nurse.pref_cost) != inst.m:
            v.append(f"{where}.pref_cost: expected {inst.m} entries, got {len(nurse.pref_cost)}")
        for j, c in enumerate(nurse.pref_cost):
            if not (math.isfinite(c) and 0 <= c <= MAX_PREF_COST):
                v.append(f"{where}.pref_cost[{j}]: nurse {nurse.id} pattern {j + 1} "
                         f"cost {c} outside [0, {MAX_PREF_COST:g}]")

    if len(inst.demand) != N_SLOTS:
        v.append(f"demand: expected {N_SLOTS} rows, got {len(inst.demand)}")
    for k, row in enumerate(inst.demand):
        if len(row) != inst.p:
            v.append(f"demand[{k}]: expected {inst.p} bands, got {len(row)}")
            continue
        if any(r < 0 or r != int(r) for r in row):
            v.append(f"demand[{k}]: entries must be non-negative integers")
        for s in range(len(row) - 1):
            if row[s] > row[s + 1]:
                v.append(f"demand[{k}]: band-monotonicity violated, "
                         f"band {s + 1} = {row[s]} > band {s + 2} = {row[s + 1]}")

    # feasible sets only make sense once shapes are right
    if not v:
        for i, f in enumerate(inst.feasible_ids):
            if len(f) == 0:
                v.append(f"nurses[{i}]: nurse {i + 1} has an empty feasible set")
    return ValidationReport(tuple(v))


# -- JSON I/O ---------------------------------------------------------------

_TOP_FIELDS = ("name", "p", "patterns", "nurses", "demand")
_PATTERN_FIELDS = ("id", "cover")
_NURSE_FIELDS = ("id", "grade", "days", "nights", "both", "pref_cost")


def _check_fields(obj, expected, path):
    if not isinstance(obj, dict):
        raise InstanceError("expected an object", path)
    unknown = sorted(set(obj) - set(expected))
    if unknown:
        raise InstanceError(f"unknown field(s) {unknown}", path)
    missing = [f for f in expected if f not in obj]
    if missing:
        raise InstanceError(f"missing field(s) {missing}", path)


def _int(x, path):
    if isinstance(x, bool) or not isinstance(x, int):
        raise InstanceError(f"expected integer, got {x!r}", path)
    return x


def _number(x, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InstanceError(f"expected number, got {x!r}", path)
    return float(x)


def _list(x, path, length=None):
    if not isinstance(x, list):
        raise InstanceError(f"expected array, got {type(x).__name__}", path)
    if length is not None and len(x) != length:
        raise InstanceError(f"expected {length} entries, got {len(x)}", path)
    return x


def instance_from_dict(doc) -> Instance:
    _check_fields(doc, _TOP_FIELDS, "")
    name = doc["name"]
    if not isinstance(name, str):
        raise InstanceError("expected string", "name")
    p = _int(doc["p"], "p")

    patterns = []
    for j, raw in enumerate(_list(doc["patterns"], "patterns")):
        where = f"patterns[{j}]"
        _check_fields(raw, _PATTERN_FIELDS, where)
        cover = _list(raw["cover"], f"{where}.cover", N_SLOTS)
        patterns.append(ShiftPattern(
            id=_int(raw["id"], f"{where}.id"),
            cover=tuple(_int(c, f"{where}.cover[{k}]") for k, c in enumerate(cover)),
        ))
    m = len(patterns)

    nurses = []
    for i, raw in enumerate(_list(doc["nurses"], "nurses")):
        where = f"nurses[{i}]"
        _check_fields(raw, _NURSE_FIELDS, where)
        costs = _list(raw["pref_cost"], f"{where}.pref_cost", m)
        nurses.append(Nurse(
            id=_int(raw["id"], f"{where}.id"),
            grade=_int(raw["grade"], f"{where}.grade"),
            days=_int(raw["days"], f"{where}.days"),
            nights=_int(raw["nights"], f"{where}.nights"),
            both=_int(raw["both"], f"{where}.both"),
            pref_cost=tuple(_number(c, f"{where}.pref_cost[{j}]") for j, c in enumerate(costs)),
        ))

    demand = []
    for k, row in enumerate(_list(doc["demand"], "demand", N_SLOTS)):
        row = _list(row, f"demand[{k}]", p)
        demand.append(tuple(_int(r, f"demand[{k}][{s}]") for s, r in enumerate(row)))

    return Instance(name=name, p=p, patterns=tuple(patterns), nurses=tuple(nurses),
                    demand=tuple(demand))


def instance_to_dict(inst: Instance) -> dict:
    """Canonical document; key order is the documented field order."""
    return {
        "name": inst.name,
        "p": inst.p,
        "patterns": [{"id": pat.id, "cover": list(pat.cover)} for pat in inst.patterns],
        "nurses": [
            {"id": nu.id, "grade": nu.grade, "days": nu.days, "nights": nu.nights,
             "both": nu.both, "pref_cost": [float(c) for c in nu.pref_cost]}
            for nu in inst.nurses
        ],
        "demand": [list(row) for row in inst.demand],
    }


def load_instance(source) -> Instance:
    """Parse an instance from bytes, a binary/text stream, or a file path."""
    if hasattr(source, "read"):
        source = source.read()
    elif not isinstance(source, bytes):
        with open(source, "rb") as fh:
            source = fh.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceError(f"not UTF-8: {exc}") from None
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from None
    return instance_from_dict(doc)


def save_instance(inst: Instance, dest=None) -> bytes:
    """Serialize ``inst`` to canonical UTF-8 JSON; also write to ``dest`` if given."""
    data = (json.dumps(instance_to_dict(inst), indent=2) + "\n").encode("utf-8")
    if dest is not None:
        if isinstance(dest, io.IOBase) or hasattr(dest, "write"):
            dest.write(data)
        else:
            with open(dest, "wb") as fh:
                fh.write(data)
    return data


def make_cover(days=(), nights=()) -> tuple[int, ...]:
    """Build a 14-slot cover vector from 1-based day and night numbers (1..7)."""
    cover = [0] * N_SLOTS
    for d in days:
        cover[d - 1] = 1
    for d in nights:
        cover[N_DAYS + d - 1] = 1
    return tuple(cover)
