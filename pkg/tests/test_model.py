import io
import json

import pytest
from hypothesis import given, strategies as st

from rulesched.exceptions import InfeasibleNurseError, InstanceError
from rulesched.model import (
    Instance,
    Nurse,
    ShiftPattern,
    feasible_set,
    instance_to_dict,
    load_instance,
    make_cover,
    qualifies,
    save_instance,
    validate,
)


def test_qualifies_examples():
    assert qualifies(Nurse(1, grade=1, days=1), 3)
    assert not qualifies(Nurse(1, grade=3, days=1), 1)
    assert qualifies(Nurse(1, grade=2, days=1), 2)


def test_qualifies_band_out_of_range():
    with pytest.raises(ValueError):
        qualifies(Nurse(1, grade=1, days=1), 0)
    with pytest.raises(ValueError):
        qualifies(Nurse(1, grade=1, days=1), 4, p=3)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6))
def test_qualifies_monotone_in_band(grade, s, s2):
    nurse = Nurse(1, grade=grade, days=1)
    lo, hi = sorted((s, s2))
    if qualifies(nurse, lo):
        assert qualifies(nurse, hi)


def test_feasible_set_tiny(tiny):
    for nurse in tiny.nurses:
        assert feasible_set(tiny, nurse) == (1, 2, 3)


def test_feasible_set_excludes_wrong_size():
    pats = (ShiftPattern(1, make_cover(days=(1, 2))), ShiftPattern(2, make_cover(days=(1, 2, 3))))
    inst = Instance("x", 1, pats, (Nurse(1, 1, days=2, pref_cost=(0.0, 0.0)),), [(0,)] * 14)
    assert feasible_set(inst, 1) == (1,)


def test_feasible_set_modes():
    pats = (
        ShiftPattern(1, make_cover(days=(1, 2))),
        ShiftPattern(2, make_cover(nights=(1, 2))),
        ShiftPattern(3, make_cover(days=(1,), nights=(1,))),
        ShiftPattern(4, make_cover(days=(1, 2, 3))),
    )
    costs = (0.0,) * 4
    nurses = (
        Nurse(1, 1, days=2, pref_cost=costs),
        Nurse(2, 1, nights=2, pref_cost=costs),
        Nurse(3, 1, both=2, pref_cost=costs),
    )
    inst = Instance("modes", 1, pats, nurses, [(0,)] * 14)
    assert feasible_set(inst, 1) == (1,)
    assert feasible_set(inst, 2) == (2,)
    assert feasible_set(inst, 3) == (1, 2, 3)
    # recompute the defining sums for every returned pattern
    for nurse in nurses:
        for j in feasible_set(inst, nurse):
            cover = pats[j - 1].cover
            if nurse.days:
                assert sum(cover[:7]) == nurse.days and sum(cover[7:]) == 0
            elif nurse.nights:
                assert sum(cover[7:]) == nurse.nights and sum(cover[:7]) == 0
            else:
                assert sum(cover) == nurse.both


def test_feasible_set_empty_raises():
    pats = (ShiftPattern(1, make_cover(days=(1,))),)
    inst = Instance("x", 1, pats, (Nurse(1, 1, nights=1, pref_cost=(0.0,)),), [(0,)] * 14)
    with pytest.raises(InfeasibleNurseError, match="nurse 1"):
        feasible_set(inst, 1)
    assert not validate(inst).ok


def test_validate_tiny(tiny):
    report = validate(tiny)
    assert report.ok, str(report)


def test_validate_cost_bound(tiny):
    d = instance_to_dict(tiny)
    d["nurses"][1]["pref_cost"][2] = 150
    report = validate(load_instance(json.dumps(d).encode()))
    assert not report.ok
    msg = str(report)
    assert "nurse 2" in msg and "pattern 3" in msg and "100" in msg


def test_validate_band_monotonicity(tiny):
    d = instance_to_dict(tiny)
    d["demand"][0] = [3, 1]
    report = validate(load_instance(json.dumps(d).encode()))
    assert any("band-monotonicity" in v for v in report.violations)


def test_validate_contract_modes():
    pats = (ShiftPattern(1, make_cover(days=(1,))),)
    inst = Instance("x", 1, pats, (Nurse(1, 1, days=1, nights=1, pref_cost=(0.0,)),), [(0,)] * 14)
    assert any("exactly one" in v for v in validate(inst).violations)


def test_validate_pattern_shape():
    pats = (ShiftPattern(1, (0,) * 14), ShiftPattern(3, (1,) * 13))
    inst = Instance("x", 1, pats, (), [(0,)] * 14)
    msgs = " ".join(validate(inst).violations)
    assert "covers no slot" in msgs and "expected 2" in msgs and "expected 14" in msgs


def test_round_trip(tiny):
    data = save_instance(tiny)
    back = load_instance(data)
    assert back == tiny
    assert save_instance(back) == data


def test_round_trip_streams(tiny, tmp_path):
    buf = io.BytesIO()
    save_instance(tiny, buf)
    assert load_instance(io.BytesIO(buf.getvalue())) == tiny
    path = tmp_path / "tiny.json"
    save_instance(tiny, path)
    assert load_instance(path) == tiny


def test_canonical_field_order(tiny):
    doc = json.loads(save_instance(tiny))
    assert list(doc) == ["name", "p", "patterns", "nurses", "demand"]
    assert list(doc["nurses"][0]) == ["id", "grade", "days", "nights", "both", "pref_cost"]


def test_truncated_document(tiny):
    data = save_instance(tiny)
    with pytest.raises(InstanceError, match="malformed"):
        load_instance(data[: len(data) // 2])


def test_demand_dimension_error(tiny):
    d = instance_to_dict(tiny)
    d["demand"] = d["demand"][:13]
    with pytest.raises(InstanceError) as err:
        load_instance(json.dumps(d).encode())
    assert err.value.path == "demand"


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d.update(extra=1), ""),
    (lambda d: d["nurses"][0].update(shoe_size=9), "nurses[0]"),
    (lambda d: d["patterns"][1]["cover"].pop(), "patterns[1].cover"),
    (lambda d: d["nurses"][2]["pref_cost"].append(5), "nurses[2].pref_cost"),
    (lambda d: d["nurses"][0].update(grade="high"), "nurses[0].grade"),
])
def test_parse_errors_carry_path(tiny, mutate, path):
    d = instance_to_dict(tiny)
    mutate(d)
    with pytest.raises(InstanceError) as err:
        load_instance(json.dumps(d).encode())
    assert err.value.path == path


def test_instances_are_immutable(tiny):
    with pytest.raises(AttributeError):
        tiny.p = 4
    with pytest.raises(ValueError):
        tiny.cover_matrix[0, 0] = 5
