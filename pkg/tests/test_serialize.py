"""Tagged JSON round trips, strict validation, and byte determinism."""

import json

import numpy as np
import pytest

from hullkit.discs import ConformalMinimalDisc, catalog, spinor_disc
from hullkit.envelope import Grid3
from hullkit.serialize import (
    FORMAT_TAG,
    ValidationError,
    dump_json,
    dumps,
    load_disc,
    load_field,
    load_function,
    load_point_cloud,
    load_report,
    parse_function,
    save_disc,
    save_field,
    save_point_cloud,
    save_report,
    to_jsonable,
    write_csv,
)


def test_point_cloud_round_trip_r3(tmp_path, circle_k):
    path = tmp_path / "cloud.json"
    save_point_cloud(circle_k, path, space="R3", name="circle")
    pts, space, name = load_point_cloud(path)
    assert space == "R3" and name == "circle"
    assert np.array_equal(pts, circle_k)


def test_point_cloud_round_trip_c3(tmp_path):
    path = tmp_path / "cloud6.json"
    pts = np.arange(12.0).reshape(2, 6)
    save_point_cloud(pts, path, space="C3")
    back, space, name = load_point_cloud(path)
    assert space == "C3" and name is None
    assert np.array_equal(back, pts)


def test_point_cloud_rejections(tmp_path):
    path = tmp_path / "bad.json"
    with pytest.raises(ValidationError):
        save_point_cloud(np.zeros((0, 3)), path)
    dump_json({"format": FORMAT_TAG, "kind": "point_cloud", "space": "R3", "points": [[0, 0, 0]], "bogus": 1}, path)
    with pytest.raises(ValidationError):
        load_point_cloud(path)
    dump_json({"format": "other/9", "kind": "point_cloud", "space": "R3", "points": [[0, 0, 0]]}, path)
    with pytest.raises(ValidationError):
        load_point_cloud(path)
    dump_json({"format": FORMAT_TAG, "kind": "point_cloud", "space": "R3", "points": [[0, 0]]}, path)
    with pytest.raises(ValidationError):
        load_point_cloud(path)


def test_nan_values_rejected(tmp_path):
    with pytest.raises(ValueError):
        dumps({"x": float("nan")})
    path = tmp_path / "nan.json"
    path.write_text('{"format": "hullkit/1", "kind": "point_cloud", "space": "R3", "points": [[0, 0, NaN]]}')
    with pytest.raises(ValueError):
        load_point_cloud(path)


def test_field_round_trip(tmp_path):
    gen = np.random.default_rng(6)
    grid = Grid3(
        lo=np.array([-2.0, -2.0, -2.0]),
        hi=np.array([2.0, 2.0, 2.0]),
        values=gen.standard_normal((5, 5, 5)),
        mask=gen.uniform(size=(5, 5, 5)) > 0.3,
    )
    path = tmp_path / "field.json"
    save_field(grid, path, extra={"threshold": 0.1})
    back = load_field(path)
    assert np.array_equal(back.values, grid.values)
    assert np.array_equal(back.mask, grid.mask)
    assert np.array_equal(back.lo, grid.lo) and np.array_equal(back.hi, grid.hi)


def test_disc_round_trip_preserves_spinors(tmp_path):
    disc = spinor_disc([1.0, 0.5j], [0.2, 1.0])
    path = tmp_path / "disc.json"
    save_disc(disc, path)
    back = load_disc(path)
    assert np.array_equal(back.coeffs, disc.coeffs)
    assert np.array_equal(back.spinor_a, disc.spinor_a)
    assert np.array_equal(back.spinor_b, disc.spinor_b)
    assert back.coefficient_nullity() <= 1e-14


def test_minimal_disc_round_trip_keeps_view(tmp_path):
    disc = catalog("enneper")
    path = tmp_path / "minimal.json"
    save_disc(disc, path)
    back = load_disc(path)
    assert isinstance(back, ConformalMinimalDisc)
    assert np.array_equal(back.lift.coeffs, disc.lift.coeffs)


def test_parse_function_poly3():
    doc = {"kind": "poly3", "space": "R3", "terms": [[[2, 0, 0], 1.0], [[0, 1, 1], -2.0]]}
    fn = parse_function(doc)
    pts = np.array([[1.0, 2.0, 3.0]])
    assert np.allclose(fn(pts), 1.0 - 12.0)


def test_parse_function_quadratic():
    doc = {
        "kind": "quadratic",
        "space": "R3",
        "a": np.eye(3).tolist(),
        "b": [0.0, 1.0, 0.0],
        "c": -1.0,
    }
    fn = parse_function(doc)
    assert abs(fn(np.array([1.0, 1.0, 0.0])) - (2.0 + 1.0 - 1.0)) <= 1e-15


def test_parse_function_rejects_unknown_kind():
    with pytest.raises(ValidationError):
        parse_function({"kind": "spline", "space": "R3"})


def test_load_function_round_trip(tmp_path):
    path = tmp_path / "fn.json"
    dump_json(
        {"format": FORMAT_TAG, "kind": "quadratic", "space": "R3", "a": np.diag([1.0, 1.0, -1.0]).tolist(), "b": [0.0] * 3, "c": 0.0},
        path,
    )
    fn = load_function(path)
    assert abs(fn(np.array([0.0, 0.0, 1.0])) + 1.0) <= 1e-15


def test_dumps_deterministic_and_typed():
    doc = {"b": np.float64(1.5), "a": np.arange(3), "z": 1 + 2j, "flag": np.bool_(True)}
    s1 = dumps(doc)
    s2 = dumps({"z": 1 + 2j, "a": np.arange(3), "flag": np.bool_(True), "b": np.float64(1.5)})
    assert s1 == s2
    parsed = json.loads(s1)
    assert parsed["z"] == [1.0, 2.0]
    assert parsed["a"] == [0, 1, 2]
    assert parsed["flag"] is True


def test_float_repr_round_trip():
    x = 0.1 + 0.2
    assert float(json.loads(dumps({"x": x}))["x"]) == x


def test_report_round_trip(tmp_path):
    payload = {"verdict": "PASS", "rows": [{"name": "abs_sq", "value": 4.0}]}
    path = tmp_path / "report.json"
    save_report(payload, path, kind="check")
    back = load_report(path, kind="check")
    assert back["verdict"] == "PASS"
    assert back["rows"][0]["value"] == 4.0
    with pytest.raises(ValidationError):
        load_report(path, kind="other")


def test_write_csv_values_round_trip(tmp_path):
    path = tmp_path / "table.csv"
    write_csv(path, ["name", "value"], [["row1", 0.1 + 0.2], ["row2", 1.0 / 3.0]])
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "name,value"
    assert float(lines[1].split(",")[1]) == 0.1 + 0.2
    assert float(lines[2].split(",")[1]) == 1.0 / 3.0
