import json
from fractions import Fraction

import pytest
from hypothesis import given

from named import diamond, fib, nowhere_dense, period3, square, triangle
from strategies import relations
from svfentropy.core import FiniteRelation
from svfentropy.interval import IntervalSVF, graphs_equal
from svfentropy.io import (SpecError, bundled_names, bundled_path, parse_spec, spec_from_dict,
                           spec_from_relation, spec_to_dict, write_spec)


def test_bundled_systems_are_listed():
    assert set(bundled_names()) >= {"fibonacci.json", "full.json", "period3.json", "diamond.json",
                                    "example63.json", "triangle.json", "square.json"}


@pytest.mark.parametrize("name", ["fibonacci", "full", "period3"])
def test_bundled_finite_systems_load(name):
    F = parse_spec(bundled_path(name)).build()
    assert isinstance(F, FiniteRelation) and F.adj.any(axis=1).all()


def test_bundled_systems_match_named_constructions():
    assert parse_spec("fibonacci").build() == fib()
    assert parse_spec("period3.json").build() == period3()
    for name, G in (("diamond", diamond()), ("example63", nowhere_dense()),
                    ("triangle", triangle()), ("square", square())):
        F = parse_spec(name).build()
        assert isinstance(F, IntervalSVF) and graphs_equal(F, G)


def test_bundled_grids():
    assert parse_spec("diamond").grid == 257
    assert parse_spec("example63").grid == 65


@pytest.mark.parametrize("name", bundled_names())
def test_bundled_round_trip(name, tmp_path):
    spec = parse_spec(name)
    again = parse_spec(write_spec(spec, tmp_path / name))
    assert again == spec


def test_empty_image_is_rejected_with_location():
    data = {"kind": "finite", "labels": ["a", "b"], "adjacency": [["b"], []]}
    with pytest.raises(SpecError, match=r"adjacency\[1\].*empty") as exc:
        spec_from_dict(data, "bad.json")
    assert exc.value.where == "bad.json.adjacency[1]"


def test_unknown_label_in_image_is_rejected():
    data = {"kind": "finite", "labels": ["a"], "adjacency": [["z"]]}
    with pytest.raises(SpecError, match="adjacency"):
        spec_from_dict(data)


def test_interval_slice_gap_is_rejected():
    data = {"kind": "interval", "segments": [[[0, 0], ["1/2", 0]], [["3/4", 0], [1, 1]]]}
    with pytest.raises(SpecError, match="empty near"):
        spec_from_dict(data, "gap.json")


def test_bad_json_reports_line_and_column(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "kind": "finite",\n  "labels": [0, 1\n}\n')
    with pytest.raises(SpecError) as exc:
        parse_spec(p)
    assert exc.value.where.startswith("broken.json:4:")


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        parse_spec("/nonexistent/system.json")


def test_unknown_field_and_kind():
    with pytest.raises(SpecError, match="unknown field"):
        spec_from_dict({"kind": "finite", "labels": [0], "adjacency": [[0]], "colour": 1})
    with pytest.raises(SpecError, match="kind"):
        spec_from_dict({"kind": "graph"})


def test_coords_and_dist_are_exclusive():
    with pytest.raises(SpecError, match="either"):
        spec_from_dict({"kind": "finite", "labels": [0], "coords": [0], "dist": [[0]],
                        "adjacency": [[0]]})


def test_rational_strings_are_exact():
    spec = spec_from_dict({"kind": "interval", "segments": [[["0", "1/3"], ["1", "1/3"]]]})
    assert spec.segments[0][0][1] == Fraction(1, 3)
    with pytest.raises(SpecError, match="number"):
        spec_from_dict({"kind": "interval", "segments": [[["0", "x"], ["1", "0"]]]})


def test_normalization_scale_recorded():
    spec = spec_from_dict({"kind": "finite", "labels": ["a", "b", "c"], "coords": [0, 1, 4],
                           "adjacency": [["b"], ["c"], ["a"]]})
    assert spec.scale == 4
    F = spec.build()
    assert F.space.coords == (0, Fraction(1, 4), 1)


def test_dist_matrix_spec():
    spec = spec_from_dict({"kind": "finite", "labels": ["a", "b"], "dist": [[0, 2], [2, 0]],
                           "adjacency": {"a": ["b"], "b": ["a", "b"]}})
    F = spec.build()
    assert F.space.dist[0, 1] == 1.0 and spec.scale == 2


def test_output_numbers_are_strings():
    out = spec_to_dict(parse_spec("period3"))
    assert out["coords"] == ["0", "1/3", "2/3", "1"]
    json.dumps(out)


@given(relations(max_points=5))
def test_relation_round_trip(F):
    spec = spec_from_relation(F)
    again = spec_from_dict(json.loads(json.dumps(spec_to_dict(spec))))
    assert again == spec
    assert again.build() == F
