import csv
import io
import json
import math

import pytest

from loewnerball import PolyMap2, koebe_field, make_field
from loewnerball.cli import main
from loewnerball.herglotz import FieldPiece
from loewnerball.serialize import (SchemaError, canonical_dumps, dumps_field, dumps_map,
                                   field_from_dict, loads, map_from_dict)


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def sample_field():
    a = PolyMap2.from_terms(4, {(0, 2): 1.5 - 0.25j, (3, 1): 1e-17}, {(2, 0): -0.1}, linear=-1.0)
    b = PolyMap2.from_terms(4, {(2, 0): 1 / 3}, linear=-1.0)
    return make_field([FieldPiece(0.0, a), FieldPiece(2.5, b)])


class TestSerialization:
    def test_field_round_trip_is_byte_exact(self):
        text = dumps_field(sample_field())
        assert dumps_field(field_from_dict(loads(text))) == text

    def test_map_round_trip_is_byte_exact(self):
        f = PolyMap2.from_terms(5, {(0, 2): 3 * math.sqrt(3) / 2, (1, 1): -0.0}, {(4, 1): 1e-300j})
        text = dumps_map(f)
        assert dumps_map(map_from_dict(loads(text))) == text

    def test_canonical_form(self):
        assert canonical_dumps({"b": [1, 0.1, -0.0, True, None], "a": "x"}) == \
            '{"a": "x", "b": [1, 0.10000000000000001, 0, true, null]}'

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            canonical_dumps({"x": float("nan")})

    def test_koebe_is_written_truncated(self):
        d = json.loads(dumps_field(koebe_field(3)))
        assert [t["alpha"] for t in d["pieces"][0]["terms"]] == [[2, 0], [3, 0]]

    @pytest.mark.parametrize("doc, msg", [
        ({"pieces": []}, "missing required key 'truncation_degree'"),
        ({"truncation_degree": "3", "pieces": []}, "expected integer"),
        ({"truncation_degree": 3, "pieces": [{"t_start": 0, "terms": [{"component": 3}]}]},
         r"\$.pieces\[0\].terms\[0\].component"),
        ({"truncation_degree": 2, "pieces": [{"t_start": 0, "terms": [
            {"component": 1, "alpha": [2, 1], "re": 1, "im": 0}]}]}, "exceeds truncation degree"),
        ({"truncation_degree": 2, "pieces": [{"t_start": 0, "terms": [
            {"component": 1, "alpha": [1, 0], "re": 2, "im": 0}]}]}, "contradicts implied value"),
        ({"truncation_degree": 2, "pieces": [{"t_start": 0, "terms": [
            {"component": 1, "alpha": [0, 2], "re": 1}]}]}, "missing required key 'im'"),
    ])
    def test_schema_errors(self, doc, msg):
        with pytest.raises(SchemaError, match=msg):
            field_from_dict(doc)

    def test_bad_json_reports_position(self):
        with pytest.raises(SchemaError, match="line 2, column"):
            loads('{\n  "a": }')


class TestCommands:
    def test_bounds_table(self, capsys):
        code, out = run(capsys, "bounds", "--m", "2..6")
        rows = json.loads(out)
        assert code == 0 and [r["m"] for r in rows] == [2, 3, 4, 5, 6]
        assert abs(rows[0]["closed_form"] - 2.598076) < 1e-6

    def test_bounds_csv(self, capsys):
        code, out = run(capsys, "bounds", "--m", "2,4", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and rows[1]["m"] == "4" and float(rows[1]["abs_err"]) < 1e-6

    def test_check_field_linear(self, capsys):
        code, out = run(capsys, "check-field", "--field", "linear")
        rep = json.loads(out)
        assert code == 0 and rep["passed"] and rep["worst_value"] < 0

    def test_check_field_from_file(self, capsys, tmp_path):
        # a written Koebe field is its truncation, which leaves the class once |z1| reaches 0.8
        path = tmp_path / "koebe.json"
        path.write_text(dumps_field(koebe_field()))
        code, out = run(capsys, "check-field", "--field", str(path), "--radial", "5", "--r-max", "0.7")
        assert code == 0 and json.loads(out)["passed"]
        code, out = run(capsys, "check-field", "--field", str(path))
        rep = json.loads(out)
        assert code == 0 and not rep["passed"] and rep["worst_value"] > 1

    def test_check_field_failure_has_witness(self, capsys, tmp_path):
        path = tmp_path / "big.json"
        path.write_text(dumps_field(make_field(PolyMap2.from_terms(8, {(0, 2): 3.0}, linear=-1.0))))
        code, out = run(capsys, "check-field", "--field", str(path))
        rep = json.loads(out)
        assert code == 0 and not rep["passed"] and len(rep["witness"]) == 2

    def test_coeffs_koebe(self, capsys):
        code, out = run(capsys, "coeffs", "--field", "koebe", "--degree", "3", "--T", "25")
        rep = json.loads(out)
        b20 = next(t for t in rep["terms"] if t["component"] == 1 and t["alpha"] == [2, 0])
        assert code == 0 and abs(abs(complex(b20["re"], b20["im"])) - 2) < 1e-3
        assert rep["diagnostics"]["tail_estimate"] <= 1e-6

    def test_coeffs_aligned(self, capsys):
        code, out = run(capsys, "coeffs", "--field", "koebe", "--degree", "3", "--T", "25", "--align", "1:2,0")
        b20 = next(t for t in json.loads(out)["terms"] if t["alpha"] == [2, 0])
        assert code == 0 and abs(b20["re"] - 2) < 1e-3 and abs(b20["im"]) < 1e-12

    def test_coeffs_convergence_failure(self, capsys):
        code, out = run(capsys, "coeffs", "--field", "koebe", "--degree", "3", "--T", "4")
        rep = json.loads(out)
        assert code == 2 and "horizon" in rep["diagnostics"]["error"]
        assert rep["diagnostics"]["worst"]["component"] == 1

    def test_coeffs_output_reloads(self, capsys, tmp_path):
        out = tmp_path / "map.json"
        code, _ = run(capsys, "coeffs", "--field", "pure_z2m:2", "--degree", "3", "-o", str(out))
        f = map_from_dict(json.loads(out.read_text()))
        assert code == 0 and abs(f.comp1[0, 2] - 3 * math.sqrt(3) / 2) < 1e-5

    def test_coeffs_csv(self, capsys):
        code, out = run(capsys, "coeffs", "--field", "koebe", "--degree", "2", "--T", "1", "--format", "csv")
        lines = out.splitlines()
        assert code == 0 and lines[0].startswith("t,j,alpha1") and len(lines) == 1 + 201 * 12

    def test_decouple(self, capsys):
        code, out = run(capsys, "decouple", "--field", "koebe", "--degree", "4", "--k1", "1", "--k2", "0")
        assert code == 0 and json.loads(out)["pieces"][0]["terms"] == []

    def test_slice_koebe(self, capsys):
        code, out = run(capsys, "slice", "--field", "koebe", "--v", "1,0", "--order", "4")
        rep = json.loads(out)
        assert code == 0 and [c["re"] for c in rep["c"]] == [2, 2, 2, 2]
        assert rep["coeff_bound"]["boundary"] == [1, 2, 3, 4]
        assert all(t["passed"] for t in rep["toeplitz"])

    def test_evolve(self, capsys):
        code, out = run(capsys, "evolve", "--field", "linear", "--T", "1", "--samples", "2",
                        "--point", "0.5,0", "--step", "0.01")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 3
        assert abs(float(rows[-1]["re_z1"]) - 0.5 * math.exp(-1)) < 1e-10

    def test_squeeze_linear(self, capsys):
        code, out = run(capsys, "squeeze", "--field", "linear", "--a", "0.99", "--radial", "4")
        rep = json.loads(out)
        assert code == 0 and rep["margin"] == -1 and rep["squeezing"]

    def test_shear_radius(self, capsys):
        code, out = run(capsys, "shear-radius", "--a", "1")
        assert code == 0 and abs(json.loads(out)["radius"] - 2.598076) < 1e-6


class TestErrors:
    def test_unknown_field(self, capsys):
        code, out = run(capsys, "check-field", "--field", "nope.json")
        assert code == 1 and json.loads(out)["kind"] == "SchemaError"

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"truncation_degree": 3,\n "pieces": [}')
        code, out = run(capsys, "decouple", "--field", str(path), "--k1", "0", "--k2", "1")
        assert code == 1 and "line 2" in json.loads(out)["error"]

    def test_bad_normalization_in_file(self, capsys, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(json.dumps({"truncation_degree": 2, "pieces": [{"t_start": 1.0, "terms": []}]}))
        code, out = run(capsys, "check-field", "--field", str(path))
        assert code == 1 and "t=0" in json.loads(out)["error"]

    def test_shear_radius_zero(self, capsys):
        code, out = run(capsys, "shear-radius", "--a", "0")
        assert code == 1 and json.loads(out)["kind"] == "ParameterError"

    def test_csv_error_stays_csv(self, capsys):
        code, out = run(capsys, "bounds", "--m", "1..2", "--format", "csv")
        assert code == 1 and out.startswith("error,kind")

    def test_bad_range(self, capsys):
        code, _ = run(capsys, "bounds", "--m", "x")
        assert code == 1

    def test_bad_align(self, capsys):
        code, _ = run(capsys, "coeffs", "--field", "linear", "--degree", "2", "--align", "1:x")
        assert code == 1

    def test_usage_errors_exit_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1
