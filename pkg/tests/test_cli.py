import json

import pytest

from tablefold.cli import main

CSV = "name,age,continent\nAda,30,Asia\nBo,,Africa\nCy,25,Asia\n"


@pytest.fixture
def data_file(tmp_path):
    p = tmp_path / "data.csv"
    p.write_text(CSV)
    return p


class TestRender:
    def test_three_row_svg(self, tmp_path, data_file):
        out = tmp_path / "out.svg"
        code = main(["render", "--data", str(data_file), "--out", str(out)])
        assert code == 0
        svg = out.read_text()
        assert svg.count('class="row row-item"') == 3

    def test_deterministic(self, tmp_path, data_file):
        a = tmp_path / "a.svg"
        b = tmp_path / "b.svg"
        assert main(["render", "--data", str(data_file), "--out", str(a)]) == 0
        assert main(["render", "--data", str(data_file), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_with_state(self, tmp_path, data_file):
        state = {"state": {"grouping": [
            {"kind": "categorical", "column": "continent"}],
            "aggregated": [["Asia"]]}}
        sp = tmp_path / "state.json"
        sp.write_text(json.dumps(state))
        out = tmp_path / "out.svg"
        code = main(["render", "--data", str(data_file),
                     "--state", str(sp), "--out", str(out)])
        assert code == 0
        svg = out.read_text()
        assert svg.count('class="row row-group"') == 1
        assert svg.count('class="row row-item"') == 1

    def test_missing_file_exit_2(self, tmp_path):
        code = main(["render", "--data", str(tmp_path / "nope.csv"),
                     "--out", str(tmp_path / "o.svg")])
        assert code == 2


class TestExport:
    def test_round_trip(self, tmp_path, data_file):
        out = tmp_path / "out.csv"
        assert main(["export", "--data", str(data_file),
                     "--out", str(out)]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "name,age,continent"
        assert len(lines) == 4


class TestValidate:
    def test_ok(self, tmp_path):
        d = tmp_path / "desc.json"
        d.write_text(json.dumps({"columns": [{"id": "a", "kind": "numerical"}]}))
        assert main(["validate", "--descriptor", str(d)]) == 0

    def test_malformed_state_exit_1(self, tmp_path):
        s = tmp_path / "state.json"
        s.write_text(json.dumps({"state": {"mode": "sideways"}}))
        assert main(["validate", "--state", str(s)]) == 1

    def test_malformed_descriptor_exit_1(self, tmp_path):
        d = tmp_path / "desc.json"
        d.write_text(json.dumps({"columns": [{"id": "a"}]}))
        assert main(["validate", "--descriptor", str(d)]) == 1

    def test_bad_json_exit_1(self, tmp_path):
        d = tmp_path / "desc.json"
        d.write_text("{nope")
        assert main(["validate", "--descriptor", str(d)]) == 1

    def test_nothing_to_check(self):
        assert main(["validate"]) == 1


class TestServeConfig:
    def test_port_out_of_range(self):
        assert main(["serve", "--port", "70000"]) == 1
