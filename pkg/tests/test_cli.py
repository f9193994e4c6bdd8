import json

import pytest

from corpus import rainfall_doc, workforce_doc

from lish.cli import run
from lish.model import parse_json, serialize_json


@pytest.fixture
def files(tmp_path):
    good = tmp_path / "rain.lish.json"
    good.write_bytes(serialize_json(rainfall_doc()))
    bad = tmp_path / "bad.lish.json"
    bad.write_bytes(b'{"version":1,"mode":"relaxed","root":[[null,null],[1,2,3]]}')
    work = tmp_path / "work.lish.json"
    work.write_bytes(serialize_json(workforce_doc()))
    return {"good": str(good), "bad": str(bad), "work": str(work), "dir": tmp_path}


class TestValidate:
    def test_valid_file(self, files):
        out, err, code = run(["validate", files["good"]])
        assert (out, err, code) == (b"", b"", 0)

    def test_invalid_file(self, files):
        out, err, code = run(["validate", files["bad"]])
        assert code == 1 and out == b""
        lines = err.decode().splitlines()
        assert len(lines) == 1
        assert "[1]" in lines[0] and "length-mismatch" in lines[0]

    def test_missing_file(self, files):
        out, err, code = run(["validate", str(files["dir"] / "nope.lish.json")])
        assert code == 2 and b"error" in err

    def test_unparseable_file(self, files, tmp_path):
        junk = tmp_path / "junk.lish.json"
        junk.write_bytes(b"not json")
        out, err, code = run(["validate", str(junk)])
        assert code == 2

    def test_unknown_subcommand(self):
        out, err, code = run(["frobnicate"])
        assert code == 2 and out == b"" and err

    def test_strict_mode_env(self, files, monkeypatch, tmp_path):
        doc = tmp_path / "f.lish.json"
        doc.write_bytes(b'{"version":1,"mode":"relaxed","root":[null,{"v":1,"f":"=x"}]}')
        assert run(["validate", str(doc)])[2] == 0
        monkeypatch.setenv("LISH_MODE", "strict")
        out, err, code = run(["validate", str(doc)])
        assert code == 1 and b"strict-formula-placement" in err


class TestQueries:
    def test_governed(self, files):
        out, err, code = run(["governed", files["good"], "--path", "0,2,0"])
        assert code == 0 and err == b""
        paths = json.loads(out)
        assert len(paths) == 6
        assert paths == sorted(paths)
        assert [1, 2, 1] in paths

    def test_margins(self, files):
        out, _, code = run(["margins", files["good"], "--path", "1,2,1"])
        assert code == 0
        assert json.loads(out)[0] == [0, 2, 1]

    def test_formula(self, files, tmp_path):
        script = tmp_path / "s.json"
        script.write_text(json.dumps([{"cmd": "set_formula", "path": [0, 2, 0], "text": "=avg"}]))
        out, _, code = run(["apply", files["good"], "--script", str(script)])
        assert code == 0
        edited = tmp_path / "edited.lish.json"
        edited.write_bytes(out)
        out, _, code = run(["formula", str(edited), "--path", "1,2,1"])
        assert code == 0
        resolution = json.loads(out)
        assert resolution["formula"] == "=avg"
        assert resolution["source"] == [0, 2, 0]
        assert resolution["specificity"] == 2

    def test_bad_path_is_usage_error(self, files):
        assert run(["governed", files["good"], "--path", "9,9"])[2] == 2
        assert run(["governed", files["good"], "--path", "x"])[2] == 2


class TestTransforms:
    def test_fmt_canonicalises(self, files, tmp_path):
        messy = tmp_path / "messy.lish.json"
        messy.write_bytes(b'{"mode": "relaxed", "version": 1, "root": [{"v": 1, "f": null}, 2]}')
        out, err, code = run(["fmt", str(messy)])
        assert code == 0
        assert out == b'{"version":1,"mode":"relaxed","root":[1,2]}\n'

    def test_fmt_keeps_broken_documents_inspectable(self, files):
        out, err, code = run(["fmt", files["bad"]])
        assert code == 0 and b'"root":[[null,null],[1,2,3]]' in out
        assert b"validation problem" in err

    def test_import_csv(self, tmp_path):
        csv_file = tmp_path / "data.csv"
        csv_file.write_text("a,b\n1,2\n")
        out, _, code = run(["import-csv", str(csv_file)])
        assert code == 0
        doc = parse_json(out)
        assert run(["validate", "-"], stdin=out)[2] == 0
        assert doc.root.elements[1].elements[2].value == "b"

    def test_render(self, files):
        out, err, code = run(["render", files["good"]])
        assert code == 0
        lines = out.decode().splitlines()
        assert len(lines) == 12
        assert "{{London}}" in lines[3]

    def test_render_width_cap(self, files):
        out, _, code = run(["render", files["work"], "--width", "6"])
        assert code == 0 and "12 Ne…" in out.decode()

    def test_layout(self, files):
        out, _, code = run(["layout", files["good"]])
        placements = json.loads(out)
        assert len(placements) == 60
        assert placements[0] == {"path": [0, 0, 0], "x": 0, "y": 0, "cs": 1, "rs": 1, "depth": 3}

    def test_apply_failure_is_atomic(self, files, tmp_path):
        script = tmp_path / "s.json"
        script.write_text(json.dumps([{"cmd": "delete_element", "path": [1, 0]}]))
        out, err, code = run(["apply", files["good"], "--script", str(script)])
        assert code == 1 and out == b"" and b"error" in err

    def test_stdin_pipe(self, files):
        data = open(files["good"], "rb").read()
        out, err, code = run(["fmt", "-"], stdin=data)
        assert code == 0 and out.strip() == data


class TestDeterminism:
    def test_identical_runs(self, files):
        first = run(["layout", files["good"]])
        second = run(["layout", files["good"]])
        assert first == second

    def test_machine_output_separated(self, files):
        out, err, _ = run(["governed", files["good"], "--path", "0,2,0"])
        json.loads(out)  # stdout is pure JSON
        assert err == b""
