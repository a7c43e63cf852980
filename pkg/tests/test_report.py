import json
import math

import numpy as np
import pandas as pd
import pytest

from report import Report, fmt_value, jsonable, write_output


@pytest.fixture
def report():
    rep = Report("Demo", {"k_opt": 39, "eff": 1.9312345678, "threshold": math.inf, "ok": True})
    rep.add_table("rows", pd.DataFrame({"k": [1, 39], "eff": [1.0, 1.9312345678]}))
    grid = pd.DataFrame([[1.234, np.nan]], index=pd.Index([10.0], name="theta"),
                        columns=pd.Index([0.5, 0.9], name="rho"))
    rep.add_table("grid", grid, float_format="%.2f", show_index=True)
    return rep


class TestValues:
    def test_jsonable(self):
        assert jsonable(np.int64(3)) == 3 and type(jsonable(np.int64(3))) is int
        assert jsonable(np.float64(0.5)) == 0.5
        assert jsonable(math.inf) is None
        assert jsonable(pd.NA) is None
        assert jsonable(np.bool_(True)) is True
        assert jsonable((1, 2.5)) == [1, 2.5]

    def test_fmt_value(self):
        assert fmt_value(1.9312345678) == "1.93123"
        assert fmt_value(181612) == "181612"
        assert fmt_value(None) == "NA"
        assert fmt_value(float("nan")) == "NA"
        assert fmt_value(False) == "no"


class TestRender:
    def test_text(self, report):
        out = report.render("text")
        assert "Demo" in out
        assert "1.93123" in out
        assert "1.23" in out and "NA" in out
        assert "1.9312345678" not in out

    def test_csv(self, report):
        out = report.render("csv")
        assert out.startswith("key,value\n")
        assert "# rows\n" in out
        assert "theta,0.5,0.9" in out
        assert "10,1.23,NA" in out

    def test_json_keeps_precision(self, report):
        d = json.loads(report.render("json"))
        assert d["summary"]["eff"] == 1.9312345678
        assert d["summary"]["threshold"] is None
        assert d["tables"]["rows"]["data"][1] == [39, 1.9312345678]
        assert d["tables"]["grid"]["index"] == [10.0]
        assert d["tables"]["grid"]["data"] == [[1.234, None]]

    def test_json_round_trip(self, report):
        d = report.to_dict()
        assert json.loads(json.dumps(d)) == d

    def test_unknown_format(self, report):
        with pytest.raises(ValueError):
            report.render("xml")


class TestWriteOutput:
    def test_stdout(self, capsys):
        write_output("hello\n")
        assert capsys.readouterr().out == "hello\n"

    def test_file_creates_folder(self, tmp_path):
        target = tmp_path / "sub" / "r.json"
        write_output("{}", str(target))
        assert target.read_text() == "{}"
