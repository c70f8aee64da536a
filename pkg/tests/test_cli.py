import io
import json
import random
import subprocess
import sys

import pytest

from saq.cli import run

CUBE = "VARS 1\nSTEP 1 ; 1 ; ; 1 ; 0 ;\nFINAL 1 ; 0 ; 3\n"


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, buf.getvalue().strip()


def call_json(*argv):
    code, text = call(*argv)
    assert code == 0, text
    return json.loads(text)


def test_chi_example():
    assert call("chi", "-k", "3", "-d", "4") == (
        0, '{"formula":"chi","value":"24","params":{"k":"3","degs":["4"]},"annotations":[]}')


def test_refine_example():
    rec = call_json("line", "refine", "--sets", "[x1>=0]&[x1<1]")
    assert rec["partition"] == "{(-inf,0), [pt 0], (0,1), [pt 1], (1,inf)}"
    assert rec["cells"] == "5"


def test_census_check_example():
    assert call("line", "census", "--family", "x1;x1^2-1", "--check", "bpr8") == (
        0, '{"sum_b0":"7","bound":"16","ok":true}')


def test_line_records():
    rec = call_json("line", "boolean", "--sets", "[x1>=0]&[x1<1]")
    assert rec["components"] == ["{(-inf,0)}", "{[pt 0], (0,1)}", "{[pt 1], (1,inf)}"]
    assert call_json("line", "cdd", "--sets", "[x1>=0]&[x1<1]")["adapted"] is True
    rows = call_json("line", "census", "--family", "x1;x1^2-1")["rows"]
    assert len(rows) == 7 and rows[0] == {"sigma": "+,+", "b0": "1"}
    assert call_json("line", "endpoints", "--sets", "[x1>=0]&[x1<1]")["endpoints"] == ["pt 0", "pt 1"]


def test_bound_records():
    assert call_json("bound", "main", "-s", "2", "-d", "2", "--d0", "1", "-k", "1",
                     "--kprime", "1")["value"] == "56"
    assert call_json("bound", "bpr8", "-s", "2", "-d", "2", "-k", "1", "--kprime", "1")["value"] == "16"
    gp = call_json("bound", "gp", "-n", "3", "-d", "2", "--kt", "1")
    assert gp["value"] == "6" and gp["annotations"] == ["·O(1)^4"]


def test_formula_and_construct_records():
    assert call_json("formula", "dnf", "--formula", "!([x1>0]&[x2=0])")["formula"] == \
        "[x1 <= 0] | [x2 > 0] | [x2 < 0]"
    assert call_json("formula", "eval", "--formula", "[x1^2+x2^2-1<=0]",
                     "--point", "3/5,4/5")["value"] is True
    rec = call_json("construct", "dagger", "--formula", "[x1<=0]")
    assert rec["formula"] == "[-x2^2 - x1 = 0]" and rec["dim"] == "2"
    assert call_json("construct", "dagger", "--formula", "[x1<=0]", "--literal")["formula"] == \
        "[-x2^2 + x1 = 0]"


def test_sample_records():
    rec = call_json("sample", "grid", "--formula", "[x1^2+x2^2-1=0]", "--box", "-2,2;-2,2", "--step", "1")
    assert rec["points"] == [["-1", "0"], ["0", "-1"], ["0", "1"], ["1", "0"]]
    assert call_json("sample", "hausdorff", "--A", "0,0;1,0", "--B", "0,0")["d2"] == "1"


def test_slp_commands(tmp_path):
    path = tmp_path / "cube.slp"
    path.write_text(CUBE)
    assert call_json("slp", "expand", "--file", str(path))["polynomial"] == "x1^3 + 3*x1^2 + 3*x1 + 1"
    assert call_json("slp", "validate", "--file", str(path))["ok"] is True
    rec = call_json("slp", "reduce", "--file", str(path), "--formula", "[x1^3+3*x1^2+3*x1+1=0]")
    assert rec["formula"] == "[-x1 + x2 - 1 = 0] & [x2^3 = 0]" and rec["ambient"] == "2"


def test_human_mode():
    code, text = call("chi", "-k", "3", "-d", "4,2", "--human")
    assert code == 0
    assert text.splitlines()[:3] == ["formula: chi", "value: -16", "params: k=3, degs=4,2"]


def test_determinism():
    argv = ("line", "boolean", "--sets", "[x1^2-2<0];[x1>0]")
    assert call(*argv) == call(*argv)
    argv = ("sample", "tube-limit", "--P", "x1^4+x1^2*x2^2-x1^2", "--Q", "x1", "--F",
            "x1^3+x1*x2^2-x1", "--ts", "1/10,1/100", "--step", "1/10")
    assert call(*argv) == call(*argv)


@pytest.mark.parametrize("argv,code", [
    (["chi", "-k", "x", "-d", "1"], 1),
    (["nonsense"], 1),
    ([], 1),
    (["formula", "format", "--formula", "[x1>0"], 1),
    (["chi", "-k", "1", "-d", "1,2"], 2),
    (["bound", "gp", "-n", "1", "-d", "2", "--kt", "1"], 2),
    (["construct", "dagger", "--formula", "[x1>0]"], 2),
    (["slp", "validate", "--file", "/nonexistent/file"], 2),
    (["sample", "grid", "--formula", "[x1=0]", "--box", "0,1", "--step", "0"], 2),
    (["sample", "hausdorff", "--A", "0,0", "--B", ""], 2),
])
def test_exit_codes(argv, code):
    got, text = call(*argv)
    assert got == code
    err = json.loads(text)
    assert err["error"] == {1: "parse", 2: "precondition", 3: "resource"}[code]
    assert "\n" not in text


def test_resource_caps_from_environment(monkeypatch):
    monkeypatch.setenv("SAQ_LIMITS", "grid_cap=3")
    assert call("sample", "grid", "--formula", "[x1=0]", "--box", "0,5", "--step", "1")[0] == 3
    monkeypatch.setenv("SAQ_LIMITS", "clause_limit=2")
    assert call("formula", "dnf", "--formula", "([x1=0]|[x1=1])&([x1=2]|[x1=3])")[0] == 3
    monkeypatch.setenv("SAQ_LIMITS", "bogus")
    assert call("chi", "-k", "1", "-d", "1")[0] == 1


def _mutations(rng, argv):
    junk = ["", "-", "[", "]", "x9", "1/0", "-1", "abc", "[x1>", ";", ",,", "x1^", "99999999999",
            "[x1=0]&", "0,0;1", "--human"]
    out = list(argv)
    for _ in range(rng.randint(1, 3)):
        kind = rng.random()
        i = rng.randrange(len(out)) if out else 0
        if kind < 0.4 and out:
            out[i] = rng.choice(junk)
        elif kind < 0.7:
            out.insert(i, rng.choice(junk))
        elif out:
            del out[i]
    return out


SEEDS = [
    ["chi", "-k", "3", "-d", "4"],
    ["bound", "main", "-s", "2", "-d", "2", "--d0", "1", "-k", "1", "--kprime", "1"],
    ["bound", "formats", "-p", "1", "-k", "1", "-a", "2", "-s", "1", "-d", "2"],
    ["formula", "relax", "--formula", "[x1>0]", "--family", "x1", "--signs", "+"],
    ["formula", "eval", "--formula", "[x1>0]", "--point", "1"],
    ["construct", "tube", "--P", "x1^2-1", "--Q", "x1", "-R", "2"],
    ["construct", "star", "--formula", "[x1=0]", "-R", "1"],
    ["line", "census", "--family", "x1;x1^2-1"],
    ["line", "realize", "--formula", "[x1^2-2<0]"],
    ["sample", "grid", "--formula", "[x1^2+x2^2-1=0]", "--box", "-1,1;-1,1", "--step", "1/2"],
    ["sample", "hausdorff", "--A", "0,0", "--B", "1,1"],
]


def test_fuzz_never_crashes():
    rng = random.Random(0)
    for _ in range(400):
        argv = _mutations(rng, rng.choice(SEEDS))
        code, text = call(*argv)
        assert code in (0, 1, 2, 3), argv
        if code:
            assert json.loads(text)["error"] in ("parse", "precondition", "resource"), argv


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "saq.cli", "chi", "-k", "2", "-d", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == "0"
