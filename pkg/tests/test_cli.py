import io
import json
import subprocess
import sys

import pytest

from divram import __version__
from divram.cli import run

# every documented invocation, run with --check
DOCUMENTED = [
    (["eval", "--method", "prepared", "--poly", "[3,2,1]", "--domain", "4", "--x", "2"], "11"),
    (["eval", "--method", "horner", "--poly", "[3,2,1]", "--x", "2"], "11"),
    (["eval", "--method", "blocked", "--poly", "[1,0,1,1]", "--x", "5"], "151"),
    (["eval", "--method", "adaptive", "--poly", "[3,2,1]", "--x", "1000000"], "1000002000003"),
    (["eval-multi", "--poly", '[{"exponents": [1, 1], "coeff": "1"}]', "--d", "2",
      "--domain", "5", "--x", "[3, 4]"], "12"),
    (["eval-multi", "--method", "adaptive", "--poly", '[{"exponents": [1, 1], "coeff": "1"}]',
      "--d", "2", "--x", "[3, 4]"], "12"),
    (["seq", "--values", "[0,1,4,9]", "--query", "3"], "9"),
    (["seq", "--language", "[1,3]", "--N", "3", "--query", "3"], True),
    (["pow-tower", "--a", "3", "--k", "4"], "43046721"),
    (["matmul", "--a", "[[1,2],[3,4]]", "--b", "[[5,6],[7,8]]"], [["19", "22"], ["43", "50"]]),
    (["perm", "--method", "packed", "--matrix", "[[1,2],[3,4]]"], "10"),
    (["det", "--matrix", "[[2,0],[0,3]]"], "6"),
    (["matpow", "--matrix", "[[1,1],[0,1]]", "--k", "4"], [["1", "16"], ["0", "1"]]),
    (["crt", "--congruences", "[[1,2],[2,3],[3,5]]"], "23"),
    (["gcd-floor", "--d", "2", "--r", "10", "--s", "3"], None),
    (["prime", "--above", "1000", "--seed", "1"], None),
    (["threesum", "--x", "[1,5]", "--y", "[2,7]", "--z", "[8,20]"], True),
    (["newton", "--poly", "[-2,0,1]", "--bits", "20"], None),
    (["mills", "--n", "3"], "1361"),
    (["rho", "--poly", "[1,1]", "--m", "3", "--n", "0"], None),
    (["recurrence", "--poly", "[1,0,1]", "--c", "3"], None),
]


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("argv,expected", DOCUMENTED, ids=[" ".join(a[:3]) for a, _ in DOCUMENTED])
def test_documented_examples_with_check(argv, expected):
    code, out, err = invoke(argv + ["--check"])
    assert code == 0, err
    body = json.loads(out)
    assert body["check"] == "passed" and body["command"] == argv[0]
    assert set(body["tally"]) == {"counts", "total"}
    if expected is not None:
        assert body["value"] == expected


def test_value_is_string_for_big_integers():
    code, out, _ = invoke(["pow-tower", "--a", "2", "--k", "10"])
    assert code == 0 and json.loads(out)["value"] == str(2**1024)


def test_global_flags_before_or_after_subcommand():
    a = invoke(["--json", "mills", "--n", "2"])
    b = invoke(["mills", "--n", "2", "--json"])
    assert a[0] == b[0] == 0
    assert "\n" not in a[1].strip()
    assert json.loads(a[1])["value"] == json.loads(b[1])["value"] == "11"


def test_full_tally_lists_every_primitive():
    _, out, _ = invoke(["--tally", "eval", "--method", "horner", "--poly", "[1,1]", "--x", "3"])
    counts = json.loads(out)["tally"]["counts"]
    assert {"add", "sub", "mul", "div", "rem", "and", "gcd", "gcdex", "shift", "cmp"} <= set(counts)


def test_forbidden_division_exit_3():
    code, _, err = invoke(["eval", "--method", "prepared", "--ops", "+,-,*", "--poly", "[3,2,1]",
                           "--domain", "4", "--x", "2"])
    assert code == 3 and "div" in err


def test_precondition_exit_4_names_bound():
    code, _, err = invoke(["eval", "--method", "prepared", "--poly", "[3,2,1]", "--domain", "4",
                           "--x", "5"])
    assert code == 4 and "4" in err


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    ["eval", "--poly", "[1,", "--x", "1"],
    ["eval", "--poly", "[1]", "--x", "1", "--ops", "+,sqrt"],
    ["matmul", "--a", "[[1]]", "--b", '[["x"]]'],
])
def test_usage_errors_exit_2(argv):
    assert invoke(argv)[0] == 2


def test_seed_determinism():
    a = json.loads(invoke(["prime", "--above", str(2**64), "--seed", "5"])[1])
    b = json.loads(invoke(["prime", "--above", str(2**64), "--seed", "5"])[1])
    assert a["value"] == b["value"] and a["tally"] == b["tally"] and a["seed"] == 5


def test_validate_ranges_single_class():
    code, out, _ = invoke(["validate-ranges", "--class", "1"])
    body = json.loads(out)
    assert code == 0 and body["value"] is True
    assert body["classes"][0]["polynomials"] == 462


def test_bench_writes_csv():
    code, out, _ = invoke(["bench", "--class", "1", "--repeat", "1"])
    assert code == 0 and out.startswith("class,method,count,ns_per_eval\n")


def test_version_and_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "divram", "--version"], capture_output=True,
                          text=True, check=True)
    assert __version__ in proc.stdout and "cost model revision" in proc.stdout
