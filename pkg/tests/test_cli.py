"""CLI: grammar, JSON reports, exit codes, determinism."""

import json

import pytest

from opecalc import cli


def run_cli(capsys, argv):
    code = cli.run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_partitions(capsys):
    code, rep = run_cli(capsys, ["partitions", "4"])
    assert code == 0
    assert rep["schema"] == 1
    assert rep["count"] == 15
    assert len(rep["partitions"]) == 15


def test_m_complex_betti(capsys):
    code, rep = run_cli(capsys, ["m-complex", "--p", "[4]->pt", "--betti"])
    assert code == 0
    assert rep["betti"] == {"-3": 6}
    assert rep["d2"] is True


def test_compact_map_grammar(capsys):
    code, rep = run_cli(capsys, ["m-complex", "--p", "a,b->t;c->u", "--betti"])
    assert code == 0
    assert rep["betti"] == {"-1": 1}


def test_shuffle_check(capsys):
    code, rep = run_cli(capsys, ["shuffle-check", "--sizes", "2,2"])
    assert code == 0
    assert rep["chain_map"] is True


def test_zebra_poset(capsys):
    code, rep = run_cli(capsys, ["zebra", "--f", "12|3", "--e", "123",
                                 "--verify-poset"])
    assert code == 0
    assert all(rep["poset"].values())


def test_resolution(capsys):
    code, rep = run_cli(capsys, ["resolution", "--f", "1|2|3", "--e", "123",
                                 "--betti"])
    assert code == 0
    assert rep["d2"] is True
    assert rep["betti"] == {}


def test_bodies_hom(capsys):
    tower = json.dumps({
        "inj": {"source": ["a", "b"], "target": ["u0", "u1", "u2"],
                "images": [0, 1]},
        "surjs": [{"source": ["u0", "u1", "u2"], "target": ["t"],
                   "images": [0, 0, 0]}],
    })
    code, rep = run_cli(capsys, ["bodies", "hom", "--X", tower, "--Y", tower,
                                 "--d2"])
    assert code == 0
    assert rep["d2_failures"] == 0


def test_bodies_factor(capsys):
    square = json.dumps({
        "i": {"source": ["s0"], "target": ["r0", "r1"], "images": [0]},
        "p": {"source": ["r0", "r1"], "target": ["t0"], "images": [0, 0]},
        "j": {"source": ["w0"], "target": ["t0"], "images": [0]},
        "q": {"source": ["s0"], "target": ["w0"], "images": [0]},
    })
    code, rep = run_cli(capsys, ["bodies", "factor", "--square", square])
    assert code == 0
    assert rep["exists"] and rep["unique"]


def test_symm_verify(capsys):
    code, rep = run_cli(capsys, ["symm", "verify", "--f", "[2]->pt",
                                 "--max-u", "4"])
    assert code == 0
    assert rep["ok"] is True and rep["residues"] == []


def test_mellin_verify(capsys):
    code, rep = run_cli(capsys, ["mellin", "verify", "--profile", "bump",
                                 "--N", "4", "--M", "2"])
    assert code == 0
    assert rep["residual"] < 1e-6


def test_mellin_value(capsys):
    code, rep = run_cli(capsys, ["mellin", "value", "--profile", "exponential",
                                 "--N", "4", "--s", "1.5"])
    assert code == 0
    assert abs(rep["value"][0] - 720.0) < 1e-6  # Gamma(7)


@pytest.mark.parametrize("argv", [
    ["partitions", "0"],
    ["m-complex", "--p", "garbage"],
    ["m-complex", "--p", "a->t;a->u"],
    ["zebra", "--f", "12|3", "--e", "45"],
    ["bodies", "hom", "--X", "notjson", "--Y", "{}"],
])
def test_parse_errors_exit_2(capsys, argv):
    code, rep = run_cli(capsys, argv)
    assert code == 2
    assert "error" in rep


def test_byte_identical_output(capsys):
    cli.run(["m-complex", "--p", "[3]->pt", "--betti"])
    first = capsys.readouterr().out
    cli.run(["m-complex", "--p", "[3]->pt", "--betti"])
    second = capsys.readouterr().out
    assert first == second
