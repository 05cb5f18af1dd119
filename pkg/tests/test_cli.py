"""End-to-end tests of the command line front-end."""

import os

import pytest

from focusce.cli import main
from focusce.prooftree import check_proof, iter_nodes, parse_proof, print_proof

import fixtures


@pytest.fixture
def example_file(tmp_path):
    path = tmp_path / "example.proof"
    path.write_text(print_proof(fixtures.example_proof()))
    return str(path)


def test_check_example(example_file, capsys):
    assert main(["check", example_file]) == 0
    out = capsys.readouterr().out
    assert "1 cut: important, essential" in out


def test_check_cut_free(tmp_path, capsys):
    path = tmp_path / "em.proof"
    path.write_text(print_proof(fixtures.excluded_middle_proof()))
    assert main(["check", str(path)]) == 0
    assert "0 cuts" in capsys.readouterr().out


def test_check_corrupted(tmp_path, capsys):
    text = print_proof(fixtures.nu_box_proof())
    path = tmp_path / "bad.proof"
    path.write_text(text.replace("leaf x", "leaf y"))
    assert main(["check", str(path)]) == 2


def test_check_missing_file():
    assert main(["check", "/nonexistent/nowhere.proof"]) == 4


def test_eliminate_roundtrip(example_file, tmp_path, capsys):
    out = str(tmp_path / "out.proof")
    assert main(["eliminate", example_file, "-o", out,
                 "--decontract", "--trace"]) == 0
    log = capsys.readouterr().out
    assert "cut-order" in log
    p = parse_proof(open(out).read())
    assert check_proof(p).ok
    assert not any(n.rule in ("cut", "contr") for n in iter_nodes(p))


def test_eliminate_cap(example_file, tmp_path, capsys):
    out = str(tmp_path / "out.proof")
    assert main(["eliminate", example_file, "-o", out,
                 "--max-steps", "1"]) == 3


def test_eliminate_env_cap(example_file, tmp_path, monkeypatch):
    out = str(tmp_path / "out.proof")
    monkeypatch.setenv("FOCUSCE_MAX_STEPS", "1")
    assert main(["eliminate", example_file, "-o", out]) == 3


def test_normalize(example_file, tmp_path):
    out = str(tmp_path / "norm.proof")
    assert main(["normalize", example_file, "-o", out]) == 0
    assert check_proof(parse_proof(open(out).read())).ok


def test_prove_ax(tmp_path):
    out = str(tmp_path / "ax.proof")
    assert main(["prove", "p^u, ~p^u", "-o", out]) == 0
    p = parse_proof(open(out).read())
    assert check_proof(p).ok and p.rule == "ax"


def test_prove_invalid_sequent(tmp_path):
    out = str(tmp_path / "no.proof")
    assert main(["prove", "p^u, q^u", "-o", out,
                 "--max-nodes", "500"]) == 3


def test_wqo_len(capsys):
    assert main(["wqo-len", "-k", "1", "-t", "2", "-f", "succ"]) == 0
    assert capsys.readouterr().out.strip() == "3"


def test_stats(example_file, capsys):
    assert main(["stats", example_file]) == 0
    out = capsys.readouterr().out
    assert "depth 1, clusters: 2 proper" in out
    assert "cut-order" in out


def test_usage_error():
    assert main([]) == 1
    assert main(["wqo-len", "-k", "1", "-t", "2", "-f", "ackermann"]) == 1
