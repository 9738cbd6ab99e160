from pathlib import Path

import pytest

from run import EXIT_ERROR, EXIT_OK, EXIT_REJECT, main

LEFT = "mu X. 1 + X a"
ANBN = "mu X. 1 + a X b"


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_null(capsys) -> None:
    assert _run(capsys, "null", LEFT) == (EXIT_OK, "true\n", "")
    assert _run(capsys, "null", "mu X. X")[:2] == (EXIT_OK, "false\n")


def test_deriv_spontaneous(capsys) -> None:
    code, out, _ = _run(capsys, "deriv", LEFT, "--eps")
    assert code == EXIT_OK
    assert out == "[(mu X. 1 + X a)·a, 1]\n"


def test_deriv_symbol(capsys) -> None:
    assert _run(capsys, "deriv", LEFT, "--sym", "a")[:2] == (EXIT_OK, "[1, 1]\n")
    assert _run(capsys, "deriv", LEFT, "--sym", "b")[:2] == (EXIT_OK, "")


def test_deriv_rejects_bad_symbol(capsys) -> None:
    code, _, err = _run(capsys, "deriv", LEFT, "--sym", "ab")
    assert code == EXIT_ERROR
    assert err.startswith("error: --sym")


def test_ipd_stats(capsys) -> None:
    code, out, _ = _run(capsys, "ipd", LEFT, "--stats")
    lines = out.splitlines()
    assert code == EXIT_OK
    assert len(lines) == 6
    assert [line.split()[0] for line in lines[:4]] == ["top", "top", "rec", "top"]
    assert lines[4:] == ["|IPD| = 4", "bound = 128"]


def test_pda_listing_and_dot(capsys, tmp_path: Path) -> None:
    dot_path = tmp_path / "a.dot"
    code, out, _ = _run(capsys, "pda", "a", "--dot", str(dot_path))
    assert code == EXIT_OK
    assert "Γ (2 symbols, Z0 = 0):" in out
    assert "  a / 0 → [1]" in out
    assert "  ε / 1 → []" in out
    assert f"DOT written: {dot_path}" in out
    assert dot_path.read_text(encoding="utf-8").startswith("digraph pda {")


def test_pda_dot_to_stdout(capsys) -> None:
    code, out, _ = _run(capsys, "pda", "0", "--dot", "-")
    assert code == EXIT_OK
    assert "digraph pda {" in out
    assert "->" not in out


def test_nfa(capsys) -> None:
    code, out, _ = _run(capsys, "nfa", "a*")
    assert code == EXIT_OK
    assert "states (2):" in out
    assert "  0 --a--> 1" in out


def test_nfa_rejects_binders(capsys) -> None:
    code, _, err = _run(capsys, "nfa", LEFT)
    assert code == EXIT_ERROR
    assert err.startswith("error:")


@pytest.mark.parametrize("verb", ["match", "oracle-match"])
def test_match_exit_codes(capsys, verb) -> None:
    assert _run(capsys, verb, ANBN, "aabb")[:2] == (EXIT_OK, "accept\n")
    assert _run(capsys, verb, ANBN, "abb")[:2] == (EXIT_REJECT, "reject\n")
    assert _run(capsys, verb, ANBN, "")[:2] == (EXIT_OK, "accept\n")


def test_match_rejects_bad_word(capsys) -> None:
    code, _, err = _run(capsys, "match", ANBN, "aB")
    assert code == EXIT_ERROR
    assert "lowercase" in err


def test_trace(capsys) -> None:
    code, out, _ = _run(capsys, "trace", "a", "a")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[:3] == ["[1·a] ⊢ a", "[1] ⊢ ε", "[] ⊢ ε"]
    assert lines[3].startswith("accept (")


def test_trace_reject_and_unknown(capsys) -> None:
    assert _run(capsys, "trace", "a", "b")[0] == EXIT_REJECT
    code, out, _ = _run(capsys, "trace", LEFT, "b", "--budget", "40")
    assert code == EXIT_ERROR
    assert out.startswith("unknown (")


def test_enum(capsys) -> None:
    assert _run(capsys, "enum", ANBN, "--maxlen", "4")[:2] == (EXIT_OK, "ε\nab\naabb\n")


def test_enum_cap(capsys) -> None:
    code, _, err = _run(capsys, "enum", ANBN, "--maxlen", "11")
    assert code == EXIT_ERROR
    assert "cap" in err


def test_to_cfg(capsys) -> None:
    assert _run(capsys, "to-cfg", "a")[:2] == (EXIT_OK, "# start: S\nS -> a\n")


def test_expression_from_file(capsys, tmp_path: Path) -> None:
    source = tmp_path / "anbn.mu"
    source.write_text("mu X. 1\n  + a X b\n", encoding="utf-8")
    assert _run(capsys, "match", f"@{source}", "ab")[0] == EXIT_OK
    assert _run(capsys, "match", f"@{tmp_path / 'missing.mu'}", "ab")[0] == EXIT_ERROR


def test_errors(capsys) -> None:
    code, _, err = _run(capsys, "null", "a +")
    assert code == EXIT_ERROR
    assert "line 1, column 4" in err

    code, _, err = _run(capsys, "null", "X a")
    assert code == EXIT_ERROR
    assert "free variables: X" in err


def test_usage_errors_return_codes(capsys) -> None:
    assert main([]) == EXIT_ERROR
    assert main(["--version"]) == EXIT_OK
    capsys.readouterr()
