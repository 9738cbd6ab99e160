from pathlib import Path

import pytest

import check_corpus
from check_corpus import (
    CheckResult, CorpusEntry, EntryChecker, check_properties, load_corpus, load_grammar_file,
    word_length_for,
)
from oracle.grammar import format_grammar, mu_to_grammar
from pderiv.syntax import canonicalize, parse
from run import main


def _entry(text: str) -> CorpusEntry:
    return CorpusEntry(1, text, canonicalize(parse(text)))


def test_load_bundled_corpus(corpus_entries) -> None:
    assert len(corpus_entries) == 12
    assert corpus_entries[0].text == "a"
    assert corpus_entries[4].text == "mu X. 1 + X a"


def test_load_corpus_reports_line_numbers(tmp_path: Path) -> None:
    corpus = tmp_path / "bad.txt"
    corpus.write_text("a\n# comment\n\nmu X. X Y\n", encoding="utf-8")
    with pytest.raises(ValueError) as info:
        load_corpus(str(corpus))
    assert ":4: free variable Y" in str(info.value)

    corpus.write_text("a + \n", encoding="utf-8")
    with pytest.raises(ValueError) as info:
        load_corpus(str(corpus))
    assert ":1:" in str(info.value)

    with pytest.raises(FileNotFoundError):
        load_corpus(str(tmp_path / "missing.txt"))


def test_word_length_for() -> None:
    assert word_length_for(_entry("a*").expr, None) == 8
    assert word_length_for(_entry("a + b").expr, None) == 6
    assert word_length_for(_entry("a b c").expr, None) == 8
    assert word_length_for(_entry("a b c").expr, 2) == 2


def test_check_result_render() -> None:
    assert CheckResult("a", "ipd", True, "2 elements").render() == "  ✓ [a] ipd: 2 elements"
    assert CheckResult("a", "ipd", False, "x").render().startswith("  ✗")


def test_entry_checker_on_plain_expression() -> None:
    results = EntryChecker(_entry("(ab)*"), 4).run()
    names = [r.check for r in results]
    assert names == ["ipd", "forms", "nullability", "pda-oracle", "bfs-sound",
                     "nfa-agree", "expansion", "guarded", "rules-oracle"]
    assert all(r.ok for r in results), [r.render() for r in results if not r.ok]


def test_entry_checker_on_left_recursion() -> None:
    results = EntryChecker(_entry("mu X. 1 + X a"), 4).run()
    names = [r.check for r in results]
    assert "nfa-agree" not in names
    assert "guarded" not in names
    assert all(r.ok for r in results), [r.render() for r in results if not r.ok]


def test_bundled_corpus_passes(capsys, corpus_path) -> None:
    code = main(["check", str(corpus_path), "--maxlen", "3", "--jobs", "2"])
    out = capsys.readouterr().out
    assert "[1/2] Loading corpus..." in out
    assert "  ✓ 12 expressions" in out
    assert "12 checked, 0 failed" in out
    assert "✗" not in out
    assert code == 0


def test_empty_corpus(capsys, tmp_path: Path) -> None:
    corpus = tmp_path / "empty.txt"
    corpus.write_text("# nothing here\n", encoding="utf-8")
    assert main(["check", str(corpus)]) == 0
    assert "0 checked, 0 failed" in capsys.readouterr().out


def test_bad_corpus_exits_with_error(capsys, tmp_path: Path) -> None:
    corpus = tmp_path / "free.txt"
    corpus.write_text("X\n", encoding="utf-8")
    assert main(["check", str(corpus)]) == 2
    assert "free variable X" in capsys.readouterr().err


def test_random_properties_hold(monkeypatch) -> None:
    small = {"random_expressions": 60, "substitution_samples": 15}
    real_limit = check_corpus.limit

    def reduced(section, key, fallback):
        if section == "properties" and key in small:
            return small[key]
        return real_limit(section, key, fallback)

    monkeypatch.setattr(check_corpus, "limit", reduced)
    results = check_properties(seed=5)
    assert [r.check for r in results] == ["null-fixpoint", "null-monotone", "lang-monotone", "subst-lemma"]
    assert all(r.ok for r in results), [r.render() for r in results if not r.ok]


@pytest.mark.parametrize("index", range(12))
def test_bundled_entry_passes_at_full_windows(corpus_entries, index) -> None:
    results = EntryChecker(corpus_entries[index], None).run()
    assert all(r.ok for r in results), [r.render() for r in results if not r.ok]


def test_full_windows_reach_required_lengths(corpus_entries) -> None:
    nested = EntryChecker(corpus_entries[11], None)
    assert nested.entry.text == "mu X. 1 + a (mu Y. 1 + b Y X) c"
    assert nested.length == 8
    assert len(nested.words) == 9841

    plain = {r.check: r for r in EntryChecker(corpus_entries[2], None).run()}
    assert plain["expansion"].detail == "up to length 7"
    assert plain["nfa-agree"].detail.endswith(", 511 words")
    assert plain["rules-oracle"].detail == "words up to length 5"


def test_check_failure_names_expression_word_and_components(capsys, tmp_path: Path, monkeypatch) -> None:
    corpus = tmp_path / "one.txt"
    corpus.write_text("mu X. 1 + X a\n", encoding="utf-8")
    real_member = check_corpus.member

    def flipped(r, w):
        return not real_member(r, w) if w == "a" else real_member(r, w)

    monkeypatch.setattr(check_corpus, "member", flipped)
    assert main(["check", str(corpus), "--maxlen", "2"]) == 1
    out = capsys.readouterr().out
    assert "  ✗ [mu X. 1 + X a] pda-oracle: word 'a': pda=True oracle=False" in out
    assert "  ✗ [mu X. 1 + X a] rules-oracle: word 'a': rules=True oracle=False" in out
    assert "1 checked, 1 failed" in out


def _write_grammar(tmp_path: Path, expr_text: str, body: str) -> Path:
    path = tmp_path / "grammar.cfg"
    path.write_text(f"# expr: {expr_text}\n{body}", encoding="utf-8")
    return path


def test_grammar_file_agrees_with_automaton(capsys, tmp_path: Path, anbn) -> None:
    corpus = tmp_path / "one.txt"
    corpus.write_text("a\n", encoding="utf-8")
    grammar = _write_grammar(tmp_path, "mu X. 1 + a X b", format_grammar(mu_to_grammar(anbn)))
    assert main(["check", str(corpus), "--grammar", str(grammar), "--maxlen", "4"]) == 0
    out = capsys.readouterr().out
    assert "  ✓ 1 grammar files" in out
    assert f"  ✓ [mu X. 1 + a X b] grammar-file: {grammar}: 31 words up to length 4" in out
    assert "2 checked, 0 failed" in out


def test_grammar_file_mismatch_fails(capsys, tmp_path: Path) -> None:
    corpus = tmp_path / "one.txt"
    corpus.write_text("a\n", encoding="utf-8")
    grammar = _write_grammar(tmp_path, "mu X. 1 + a X b", "S -> %eps\nS -> a S\n")
    assert main(["check", str(corpus), "--grammar", str(grammar), "--maxlen", "4"]) == 1
    out = capsys.readouterr().out
    assert f"  ✗ [mu X. 1 + a X b] grammar-file: {grammar}, word 'a': grammar=True pda=False" in out
    assert "2 checked, 1 failed" in out


def test_load_grammar_file_errors(capsys, tmp_path: Path) -> None:
    path = tmp_path / "grammar.cfg"
    path.write_text("S -> a\n", encoding="utf-8")
    with pytest.raises(ValueError, match="no '# expr: <expression>' line"):
        load_grammar_file(str(path))

    _write_grammar(tmp_path, "a", "S -> ab\n")
    with pytest.raises(ValueError, match="single lowercase letters, got 'ab'"):
        load_grammar_file(str(path))

    _write_grammar(tmp_path, "mu X. X Y", "S -> a\n")
    with pytest.raises(ValueError, match="free variable Y"):
        load_grammar_file(str(path))

    missing = tmp_path / "missing.cfg"
    with pytest.raises(FileNotFoundError):
        load_grammar_file(str(missing))

    corpus = tmp_path / "one.txt"
    corpus.write_text("a\n", encoding="utf-8")
    assert main(["check", str(corpus), "--grammar", str(missing)]) == 2
    assert "Grammar file not found" in capsys.readouterr().err
