
import pytest

from toeplitz_growth.cli import run_subcommand
from toeplitz_growth.corpus import CHECK_COLUMNS, format_table, get_entry, load_corpus, run_corpus, run_entry


def test_entries_well_formed():
    entries = load_corpus()
    names = [e.name for e in entries]
    assert len(names) == len(set(names)) >= 10
    for e in entries:
        assert e.expected, e.name
        for key, val in e.expected.items():
            items = val if key == "special_values" else [val]
            assert all(v["basis"] in ("analytic", "computed") for v in items), (e.name, key)


def test_get_entry_unknown():
    with pytest.raises(KeyError):
        get_entry("missing")


def test_full_corpus_passes():
    results = run_corpus()
    bad = [r.row() for r in results if not r.passed]
    assert not bad, bad
    names = {r.name for r in results}
    assert names == {e.name for e in load_corpus()}


def test_table_layout():
    results = run_entry(get_entry("b3_q3"))
    lines = format_table(results).splitlines()
    assert lines[0].split() == list(CHECK_COLUMNS)
    assert len(lines) == len(results) + 1


def test_csv_is_deterministic(tmp_path, capsys):
    outs = []
    for i in range(2):
        p = tmp_path / f"run{i}.csv"
        assert run_subcommand(["corpus", "--name", "b0", "--name", "grace_counterexample", "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]
    assert outs[0].decode().splitlines()[0] == ",".join(CHECK_COLUMNS)
