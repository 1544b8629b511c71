import json

import pytest
from click.testing import CliRunner

from artlang.cli import main
from artlang.core import AttrValConfig, read_config, read_corpus, write_config
from artlang.segment import read_segmented

SMALL = AttrValConfig((4, 4, 4), vocab_size=6, max_len=6)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.config"
    write_config(SMALL, path)
    return path


def _gen(runner, tmp_path, small_config, name="pc.tsv", lang="perfect_concat", seed=1):
    out = tmp_path / name
    result = runner.invoke(main, [
        "gen", "--lang", lang, "--config", str(small_config),
        "--seed", str(seed), "-o", str(out),
    ])
    assert result.exit_code == 0, result.output
    return out


def test_gen_writes_corpus_sidecar_manifest(runner, tmp_path, small_config):
    out = _gen(runner, tmp_path, small_config)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "meaning\tmessage"
    assert len(lines) == 1 + 64
    assert read_config(out.with_suffix(".config")) == SMALL
    manifest = json.loads(out.with_suffix(".manifest.json").read_text())
    assert manifest["command"] == "artlang gen"
    assert manifest["seeds"] == [1]
    assert str(out) in manifest["outputs"]
    assert manifest["version"]


def test_gen_rerun_byte_identical(runner, tmp_path, small_config):
    a = _gen(runner, tmp_path, small_config, "a.tsv")
    b = _gen(runner, tmp_path, small_config, "b.tsv")
    assert a.read_bytes() == b.read_bytes()


def test_gen_unknown_kind_is_usage_error(runner, tmp_path, small_config):
    result = runner.invoke(main, [
        "gen", "--lang", "telepathy", "--config", str(small_config),
        "-o", str(tmp_path / "x.tsv"),
    ])
    assert result.exit_code == 2


def test_gen_mutation_k3_default_preset(runner, tmp_path):
    out = tmp_path / "mut.tsv"
    result = runner.invoke(main, [
        "gen", "--lang", "mutation:k=3", "--preset", "default",
        "--seed", "0", "-o", str(out),
    ])
    assert result.exit_code == 0, result.output
    corpus = read_corpus(out)
    assert len(corpus) == 4096
    assert all(len(msg) == 9 for msg in corpus.messages)


def test_gen_symbols_out(runner, tmp_path, small_config):
    out = tmp_path / "pc.tsv"
    symbols = tmp_path / "symbols.tsv"
    result = runner.invoke(main, [
        "gen", "--lang", "perfect_concat", "--config", str(small_config),
        "-o", str(out), "--symbols-out", str(symbols),
    ])
    assert result.exit_code == 0, result.output
    lines = symbols.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "attr\tvalue\tsymbol"
    assert len(lines) == 1 + 12  # 3 attributes x 4 values


def test_segment_bpe_with_merges(runner, tmp_path, small_config):
    corpus_path = _gen(runner, tmp_path, small_config)
    seg_path = tmp_path / "seg.tsv"
    merges_path = tmp_path / "merges.tsv"
    result = runner.invoke(main, [
        "segment", str(corpus_path), "--method", "bpe", "--bpe-vocab", "12",
        "--merges-out", str(merges_path), "-o", str(seg_path),
    ])
    assert result.exit_code == 0, result.output
    seg = read_segmented(seg_path)
    assert len(seg.base) == 64
    assert any(seg.boundaries[i] for i in range(64))
    assert len(merges_path.read_text().splitlines()) == 12 - SMALL.vocab_size


def test_segment_bpe_vocab_max_and_bad_value(runner, tmp_path, small_config):
    corpus_path = _gen(runner, tmp_path, small_config)
    ok = runner.invoke(main, [
        "segment", str(corpus_path), "--method", "bpe", "--bpe-vocab", "max",
        "-o", str(tmp_path / "segmax.tsv"),
    ])
    assert ok.exit_code == 0, ok.output
    bad = runner.invoke(main, [
        "segment", str(corpus_path), "--method", "bpe", "--bpe-vocab", "several",
        "-o", str(tmp_path / "segbad.tsv"),
    ])
    assert bad.exit_code == 2


def test_segment_has(runner, tmp_path, small_config):
    corpus_path = _gen(runner, tmp_path, small_config)
    seg_path = tmp_path / "has.tsv"
    result = runner.invoke(main, [
        "segment", str(corpus_path), "--method", "has", "--tau", "0.0",
        "--has-convention", "rise", "-o", str(seg_path),
    ])
    assert result.exit_code == 0, result.output
    seg = read_segmented(seg_path)
    assert len(seg.base) == 64


def test_analyze_report_files(runner, tmp_path, small_config):
    corpus_path = _gen(runner, tmp_path, small_config)
    out_dir = tmp_path / "metrics"
    result = runner.invoke(main, [
        "analyze", str(corpus_path), "--out-dir", str(out_dir),
    ])
    assert result.exit_code == 0, result.output
    rows = (out_dir / "report.tsv").read_text().splitlines()
    assert rows[0] == "metric\tvalue"
    names = [line.split("\t")[0] for line in rows[1:]]
    assert "topsim" in names and "bpelen_96" in names and len(names) == 19
    assert "topsim" in (out_dir / "report.txt").read_text()
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert str(out_dir / "report.tsv") in manifest["outputs"]


def test_analyze_rerun_byte_identical(runner, tmp_path, small_config):
    corpus_path = _gen(runner, tmp_path, small_config)
    first, second = tmp_path / "m1", tmp_path / "m2"
    for out_dir in (first, second):
        result = runner.invoke(main, [
            "analyze", str(corpus_path), "--out-dir", str(out_dir),
        ])
        assert result.exit_code == 0, result.output
    assert (first / "report.tsv").read_bytes() == (second / "report.tsv").read_bytes()


def test_curve_csv(runner, tmp_path, small_config):
    corpus_path = _gen(runner, tmp_path, small_config)
    out_dir = tmp_path / "curve"
    result = runner.invoke(main, [
        "curve", str(corpus_path), "--vocab-range", "6..20",
        "--out-dir", str(out_dir),
    ])
    assert result.exit_code == 0, result.output
    rows = (out_dir / "curve.csv").read_text().splitlines()
    assert rows[0] == "vocab_size,bpelen"
    assert len(rows) == 1 + 15
    values = [float(r.split(",")[1]) for r in rows[1:]]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_curve_svg(runner, tmp_path, small_config):
    corpus_path = _gen(runner, tmp_path, small_config)
    out_dir = tmp_path / "curve"
    result = runner.invoke(main, [
        "curve", str(corpus_path), "--vocab-range", "6..12", "--svg",
        "--out-dir", str(out_dir),
    ])
    assert result.exit_code == 0, result.output
    assert (out_dir / "curve.svg").read_text().lstrip().startswith("<?xml")


def test_curve_below_base_vocab_is_usage_error(runner, tmp_path, small_config):
    corpus_path = _gen(runner, tmp_path, small_config)
    result = runner.invoke(main, [
        "curve", str(corpus_path), "--vocab-range", "2..5",
        "--out-dir", str(tmp_path / "c"),
    ])
    assert result.exit_code == 2


def test_report_combined_outputs(runner, tmp_path, small_config):
    corpus_path = _gen(runner, tmp_path, small_config)
    out_dir = tmp_path / "full"
    result = runner.invoke(main, [
        "report", str(corpus_path), "--vocab-range", "6..10",
        "--out-dir", str(out_dir),
    ])
    assert result.exit_code == 0, result.output
    for name in ("report.tsv", "report.txt", "curve.csv", "manifest.json"):
        assert (out_dir / name).exists()


def _run_batch(runner, tmp_path, small_config, out_name, extra=()):
    out_dir = tmp_path / out_name
    result = runner.invoke(main, [
        "batch", "--lang", "perfect_concat", "--lang", "random",
        "--config", str(small_config), "--seeds", "0..2",
        "--out-dir", str(out_dir), *extra,
    ])
    assert result.exit_code == 0, result.output
    return out_dir


def test_batch_aggregate_and_welch(runner, tmp_path, small_config):
    out_dir = _run_batch(runner, tmp_path, small_config, "batch")
    for lang in ("perfect_concat", "random"):
        for seed in range(3):
            assert (out_dir / f"{lang}_s{seed}.tsv").exists()
            assert (out_dir / f"{lang}_s{seed}.report.tsv").exists()
    agg = (out_dir / "aggregate.tsv").read_text().splitlines()
    assert agg[0] == "lang\tmetric\tmean\tstd"
    body = [line.split("\t") for line in agg[1:]]
    assert {row[0] for row in body} == {"perfect_concat", "random"}
    assert all(row[3] for row in body), "std column filled with several seeds"
    welch = (out_dir / "welch.tsv").read_text().splitlines()
    assert welch[0] == "metric\tlang_a\tlang_b\tt\tp"
    topsim_row = next(line for line in welch[1:] if line.startswith("topsim\t"))
    fields = topsim_row.split("\t")
    assert fields[1] == "perfect_concat" and fields[2] == "random"
    float(fields[3]), float(fields[4])


def test_batch_rerun_and_jobs_byte_identical(runner, tmp_path, small_config):
    first = _run_batch(runner, tmp_path, small_config, "b1")
    second = _run_batch(runner, tmp_path, small_config, "b2", extra=("--jobs", "2"))
    assert (first / "aggregate.tsv").read_bytes() == (second / "aggregate.tsv").read_bytes()
    assert (first / "welch.tsv").read_bytes() == (second / "welch.tsv").read_bytes()


def test_batch_single_seed_omits_std_and_welch_rows(runner, tmp_path, small_config):
    out_dir = tmp_path / "single"
    result = runner.invoke(main, [
        "batch", "--lang", "perfect_concat", "--lang", "random",
        "--config", str(small_config), "--seeds", "0",
        "--out-dir", str(out_dir),
    ])
    assert result.exit_code == 0, result.output
    agg = (out_dir / "aggregate.tsv").read_text().splitlines()
    assert all(line.endswith("\t") for line in agg[1:]), "std omitted"
    assert (out_dir / "welch.tsv").read_text().splitlines() == [
        "metric\tlang_a\tlang_b\tt\tp"
    ]


def test_natural_sample_outputs(runner, tmp_path):
    out_dir = tmp_path / "nat"
    result = runner.invoke(main, [
        "natural", "sample", "--count", "2", "--seed", "3",
        "--out-dir", str(out_dir),
    ])
    assert result.exit_code == 0, result.output
    corpus = read_corpus(out_dir / "sub_000.tsv")
    assert len(corpus) == 252
    assert corpus.config.cardinalities == (42, 2, 3)
    assert (out_dir / "sub_001.tsv").exists()
    alphabet = (out_dir / "alphabet.tsv").read_text(encoding="utf-8").splitlines()
    assert alphabet[0] == "id\tgrapheme"
    assert (out_dir / "manifest.json").exists()


def test_missing_corpus_file_fails(runner, tmp_path):
    result = runner.invoke(main, [
        "analyze", str(tmp_path / "nope.tsv"), "--out-dir", str(tmp_path),
    ])
    assert result.exit_code == 2


def test_help_lists_commands(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for name in ("gen", "segment", "analyze", "curve", "report", "batch", "natural"):
        assert name in result.output
