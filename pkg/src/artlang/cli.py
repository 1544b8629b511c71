"""Command-line pipeline: generate -> segment -> measure -> report.

Every command writes a manifest.json (or <stem>.manifest.json next to a
single output file) recording the invocation, so a directory of outputs is
self-describing.  All randomness flows from explicit --seed flags; reruns
with the same flags reproduce byte-identical metric TSVs.  The manifest
timestamp is the only wall-clock-dependent output.
"""

from __future__ import annotations

import dataclasses
import json
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from .core import (
    AttrValConfig,
    ConfigError,
    Corpus,
    ParseError,
    PRESETS,
    SpaceSizeError,
    preset,
    read_config,
    read_corpus,
    write_config,
    write_corpus,
)
from .langgen import (
    CapacityError,
    build_language,
    generate_corpus,
    parse_language_spec,
)
from .metrics import MetricReport, bpelen, compare_means, full_report
from .natural import (
    CoverageError,
    bundled_spanish_table,
    load_inflection_table,
    sample_sublanguages,
    write_alphabet,
)
from .segment import (
    HAS_CONVENTIONS,
    bpe_apply,
    bpe_train,
    dump_merges,
    fit_entropy,
    has_segment,
    write_segmented,
)

_DATA_ERRORS = (ConfigError, ParseError, SpaceSizeError, CapacityError, CoverageError)


def _jsonable(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


def _write_manifest(path: Path, ctx: click.Context, inputs, outputs,
                    seeds=None) -> None:
    params = {k: _jsonable(v) for k, v in sorted(ctx.params.items())}
    manifest = {
        "command": ctx.command_path,
        "params": params,
        "preset": params.get("preset_name"),
        "seeds": list(seeds) if seeds is not None else None,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_config(preset_name: str, config_path) -> AttrValConfig:
    if config_path is not None:
        return read_config(config_path)
    return preset(preset_name)


def _read_corpus(corpus_path, config_path) -> Corpus:
    cfg = read_config(config_path) if config_path else None
    return read_corpus(corpus_path, cfg)


def _parse_int_series(text: str, what: str) -> list[int]:
    """Accept '0..7', '8..200..8', or '0,3,9'."""
    try:
        if ".." in text:
            parts = [int(x) for x in text.split("..")]
            if len(parts) == 2:
                start, stop, step = parts[0], parts[1], 1
            elif len(parts) == 3:
                start, stop, step = parts
            else:
                raise ValueError
            if step < 1 or stop < start:
                raise ValueError
            return list(range(start, stop + 1, step))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise click.UsageError(
            f"bad {what} {text!r} (expected START..STOP[..STEP] or comma list)"
        ) from None


def _report_rows_text(report: MetricReport) -> str:
    rows = report.rows()
    return "".join(f"{name}\t{value}\n" for name, value in rows)


def _human_value(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.4f}"
    if isinstance(value, tuple):
        return ",".join(map(str, value))
    return str(value)


def _report_human_text(report: MetricReport, title: str) -> str:
    fields = [(f.name, getattr(report, f.name)) for f in dataclasses.fields(report)]
    width = max(len(name) for name, _ in fields)
    lines = [title, "-" * len(title)]
    lines += [f"{name:<{width}}  {_human_value(value)}" for name, value in fields]
    return "\n".join(lines) + "\n"


def _numeric_fields(report: MetricReport) -> list[tuple[str, float]]:
    out = []
    for f in dataclasses.fields(report):
        value = getattr(report, f.name)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            continue
        out.append((f.name, float(value)))
    return out


def _full_report_kwargs(tau, convention, window, pair_budget, seed):
    return dict(tau=tau, convention=convention, window=window,
                pair_budget=pair_budget, seed=seed)


# shared option stacks

def _metric_options(fn):
    for deco in reversed([
        click.option("--tau", default=0.0, show_default=True,
                     help="branching-entropy cut threshold"),
        click.option("--has-convention", "convention", default="rise", show_default=True,
                     type=click.Choice(HAS_CONVENTIONS)),
        click.option("--window", default=None, type=int,
                     help="entropy context window (default: full prefix)"),
        click.option("--pair-budget", default=None, type=int,
                     help="override the TopSim pair sampling policy"),
        click.option("--seed", default=0, show_default=True,
                     help="seed for pair sampling"),
    ]):
        fn = deco(fn)
    return fn


def _config_options(fn):
    for deco in reversed([
        click.option("--preset", "preset_name", default="default", show_default=True,
                     type=click.Choice(sorted(PRESETS))),
        click.option("--config", "config_path", default=None,
                     type=click.Path(exists=True, dir_okay=False),
                     help="config file overriding --preset"),
    ]):
        fn = deco(fn)
    return fn


def _out_dir_option(fn):
    return click.option("--out-dir", default=".", show_default=True,
                        type=click.Path(file_okay=False))(fn)


@click.group(name="artlang")
@click.version_option(__version__)
def main() -> None:
    """Generate, segment, and measure double-articulated languages."""


@main.command()
@click.option("--lang", "lang_text", required=True,
              help="language spec, e.g. perfect_concat or fusion:pair=1,2")
@_config_options
@click.option("--seed", default=0, show_default=True)
@click.option("-o", "--output", "output", required=True,
              type=click.Path(dir_okay=False))
@click.option("--symbols-out", default=None, type=click.Path(dir_okay=False),
              help="debug symbol table TSV (attr, value, symbol)")
@click.pass_context
def gen(ctx, lang_text, preset_name, config_path, seed, output, symbols_out):
    """Generate the full-coverage corpus for one language spec."""
    try:
        cfg = _load_config(preset_name, config_path)
    except _DATA_ERRORS as err:
        raise click.ClickException(str(err))
    try:
        spec = parse_language_spec(lang_text, cfg, seed=seed)
        corpus = generate_corpus(spec)
    except (ConfigError, CapacityError) as err:
        raise click.UsageError(str(err))

    out = Path(output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_corpus(corpus, out)
    sidecar = out.with_suffix(".config")
    write_config(corpus.config, sidecar)
    outputs = [out, sidecar]
    if symbols_out:
        lang = build_language(spec)
        tables = lang.tables
        items = sorted(tables.items()) if isinstance(tables, dict) else enumerate(tables)
        with open(symbols_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("attr\tvalue\tsymbol\n")
            for attr, table in items:
                for value, sym in enumerate(table):
                    fh.write(f"{attr}\t{value}\t{','.join(map(str, sym))}\n")
            for key, sym in sorted(lang.extras.get("fused", {}).items()):
                pair = lang.extras["pair"]
                fh.write(f"fused{pair[0]},{pair[1]}\t{key[0]},{key[1]}\t"
                         f"{','.join(map(str, sym))}\n")
        outputs.append(Path(symbols_out))
    inputs = [config_path] if config_path else []
    _write_manifest(out.with_suffix(".manifest.json"), ctx, inputs, outputs, seeds=[seed])


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--method", default="has", show_default=True,
              type=click.Choice(["has", "bpe"]))
@click.option("--tau", default=0.0, show_default=True)
@click.option("--has-convention", "convention", default="rise", show_default=True,
              type=click.Choice(HAS_CONVENTIONS))
@click.option("--window", default=None, type=int)
@click.option("--bpe-vocab", default="96", show_default=True,
              help="target vocabulary size, or 'max'")
@click.option("--merges-out", default=None, type=click.Path(dir_okay=False),
              help="dump the BPE merge rules")
@click.option("-o", "--output", "output", required=True,
              type=click.Path(dir_okay=False))
@click.pass_context
def segment(ctx, corpus_path, config_path, method, tau, convention, window,
            bpe_vocab, merges_out, output):
    """Segment a corpus into symbols and write the boundary TSV."""
    try:
        corpus = _read_corpus(corpus_path, config_path)
    except _DATA_ERRORS as err:
        raise click.ClickException(str(err))

    out = Path(output)
    out.parent.mkdir(parents=True, exist_ok=True)
    outputs = [out]
    if method == "has":
        model = fit_entropy(corpus, window=window)
        seg = has_segment(corpus, model, tau=tau, convention=convention)
    else:
        if bpe_vocab == "max":
            target = None
        else:
            try:
                target = int(bpe_vocab)
            except ValueError:
                raise click.UsageError(f"bad --bpe-vocab {bpe_vocab!r}")
        try:
            merge_list = bpe_train(corpus, target)
            seg = bpe_apply(merge_list, corpus)
        except ValueError as err:
            raise click.ClickException(str(err))
        if merges_out:
            dump_merges(merge_list, merges_out)
            outputs.append(Path(merges_out))
    write_segmented(seg, out)
    sidecar = out.with_suffix(".config")
    write_config(corpus.config, sidecar)
    outputs.append(sidecar)
    _write_manifest(out.with_suffix(".manifest.json"), ctx,
                    [corpus_path], outputs)


def _analyze_outputs(corpus: Corpus, out_dir: Path, title: str, **kwargs) -> list[Path]:
    report = full_report(corpus, **kwargs)
    tsv = out_dir / "report.tsv"
    txt = out_dir / "report.txt"
    with open(tsv, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("metric\tvalue\n")
        fh.write(_report_rows_text(report))
    with open(txt, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_report_human_text(report, title))
    return [tsv, txt]


def _curve_outputs(corpus: Corpus, out_dir: Path, vocab_range: str | None,
                   svg: bool) -> list[Path]:
    base = corpus.config.vocab_size
    if vocab_range is None:
        vocab_range = f"{base}..200"
    sizes = _parse_int_series(vocab_range, "--vocab-range")
    if not sizes:
        raise click.UsageError("empty --vocab-range")
    if min(sizes) < base:
        raise click.UsageError(
            f"--vocab-range starts below the corpus base vocabulary ({base})"
        )
    lengths = bpelen(corpus, sizes)
    csv_path = out_dir / "curve.csv"
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("vocab_size,bpelen\n")
        for size in sizes:
            fh.write(f"{size},{lengths[size]!r}\n")
    outputs = [csv_path]
    if svg:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        plt.rcParams["svg.hashsalt"] = "artlang"
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(sizes, [lengths[s] for s in sizes])
        ax.set_xlabel("vocabulary size")
        ax.set_ylabel("BPELen")
        fig.tight_layout()
        svg_path = out_dir / "curve.svg"
        fig.savefig(svg_path, metadata={"Date": None})
        plt.close(fig)
        outputs.append(svg_path)
    return outputs


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@_metric_options
@_out_dir_option
@click.pass_context
def analyze(ctx, corpus_path, config_path, tau, convention, window,
            pair_budget, seed, out_dir):
    """Compute the full metric report for one corpus."""
    try:
        corpus = _read_corpus(corpus_path, config_path)
    except _DATA_ERRORS as err:
        raise click.ClickException(str(err))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs = _analyze_outputs(
        corpus, out, Path(corpus_path).name,
        **_full_report_kwargs(tau, convention, window, pair_budget, seed))
    _write_manifest(out / "manifest.json", ctx, [corpus_path], outputs, seeds=[seed])


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--vocab-range", default=None,
              help="BPE vocab sizes, e.g. 8..200 or 8..200..8 [default: base..200]")
@click.option("--svg", is_flag=True, help="also draw the curve as an SVG")
@_out_dir_option
@click.pass_context
def curve(ctx, corpus_path, config_path, vocab_range, svg, out_dir):
    """Write the BPELen-vs-vocabulary-size series for one corpus."""
    try:
        corpus = _read_corpus(corpus_path, config_path)
    except _DATA_ERRORS as err:
        raise click.ClickException(str(err))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        outputs = _curve_outputs(corpus, out, vocab_range, svg)
    except ValueError as err:
        raise click.ClickException(str(err))
    _write_manifest(out / "manifest.json", ctx, [corpus_path], outputs)


@main.command()
@click.argument("corpus_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", default=None,
              type=click.Path(exists=True, dir_okay=False))
@_metric_options
@click.option("--vocab-range", default=None,
              help="BPE vocab sizes for the curve [default: base..200]")
@click.option("--svg", is_flag=True)
@_out_dir_option
@click.pass_context
def report(ctx, corpus_path, config_path, tau, convention, window,
           pair_budget, seed, vocab_range, svg, out_dir):
    """Full metric report plus the BPELen curve, in one directory."""
    try:
        corpus = _read_corpus(corpus_path, config_path)
    except _DATA_ERRORS as err:
        raise click.ClickException(str(err))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs = _analyze_outputs(
        corpus, out, Path(corpus_path).name,
        **_full_report_kwargs(tau, convention, window, pair_budget, seed))
    try:
        outputs += _curve_outputs(corpus, out, vocab_range, svg)
    except ValueError as err:
        raise click.ClickException(str(err))
    _write_manifest(out / "manifest.json", ctx, [corpus_path], outputs, seeds=[seed])


def _safe_label(lang_text: str) -> str:
    return "".join(c if c.isalnum() or c == "_" else "-" for c in lang_text)


def _batch_task(args):
    """Generate one corpus and measure it; runs in worker processes."""
    lang_text, cfg, seed, kwargs = args
    spec = parse_language_spec(lang_text, cfg, seed=seed)
    corpus = generate_corpus(spec)
    return corpus, full_report(corpus, **kwargs)


@main.command()
@click.option("--lang", "lang_texts", multiple=True, required=True,
              help="language spec; repeat for several conditions")
@_config_options
@click.option("--seeds", default="0..7", show_default=True,
              help="seed list, e.g. 0..7 or 0,3,9")
@_metric_options
@click.option("--jobs", default=1, show_default=True,
              help="parallel worker processes")
@_out_dir_option
@click.pass_context
def batch(ctx, lang_texts, preset_name, config_path, seeds, tau, convention,
          window, pair_budget, seed, jobs, out_dir):
    """Run several language specs over several generation seeds.

    Writes one corpus TSV and metric report per (lang, seed), an
    aggregate.tsv with mean and sample-std columns, and a welch.tsv of
    two-sided t-tests between every pair of conditions.
    """
    try:
        cfg = _load_config(preset_name, config_path)
    except _DATA_ERRORS as err:
        raise click.ClickException(str(err))
    seed_list = _parse_int_series(seeds, "--seeds")
    if not seed_list:
        raise click.UsageError("empty --seeds")
    kwargs = _full_report_kwargs(tau, convention, window, pair_budget, seed)

    tasks = [(lang_text, cfg, s, kwargs)
             for lang_text in lang_texts for s in seed_list]
    try:
        if jobs > 1:
            # spawn: forking is unsafe once numba's OpenMP layer is live
            ctx_mp = multiprocessing.get_context("spawn")
            with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx_mp) as pool:
                results = list(pool.map(_batch_task, tasks))
        else:
            results = [_batch_task(t) for t in tasks]
    except (ConfigError, CapacityError) as err:
        raise click.UsageError(str(err))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs = []
    per_lang: dict[str, list[MetricReport]] = {t: [] for t in lang_texts}
    it = iter(results)
    for lang_text in lang_texts:
        label = _safe_label(lang_text)
        for s in seed_list:
            corpus, rep = next(it)
            per_lang[lang_text].append(rep)
            corpus_path = out / f"{label}_s{s}.tsv"
            write_corpus(corpus, corpus_path)
            write_config(corpus.config, corpus_path.with_suffix(".config"))
            report_path = out / f"{label}_s{s}.report.tsv"
            with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("metric\tvalue\n")
                fh.write(_report_rows_text(rep))
            outputs += [corpus_path, corpus_path.with_suffix(".config"), report_path]

    metric_names = [name for name, _ in _numeric_fields(results[0][1])]
    agg_path = out / "aggregate.tsv"
    with open(agg_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("lang\tmetric\tmean\tstd\n")
        for lang_text in lang_texts:
            vectors = {name: [] for name in metric_names}
            for rep in per_lang[lang_text]:
                for name, value in _numeric_fields(rep):
                    vectors[name].append(value)
            for name in metric_names:
                values = vectors[name]
                mean = sum(values) / len(values)
                if len(values) > 1:
                    var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
                    std_text = repr(var ** 0.5)
                else:
                    std_text = ""
                fh.write(f"{lang_text}\t{name}\t{mean!r}\t{std_text}\n")
    outputs.append(agg_path)

    welch_path = out / "welch.tsv"
    with open(welch_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("metric\tlang_a\tlang_b\tt\tp\n")
        if len(seed_list) > 1:
            for i, lang_a in enumerate(lang_texts):
                for lang_b in lang_texts[i + 1:]:
                    for name in metric_names:
                        a = [dict(_numeric_fields(r))[name] for r in per_lang[lang_a]]
                        b = [dict(_numeric_fields(r))[name] for r in per_lang[lang_b]]
                        t, p = compare_means(a, b)
                        fh.write(f"{name}\t{lang_a}\t{lang_b}\t{t!r}\t{p!r}\n")
    outputs.append(welch_path)
    _write_manifest(out / "manifest.json", ctx, [config_path] if config_path else [],
                    outputs, seeds=seed_list)


@main.group()
def natural() -> None:
    """Natural-language inflection table commands."""


@natural.command("sample")
@click.option("--table", "table_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="inflection CSV [default: bundled Spanish -ar sample]")
@click.option("--count", default=50, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--roots", "n_roots", default=42, show_default=True)
@click.option("--tenses", default=None, help="comma list [default: auto]")
@click.option("--persons", default=None, help="comma list [default: auto]")
@_out_dir_option
@click.pass_context
def natural_sample(ctx, table_path, count, seed, n_roots, tenses, persons, out_dir):
    """Sample sublanguage corpora from an inflection table."""
    try:
        table = (load_inflection_table(table_path) if table_path
                 else bundled_spanish_table())
        subs = sample_sublanguages(
            table, count=count, seed=seed, n_roots=n_roots,
            tenses=tenses.split(",") if tenses else None,
            persons=persons.split(",") if persons else None)
    except _DATA_ERRORS as err:
        raise click.ClickException(str(err))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs = []
    for i, sub in enumerate(subs):
        corpus_path = out / f"sub_{i:03d}.tsv"
        write_corpus(sub.corpus, corpus_path)
        write_config(sub.corpus.config, corpus_path.with_suffix(".config"))
        outputs += [corpus_path, corpus_path.with_suffix(".config")]
    alphabet_path = out / "alphabet.tsv"
    write_alphabet(table, alphabet_path)
    outputs.append(alphabet_path)
    _write_manifest(out / "manifest.json", ctx,
                    [table_path] if table_path else [], outputs, seeds=[seed])


if __name__ == "__main__":
    main()
