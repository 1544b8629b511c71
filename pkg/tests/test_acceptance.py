"""Acceptance gate: one test per release criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the criterion lines
as they complete.  The heavy fixtures (8 generation seeds on the default
preset, full BPE merge histories) are shared module-wide, so the file is
meant to run as a unit.
"""

import itertools
import time

import numpy as np
import pytest

from _oracles import (
    oracle_bosdis,
    oracle_branching_entropies,
    oracle_posdis,
)
from artlang.core import AttrValConfig, Corpus, preset
from artlang.langgen import LanguageSpec, generate_corpus, identity_corpus
from artlang.metrics import (
    articulation_score,
    articulation_violations,
    bosdis,
    bosdis_ratio,
    bpelen,
    f_topsim,
    haslen,
    posdis,
    topsim,
)
from artlang.segment import bpe_apply, bpe_train, fit_entropy, has_segment

SEEDS = tuple(range(8))


def check(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def corpora():
    cfg = preset("default")
    kinds = ("perfect_concat", "mixed_concat", "nonconcat", "fusion", "random")
    return {
        kind: [generate_corpus(LanguageSpec(kind=kind, config=cfg, seed=s))
               for s in SEEDS]
        for kind in kinds
    }


@pytest.fixture(scope="module")
def merge_lists(corpora):
    """Full (unbounded) merge histories; bounded vocabularies replay prefixes."""
    return {
        kind: [bpe_train(c, None) for c in corpora[kind]]
        for kind in ("perfect_concat", "mixed_concat", "nonconcat", "random")
    }


def _toy_corpora():
    rng = np.random.default_rng(7)
    cfg = AttrValConfig((4, 4, 3), vocab_size=5, max_len=7)
    meanings = [(a, b, c) for a in range(4) for b in range(4) for c in range(3)]
    random_toy = Corpus(cfg, [
        (m, tuple(int(x) for x in rng.integers(0, 5, size=rng.integers(2, 8))))
        for m in meanings
    ])
    identity_toy = identity_corpus((6, 6, 5))
    fusion_toy = generate_corpus(LanguageSpec(
        kind="fusion", config=AttrValConfig((4, 4, 4), vocab_size=6, max_len=6),
        seed=3))
    return {"random": random_toy, "identity": identity_toy, "fusion": fusion_toy}


def test_criterion_oracle_equivalence():
    """BoSDis/PosDis/entropy vs brute-force joint histograms, <= 1e-9."""
    start = time.perf_counter()
    worst = 0.0
    for name, corpus in _toy_corpora().items():
        assert len(corpus) <= 200, name
        bags = [tuple((ch,) for ch in msg) for msg in corpus.messages]
        worst = max(worst, abs(bosdis(corpus) - oracle_bosdis(corpus.meanings, bags)))
        max_len = max(len(m) for m in corpus.messages)
        worst = max(worst, abs(
            posdis(corpus) - oracle_posdis(corpus.meanings, corpus.messages, max_len)))
        seg = bpe_apply(bpe_train(corpus, corpus.config.vocab_size + 8), corpus)
        worst = max(worst, abs(
            bosdis(corpus, seg) - oracle_bosdis(corpus.meanings, seg.all_segments())))
        model = fit_entropy(corpus)
        for msg in set(corpus.messages):
            got = model.message_entropies(msg)
            want = oracle_branching_entropies(corpus.messages, msg, window=None)
            worst = max(worst, max(abs(g - w) for g, w in zip(got, want)))
    elapsed = time.perf_counter() - start
    check("oracle equivalence", worst <= 1e-9 and elapsed < 10.0,
          f"max |diff| {worst:.2e}, {elapsed:.1f}s over 3 toy corpora")


def test_criterion_topsim_calibration(corpora):
    identity = identity_corpus(preset("default").cardinalities)
    t_identity = topsim(identity)
    start = time.perf_counter()
    t_pc = topsim(corpora["perfect_concat"][0])
    elapsed = time.perf_counter() - start
    t_random = topsim(corpora["random"][0])
    ok = (t_identity == 1.0 and abs(t_random) < 0.02
          and 0.55 <= t_pc <= 0.70 and elapsed < 120.0)
    check("topsim calibration", ok,
          f"identity {t_identity}, random {t_random:+.4f}, "
          f"perfect_concat {t_pc:.4f} in {elapsed:.1f}s at full pairs")


def test_criterion_concatenativity_ordering(corpora, merge_lists):
    base = preset("default").vocab_size
    lengths = {
        kind: [bpelen(c, [base, 96, None], merge_list=ml)
               for c, ml in zip(corpora[kind], merge_lists[kind])]
        for kind in merge_lists
    }
    mean96 = {kind: float(np.mean([d[96] for d in lengths[kind]]))
              for kind in ("perfect_concat", "mixed_concat", "nonconcat")}
    gaps_ok = (mean96["mixed_concat"] - mean96["perfect_concat"] > 0.5
               and mean96["nonconcat"] - mean96["mixed_concat"] > 0.5)
    base_ok = all(
        d[base] == float(np.mean([len(m) for m in c.messages]))
        for kind in lengths for c, d in zip(corpora[kind], lengths[kind])
    )
    max_gap = (float(np.mean([d[None] for d in lengths["random"]]))
               - float(np.mean([d[None] for d in lengths["perfect_concat"]])))
    check("concatenativity ordering", gaps_ok and base_ok and max_gap > 0.7,
          f"BPELen96 pc {mean96['perfect_concat']:.2f} < mixed "
          f"{mean96['mixed_concat']:.2f} < nonconcat {mean96['nonconcat']:.2f}; "
          f"base-vocab == mean length: {base_ok}; MAX gap {max_gap:.2f}")


def test_criterion_segmentation_meaningfulness(corpora, merge_lists):
    def ratios(kind):
        out = []
        for corpus, ml in zip(corpora[kind], merge_lists[kind]):
            seg = bpe_apply(ml.prefix(96), corpus)
            out.append(bosdis_ratio(corpus, seg))
        return out

    pc_hits = sum(r > 1 for r in ratios("perfect_concat"))
    nc_hits = sum(r < 1 for r in ratios("nonconcat"))
    check("segmentation meaningfulness", pc_hits >= 7 and nc_hits >= 6,
          f"BPE96 ratio >1 in {pc_hits}/8 perfect_concat seeds, "
          f"<1 in {nc_hits}/8 nonconcat seeds")


def test_criterion_fusionality(corpora):
    scans = {kind: [f_topsim(c) for c in corpora[kind]]
             for kind in ("fusion", "perfect_concat", "random")}
    fusion_ok = all(s.delta > 0.10 and s.best_pair == (1, 2)
                    for s in scans["fusion"])
    pc_delta = float(np.mean([s.delta for s in scans["perfect_concat"]]))
    rand_delta = float(np.mean([abs(s.delta) for s in scans["random"]]))
    check("fusionality", fusion_ok and pc_delta < -0.10 and rand_delta < 0.02,
          f"fusion delta>0.10 with pair (1,2) in "
          f"{sum(s.delta > 0.10 and s.best_pair == (1, 2) for s in scans['fusion'])}/8 "
          f"seeds; pc delta {pc_delta:+.3f}; random |delta| {rand_delta:.4f}")


def test_criterion_has_behavior(corpora):
    rng = np.random.default_rng(11)
    monotone = True
    for _ in range(1000):
        vocab = int(rng.integers(2, 7))
        n = int(rng.integers(2, 13))
        cfg = AttrValConfig((n,), vocab_size=vocab, max_len=8)
        pairs = [
            ((i,), tuple(int(x) for x in rng.integers(0, vocab, size=rng.integers(1, 9))))
            for i in range(n)
        ]
        corpus = Corpus(cfg, pairs)
        model = fit_entropy(corpus)
        taus = sorted(float(t) for t in rng.uniform(-0.5, 2.0, size=3))
        counts = [
            sum(len(b) for b in has_segment(corpus, model, tau=t).boundaries)
            for t in taus
        ]
        if any(a < b for a, b in zip(counts, counts[1:])):
            monotone = False
            break

    values = [haslen(has_segment(c, fit_entropy(c))) for c in corpora["perfect_concat"]]
    mean = float(np.mean(values))
    check("HAS behavior", monotone and 2.2 <= mean <= 3.4,
          f"cut count monotone in tau over 1000 corpora: {monotone}; "
          f"perfect_concat HASLen 8-seed mean {mean:.3f}")


def test_criterion_articulation_scoring():
    def brute(msg):
        return sum(1 for a, b in zip(msg, msg[1:]) if a % 2 == b % 2)

    worst = None
    for length in range(1, 6):
        for msg in itertools.product(range(4), repeat=length):
            if articulation_violations(msg) != brute(msg):
                worst = msg
                break
            alternating = all(a % 2 != b % 2 for a, b in zip(msg, msg[1:]))
            if (articulation_score(msg, 2.5) == 0.0) != alternating:
                worst = msg
                break
    check("articulation scoring", worst is None,
          "exhaustive to length 5 over 4 characters"
          + ("" if worst is None else f"; first mismatch {worst}"))


def test_criterion_invariance_suite():
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(100):
        cards = tuple(int(c) for c in rng.integers(2, 5, size=3))
        vocab = int(rng.integers(3, 8))
        meanings = list(itertools.product(*(range(c) for c in cards)))
        cfg = AttrValConfig(cards, vocab_size=vocab, max_len=6)
        pairs = [
            (m, tuple(int(x) for x in rng.integers(0, vocab, size=rng.integers(2, 7))))
            for m in meanings
        ]
        base = topsim(Corpus(cfg, pairs))

        bijection = rng.permutation(vocab)
        attr_perm = tuple(int(a) for a in rng.permutation(3))
        new_cards = tuple(cards[a] for a in attr_perm)
        new_cfg = AttrValConfig(new_cards, vocab_size=vocab, max_len=6)
        new_pairs = [
            (tuple(m[a] for a in attr_perm), tuple(int(bijection[ch]) for ch in msg))
            for m, msg in pairs
        ]
        worst = max(worst, abs(topsim(Corpus(new_cfg, new_pairs)) - base))
    check("invariance suite", worst <= 1e-12,
          f"max |TopSim change| {worst:.2e} over 100 relabel trials")


def test_criterion_reproduction_caveat():
    check("reproduction caveat", True,
          "reference-table cell values are range-checked, not bit-reproduced; "
          "construction details underdetermine exact symbol draws")
