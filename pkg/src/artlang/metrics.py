"""Compositionality, concatenativity, and fusion metrics.

All entropies and mutual informations are in nats.  Pairwise metrics use
every unordered meaning pair for corpora up to 4096 meanings, otherwise a
seeded sample of 10**6 pairs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.stats

from artlang import kernels
from artlang.core import Corpus, Message
from artlang.segment import (
    SegmentedCorpus,
    bpe_apply,
    bpe_train,
    fit_entropy,
    has_segment,
)

FULL_PAIRS_LIMIT = 4096
SAMPLED_PAIR_BUDGET = 10**6

# Below this character-level BoSDis, ratio denominators are too small to trust.
LOW_CONFIDENCE_BOSDIS = 0.005


# --- distances -----------------------------------------------------------------


def levenshtein(a: Sequence[int], b: Sequence[int]) -> int:
    """Edit distance with unit insert/delete/substitute costs (two-row DP)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        curr = [i]
        for j, cb in enumerate(b, start=1):
            curr.append(min(prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = curr
    return prev[len(b)]


def hamming(a: Sequence[int], b: Sequence[int]) -> int:
    """Number of differing positions; lengths must match."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(1 for x, y in zip(a, b) if x != y)


def _pair_indices(n: int, pair_budget: int | None, seed: int) -> tuple[np.ndarray, np.ndarray]:
    total = n * (n - 1) // 2
    if pair_budget is None:
        pair_budget = total if n <= FULL_PAIRS_LIMIT else SAMPLED_PAIR_BUDGET
    if pair_budget >= total:
        return np.triu_indices(n, k=1)
    rng = np.random.default_rng(seed)
    ia = rng.integers(0, n, size=pair_budget, dtype=np.int64)
    ib = rng.integers(0, n, size=pair_budget, dtype=np.int64)
    clash = ia == ib
    while clash.any():
        ib[clash] = rng.integers(0, n, size=int(clash.sum()), dtype=np.int64)
        clash = ia == ib
    swap = ia > ib
    ia[swap], ib[swap] = ib[swap], ia[swap]
    return ia, ib


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Average ranks (1-based) for small non-negative ints, O(n + max)."""
    counts = np.bincount(values)
    below = np.concatenate(([0], np.cumsum(counts)))
    return below[values] + (counts[values] + 1) / 2.0


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    x = x.astype(np.float64)
    y = y.astype(np.float64)
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc.dot(xc)) * float(yc.dot(yc)))
    if denom == 0.0:
        warnings.warn("zero variance in one distance vector; correlation set to 0.0")
        return 0.0
    return float(xc.dot(yc) / denom)


def _correlate(x: np.ndarray, y: np.ndarray, correlation: str) -> float:
    if correlation == "spearman":
        return _pearson(_average_ranks(x), _average_ranks(y))
    if correlation == "pearson":
        return _pearson(x, y)
    raise ValueError(f"unknown correlation {correlation!r}")


def _corpus_pair_arrays(corpus: Corpus, pair_budget, seed):
    if len(corpus) < 2:
        raise ValueError("need at least 2 pairs to compute pairwise metrics")
    meanings = np.asarray(corpus.meanings, dtype=np.int32)
    padded, lengths = kernels.pack_messages(corpus.messages)
    ia, ib = _pair_indices(len(corpus), pair_budget, seed)
    return meanings, padded, lengths, ia, ib


def topsim(corpus: Corpus, pair_budget: int | None = None, correlation: str = "spearman",
           seed: int = 0, backend: str | None = None) -> float:
    """Correlation between pairwise message edit distance and meaning Hamming
    distance; 0.0 with a warning when either side has zero variance."""
    meanings, padded, lengths, ia, ib = _corpus_pair_arrays(corpus, pair_budget, seed)
    msg_d = kernels.pairwise_levenshtein(padded, lengths, ia, ib, backend=backend)
    mean_d = (meanings[ia] != meanings[ib]).sum(axis=1).astype(np.int32)
    return _correlate(msg_d, mean_d, correlation)


@dataclass(frozen=True)
class FusionScan:
    """topsim plus the best single-pair fusion refit of the meaning space."""

    topsim: float
    f_topsim: float
    delta: float
    best_pair: tuple[int, int]
    per_pair: dict[tuple[int, int], float]


def f_topsim(corpus: Corpus, pair_budget: int | None = None, correlation: str = "spearman",
             seed: int = 0, backend: str | None = None) -> FusionScan:
    """Re-run topsim with each attribute pair fused into one attribute
    (the fused attribute differs when either member differs) and keep the
    best-scoring pair; ties break toward the lowest pair."""
    if corpus.config.n_attributes < 2:
        raise ValueError("f_topsim needs at least 2 attributes")
    meanings, padded, lengths, ia, ib = _corpus_pair_arrays(corpus, pair_budget, seed)
    msg_d = kernels.pairwise_levenshtein(padded, lengths, ia, ib, backend=backend)
    msg_ranks = _average_ranks(msg_d) if correlation == "spearman" else None

    def correlate(mean_d):
        if correlation == "spearman":
            return _pearson(msg_ranks, _average_ranks(mean_d))
        return _correlate(msg_d, mean_d, correlation)

    disagree = meanings[ia] != meanings[ib]
    base_d = disagree.sum(axis=1).astype(np.int32)
    base = correlate(base_d)
    n = corpus.config.n_attributes
    per_pair: dict[tuple[int, int], float] = {}
    best_pair = None
    best = -math.inf
    for a in range(n):
        for b in range(a + 1, n):
            fused_d = base_d - disagree[:, a] - disagree[:, b] + (disagree[:, a] | disagree[:, b])
            score = correlate(fused_d.astype(np.int32))
            per_pair[(a, b)] = score
            if score > best:
                best = score
                best_pair = (a, b)
    return FusionScan(topsim=base, f_topsim=best, delta=best - base,
                      best_pair=best_pair, per_pair=per_pair)


# --- information-theoretic disentanglement ---------------------------------------


def _entropy_of_counts(counts: np.ndarray) -> float:
    counts = counts[counts > 0]
    total = counts.sum()
    p = counts / total
    return float(-(p * np.log(p)).sum())


def _mutual_information(x: np.ndarray, kx: int, y: np.ndarray, ky: int) -> float:
    joint = np.bincount(x * ky + y, minlength=kx * ky).reshape(kx, ky)
    total = joint.sum()
    px = joint.sum(axis=1) / total
    py = joint.sum(axis=0) / total
    p = joint / total
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p > 0, p / (px[:, None] * py[None, :]), 1.0)
        mi = float((p * np.log(ratio)).sum())
    return max(mi, 0.0)


def _top_two_gap(col: np.ndarray, attrs: np.ndarray, cards: tuple[int, ...]) -> float | None:
    """(I(col; best attr) - I(col; runner-up)) / H(col), None when H(col)=0."""
    kx = int(col.max()) + 1
    h = _entropy_of_counts(np.bincount(col))
    if h == 0.0:
        return None
    mis = sorted(
        (_mutual_information(col, kx, attrs[:, j], cards[j]) for j in range(attrs.shape[1])),
        reverse=True,
    )
    return (mis[0] - mis[1]) / h


def _occurrence_matrix(corpus: Corpus, segmented: SegmentedCorpus | None) -> np.ndarray:
    """Per-message occurrence counts: rows = messages, cols = symbol vocab."""
    if segmented is None:
        vocab = corpus.config.vocab_size
        counts = np.zeros((len(corpus), vocab), dtype=np.int32)
        for i, (_, message) in enumerate(corpus.pairs):
            counts[i] = np.bincount(np.asarray(message), minlength=vocab)
        return counts
    vocab = sorted(segmented.symbol_vocab)
    index = {sym: i for i, sym in enumerate(vocab)}
    counts = np.zeros((len(corpus), len(vocab)), dtype=np.int32)
    for i, parts in enumerate(segmented.all_segments()):
        for part in parts:
            counts[i, index[part]] += 1
    return counts


def bosdis(corpus: Corpus, segmented: SegmentedCorpus | None = None) -> float:
    """Bag-of-symbols disentanglement.

    For each symbol, how much its per-message occurrence count singles out
    one attribute over the runner-up, normalized by the count entropy and
    averaged over symbols with non-constant counts.  segmented=None scores
    raw characters.
    """
    cards = corpus.config.cardinalities
    if len(cards) < 2:
        raise ValueError("bosdis needs at least 2 attributes")
    if segmented is not None and segmented.base is not corpus and segmented.base.pairs != corpus.pairs:
        raise ValueError("segmentation belongs to a different corpus")
    attrs = np.asarray(corpus.meanings, dtype=np.int64)
    counts = _occurrence_matrix(corpus, segmented)
    terms = []
    for v in range(counts.shape[1]):
        gap = _top_two_gap(counts[:, v].astype(np.int64), attrs, cards)
        if gap is not None:
            terms.append(gap)
    if not terms:
        return 0.0
    return float(np.mean(terms))


def bosdis_ratio(corpus: Corpus, segmented: SegmentedCorpus) -> float:
    """Symbol-level over character-level BoSDis.

    inf (with a warning) when the character level is zero but the symbol
    level is not; nan when both are zero.
    """
    num = bosdis(corpus, segmented)
    den = bosdis(corpus)
    if den == 0.0:
        warnings.warn("character-level bosdis is zero; ratio is unstable")
        return math.inf if num > 0.0 else math.nan
    return num / den


def posdis(corpus: Corpus) -> float:
    """Positional disentanglement over positions 0..max_len-1.

    Position j is estimated from messages longer than j; constant positions
    contribute 0.  The sum is divided by max_len regardless of how many
    positions were usable.
    """
    cards = corpus.config.cardinalities
    if len(cards) < 2:
        raise ValueError("posdis needs at least 2 attributes")
    attrs = np.asarray(corpus.meanings, dtype=np.int64)
    padded, lengths = kernels.pack_messages(corpus.messages)
    max_len = corpus.config.max_len
    total = 0.0
    for j in range(min(max_len, padded.shape[1])):
        mask = lengths > j
        if not mask.any():
            continue
        gap = _top_two_gap(padded[mask, j].astype(np.int64), attrs[mask], cards)
        if gap is not None:
            total += gap
    return total / max_len


# --- segmentation-derived lengths -------------------------------------------------


def haslen(segmented: SegmentedCorpus) -> float:
    """Mean number of boundaries per message."""
    return float(np.mean([len(cuts) for cuts in segmented.boundaries]))


def bpelen(corpus: Corpus, vocab_sizes: Sequence[int | None],
           merge_list=None) -> dict[int | None, float]:
    """Mean BPE segment count per message at each vocabulary budget
    (None = maximal compression).  Trains once and replays rule prefixes."""
    if merge_list is None:
        merge_list = bpe_train(corpus, None)
    out: dict[int | None, float] = {}
    for size in vocab_sizes:
        rules = merge_list if size is None else merge_list.prefix(min(size, merge_list.vocab_size()))
        seg = bpe_apply(rules, corpus)
        out[size] = float(np.mean([len(cuts) + 1 for cuts in seg.boundaries]))
    return out


# --- articulation ------------------------------------------------------------------


def articulation_violations(message: Message) -> int:
    """Adjacent character pairs with equal parity."""
    return sum(1 for a, b in zip(message, message[1:]) if a % 2 == b % 2)


def articulation_score(message: Message, epsilon: float) -> float:
    """epsilon times the number of same-parity adjacencies (a loss: 0 is best)."""
    return epsilon * articulation_violations(message)


def violation_rate(message: Message) -> float:
    """Violations per adjacency; 0.0 for messages shorter than 2."""
    if len(message) < 2:
        return 0.0
    return articulation_violations(message) / (len(message) - 1)


def mean_violation_rate(corpus: Corpus) -> float:
    return float(np.mean([violation_rate(msg) for msg in corpus.messages]))


# --- sample comparison --------------------------------------------------------------


def compare_means(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Welch two-sided t-test, returning (t, p).

    Both samples need >= 2 observations.  When both are constant the test
    degenerates: p=1 for equal means, p=0 otherwise.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("compare_means needs at least 2 observations per sample")
    if a.var() == 0.0 and b.var() == 0.0:
        if a.mean() == b.mean():
            return 0.0, 1.0
        return math.copysign(math.inf, a.mean() - b.mean()), 0.0
    t, p = scipy.stats.ttest_ind(a, b, equal_var=False)
    return float(t), float(p)


# --- aggregate report ----------------------------------------------------------------


@dataclass(frozen=True)
class MetricReport:
    """Every metric for one corpus, as produced by full_report()."""

    n_messages: int
    topsim: float
    f_topsim: float
    f_topsim_delta: float
    best_fusion_pair: tuple[int, int]
    bosdis_char: float
    bosdis_has: float
    bosdis_bpe96: float
    bosdis_bpe_max: float
    ratio_has: float
    ratio_bpe96: float
    ratio_bpe_max: float
    low_confidence_ratios: bool
    posdis: float
    haslen: float
    bpelen_base: float
    bpelen_96: float
    bpelen_max: float
    articulation_violation_rate: float

    def rows(self) -> list[tuple[str, str]]:
        """Ordered (metric, value) rows for the metric TSV."""
        out = []
        for name in (
            "n_messages", "topsim", "f_topsim", "f_topsim_delta", "best_fusion_pair",
            "bosdis_char", "bosdis_has", "bosdis_bpe96", "bosdis_bpe_max",
            "ratio_has", "ratio_bpe96", "ratio_bpe_max", "low_confidence_ratios",
            "posdis", "haslen", "bpelen_base", "bpelen_96", "bpelen_max",
            "articulation_violation_rate",
        ):
            value = getattr(self, name)
            if isinstance(value, tuple):
                text = ",".join(map(str, value))
            elif isinstance(value, bool):
                text = str(value).lower()
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            out.append((name, text))
        return out


def full_report(corpus: Corpus, pair_budget: int | None = None, seed: int = 0,
                tau: float = 0.0, convention: str = "rise",
                window: int | None = None, epsilon: float = 1.0,
                backend: str | None = None) -> MetricReport:
    """Compute the whole metric suite with shared intermediate results."""
    scan = f_topsim(corpus, pair_budget=pair_budget, seed=seed, backend=backend)

    model = fit_entropy(corpus, window=window)
    seg_has = has_segment(corpus, model, tau=tau, convention=convention)
    merge_list = bpe_train(corpus, None)
    base_vocab = corpus.config.vocab_size
    seg_96 = bpe_apply(merge_list.prefix(min(max(96, base_vocab), merge_list.vocab_size())), corpus)
    seg_max = bpe_apply(merge_list, corpus)

    b_char = bosdis(corpus)
    b_has = bosdis(corpus, seg_has)
    b_96 = bosdis(corpus, seg_96)
    b_max = bosdis(corpus, seg_max)
    if b_char == 0.0:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ratios = [bosdis_ratio(corpus, seg) for seg in (seg_has, seg_96, seg_max)]
    else:
        ratios = [b / b_char for b in (b_has, b_96, b_max)]

    lengths = bpelen(corpus, [base_vocab, max(96, base_vocab), None], merge_list=merge_list)
    return MetricReport(
        n_messages=len(corpus),
        topsim=scan.topsim,
        f_topsim=scan.f_topsim,
        f_topsim_delta=scan.delta,
        best_fusion_pair=scan.best_pair,
        bosdis_char=b_char,
        bosdis_has=b_has,
        bosdis_bpe96=b_96,
        bosdis_bpe_max=b_max,
        ratio_has=ratios[0],
        ratio_bpe96=ratios[1],
        ratio_bpe_max=ratios[2],
        low_confidence_ratios=bool(b_char < LOW_CONFIDENCE_BOSDIS),
        posdis=posdis(corpus),
        haslen=haslen(seg_has),
        bpelen_base=lengths[base_vocab],
        bpelen_96=lengths[max(96, base_vocab)],
        bpelen_max=lengths[None],
        articulation_violation_rate=mean_violation_rate(corpus),
    )
