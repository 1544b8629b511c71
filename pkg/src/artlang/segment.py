"""Message segmentation: branching entropy and byte-pair encoding.

Both segmenters produce a SegmentedCorpus: the base corpus plus per-message
cut indices and the induced symbol vocabulary.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from artlang.core import Corpus, Message, ParseError

HAS_CONVENTIONS = ("rise", "verbatim")


def split_message(message: Message, cuts: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Cut a message at the given indices (cut i splits chars [0,i) / [i,...))."""
    points = [0, *cuts, len(message)]
    return [tuple(message[a:b]) for a, b in zip(points, points[1:])]


@dataclass
class SegmentedCorpus:
    """A corpus with one sorted tuple of cut indices per message."""

    base: Corpus
    boundaries: list[tuple[int, ...]]
    meta: dict[str, str] = field(default_factory=dict)
    symbol_vocab: frozenset = field(init=False)

    def __post_init__(self) -> None:
        self.boundaries = [tuple(int(c) for c in cuts) for cuts in self.boundaries]
        if len(self.boundaries) != len(self.base.pairs):
            raise ValueError(
                f"{len(self.boundaries)} boundary rows for {len(self.base.pairs)} messages"
            )
        vocab = set()
        for i, ((_, message), cuts) in enumerate(zip(self.base.pairs, self.boundaries)):
            last = 0
            for cut in cuts:
                if not last < cut < len(message):
                    raise ValueError(f"message {i}: cut {cut} invalid for length {len(message)}")
                last = cut
            vocab.update(split_message(message, cuts))
        self.symbol_vocab = frozenset(vocab)

    def segments(self, i: int) -> list[tuple[int, ...]]:
        return split_message(self.base.pairs[i][1], self.boundaries[i])

    def all_segments(self) -> list[list[tuple[int, ...]]]:
        return [self.segments(i) for i in range(len(self.boundaries))]


SEGMENTED_HEADER = "meaning\tmessage\tboundaries"


def write_segmented(seg: SegmentedCorpus, path: str | Path) -> None:
    """Corpus TSV plus a third comma-joined cut-index column (empty = no cuts)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SEGMENTED_HEADER + "\n")
        for (meaning, message), cuts in zip(seg.base.pairs, seg.boundaries):
            fh.write(
                ",".join(map(str, meaning))
                + "\t" + ",".join(map(str, message))
                + "\t" + ",".join(map(str, cuts))
                + "\n"
            )


def read_segmented(path: str | Path, config=None) -> SegmentedCorpus:
    """Read the three-column segmented TSV (config resolved as in read_corpus)."""
    from artlang.core import AttrValConfig, read_config

    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(f"{path.name}: empty file, no pairs")
    if lines[0] != SEGMENTED_HEADER:
        raise ParseError(f"line 1: expected header {SEGMENTED_HEADER!r}, got {lines[0]!r}")
    pairs = []
    boundaries = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        try:
            meaning = tuple(int(x) for x in fields[0].split(","))
            message = tuple(int(x) for x in fields[1].split(","))
            cuts = tuple(int(x) for x in fields[2].split(",")) if fields[2] else ()
        except ValueError:
            raise ParseError(f"line {lineno}: bad integer field") from None
        pairs.append((meaning, message))
        boundaries.append(cuts)
    if config is None:
        sidecar = path.with_suffix(".config")
        if sidecar.exists():
            config = read_config(sidecar)
        else:
            n_attr = len(pairs[0][0])
            cards = tuple(max(m[j] for m, _ in pairs) + 1 for j in range(n_attr))
            vocab = max(2, max(max(s) for _, s in pairs) + 1)
            config = AttrValConfig(cards, vocab_size=vocab, max_len=max(len(s) for _, s in pairs))
    try:
        return SegmentedCorpus(Corpus(config, pairs), boundaries)
    except ValueError as exc:
        raise ParseError(f"{path.name}: {exc}") from None


# --- branching entropy ---------------------------------------------------------


def _context(message: Message, pos: int, window: int | None) -> tuple[int, ...]:
    if window is None:
        return tuple(message[:pos])
    return tuple(message[max(0, pos - window):pos])


@dataclass
class EntropyModel:
    """Next-character distributions keyed by (windowed) prefix context."""

    window: int | None
    _counts: dict[tuple[int, ...], Counter]
    _entropy: dict[tuple[int, ...], float]

    def distribution(self, context: tuple[int, ...]) -> dict[int, float]:
        counts = self._counts.get(tuple(context))
        if not counts:
            return {}
        total = sum(counts.values())
        return {ch: c / total for ch, c in counts.items()}

    def entropy(self, context: tuple[int, ...]) -> float:
        """Branching entropy (nats) after the context; 0.0 when unseen."""
        return self._entropy.get(tuple(context), 0.0)

    def message_entropies(self, message: Message) -> list[float]:
        """H_i for i = 0..len-1: entropy after consuming i characters."""
        return [self.entropy(_context(message, i, self.window)) for i in range(len(message))]


def fit_entropy(corpus: Corpus, window: int | None = None) -> EntropyModel:
    """Estimate next-character distributions over every corpus position.

    window=None keys contexts by the full message prefix; window=w keys by
    the last w prefix characters.
    """
    counts: dict[tuple[int, ...], Counter] = {}
    for _, message in corpus.pairs:
        for pos in range(len(message)):
            ctx = _context(message, pos, window)
            if ctx not in counts:
                counts[ctx] = Counter()
            counts[ctx][message[pos]] += 1
    entropy = {}
    for ctx, counter in counts.items():
        total = sum(counter.values())
        entropy[ctx] = -sum((c / total) * math.log(c / total) for c in counter.values())
    return EntropyModel(window=window, _counts=counts, _entropy=entropy)


def has_segment(corpus: Corpus, model: EntropyModel | None = None, tau: float = 0.0,
                convention: str = "rise") -> SegmentedCorpus:
    """Cut wherever branching entropy moves against the expected decline.

    rise (default): cut at i (1 <= i <= len-1) iff H_i - H_{i-1} > tau.
    verbatim: cut at i (1 <= i <= len-2) iff H_i - H_{i+1} > tau.
    """
    if convention not in HAS_CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; known: {', '.join(HAS_CONVENTIONS)}")
    if model is None:
        model = fit_entropy(corpus)
    boundaries = []
    for _, message in corpus.pairs:
        ent = model.message_entropies(message)
        if convention == "rise":
            cuts = tuple(i for i in range(1, len(message)) if ent[i] - ent[i - 1] > tau)
        else:
            cuts = tuple(i for i in range(1, len(message) - 1) if ent[i] - ent[i + 1] > tau)
        boundaries.append(cuts)
    meta = {
        "segmenter": "has",
        "tau": repr(tau),
        "convention": convention,
        "window": "none" if model.window is None else str(model.window),
    }
    return SegmentedCorpus(corpus, boundaries, meta)


# --- byte-pair encoding ---------------------------------------------------------


Symbol = tuple[int, ...]
MergeRule = tuple[Symbol, Symbol]


@dataclass(frozen=True)
class MergeList:
    """Ordered BPE merge rules over a base character vocabulary."""

    base_vocab: int
    merges: tuple[MergeRule, ...]

    def vocab_size(self) -> int:
        return self.base_vocab + len(self.merges)

    def prefix(self, max_vocab: int) -> "MergeList":
        """The merge list a smaller vocabulary budget would have produced."""
        if max_vocab < self.base_vocab:
            raise ValueError(f"max_vocab {max_vocab} below base vocabulary {self.base_vocab}")
        return MergeList(self.base_vocab, self.merges[: max_vocab - self.base_vocab])


def dump_merges(merge_list: MergeList, path: str | Path) -> None:
    """One rule per line: left and right symbols as comma-joined characters."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for left, right in merge_list.merges:
            fh.write(",".join(map(str, left)) + "\t" + ",".join(map(str, right)) + "\n")


def load_merges(path: str | Path, base_vocab: int) -> MergeList:
    merges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ParseError(f"line {lineno}: expected 2 tab-separated fields")
            try:
                left = tuple(int(x) for x in fields[0].split(","))
                right = tuple(int(x) for x in fields[1].split(","))
            except ValueError:
                raise ParseError(f"line {lineno}: bad merge rule") from None
            merges.append((left, right))
    return MergeList(base_vocab, tuple(merges))


def _merge_pass(seq: list, left: Symbol, right: Symbol, joined: Symbol) -> list:
    """One left-to-right non-overlapping pass replacing (left, right)."""
    out = []
    i = 0
    n = len(seq)
    while i < n:
        if i + 1 < n and seq[i] == left and seq[i + 1] == right:
            out.append(joined)
            i += 2
        else:
            out.append(seq[i])
            i += 1
    return out


def bpe_train(corpus: Corpus, max_vocab: int | None) -> MergeList:
    """Learn merge rules by greedy most-frequent-pair merging.

    Stops when the best pair occurs fewer than 2 times, or when the symbol
    inventory (base characters + merges) reaches max_vocab; max_vocab=None
    means merge to the frequency floor (maximal compression).  Ties on count
    break toward the lexicographically smallest (left, right) pair.

    Pair counts are maintained incrementally with a lazy max-heap; entries
    are re-validated against the current count on pop.
    """
    base = corpus.config.vocab_size
    if max_vocab is not None and max_vocab < base:
        raise ValueError(f"max_vocab {max_vocab} below base vocabulary {base}")
    budget = math.inf if max_vocab is None else max_vocab - base

    seqs: list[list[Symbol]] = [[(ch,) for ch in message] for _, message in corpus.pairs]
    counts: dict[MergeRule, int] = {}
    where: dict[MergeRule, set[int]] = {}
    for msg_id, seq in enumerate(seqs):
        for pair in zip(seq, seq[1:]):
            counts[pair] = counts.get(pair, 0) + 1
            where.setdefault(pair, set()).add(msg_id)
    heap = [(-count, pair[0], pair[1]) for pair, count in counts.items()]
    heapq.heapify(heap)

    merges: list[MergeRule] = []
    while len(merges) < budget:
        pair = None
        while heap:
            neg, left, right = heapq.heappop(heap)
            if counts.get((left, right), 0) == -neg:
                pair = (left, right)
                break
        if pair is None or counts[pair] < 2:
            break
        left, right = pair
        joined = left + right
        merges.append(pair)
        changed: set[MergeRule] = set()
        for msg_id in where.pop(pair, ()):
            seq = seqs[msg_id]
            old = Counter(zip(seq, seq[1:]))
            if (left, right) not in old:
                continue  # stale index entry
            new_seq = _merge_pass(seq, left, right, joined)
            seqs[msg_id] = new_seq
            new = Counter(zip(new_seq, new_seq[1:]))
            for p, c in old.items():
                remaining = counts[p] - c
                if remaining:
                    counts[p] = remaining
                else:
                    del counts[p]
                changed.add(p)
            for p, c in new.items():
                counts[p] = counts.get(p, 0) + c
                where.setdefault(p, set()).add(msg_id)
                changed.add(p)
        assert pair not in counts
        for p in changed:
            if p in counts:
                heapq.heappush(heap, (-counts[p], p[0], p[1]))
    return MergeList(base, tuple(merges))


def bpe_apply(merge_list: MergeList, corpus: Corpus) -> SegmentedCorpus:
    """Tokenize by repeatedly applying the lowest-rank applicable rule
    (one full left-to-right pass per application); equivalent to replaying
    the rules in training order."""
    ranks: dict[MergeRule, int] = {}
    rules: dict[MergeRule, Symbol] = {}
    for i, (left, right) in enumerate(merge_list.merges):
        if (left, right) not in ranks:
            ranks[(left, right)] = i
            rules[(left, right)] = left + right
    boundaries = []
    for _, message in corpus.pairs:
        for ch in message:
            if ch >= merge_list.base_vocab:
                raise ValueError(
                    f"character {ch} outside base vocabulary {merge_list.base_vocab}"
                )
        seq: list[Symbol] = [(ch,) for ch in message]
        while len(seq) > 1:
            best = None
            for pair in zip(seq, seq[1:]):
                rank = ranks.get(pair)
                if rank is not None and (best is None or rank < best[0]):
                    best = (rank, pair)
            if best is None:
                break
            _, pair = best
            seq = _merge_pass(seq, pair[0], pair[1], rules[pair])
        cuts = []
        pos = 0
        for sym in seq[:-1]:
            pos += len(sym)
            cuts.append(pos)
        boundaries.append(tuple(cuts))
    meta = {
        "segmenter": "bpe",
        "vocab": str(merge_list.vocab_size()),
        "merges": str(len(merge_list.merges)),
    }
    return SegmentedCorpus(corpus, boundaries, meta)


def has_segmenter(tau: float = 0.0, convention: str = "rise", window: int | None = None):
    """Corpus -> SegmentedCorpus closure fitting entropy on the corpus itself."""

    def segmenter(corpus: Corpus) -> SegmentedCorpus:
        return has_segment(corpus, fit_entropy(corpus, window), tau=tau, convention=convention)

    return segmenter


def bpe_segmenter(max_vocab: int | None = 96):
    """Corpus -> SegmentedCorpus closure training BPE on the corpus itself."""

    def segmenter(corpus: Corpus) -> SegmentedCorpus:
        return bpe_apply(bpe_train(corpus, max_vocab), corpus)

    return segmenter
