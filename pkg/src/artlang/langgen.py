"""Artificial language generators with controlled morphological structure.

Each language kind maps every meaning in an attribute-value space to a
message, with a known degree of concatenativity/fusion:

- perfect_concat: one fixed-length symbol per attribute value, concatenated
  in attribute order.
- mixed_concat: attribute 0 concatenated up front, remaining attributes'
  symbols interleaved round-robin.
- nonconcat: all attributes' symbols interleaved round-robin.
- variable_length: concatenative with per-value symbol lengths drawn from 1-4.
- fusion: one attribute pair realized as a single fused symbol per value
  combination, appended after the remaining attributes' symbols.
- mutation: length-L symbols written at overlapping offsets; overlapping
  characters combine by addition mod vocab_size.  overlap=0 puts every
  symbol at offset 0 (full overlap).
- reordering: one function attribute selects a permutation applied to the
  concatenation of the other attributes' symbols.
- random: a fresh uniformly random length-max_len message memorized per
  meaning (the only kind exempt from injectivity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from artlang.core import (
    ENUMERATION_CAP,
    AttrValConfig,
    ConfigError,
    Corpus,
    Meaning,
    Message,
    enumerate_meanings,
)

KINDS = (
    "perfect_concat",
    "mixed_concat",
    "nonconcat",
    "variable_length",
    "fusion",
    "mutation",
    "reordering",
    "random",
)

# Only schedule implemented for interleaving kinds; recorded so corpora from
# future variants stay distinguishable.
INTERLEAVE_SCHEDULE = "round_robin"

_SAMPLE_ATTEMPT_CAP = 10**6
_REBUILD_ATTEMPT_CAP = 32


class CapacityError(ValueError):
    """The requested tables cannot be sampled (or made injective)."""


@dataclass(frozen=True)
class LanguageSpec:
    """A language kind plus the parameters needed to rebuild it exactly."""

    kind: str
    config: AttrValConfig
    seed: int = 0
    fusion_pair: tuple[int, int] | None = None
    overlap: int | None = None
    function_attr: int | None = None
    interleave: str = INTERLEAVE_SCHEDULE

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown language kind {self.kind!r}; known: {', '.join(KINDS)}")
        if self.interleave != INTERLEAVE_SCHEDULE:
            raise ConfigError(f"unknown interleave schedule {self.interleave!r}")
        n = self.config.n_attributes
        if self.fusion_pair is not None:
            if self.kind != "fusion":
                raise ConfigError("fusion_pair only applies to the fusion kind")
            pair = (int(self.fusion_pair[0]), int(self.fusion_pair[1]))
            object.__setattr__(self, "fusion_pair", pair)
            if len(self.fusion_pair) != 2 or pair[0] == pair[1]:
                raise ConfigError("fusion_pair must name two distinct attributes")
            if not all(0 <= a < n for a in pair):
                raise ConfigError(f"fusion_pair {pair} out of range for {n} attributes")
        if self.overlap is not None:
            if self.kind != "mutation":
                raise ConfigError("overlap only applies to the mutation kind")
            if self.overlap < 0:
                raise ConfigError("overlap must be >= 0")
        if self.function_attr is not None:
            if self.kind != "reordering":
                raise ConfigError("function_attr only applies to the reordering kind")
            if not 0 <= self.function_attr < n:
                raise ConfigError(f"function_attr {self.function_attr} out of range")

    def params(self) -> dict[str, str]:
        """Kind-specific parameters, resolved to their effective values."""
        out: dict[str, str] = {}
        if self.kind == "fusion":
            pair = effective_fusion_pair(self)
            out["pair"] = f"{pair[0]},{pair[1]}"
        elif self.kind == "mutation":
            out["k"] = str(self.overlap if self.overlap is not None else 0)
        elif self.kind == "reordering":
            out["func"] = str(effective_function_attr(self))
        if self.kind in ("mixed_concat", "nonconcat"):
            out["interleave"] = self.interleave
        return out


def effective_fusion_pair(spec: LanguageSpec) -> tuple[int, int]:
    """Explicit pair, or the two lowest-cardinality attributes (ties toward
    higher indices, so the default preset fuses attributes 1 and 2)."""
    if spec.fusion_pair is not None:
        return tuple(sorted(spec.fusion_pair))
    order = sorted(range(spec.config.n_attributes), key=lambda i: (spec.config.cardinalities[i], -i))
    return tuple(sorted(order[:2]))


def effective_function_attr(spec: LanguageSpec) -> int:
    return spec.function_attr if spec.function_attr is not None else spec.config.n_attributes - 1


def _split_lengths(total: int, slots: int) -> list[int]:
    """Split total characters over slots; earlier slots absorb the remainder."""
    if slots < 1 or total < slots:
        raise ConfigError(f"cannot fit {slots} symbols of length >= 1 into {total} characters")
    base, rem = divmod(total, slots)
    return [base + (1 if i < rem else 0) for i in range(slots)]


def _sample_distinct(rng: np.random.Generator, count: int, length: int, vocab: int,
                     taken: set | None = None) -> list[tuple[int, ...]]:
    """Sample `count` distinct length-`length` symbols by rejection."""
    same_length_taken = sum(1 for s in taken if len(s) == length) if taken else 0
    if vocab ** length < count + same_length_taken:
        raise CapacityError(
            f"need {count} distinct symbols of length {length} over {vocab} characters"
        )
    seen: set = set(taken) if taken else set()
    out: list[tuple[int, ...]] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > _SAMPLE_ATTEMPT_CAP:
            raise CapacityError("symbol sampling attempt cap exceeded")
        sym = tuple(int(c) for c in rng.integers(0, vocab, size=length))
        if sym in seen:
            continue
        seen.add(sym)
        out.append(sym)
    return out


def _interleave(parts: list[tuple[int, ...]]) -> tuple[int, ...]:
    """Round-robin merge: position 0 of every part, then position 1, ..."""
    out = []
    for pos in range(max(len(p) for p in parts)):
        for part in parts:
            if pos < len(part):
                out.append(part[pos])
    return tuple(out)


class Language:
    """A built language: per-slot symbol tables plus an encode() map.

    Construct via build_language(); the tables attribute layout depends on
    the kind (see _build_tables).
    """

    def __init__(self, spec: LanguageSpec, tables, extras=None):
        self.spec = spec
        self.tables = tables
        self.extras = extras or {}

    def encode(self, meaning: Meaning) -> Message:
        spec = self.spec
        cfg = spec.config
        meaning = tuple(meaning)
        if len(meaning) != cfg.n_attributes or any(
            not 0 <= v < c for v, c in zip(meaning, cfg.cardinalities)
        ):
            raise ValueError(f"meaning {meaning} not in space {cfg.cardinalities}")
        kind = spec.kind
        if kind in ("perfect_concat", "variable_length"):
            out = []
            for attr, value in enumerate(meaning):
                out.extend(self.tables[attr][value])
            return tuple(out)
        if kind == "mixed_concat":
            head = self.tables[0][meaning[0]]
            rest = [self.tables[a][meaning[a]] for a in range(1, cfg.n_attributes)]
            return head + _interleave(rest)
        if kind == "nonconcat":
            return _interleave([self.tables[a][meaning[a]] for a in range(cfg.n_attributes)])
        if kind == "fusion":
            pair = self.extras["pair"]
            out = []
            for attr, value in enumerate(meaning):
                if attr not in pair:
                    out.extend(self.tables[attr][value])
            out.extend(self.extras["fused"][(meaning[pair[0]], meaning[pair[1]])])
            return tuple(out)
        if kind == "mutation":
            msg = [0] * cfg.max_len
            offsets = self.extras["offsets"]
            for attr, value in enumerate(meaning):
                sym = self.tables[attr][value]
                base = offsets[attr]
                for i, ch in enumerate(sym):
                    msg[base + i] = (msg[base + i] + ch) % cfg.vocab_size
            return tuple(msg)
        if kind == "reordering":
            func = self.extras["func"]
            base = []
            for attr, value in enumerate(meaning):
                if attr != func:
                    base.extend(self.tables[attr][value])
            perm = self.extras["perms"][meaning[func]]
            return tuple(base[p] for p in perm)
        if kind == "random":
            return self.extras["memo"][meaning]
        raise AssertionError(kind)


def _build_tables(spec: LanguageSpec, rng: np.random.Generator):
    """Draw symbol tables (and kind-specific extras) from rng."""
    cfg = spec.config
    n = cfg.n_attributes
    vocab = cfg.vocab_size
    m = cfg.max_len
    kind = spec.kind

    if kind in ("perfect_concat", "mixed_concat", "nonconcat"):
        lengths = _split_lengths(m, n)
        tables = [_sample_distinct(rng, cfg.cardinalities[a], lengths[a], vocab) for a in range(n)]
        return tables, {}

    if kind == "variable_length":
        tables = []
        for a in range(n):
            card = cfg.cardinalities[a]
            for _ in range(1000):
                lens = [int(x) for x in rng.integers(1, 5, size=card)]
                # distinctness only binds within a length class
                if all(sum(1 for x in lens if x == l) <= vocab ** l for l in set(lens)):
                    break
            else:
                raise CapacityError(f"cannot allocate {card} variable-length symbols")
            taken: set = set()
            table = []
            for length in lens:
                sym = _sample_distinct(rng, 1, length, vocab, taken=taken)[0]
                taken.add(sym)
                table.append(sym)
            tables.append(table)
        return tables, {}

    if kind == "fusion":
        if n < 2:
            raise ConfigError("fusion needs at least two attributes")
        pair = effective_fusion_pair(spec)
        root_len = m // n
        fused_len = m - root_len * (n - 2)
        if n > 2 and root_len < 1:
            raise ConfigError(f"cannot fit {n - 1} symbols into {m} characters")
        if fused_len < 1:
            raise ConfigError("no characters left for the fused symbol")
        tables: dict[int, list] = {}
        for a in range(n):
            if a not in pair:
                tables[a] = _sample_distinct(rng, cfg.cardinalities[a], root_len, vocab)
        combos = cfg.cardinalities[pair[0]] * cfg.cardinalities[pair[1]]
        flat = _sample_distinct(rng, combos, fused_len, vocab)
        fused = {}
        i = 0
        for va in range(cfg.cardinalities[pair[0]]):
            for vb in range(cfg.cardinalities[pair[1]]):
                fused[(va, vb)] = flat[i]
                i += 1
        return tables, {"pair": pair, "fused": fused}

    if kind == "mutation":
        k = spec.overlap if spec.overlap is not None else 0
        if k == 0:
            length, step = m, 0
        else:
            if (m + (n - 1) * k) % n != 0:
                raise ConfigError(
                    f"overlap {k} incompatible with max_len {m} and {n} attributes"
                )
            length = (m + (n - 1) * k) // n
            if k > length:
                raise ConfigError(f"overlap {k} exceeds symbol length {length}")
            step = length - k
        offsets = [a * step for a in range(n)]
        tables = [_sample_distinct(rng, cfg.cardinalities[a], length, vocab) for a in range(n)]
        return tables, {"offsets": offsets, "length": length}

    if kind == "reordering":
        if n < 2:
            raise ConfigError("reordering needs at least two attributes")
        func = effective_function_attr(spec)
        content = [a for a in range(n) if a != func]
        lengths = dict(zip(content, _split_lengths(m, len(content))))
        tables = {a: _sample_distinct(rng, cfg.cardinalities[a], lengths[a], vocab) for a in content}
        if math.factorial(m) < cfg.cardinalities[func]:
            raise CapacityError(f"not enough permutations of length {m}")
        perms: list[tuple[int, ...]] = []
        seen: set = set()
        attempts = 0
        while len(perms) < cfg.cardinalities[func]:
            attempts += 1
            if attempts > _SAMPLE_ATTEMPT_CAP:
                raise CapacityError("permutation sampling attempt cap exceeded")
            perm = tuple(int(x) for x in rng.permutation(m))
            if perm in seen:
                continue
            seen.add(perm)
            perms.append(perm)
        return tables, {"func": func, "perms": perms}

    if kind == "random":
        meanings = enumerate_meanings(cfg)
        memo = {
            meaning: tuple(int(c) for c in rng.integers(0, vocab, size=m))
            for meaning in meanings
        }
        return {}, {"memo": memo}

    raise AssertionError(kind)


def build_language(spec: LanguageSpec) -> Language:
    """Build the language deterministically from spec.seed.

    All kinds except random are checked for injectivity over the full
    meaning space (when enumerable); kinds whose tables can collide are
    redrawn from the continuing rng stream until injective.
    """
    rng = np.random.default_rng(spec.seed)
    retryable = spec.kind in ("variable_length", "mutation", "reordering")
    for attempt in range(_REBUILD_ATTEMPT_CAP):
        tables, extras = _build_tables(spec, rng)
        lang = Language(spec, tables, extras)
        if spec.kind == "random" or spec.config.space_size() > ENUMERATION_CAP:
            return lang
        seen: set[Message] = set()
        injective = True
        for meaning in enumerate_meanings(spec.config):
            msg = lang.encode(meaning)
            if msg in seen:
                injective = False
                break
            seen.add(msg)
        if injective:
            return lang
        if not retryable:
            raise AssertionError(f"{spec.kind} produced colliding messages")
    raise CapacityError(
        f"could not build an injective {spec.kind} language in {_REBUILD_ATTEMPT_CAP} attempts"
    )


def generate_corpus(spec: LanguageSpec, cap: int = ENUMERATION_CAP) -> Corpus:
    """Encode the whole meaning space under the built language.

    The corpus config's max_len is raised to the longest generated message
    (variable_length can exceed the nominal cap since per-value symbol
    lengths are drawn independently).
    """
    lang = build_language(spec)
    meanings = enumerate_meanings(spec.config, cap)
    pairs = [(meaning, lang.encode(meaning)) for meaning in meanings]
    longest = max(len(msg) for _, msg in pairs)
    cfg = spec.config
    if longest > cfg.max_len:
        cfg = replace(cfg, max_len=longest)
    metadata = {"kind": spec.kind, "seed": str(spec.seed), **lang.spec.params()}
    return Corpus(cfg, pairs, metadata)


def parse_language_spec(text: str, config: AttrValConfig, seed: int = 0) -> LanguageSpec:
    """Parse CLI language strings: 'kind' or 'kind:key=v[;key=v]'.

    Keys: pair=i,j (fusion), k=N (mutation), func=N (reordering).
    """
    kind, _, param_text = text.partition(":")
    kind = kind.strip()
    kwargs: dict = {}
    if param_text:
        for item in param_text.split(";"):
            key, eq, value = item.partition("=")
            key = key.strip()
            if not eq:
                raise ConfigError(f"bad language parameter {item!r} (expected key=value)")
            try:
                ints = tuple(int(x) for x in value.split(","))
            except ValueError:
                raise ConfigError(f"bad language parameter value {value!r}") from None
            if key == "pair":
                if len(ints) != 2:
                    raise ConfigError("pair takes two attribute indices")
                kwargs["fusion_pair"] = ints
            elif key == "k":
                if len(ints) != 1:
                    raise ConfigError("k takes one integer")
                kwargs["overlap"] = ints[0]
            elif key == "func":
                if len(ints) != 1:
                    raise ConfigError("func takes one integer")
                kwargs["function_attr"] = ints[0]
            else:
                raise ConfigError(f"unknown language parameter {key!r}")
    return LanguageSpec(kind=kind, config=config, seed=seed, **kwargs)


def identity_corpus(cardinalities: tuple[int, ...]) -> Corpus:
    """Calibration language: message[i] = value_i written in a per-attribute
    disjoint character range, so edit distance equals meaning Hamming
    distance and topographic similarity is exactly 1."""
    cards = tuple(int(c) for c in cardinalities)
    vocab = max(2, sum(cards))
    cfg = AttrValConfig(cards, vocab_size=vocab, max_len=max(1, len(cards)))
    offsets = [0] * len(cards)
    for i in range(1, len(cards)):
        offsets[i] = offsets[i - 1] + cards[i - 1]
    pairs = [
        (meaning, tuple(offsets[i] + v for i, v in enumerate(meaning)))
        for meaning in enumerate_meanings(cfg)
    ]
    return Corpus(cfg, pairs, {"kind": "identity"})
