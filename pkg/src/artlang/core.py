"""Attribute-value meaning spaces, corpora, and their on-disk formats.

A meaning is a tuple of attribute values, a message a tuple of character
ids.  Corpora pair the two and are exchanged as two-column TSV files; the
space shape travels in a small key=value config file.
"""

from __future__ import annotations

import math
import itertools
from dataclasses import dataclass, field
from pathlib import Path

Meaning = tuple[int, ...]
Message = tuple[int, ...]

# Hard ceiling on meaning-space enumeration (and on anything that walks it).
ENUMERATION_CAP = 10**6

CORPUS_HEADER = "meaning\tmessage"


class ConfigError(ValueError):
    """An AttrValConfig (or config file) violates its invariants."""


class ParseError(ValueError):
    """A corpus or config file is malformed; the message names the line."""


class SpaceSizeError(ValueError):
    """A meaning space is too large to enumerate."""


@dataclass(frozen=True)
class AttrValConfig:
    """Shape of an attribute-value space plus message alphabet limits.

    cardinalities: number of distinct values per attribute.
    vocab_size: number of distinct message characters (|C|).
    max_len: maximum message length in characters (m).
    attribute_weights: per-attribute sampling/loss weights; None = uniform.
    """

    cardinalities: tuple[int, ...]
    vocab_size: int = 8
    max_len: int = 9
    attribute_weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "cardinalities", tuple(int(c) for c in self.cardinalities))
        if not self.cardinalities:
            raise ConfigError("need at least one attribute")
        if any(c < 1 for c in self.cardinalities):
            raise ConfigError(f"cardinalities must all be >= 1, got {self.cardinalities}")
        if self.vocab_size < 2:
            raise ConfigError(f"vocab_size must be >= 2, got {self.vocab_size}")
        if self.max_len < 1:
            raise ConfigError(f"max_len must be >= 1, got {self.max_len}")
        if self.attribute_weights is not None:
            weights = tuple(float(w) for w in self.attribute_weights)
            object.__setattr__(self, "attribute_weights", weights)
            if len(weights) != len(self.cardinalities):
                raise ConfigError("attribute_weights length must match cardinalities")
            if any(w < 0 for w in weights):
                raise ConfigError("attribute_weights must be non-negative")
            if abs(sum(weights) - 1.0) > 1e-9:
                raise ConfigError(f"attribute_weights must sum to 1, got {sum(weights)}")

    @property
    def n_attributes(self) -> int:
        return len(self.cardinalities)

    def space_size(self) -> int:
        return math.prod(self.cardinalities)

    def weights(self) -> tuple[float, ...]:
        """Effective attribute weights (uniform when unset)."""
        if self.attribute_weights is not None:
            return self.attribute_weights
        return (1.0 / self.n_attributes,) * self.n_attributes


PRESETS: dict[str, AttrValConfig] = {
    "default": AttrValConfig(cardinalities=(16, 16, 16), vocab_size=8, max_len=9),
    "inflection": AttrValConfig(
        cardinalities=(42, 2, 3),
        vocab_size=8,
        max_len=9,
        attribute_weights=(0.9, 0.05, 0.05),
    ),
}


def preset(name: str) -> AttrValConfig:
    """Look up a named preset config ('default' or 'inflection')."""
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset {name!r}; known presets: {known}") from None


def enumerate_meanings(config: AttrValConfig, cap: int = ENUMERATION_CAP) -> list[Meaning]:
    """All meanings in lexicographic (mixed-radix, first attribute slowest) order.

    Raises SpaceSizeError when the space exceeds `cap` (default 10**6).
    """
    size = config.space_size()
    if size > cap:
        raise SpaceSizeError(f"meaning space has {size} points, cap is {cap}")
    return list(itertools.product(*(range(c) for c in config.cardinalities)))


@dataclass
class Corpus:
    """Meaning-message pairs under one config.

    Invariants checked on construction: at least one pair, meanings unique
    and in range, messages non-empty with characters < vocab_size and
    length <= max_len.
    """

    config: AttrValConfig
    pairs: list[tuple[Meaning, Message]]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.pairs = [(tuple(m), tuple(s)) for m, s in self.pairs]
        if not self.pairs:
            raise ValueError("corpus has no pairs")
        cfg = self.config
        seen: set[Meaning] = set()
        for i, (meaning, message) in enumerate(self.pairs):
            if len(meaning) != cfg.n_attributes:
                raise ValueError(f"pair {i}: meaning has {len(meaning)} values, expected {cfg.n_attributes}")
            for j, v in enumerate(meaning):
                if not 0 <= v < cfg.cardinalities[j]:
                    raise ValueError(f"pair {i}: attribute {j} value {v} out of range")
            if meaning in seen:
                raise ValueError(f"pair {i}: duplicate meaning {meaning}")
            seen.add(meaning)
            if not 1 <= len(message) <= cfg.max_len:
                raise ValueError(f"pair {i}: message length {len(message)} not in 1..{cfg.max_len}")
            for ch in message:
                if not 0 <= ch < cfg.vocab_size:
                    raise ValueError(f"pair {i}: character {ch} out of range 0..{cfg.vocab_size - 1}")

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def meanings(self) -> list[Meaning]:
        return [m for m, _ in self.pairs]

    @property
    def messages(self) -> list[Message]:
        return [s for _, s in self.pairs]


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the two-column TSV form (comma-joined ints, \\n endings)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CORPUS_HEADER + "\n")
        for meaning, message in corpus.pairs:
            fh.write(",".join(map(str, meaning)) + "\t" + ",".join(map(str, message)) + "\n")


def _parse_int_list(text: str, lineno: int, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ParseError(f"line {lineno}: bad {what} {text!r}") from None


def read_corpus(path: str | Path, config: AttrValConfig | None = None) -> Corpus:
    """Read a corpus TSV.

    Config resolution order: explicit argument, then a `<stem>.config`
    sidecar next to the file, then inference from the data (per-attribute
    max+1, max character+1, longest message).
    """
    path = Path(path)
    pairs: list[tuple[Meaning, Message]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(f"{path.name}: empty file, no pairs")
    if lines[0] != CORPUS_HEADER:
        raise ParseError(f"line 1: expected header {CORPUS_HEADER!r}, got {lines[0]!r}")
    seen: dict[Meaning, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(f"line {lineno}: expected 2 tab-separated fields, got {len(fields)}")
        meaning = _parse_int_list(fields[0], lineno, "meaning")
        message = _parse_int_list(fields[1], lineno, "message")
        if meaning in seen:
            raise ParseError(f"line {lineno}: duplicate meaning (first seen line {seen[meaning]})")
        seen[meaning] = lineno
        pairs.append((meaning, message))
    if not pairs:
        raise ParseError(f"{path.name}: no pairs")

    if config is None:
        sidecar = path.with_suffix(".config")
        if sidecar.exists():
            config = read_config(sidecar)
        else:
            n_attr = len(pairs[0][0])
            for lineno, (meaning, _) in enumerate(pairs, start=2):
                if len(meaning) != n_attr:
                    raise ParseError(f"line {lineno}: meaning has {len(meaning)} values, expected {n_attr}")
            cards = tuple(max(m[j] for m, _ in pairs) + 1 for j in range(n_attr))
            vocab = max(2, max(max(s) for _, s in pairs) + 1)
            max_len = max(len(s) for _, s in pairs)
            config = AttrValConfig(cards, vocab_size=vocab, max_len=max_len)
    try:
        return Corpus(config, pairs)
    except ValueError as exc:
        raise ParseError(f"{path.name}: {exc}") from None


def write_config(config: AttrValConfig, path: str | Path) -> None:
    """Write the key=value config format; weights line omitted when uniform."""
    lines = [
        "cardinalities=" + ",".join(map(str, config.cardinalities)),
        f"vocab_size={config.vocab_size}",
        f"max_len={config.max_len}",
    ]
    if config.attribute_weights is not None:
        lines.append("weights=" + ",".join(repr(w) for w in config.attribute_weights))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_config(path: str | Path) -> AttrValConfig:
    """Read the key=value config format written by write_config."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"line {lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in ("cardinalities", "vocab_size", "max_len", "weights"):
                raise ParseError(f"line {lineno}: unknown key {key!r}")
            if key in values:
                raise ParseError(f"line {lineno}: duplicate key {key!r}")
            values[key] = value.strip()
    if "cardinalities" not in values:
        raise ParseError(f"{Path(path).name}: missing required key 'cardinalities'")
    try:
        cards = tuple(int(c) for c in values["cardinalities"].split(","))
        vocab = int(values.get("vocab_size", "8"))
        max_len = int(values.get("max_len", "9"))
        weights = None
        if "weights" in values:
            weights = tuple(float(w) for w in values["weights"].split(","))
    except ValueError as exc:
        raise ParseError(f"{Path(path).name}: {exc}") from None
    try:
        return AttrValConfig(cards, vocab_size=vocab, max_len=max_len, attribute_weights=weights)
    except ConfigError as exc:
        raise ParseError(f"{Path(path).name}: {exc}") from None
