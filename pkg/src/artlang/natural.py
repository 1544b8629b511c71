"""Natural-language inflection tables as attribute-value corpora.

Loads lexeme/tense/person paradigm tables, maps surface forms to grapheme
ids over a table-wide alphabet, and samples fixed-shape sublanguages whose
segmentations can be scored for morphological meaningfulness.
"""

from __future__ import annotations

import csv
import io
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from artlang.core import AttrValConfig, Corpus, ParseError
from artlang.metrics import bosdis_ratio
from artlang.segment import SegmentedCorpus

TABLE_HEADER = ("lexeme", "tense", "person", "form")

# Categories that attach to the preceding base character.  This clusters
# combining marks only, an approximation of full extended grapheme clusters
# that is exact for the bundled Latin data.
_COMBINING = ("Mn", "Mc", "Me")


class CoverageError(ValueError):
    """The table cannot fill the requested sublanguage shape."""


class InflectionRecord(NamedTuple):
    lexeme: str
    tense: str
    person: str
    form: str


def graphemes(text: str) -> list[str]:
    """Split NFC-normalized text into base+combining-mark clusters."""
    out: list[str] = []
    for ch in unicodedata.normalize("NFC", text):
        if out and unicodedata.category(ch) in _COMBINING:
            out[-1] += ch
        else:
            out.append(ch)
    return out


@dataclass(frozen=True)
class InflectionTable:
    """Paradigm records plus the table-wide grapheme alphabet.

    The alphabet is shared by every sublanguage sampled from the table, so
    their corpora stay character-compatible.
    """

    records: tuple[InflectionRecord, ...]
    alphabet: tuple[str, ...]

    @property
    def forms(self) -> dict[tuple[str, str, str], str]:
        return {(r.lexeme, r.tense, r.person): r.form for r in self.records}

    def lexemes(self) -> list[str]:
        return sorted({r.lexeme for r in self.records})

    def tenses(self) -> list[str]:
        return sorted({r.tense for r in self.records})

    def persons(self) -> list[str]:
        return sorted({r.person for r in self.records})

    def encode(self, form: str) -> tuple[int, ...]:
        index = {g: i for i, g in enumerate(self.alphabet)}
        try:
            return tuple(index[g] for g in graphemes(form))
        except KeyError as exc:
            raise ValueError(f"grapheme {exc.args[0]!r} not in table alphabet") from None

    def decode(self, message: Sequence[int]) -> str:
        return "".join(self.alphabet[ch] for ch in message)


def load_inflection_table(path: str | Path) -> InflectionTable:
    """Read a lexeme,tense,person,form CSV (UTF-8, NFC-normalized on load)."""
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path.name}: not valid UTF-8 ({exc.reason})") from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{path.name}: empty file") from None
    if tuple(h.strip() for h in header) != TABLE_HEADER:
        raise ParseError(f"line 1: expected header {','.join(TABLE_HEADER)!r}")
    records = []
    seen: dict[tuple[str, str, str], int] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"line {lineno}: expected 4 fields, got {len(row)}")
        lexeme, tense, person, form = (unicodedata.normalize("NFC", f.strip()) for f in row)
        if not form:
            raise ParseError(f"line {lineno}: empty form")
        key = (lexeme, tense, person)
        if key in seen:
            raise ParseError(f"line {lineno}: duplicate cell {key} (first seen line {seen[key]})")
        seen[key] = lineno
        records.append(InflectionRecord(lexeme, tense, person, form))
    if not records:
        raise ParseError(f"{path.name}: no records")
    clusters = {g for r in records for g in graphemes(r.form)}
    alphabet = tuple(sorted(clusters, key=lambda g: tuple(ord(c) for c in g)))
    return InflectionTable(tuple(records), alphabet)


def write_alphabet(table: InflectionTable, path: str | Path) -> None:
    """id -> grapheme sidecar TSV."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id\tgrapheme\n")
        for i, g in enumerate(table.alphabet):
            fh.write(f"{i}\t{g}\n")


@dataclass(frozen=True)
class Sublanguage:
    """One sampled root set realized as a corpus over the table alphabet."""

    corpus: Corpus
    roots: tuple[str, ...]
    tenses: tuple[str, ...]
    persons: tuple[str, ...]


def _best_cell_choice(table: InflectionTable, n_tenses: int, n_persons: int):
    """Tense/person subsets maximizing the number of fully covering lexemes."""
    from itertools import combinations

    forms = table.forms
    lexemes = table.lexemes()
    if len(table.tenses()) < n_tenses or len(table.persons()) < n_persons:
        raise CoverageError(
            f"table offers {len(table.tenses())} tenses and {len(table.persons())} persons; "
            f"need {n_tenses} and {n_persons}"
        )
    best = None
    for tenses in combinations(table.tenses(), n_tenses):
        for persons in combinations(table.persons(), n_persons):
            covered = [
                lx for lx in lexemes
                if all((lx, t, p) in forms for t in tenses for p in persons)
            ]
            key = (len(covered), tenses, persons)
            if best is None or len(covered) > best[0][0] or (
                len(covered) == best[0][0] and (tenses, persons) < best[0][1:]
            ):
                best = (key, covered)
    (_, tenses, persons), covered = best
    return tenses, persons, covered


def sample_sublanguages(table: InflectionTable, count: int = 50, seed: int = 0,
                        n_roots: int = 42, tenses: Sequence[str] | None = None,
                        persons: Sequence[str] | None = None) -> list[Sublanguage]:
    """Sample `count` sublanguages of n_roots lexemes x 2 tenses x 3 persons.

    Tense/person sets default to the combination covered by the most
    lexemes.  Roots are drawn without replacement per sublanguage from the
    lexemes covering every chosen cell; fewer than n_roots eligible lexemes
    is a CoverageError naming missing cells.
    """
    forms = table.forms
    if tenses is None or persons is None:
        auto_t, auto_p, covered = _best_cell_choice(table, 2, 3)
        tenses = tuple(tenses) if tenses is not None else auto_t
        persons = tuple(persons) if persons is not None else auto_p
    else:
        tenses = tuple(tenses)
        persons = tuple(persons)
    for t in tenses:
        if t not in table.tenses():
            raise CoverageError(f"tense {t!r} not in table")
    for p in persons:
        if p not in table.persons():
            raise CoverageError(f"person {p!r} not in table")
    eligible = [
        lx for lx in table.lexemes()
        if all((lx, t, p) in forms for t in tenses for p in persons)
    ]
    if len(eligible) < n_roots:
        missing = [
            (lx, t, p)
            for lx in table.lexemes()
            if lx not in eligible
            for t in tenses
            for p in persons
            if (lx, t, p) not in forms
        ]
        shown = "; ".join(",".join(cell) for cell in missing[:10])
        raise CoverageError(
            f"only {len(eligible)} of {n_roots} required lexemes cover "
            f"{len(tenses)} tenses x {len(persons)} persons; missing cells: {shown}"
        )

    rng = np.random.default_rng(seed)
    out: list[Sublanguage] = []
    for i in range(count):
        picked = rng.choice(len(eligible), size=n_roots, replace=False)
        roots = tuple(sorted(eligible[j] for j in picked))
        pairs = []
        max_len = 1
        for ri, root in enumerate(roots):
            for ti, t in enumerate(tenses):
                for pi, p in enumerate(persons):
                    message = table.encode(forms[(root, t, p)])
                    max_len = max(max_len, len(message))
                    pairs.append(((ri, ti, pi), message))
        cfg = AttrValConfig(
            (n_roots, len(tenses), len(persons)),
            vocab_size=max(2, len(table.alphabet)),
            max_len=max_len,
        )
        corpus = Corpus(cfg, pairs, metadata={
            "kind": "natural",
            "seed": str(seed),
            "index": str(i),
            "tenses": ",".join(tenses),
            "persons": ",".join(persons),
        })
        out.append(Sublanguage(corpus, roots, tenses, persons))
    return out


def meaningfulness_rate(corpora: Sequence[Corpus],
                        segmenter: Callable[[Corpus], SegmentedCorpus]) -> float:
    """Fraction of corpora whose symbol/character BoSDis ratio exceeds 1
    strictly (nan ratios count as not meaningful)."""
    import warnings

    if not corpora:
        raise ValueError("meaningfulness_rate needs at least one corpus")
    hits = 0
    for corpus in corpora:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ratio = bosdis_ratio(corpus, segmenter(corpus))
        if ratio > 1.0:
            hits += 1
    return hits / len(corpora)


def bundled_spanish_table() -> InflectionTable:
    """The packaged synthetic regular Spanish -ar paradigm sample."""
    with resources.as_file(resources.files("artlang.data") / "spanish_ar_sample.csv") as path:
        return load_inflection_table(path)
