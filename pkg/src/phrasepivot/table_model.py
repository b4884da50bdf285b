"""Domain types for phrase tables and word lexicons, plus their text formats.

The on-disk formats are the Moses-style ones:

  phrase table   SRC ||| TGT ||| F1 F2 F3 F4 ||| A          (optional 5th
                 counts field is accepted and ignored, never written)
  word lexicon   GIVEN CONDITION PROB                        (single spaces)
  weights        one line, four whitespace-separated reals

Feature order follows the Moses convention: inverse phrase probability,
inverse lexical weight, direct phrase probability, direct lexical weight.
All probabilities live in (0, 1]; a value of zero is encoded by the absence
of an entry, never by a 0 in a file.

Serialization is canonical: entries sorted lexicographically by token
sequences, floats printed with their shortest round-trippable decimal form,
alignment links sorted. Re-serializing any parse of a canonical file
reproduces it byte for byte.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Iterator

from .errors import ParseError, ValidationError

FIELD_SEP = " ||| "

#: Reserved null word of lexicon files; may not occur as a phrase token.
NULL_WORD = "NULL"

_LINK_RE = re.compile(r"^([0-9]+)-([0-9]+)$")

# Strict decimal-real grammar: float() also accepts "1_0", "nan", "inf(inity)";
# none of those belong in a table file.
_REAL_CHARS = frozenset("0123456789.eE+-")


def format_real(value: float) -> str:
    """Shortest decimal representation that parses back to the same float."""
    return repr(value)


def _parse_real(text: str, what: str) -> float:
    if not text or not _REAL_CHARS.issuperset(text):
        raise ValidationError(f"non-numeric {what}: {text!r}")
    try:
        value = float(text)
    except ValueError:
        raise ValidationError(f"non-numeric {what}: {text!r}") from None
    if not math.isfinite(value):
        raise ValidationError(f"non-finite {what}: {text!r}")
    return value


def _parse_probability(text: str, what: str) -> float:
    value = _parse_real(text, what)
    if not 0.0 < value <= 1.0:
        raise ValidationError(f"{what} out of range (0, 1]: {text}")
    return value


def _check_token(token: str) -> None:
    if not token:
        raise ValidationError("empty token")
    if any(ch.isspace() for ch in token):
        raise ValidationError(f"token contains whitespace: {token!r}")
    if "|||" in token:
        raise ValidationError(f"token contains '|||': {token!r}")
    if token == NULL_WORD:
        raise ValidationError(f"{NULL_WORD!r} is reserved for lexicon files")


def _check_word(word: str) -> None:
    # Lexicon words: like phrase tokens but NULL is legal.
    if not word:
        raise ValidationError("empty word")
    if any(ch.isspace() for ch in word):
        raise ValidationError(f"word contains whitespace: {word!r}")


class Direction(Enum):
    """Which conditional a word table (or lexical weight) encodes."""

    SRC_GIVEN_TGT = "src_given_tgt"
    TGT_GIVEN_SRC = "tgt_given_src"


@dataclass(frozen=True, slots=True)
class Phrase:
    """A non-empty sequence of word tokens."""

    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValidationError("phrase must contain at least one token")
        for token in self.tokens:
            _check_token(token)

    @classmethod
    def from_text(cls, text: str) -> "Phrase":
        return cls(tuple(text.split(" ")))

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True, slots=True)
class Alignment:
    """Word alignment links inside one phrase pair: 0-based (i, j) pairs."""

    links: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        for link in self.links:
            i, j = link
            if i < 0 or j < 0:
                raise ValidationError(f"negative alignment index in {link}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "Alignment":
        return cls(frozenset(pairs))

    @classmethod
    def from_text(cls, text: str) -> "Alignment":
        """Parse a space-joined list of i-j links; empty text is the empty alignment."""
        if not text:
            return _EMPTY_ALIGNMENT
        links = set()
        for part in text.split(" "):
            m = _LINK_RE.match(part)
            if m is None:
                raise ValidationError(f"malformed alignment link: {part!r}")
            links.add((int(m.group(1)), int(m.group(2))))
        return cls(frozenset(links))

    @property
    def sorted_links(self) -> list[tuple[int, int]]:
        return sorted(self.links)

    @property
    def text(self) -> str:
        return " ".join(f"{i}-{j}" for i, j in self.sorted_links)

    def __len__(self) -> int:
        return len(self.links)


_EMPTY_ALIGNMENT = Alignment(frozenset())
EMPTY_ALIGNMENT = _EMPTY_ALIGNMENT


@dataclass(frozen=True, slots=True)
class FeatureVector:
    """The four translation features of a phrase pair, each in (0, 1]."""

    inv_phrase_prob: float
    inv_lex_weight: float
    dir_phrase_prob: float
    dir_lex_weight: float

    def __post_init__(self) -> None:
        for value in self.as_tuple():
            if not (math.isfinite(value) and 0.0 < value <= 1.0):
                raise ValidationError(f"feature out of range (0, 1]: {value!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (
            self.inv_phrase_prob,
            self.inv_lex_weight,
            self.dir_phrase_prob,
            self.dir_lex_weight,
        )

    @property
    def text(self) -> str:
        return " ".join(format_real(v) for v in self.as_tuple())


@dataclass(frozen=True, slots=True)
class PhraseEntry:
    """One phrase pair with its features and internal word alignment."""

    source: Phrase
    target: Phrase
    features: FeatureVector
    alignment: Alignment

    def __post_init__(self) -> None:
        for i, j in self.alignment.links:
            if i >= len(self.source) or j >= len(self.target):
                raise ValidationError(
                    f"alignment link {i}-{j} out of range for "
                    f"{len(self.source)}x{len(self.target)} phrase pair"
                )

    @property
    def pair_key(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (self.source.tokens, self.target.tokens)

    def to_line(self) -> str:
        return FIELD_SEP.join(
            (self.source.text, self.target.text, self.features.text, self.alignment.text)
        )


@dataclass(frozen=True)
class PhraseTable:
    """An ordered, duplicate-free collection of phrase entries.

    Entries are kept in canonical order (ascending by source tokens, then
    target tokens) regardless of construction order; two entries may not
    share the same (source, target) pair.
    """

    entries: tuple[PhraseEntry, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.entries, key=lambda e: e.pair_key))
        object.__setattr__(self, "entries", ordered)
        for prev, cur in zip(ordered, ordered[1:]):
            if prev.pair_key == cur.pair_key:
                raise ValidationError(
                    f"duplicate phrase pair: {cur.source.text} ||| {cur.target.text}"
                )

    @classmethod
    def from_entries(cls, entries: Iterable[PhraseEntry]) -> "PhraseTable":
        return cls(tuple(entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[PhraseEntry]:
        return iter(self.entries)


@dataclass(frozen=True, slots=True)
class LexiconEntry:
    """One conditional word probability: prob of `given` given `condition`."""

    given: str
    condition: str
    prob: float

    def __post_init__(self) -> None:
        _check_word(self.given)
        _check_word(self.condition)
        if not (math.isfinite(self.prob) and 0.0 < self.prob <= 1.0):
            raise ValidationError(f"probability out of range (0, 1]: {self.prob!r}")


@dataclass(frozen=True)
class LexiconTable:
    """A word-to-word conditional probability table, one direction per table.

    `direction` states which side of the (source_lang, target_lang) pair the
    given-words belong to. For any fixed condition word the probabilities of
    its given-words may not sum above 1 (within 1e-6 slack).
    """

    direction: Direction
    entries: tuple[LexiconEntry, ...]
    source_lang: str = "src"
    target_lang: str = "tgt"

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.entries, key=lambda e: (e.given, e.condition)))
        object.__setattr__(self, "entries", ordered)
        sums: dict[str, float] = {}
        for prev, cur in zip(ordered, ordered[1:]):
            if (prev.given, prev.condition) == (cur.given, cur.condition):
                raise ValidationError(f"duplicate lexicon pair: {cur.given} {cur.condition}")
        for entry in ordered:
            sums[entry.condition] = sums.get(entry.condition, 0.0) + entry.prob
        for condition, total in sums.items():
            if total > 1.0 + 1e-6:
                raise ValidationError(
                    f"probabilities conditioned on {condition!r} sum to {total}, above 1"
                )

    @property
    def given_lang(self) -> str:
        if self.direction is Direction.SRC_GIVEN_TGT:
            return self.source_lang
        return self.target_lang

    @property
    def condition_lang(self) -> str:
        if self.direction is Direction.SRC_GIVEN_TGT:
            return self.target_lang
        return self.source_lang

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[LexiconEntry]:
        return iter(self.entries)


@dataclass(frozen=True, slots=True)
class WeightConfig:
    """The four decoding weights applied to FeatureVector, in the same order."""

    weights: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if len(self.weights) != 4:
            raise ValidationError(f"expected 4 weights, got {len(self.weights)}")
        for w in self.weights:
            if not math.isfinite(w):
                raise ValidationError(f"non-finite weight: {w!r}")


DEFAULT_WEIGHTS = WeightConfig((0.25, 0.25, 0.25, 0.25))


def _parse_phrase_field(text: str, what: str) -> Phrase:
    tokens = text.split(" ")
    try:
        return Phrase(tuple(tokens))
    except ValidationError as exc:
        raise ValidationError(f"bad {what} phrase: {exc}") from None


def _parse_entry_line(line: str) -> PhraseEntry:
    fields = line.split(FIELD_SEP)
    if len(fields) not in (4, 5):
        raise ValidationError(
            f"wrong field count: expected 4 or 5 '|||'-separated fields, got {len(fields)}"
        )
    source = _parse_phrase_field(fields[0], "source")
    target = _parse_phrase_field(fields[1], "target")
    feature_texts = fields[2].split(" ")
    if len(feature_texts) != 4:
        raise ValidationError(f"wrong feature count: expected 4, got {len(feature_texts)}")
    features = FeatureVector(*(_parse_probability(t, "feature") for t in feature_texts))
    alignment = Alignment.from_text(fields[3])
    return PhraseEntry(source, target, features, alignment)


def parse_phrase_table(stream: Iterable[str], *, source_name: str | None = None) -> PhraseTable:
    """Parse a phrase table from a stream of lines.

    Rejects malformed lines (wrong field count, non-numeric or out-of-range
    features, out-of-range alignment indices) and duplicate (source, target)
    pairs, naming the 1-based line number. Returns the table in canonical
    order whatever the input order was.
    """
    entries: list[PhraseEntry] = []
    seen: set[tuple[tuple[str, ...], tuple[str, ...]]] = set()
    for line_no, raw in enumerate(stream, start=1):
        line = raw[:-1] if raw.endswith("\n") else raw
        try:
            entry = _parse_entry_line(line)
        except ValidationError as exc:
            raise ParseError(str(exc), line=line_no, source=source_name) from None
        if entry.pair_key in seen:
            raise ParseError(
                f"duplicate phrase pair: {entry.source.text} ||| {entry.target.text}",
                line=line_no,
                source=source_name,
            )
        seen.add(entry.pair_key)
        entries.append(entry)
    return PhraseTable(tuple(entries))


def write_phrase_table(table: PhraseTable, stream: IO[str]) -> None:
    """Serialize a table in canonical form; inverse of parse_phrase_table."""
    for entry in table:
        stream.write(entry.to_line())
        stream.write("\n")


def parse_lexicon_table(
    stream: Iterable[str],
    direction: Direction,
    *,
    source_name: str | None = None,
    source_lang: str = "src",
    target_lang: str = "tgt",
) -> LexiconTable:
    """Parse a GIVEN CONDITION PROB word lexicon; direction is metadata, never inferred."""
    entries: list[LexiconEntry] = []
    seen: set[tuple[str, str]] = set()
    for line_no, raw in enumerate(stream, start=1):
        line = raw[:-1] if raw.endswith("\n") else raw
        parts = line.split(" ")
        try:
            if len(parts) != 3:
                raise ValidationError(
                    f"wrong field count: expected 'GIVEN CONDITION PROB', got {len(parts)} fields"
                )
            entry = LexiconEntry(parts[0], parts[1], _parse_probability(parts[2], "probability"))
        except ValidationError as exc:
            raise ParseError(str(exc), line=line_no, source=source_name) from None
        key = (entry.given, entry.condition)
        if key in seen:
            raise ParseError(
                f"duplicate lexicon pair: {entry.given} {entry.condition}",
                line=line_no,
                source=source_name,
            )
        seen.add(key)
        entries.append(entry)
    try:
        return LexiconTable(direction, tuple(entries), source_lang, target_lang)
    except ValidationError as exc:
        raise ParseError(str(exc), source=source_name) from None


def write_lexicon_table(table: LexiconTable, stream: IO[str]) -> None:
    """Serialize a lexicon sorted by (given, condition); inverse of parse_lexicon_table."""
    for entry in table:
        stream.write(f"{entry.given} {entry.condition} {format_real(entry.prob)}\n")


def parse_weight_config(stream: IO[str], *, source_name: str | None = None) -> WeightConfig:
    """Parse a weight file: one line of four whitespace-separated reals."""
    parts = stream.read().split()
    try:
        if len(parts) != 4:
            raise ValidationError(f"expected 4 weights, got {len(parts)}")
        return WeightConfig(tuple(_parse_real(p, "weight") for p in parts))
    except ValidationError as exc:
        raise ParseError(str(exc), source=source_name) from None
