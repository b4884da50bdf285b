"""Pivoted word lexicons and phrase-table augmentation.

A source-to-target word lexicon is composed through the pivot language from
four directed word tables, excluding every pair that mentions the reserved
NULL word. Pruned to the top candidates per source word, its pairs become
single-word phrase entries (lexical weights by one of three strategies) that
are merged into a phrase table without ever touching existing entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Sequence

from .errors import ConfigError, ParseError, ValidationError
from .table_model import (
    NULL_WORD,
    Alignment,
    Direction,
    FeatureVector,
    LexiconTable,
    Phrase,
    PhraseEntry,
    PhraseTable,
    format_real,
    _parse_probability,
)
from .triangulation import InducedWordCounts

#: Default constant lexical weight, e^-10.
E_MINUS_10 = math.exp(-10)

_SINGLE_LINK = Alignment(frozenset({(0, 0)}))

_STRATEGY_KINDS = ("copy", "constant", "re_estimate")


@dataclass(frozen=True, slots=True)
class LexStrategy:
    """How lexical weights of lexicon-derived entries are filled in."""

    kind: str
    value: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _STRATEGY_KINDS:
            raise ConfigError(f"unknown lexical-weight strategy: {self.kind!r}")
        if self.kind == "constant":
            if self.value is None or not (0.0 < self.value <= 1.0):
                raise ConfigError(f"constant strategy needs a value in (0, 1], got {self.value!r}")
        elif self.value is not None:
            raise ConfigError(f"strategy {self.kind!r} takes no value")

    @classmethod
    def copy(cls) -> "LexStrategy":
        return cls("copy")

    @classmethod
    def constant(cls, value: float = E_MINUS_10) -> "LexStrategy":
        return cls("constant", value)

    @classmethod
    def re_estimate(cls) -> "LexStrategy":
        return cls("re_estimate")

    @classmethod
    def parse(cls, text: str) -> "LexStrategy":
        """Parse a CLI strategy argument: copy | constant[:VALUE] | re-estimate."""
        if text == "copy":
            return cls.copy()
        if text == "re-estimate":
            return cls.re_estimate()
        if text == "constant":
            return cls.constant()
        if text.startswith("constant:"):
            raw = text.split(":", 1)[1]
            try:
                value = float(raw)
            except ValueError:
                raise ConfigError(f"bad constant value: {raw!r}") from None
            return cls.constant(value)
        raise ConfigError(f"unknown lexical-weight strategy: {text!r}")


@dataclass(frozen=True, slots=True)
class PivotLexiconPair:
    """One pivoted word pair with both conditional probabilities."""

    source_word: str
    target_word: str
    src_given_tgt: float
    tgt_given_src: float

    def __post_init__(self) -> None:
        for word in (self.source_word, self.target_word):
            if word == NULL_WORD:
                raise ValidationError(f"{NULL_WORD!r} may not appear in a pivoted lexicon")
            if not word or any(ch.isspace() for ch in word):
                raise ValidationError(f"bad lexicon word: {word!r}")
        for prob in (self.src_given_tgt, self.tgt_given_src):
            if not (math.isfinite(prob) and 0.0 < prob <= 1.0):
                raise ValidationError(f"probability out of range (0, 1]: {prob!r}")


@dataclass(frozen=True)
class PivotLexicon:
    """Pivoted word pairs, canonically ordered by (source word, target word)."""

    pairs: tuple[PivotLexiconPair, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.pairs, key=lambda p: (p.source_word, p.target_word)))
        object.__setattr__(self, "pairs", ordered)
        for prev, cur in zip(ordered, ordered[1:]):
            if (prev.source_word, prev.target_word) == (cur.source_word, cur.target_word):
                raise ValidationError(
                    f"duplicate lexicon pair: {cur.source_word} {cur.target_word}"
                )

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[PivotLexiconPair]:
        return iter(self.pairs)


def _require(condition: bool, detail: str) -> None:
    if not condition:
        raise ConfigError(f"lexicon direction mismatch: {detail}")


def pivot_lexicon(
    s_given_p: LexiconTable,
    p_given_s: LexiconTable,
    p_given_t: LexiconTable,
    t_given_p: LexiconTable,
) -> PivotLexicon:
    """Compose a source-to-target word lexicon through the pivot vocabulary.

    For every pivot word other than NULL, the probability of source given
    target sums prob(s|p) * prob(p|t) over connecting pivots, and target
    given source sums prob(p|s) * prob(t|p); both capped at 1.0. Pairs that
    mention NULL never participate, and pairs where either direction comes
    out zero are dropped entirely.
    """
    src_lang = s_given_p.given_lang
    pvt_lang = s_given_p.condition_lang
    _require(
        p_given_s.given_lang == pvt_lang and p_given_s.condition_lang == src_lang,
        f"pivot-given-source table maps {p_given_s.given_lang}|{p_given_s.condition_lang}, "
        f"expected {pvt_lang}|{src_lang}",
    )
    _require(
        p_given_t.given_lang == pvt_lang,
        f"pivot-given-target table maps {p_given_t.given_lang}|{p_given_t.condition_lang}, "
        f"expected given side {pvt_lang}",
    )
    tgt_lang = p_given_t.condition_lang
    _require(
        t_given_p.given_lang == tgt_lang and t_given_p.condition_lang == pvt_lang,
        f"target-given-pivot table maps {t_given_p.given_lang}|{t_given_p.condition_lang}, "
        f"expected {tgt_lang}|{pvt_lang}",
    )

    # Group the four tables by their pivot word, skipping anything with NULL.
    srcs_by_pivot: dict[str, list[tuple[str, float]]] = {}
    for e in s_given_p:
        if NULL_WORD not in (e.given, e.condition):
            srcs_by_pivot.setdefault(e.condition, []).append((e.given, e.prob))
    tgts_by_pivot: dict[str, list[tuple[str, float]]] = {}
    for e in p_given_t:
        if NULL_WORD not in (e.given, e.condition):
            tgts_by_pivot.setdefault(e.given, []).append((e.condition, e.prob))
    srcs_by_pivot_rev: dict[str, list[tuple[str, float]]] = {}
    for e in p_given_s:
        if NULL_WORD not in (e.given, e.condition):
            srcs_by_pivot_rev.setdefault(e.given, []).append((e.condition, e.prob))
    tgts_by_pivot_rev: dict[str, list[tuple[str, float]]] = {}
    for e in t_given_p:
        if NULL_WORD not in (e.given, e.condition):
            tgts_by_pivot_rev.setdefault(e.condition, []).append((e.given, e.prob))

    # Terms accumulate in ascending pivot-word order for determinism.
    psi_st: dict[tuple[str, str], float] = {}
    for pivot in sorted(set(srcs_by_pivot) & set(tgts_by_pivot)):
        for s, prob_sp in sorted(srcs_by_pivot[pivot]):
            for t, prob_pt in sorted(tgts_by_pivot[pivot]):
                key = (s, t)
                psi_st[key] = psi_st.get(key, 0.0) + prob_sp * prob_pt
    psi_ts: dict[tuple[str, str], float] = {}
    for pivot in sorted(set(srcs_by_pivot_rev) & set(tgts_by_pivot_rev)):
        for s, prob_ps in sorted(srcs_by_pivot_rev[pivot]):
            for t, prob_tp in sorted(tgts_by_pivot_rev[pivot]):
                key = (s, t)
                psi_ts[key] = psi_ts.get(key, 0.0) + prob_ps * prob_tp

    pairs = []
    for key in sorted(psi_st):
        st = psi_st[key]
        ts = psi_ts.get(key, 0.0)
        if st <= 0.0 or ts <= 0.0:
            continue
        pairs.append(PivotLexiconPair(key[0], key[1], min(1.0, st), min(1.0, ts)))
    return PivotLexicon(tuple(pairs))


def prune_lexicon_topn(lex: PivotLexicon, n: int) -> PivotLexicon:
    """Keep, per source word, the n pairs with the highest target-given-source
    probability; ties go to the lexicographically smaller target word."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    groups: dict[str, list[PivotLexiconPair]] = {}
    for pair in lex:
        groups.setdefault(pair.source_word, []).append(pair)
    kept = []
    for group in groups.values():
        group.sort(key=lambda p: (-p.tgt_given_src, p.target_word))
        kept.extend(group[:n])
    return PivotLexicon(tuple(kept))


def lexicon_to_entries(
    lex: PivotLexicon,
    strategy: LexStrategy,
    counts: InducedWordCounts | None = None,
) -> tuple[PhraseEntry, ...]:
    """Turn pivoted word pairs into single-word phrase entries.

    Phrase probabilities are always the pivoted conditionals and the
    alignment is the single 0-0 link. Lexical weights: copy duplicates the
    phrase probabilities; constant uses a fixed value; re_estimate uses
    relative frequencies from induced link counts, falling back to copy for
    any direction the counts cannot estimate (zero total or zero count).
    """
    if strategy.kind == "re_estimate" and counts is None:
        raise ConfigError("re_estimate strategy requires induced word counts")
    entries = []
    for pair in lex:
        if strategy.kind == "copy":
            inv_lex, dir_lex = pair.src_given_tgt, pair.tgt_given_src
        elif strategy.kind == "constant":
            inv_lex = dir_lex = strategy.value
        else:
            s, t = pair.source_word, pair.target_word
            pair_count = counts.pair_count(s, t)
            tgt_total = counts.target_total(t)
            src_total = counts.source_total(s)
            inv_lex = pair_count / tgt_total if pair_count and tgt_total else pair.src_given_tgt
            dir_lex = pair_count / src_total if pair_count and src_total else pair.tgt_given_src
        entries.append(
            PhraseEntry(
                Phrase((pair.source_word,)),
                Phrase((pair.target_word,)),
                FeatureVector(pair.src_given_tgt, inv_lex, pair.tgt_given_src, dir_lex),
                _SINGLE_LINK,
            )
        )
    return tuple(entries)


@dataclass(frozen=True, slots=True)
class AugmentReport:
    added: int
    skipped: int

    def lines(self) -> list[str]:
        return [f"added={self.added}", f"skipped={self.skipped}"]


def augment_table(
    table: PhraseTable, additions: Sequence[PhraseEntry]
) -> tuple[PhraseTable, AugmentReport]:
    """Insert additions whose (source, target) pair is not already in the table.

    Existing entries are never modified; an addition colliding with the table
    (or with an earlier addition) is counted as skipped.
    """
    existing = {e.pair_key for e in table}
    accepted: list[PhraseEntry] = []
    skipped = 0
    for entry in additions:
        if entry.pair_key in existing:
            skipped += 1
        else:
            existing.add(entry.pair_key)
            accepted.append(entry)
    merged = PhraseTable(table.entries + tuple(accepted))
    return merged, AugmentReport(added=len(accepted), skipped=skipped)


def write_pivot_lexicon(lex: PivotLexicon, stream: IO[str]) -> None:
    """Serialize as `SOURCE TARGET P(SOURCE|TARGET) P(TARGET|SOURCE)` lines."""
    for pair in lex:
        stream.write(
            f"{pair.source_word} {pair.target_word} "
            f"{format_real(pair.src_given_tgt)} {format_real(pair.tgt_given_src)}\n"
        )


def parse_pivot_lexicon(
    stream: Iterable[str], *, source_name: str | None = None
) -> PivotLexicon:
    """Inverse of write_pivot_lexicon, with line-numbered errors."""
    pairs: list[PivotLexiconPair] = []
    seen: set[tuple[str, str]] = set()
    for line_no, raw in enumerate(stream, start=1):
        line = raw[:-1] if raw.endswith("\n") else raw
        parts = line.split(" ")
        try:
            if len(parts) != 4:
                raise ValidationError(
                    f"wrong field count: expected 4 space-separated fields, got {len(parts)}"
                )
            pair = PivotLexiconPair(
                parts[0],
                parts[1],
                _parse_probability(parts[2], "probability"),
                _parse_probability(parts[3], "probability"),
            )
        except ValidationError as exc:
            raise ParseError(str(exc), line=line_no, source=source_name) from None
        key = (pair.source_word, pair.target_word)
        if key in seen:
            raise ParseError(
                f"duplicate lexicon pair: {key[0]} {key[1]}", line=line_no, source=source_name
            )
        seen.add(key)
        pairs.append(pair)
    return PivotLexicon(tuple(pairs))


def pivot_lexicon_directions() -> dict[str, tuple[Direction, str, str]]:
    """The four table roles consumed by pivot_lexicon.

    Maps role name to (direction, source_lang, target_lang) using the
    conceptual language names src / pvt / tgt; the CLI builds its tables from
    this so the roles stay mutually consistent.
    """
    return {
        "s_given_p": (Direction.SRC_GIVEN_TGT, "src", "pvt"),
        "p_given_s": (Direction.TGT_GIVEN_SRC, "src", "pvt"),
        "p_given_t": (Direction.SRC_GIVEN_TGT, "pvt", "tgt"),
        "t_given_p": (Direction.TGT_GIVEN_SRC, "pvt", "tgt"),
    }
