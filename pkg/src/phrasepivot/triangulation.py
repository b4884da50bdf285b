"""Induce a source-to-target phrase table by joining two tables on a shared pivot.

The pipeline: sort both legs by their pivot-side phrase, merge-join on exact
pivot equality, marginalize the phrase probabilities over all connecting
pivot phrases (capped at 1.0), compose a word alignment from the single
best-scoring pivot path, re-estimate word translation probabilities from the
composed alignments, and compute lexical weights in both directions.

The join runs fully in memory when its estimated intermediate size fits the
memory budget; otherwise the intermediate partial products are spilled
through an external sort. Both paths produce bit-identical tables: terms for
a given phrase pair are always summed in ascending pivot-phrase order, and
ties for the best pivot path go to the lexicographically smallest pivot.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, IO

from .errors import ParseError, ValidationError
from .extsort import external_sort
from .table_model import (
    NULL_WORD,
    Alignment,
    Direction,
    FeatureVector,
    Phrase,
    PhraseEntry,
    PhraseTable,
)

DEFAULT_MEMORY_BUDGET = 1 << 30

#: Lexical-weight factor for an unaligned word with no NULL probability.
UNALIGNED_PROB = 1e-7

#: Lower bound on any computed lexical weight.
LEX_WEIGHT_FLOOR = 1e-12

# Rough in-memory footprint of one join intermediate, used to pick the path.
_PARTIAL_RECORD_BYTES = 200


def compose_alignment(a1: Alignment, a2: Alignment) -> Alignment:
    """Chain source-pivot links with pivot-target links through shared pivot positions."""
    targets_by_pivot: dict[int, list[int]] = {}
    for j, k in a2.links:
        targets_by_pivot.setdefault(j, []).append(k)
    links = {
        (i, k) for i, j in a1.links for k in targets_by_pivot.get(j, ())
    }
    return Alignment(frozenset(links))


class InducedWordCounts:
    """Word-pair link counts from induced alignments, with per-word totals.

    pair_count(s, t) is the number of entry-level links between an occurrence
    of s and an occurrence of t; target_total(t) sums pair_count(*, t) and
    source_total(s) sums pair_count(s, *).
    """

    __slots__ = ("counts", "_source_totals", "_target_totals")

    def __init__(self) -> None:
        self.counts: dict[tuple[str, str], int] = {}
        self._source_totals: dict[str, int] = {}
        self._target_totals: dict[str, int] = {}

    def add(self, source_word: str, target_word: str, count: int = 1) -> None:
        if count < 1:
            raise ValidationError(f"count must be positive, got {count}")
        key = (source_word, target_word)
        self.counts[key] = self.counts.get(key, 0) + count
        self._source_totals[source_word] = self._source_totals.get(source_word, 0) + count
        self._target_totals[target_word] = self._target_totals.get(target_word, 0) + count

    def pair_count(self, source_word: str, target_word: str) -> int:
        return self.counts.get((source_word, target_word), 0)

    def source_total(self, source_word: str) -> int:
        return self._source_totals.get(source_word, 0)

    def target_total(self, target_word: str) -> int:
        return self._target_totals.get(target_word, 0)

    def __len__(self) -> int:
        return len(self.counts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InducedWordCounts):
            return NotImplemented
        return self.counts == other.counts


def accumulate_word_counts(entries: Iterable) -> InducedWordCounts:
    """Count word links across entries: one count per alignment link per entry.

    Accepts anything with source / target / alignment attributes.
    """
    counts = InducedWordCounts()
    for entry in entries:
        src_tokens = entry.source.tokens
        tgt_tokens = entry.target.tokens
        for i, j in entry.alignment.links:
            counts.add(src_tokens[i], tgt_tokens[j])
    return counts


def word_prob(counts: InducedWordCounts, source_word: str, target_word: str) -> float:
    """Relative-frequency word translation probability of source_word given target_word."""
    total = counts.target_total(target_word)
    if total == 0:
        raise ValidationError(f"no link counts for conditioning word {target_word!r}")
    return counts.pair_count(source_word, target_word) / total


def conditional_prob_fn(
    counts: InducedWordCounts, direction: Direction
) -> Callable[[str, str], float | None]:
    """A word-probability lookup P(word | given) backed by counts.

    Returns None when the conditioning word has no mass, so callers can
    distinguish "undefined" from a genuine zero.
    """
    if direction is Direction.SRC_GIVEN_TGT:

        def fn(word: str, given: str) -> float | None:
            total = counts.target_total(given)
            if total == 0:
                return None
            return counts.pair_count(word, given) / total

    else:

        def fn(word: str, given: str) -> float | None:
            total = counts.source_total(given)
            if total == 0:
                return None
            return counts.pair_count(given, word) / total

    return fn


def lexical_weight(
    source: Phrase,
    target: Phrase,
    alignment: Alignment,
    word_prob_fn: Callable[[str, str], float | None],
    direction: Direction,
) -> float:
    """Standard lexical weight of a phrase pair under a word-probability model.

    For TGT_GIVEN_SRC each target word contributes the average of
    word_prob_fn(target_word, source_word) over its aligned source words;
    SRC_GIVEN_TGT mirrors the roles. An unaligned word contributes the NULL
    probability when the model defines one, else a 1e-7 floor. The product
    over all words is floored at 1e-12.
    """
    if direction is Direction.TGT_GIVEN_SRC:
        out_tokens, in_tokens = target.tokens, source.tokens
        grouped: dict[int, list[int]] = {}
        for i, j in sorted(alignment.links):
            grouped.setdefault(j, []).append(i)
    else:
        out_tokens, in_tokens = source.tokens, target.tokens
        grouped = {}
        for i, j in sorted(alignment.links):
            grouped.setdefault(i, []).append(j)

    weight = 1.0
    for pos, word in enumerate(out_tokens):
        partners = grouped.get(pos)
        if partners:
            total = 0.0
            for q in partners:
                p = word_prob_fn(word, in_tokens[q])
                if p is not None:
                    total += p
            weight *= total / len(partners)
        else:
            p = word_prob_fn(word, NULL_WORD)
            weight *= p if p is not None else UNALIGNED_PROB
    return max(weight, LEX_WEIGHT_FLOOR)


@dataclass(frozen=True, slots=True)
class TriangulatedPair:
    """Marginalized probabilities and best-path alignment for one induced pair."""

    inv_phrase_prob: float
    dir_phrase_prob: float
    alignment: Alignment
    best_path_weight: float


@dataclass(frozen=True, slots=True)
class TriangulationReport:
    src_pvt_entries: int
    pvt_tgt_entries: int
    induced_entries: int
    dropped_unjoined_src: int
    elapsed: float

    def record(self, *, include_elapsed: bool = True) -> str:
        parts = [
            f"src_pvt_entries={self.src_pvt_entries}",
            f"pvt_tgt_entries={self.pvt_tgt_entries}",
            f"induced_entries={self.induced_entries}",
            f"dropped_unjoined_src={self.dropped_unjoined_src}",
        ]
        if include_elapsed:
            parts.append(f"elapsed={self.elapsed:.3f}")
        return " ".join(parts)


@dataclass(frozen=True, slots=True)
class _ReducedPair:
    source: Phrase
    target: Phrase
    inv_phrase_prob: float
    dir_phrase_prob: float
    alignment: Alignment
    best_path_weight: float


def _estimated_partial_count(src_pvt: PhraseTable, pvt_tgt: PhraseTable) -> int:
    a_counts: dict[tuple[str, ...], int] = {}
    for entry in src_pvt:
        key = entry.target.tokens
        a_counts[key] = a_counts.get(key, 0) + 1
    total = 0
    for entry in pvt_tgt:
        total += a_counts.get(entry.source.tokens, 0)
    return total


def _reduce_inmemory(src_pvt: PhraseTable, pvt_tgt: PhraseTable) -> list[_ReducedPair]:
    a_by_pivot: dict[tuple[str, ...], list[PhraseEntry]] = {}
    for entry in src_pvt:
        a_by_pivot.setdefault(entry.target.tokens, []).append(entry)
    b_by_pivot: dict[tuple[str, ...], list[PhraseEntry]] = {}
    for entry in pvt_tgt:
        b_by_pivot.setdefault(entry.source.tokens, []).append(entry)

    # [inv_sum, dir_sum, best_weight, best_a1, best_a2, source, target]
    acc: dict[tuple[tuple[str, ...], tuple[str, ...]], list] = {}
    for pivot in sorted(set(a_by_pivot) & set(b_by_pivot)):
        for ea in sorted(a_by_pivot[pivot], key=lambda e: e.source.tokens):
            inv_a = ea.features.inv_phrase_prob
            dir_a = ea.features.dir_phrase_prob
            for eb in sorted(b_by_pivot[pivot], key=lambda e: e.target.tokens):
                inv_term = inv_a * eb.features.inv_phrase_prob
                dir_term = dir_a * eb.features.dir_phrase_prob
                key = (ea.source.tokens, eb.target.tokens)
                slot = acc.get(key)
                if slot is None:
                    acc[key] = [
                        inv_term, dir_term, inv_term,
                        ea.alignment, eb.alignment, ea.source, eb.target,
                    ]
                else:
                    slot[0] += inv_term
                    slot[1] += dir_term
                    if inv_term > slot[2]:
                        slot[2] = inv_term
                        slot[3] = ea.alignment
                        slot[4] = eb.alignment

    reduced = []
    for key in sorted(acc):
        inv_sum, dir_sum, best_w, a1, a2, source, target = acc[key]
        if inv_sum <= 0.0 or dir_sum <= 0.0:
            continue
        reduced.append(
            _ReducedPair(
                source,
                target,
                min(1.0, inv_sum),
                min(1.0, dir_sum),
                compose_alignment(a1, a2),
                best_w,
            )
        )
    return reduced


def _leg_lines(entries: Iterable[PhraseEntry], pivot_is_target: bool) -> Iterator[str]:
    for e in entries:
        pivot, other = (e.target, e.source) if pivot_is_target else (e.source, e.target)
        yield (
            f"{pivot.text}\t{other.text}\t"
            f"{e.features.inv_phrase_prob!r}\t{e.features.dir_phrase_prob!r}\t"
            f"{e.alignment.text}"
        )


def _leg_key(line: str):
    pivot, other, _ = line.split("\t", 2)
    return (tuple(pivot.split(" ")), tuple(other.split(" ")))


def _pivot_tokens(line: str) -> tuple[str, ...]:
    return tuple(line.split("\t", 1)[0].split(" "))


def _partial_key(line: str):
    s, t, p, _ = line.split("\t", 3)
    return (tuple(s.split(" ")), tuple(t.split(" ")), tuple(p.split(" ")))


def _join_partial_lines(a_sorted: Iterable[str], b_sorted: Iterable[str]) -> Iterator[str]:
    groups_a = itertools.groupby(a_sorted, key=_pivot_tokens)
    groups_b = itertools.groupby(b_sorted, key=_pivot_tokens)
    cur_a = next(groups_a, None)
    cur_b = next(groups_b, None)
    while cur_a is not None and cur_b is not None:
        key_a, lines_a = cur_a
        key_b, lines_b = cur_b
        if key_a < key_b:
            cur_a = next(groups_a, None)
        elif key_b < key_a:
            cur_b = next(groups_b, None)
        else:
            block_a = [line.split("\t") for line in lines_a]
            block_b = [line.split("\t") for line in lines_b]
            for pvt, src, inv_a, dir_a, align_a in block_a:
                f_inv_a = float(inv_a)
                f_dir_a = float(dir_a)
                for _, tgt, inv_b, dir_b, align_b in block_b:
                    inv_term = f_inv_a * float(inv_b)
                    dir_term = f_dir_a * float(dir_b)
                    yield (
                        f"{src}\t{tgt}\t{pvt}\t{inv_term!r}\t{dir_term!r}\t"
                        f"{align_a}\t{align_b}"
                    )
            cur_a = next(groups_a, None)
            cur_b = next(groups_b, None)


def _reduce_external(
    src_pvt: PhraseTable,
    pvt_tgt: PhraseTable,
    memory_budget: int,
    temp_dir: str | None,
) -> list[_ReducedPair]:
    leg_budget = max(memory_budget // 4, 1 << 16)
    a_sorted = external_sort(
        _leg_lines(src_pvt, pivot_is_target=True), _leg_key,
        max_bytes=leg_budget, temp_dir=temp_dir,
    )
    b_sorted = external_sort(
        _leg_lines(pvt_tgt, pivot_is_target=False), _leg_key,
        max_bytes=leg_budget, temp_dir=temp_dir,
    )
    partials = external_sort(
        _join_partial_lines(a_sorted, b_sorted), _partial_key,
        max_bytes=max(memory_budget // 2, 1 << 16), temp_dir=temp_dir,
    )

    reduced = []
    for (s_tok, t_tok), lines in itertools.groupby(partials, key=lambda l: _partial_key(l)[:2]):
        inv_sum = 0.0
        dir_sum = 0.0
        best_w = -1.0
        best_a1 = best_a2 = ""
        for line in lines:
            fields = line.split("\t")
            inv_term = float(fields[3])
            dir_term = float(fields[4])
            inv_sum += inv_term
            dir_sum += dir_term
            if inv_term > best_w:
                best_w = inv_term
                best_a1 = fields[5]
                best_a2 = fields[6]
        if inv_sum <= 0.0 or dir_sum <= 0.0:
            continue
        reduced.append(
            _ReducedPair(
                Phrase(s_tok),
                Phrase(t_tok),
                min(1.0, inv_sum),
                min(1.0, dir_sum),
                compose_alignment(Alignment.from_text(best_a1), Alignment.from_text(best_a2)),
                best_w,
            )
        )
    return reduced


def _reduced_pairs(
    src_pvt: PhraseTable,
    pvt_tgt: PhraseTable,
    memory_budget: int,
    temp_dir: str | None,
) -> list[_ReducedPair]:
    if _estimated_partial_count(src_pvt, pvt_tgt) * _PARTIAL_RECORD_BYTES <= memory_budget:
        return _reduce_inmemory(src_pvt, pvt_tgt)
    return _reduce_external(src_pvt, pvt_tgt, memory_budget, temp_dir)


def triangulate_probs(
    src_pvt: PhraseTable,
    pvt_tgt: PhraseTable,
    *,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    temp_dir: str | None = None,
) -> dict[tuple[Phrase, Phrase], TriangulatedPair]:
    """Marginalized phrase probabilities for every pair reachable through a pivot.

    inv is the sum over shared pivot phrases of the two inverse probabilities
    multiplied; dir mirrors it over the direct probabilities; both capped at
    1.0. The alignment comes from the pivot path with the largest inverse
    product, ties to the lexicographically smallest pivot phrase.
    """
    return {
        (r.source, r.target): TriangulatedPair(
            r.inv_phrase_prob, r.dir_phrase_prob, r.alignment, r.best_path_weight
        )
        for r in _reduced_pairs(src_pvt, pvt_tgt, memory_budget, temp_dir)
    }


def triangulate(
    src_pvt: PhraseTable,
    pvt_tgt: PhraseTable,
    *,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    temp_dir: str | None = None,
    threads: int = 1,
) -> tuple[PhraseTable, TriangulationReport]:
    """Induce the source-to-target table and report join statistics.

    An empty join is not an error: it yields an empty table and the report
    shows every distinct source phrase as dropped.
    """
    started = time.perf_counter()
    reduced = _reduced_pairs(src_pvt, pvt_tgt, memory_budget, temp_dir)
    counts = accumulate_word_counts(reduced)
    w_inv = conditional_prob_fn(counts, Direction.SRC_GIVEN_TGT)
    w_dir = conditional_prob_fn(counts, Direction.TGT_GIVEN_SRC)

    def build_entry(r: _ReducedPair) -> PhraseEntry:
        inv_lex = lexical_weight(r.source, r.target, r.alignment, w_inv, Direction.SRC_GIVEN_TGT)
        dir_lex = lexical_weight(r.source, r.target, r.alignment, w_dir, Direction.TGT_GIVEN_SRC)
        features = FeatureVector(r.inv_phrase_prob, inv_lex, r.dir_phrase_prob, dir_lex)
        return PhraseEntry(r.source, r.target, features, r.alignment)

    if threads > 1 and len(reduced) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            entries = tuple(pool.map(build_entry, reduced))
    else:
        entries = tuple(build_entry(r) for r in reduced)

    table = PhraseTable(entries)
    all_sources = {e.source.tokens for e in src_pvt}
    emitted_sources = {r.source.tokens for r in reduced}
    report = TriangulationReport(
        src_pvt_entries=len(src_pvt),
        pvt_tgt_entries=len(pvt_tgt),
        induced_entries=len(table),
        dropped_unjoined_src=len(all_sources - emitted_sources),
        elapsed=time.perf_counter() - started,
    )
    return table, report


def write_word_counts(counts: InducedWordCounts, stream: IO[str]) -> None:
    """Persist link counts as `SOURCE TARGET COUNT` lines sorted by word pair."""
    for (s, t) in sorted(counts.counts):
        stream.write(f"{s} {t} {counts.counts[(s, t)]}\n")


def parse_word_counts(stream: Iterable[str], *, source_name: str | None = None) -> InducedWordCounts:
    """Parse a `SOURCE TARGET COUNT` file back into word-link counts."""
    counts = InducedWordCounts()
    seen: set[tuple[str, str]] = set()
    for line_no, raw in enumerate(stream, start=1):
        line = raw[:-1] if raw.endswith("\n") else raw
        parts = line.split(" ")
        if len(parts) != 3:
            raise ParseError(
                f"wrong field count: expected 'SOURCE TARGET COUNT', got {len(parts)} fields",
                line=line_no,
                source=source_name,
            )
        s, t, count_text = parts
        if not count_text.isascii() or not count_text.isdigit():
            raise ParseError(f"non-numeric count: {count_text!r}", line=line_no, source=source_name)
        count = int(count_text)
        if count < 1 or not s or not t:
            raise ParseError(f"invalid count line: {line!r}", line=line_no, source=source_name)
        if (s, t) in seen:
            raise ParseError(f"duplicate word pair: {s} {t}", line=line_no, source=source_name)
        seen.add((s, t))
        counts.add(s, t, count)
    return counts
