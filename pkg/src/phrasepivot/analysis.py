"""Coverage and size analytics over phrase tables.

OOV is judged at the unigram level: a test token is covered iff the table
contains an entry whose source phrase is exactly that single token. Size
percentages use exact rational arithmetic rounded half-up to one decimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ValidationError
from .table_model import PhraseTable


def percentage_one_decimal(part: int, whole: int) -> float:
    """100 * part / whole, rounded half-up to one decimal place, exactly."""
    if whole <= 0:
        raise ValidationError(f"cannot compute a percentage of {whole}")
    tenths = math.floor(Fraction(1000 * part, whole) + Fraction(1, 2))
    return tenths / 10


@dataclass(frozen=True, slots=True)
class OovReport:
    total_tokens: int
    oov_tokens: int
    total_types: int
    oov_types: int
    oov_type_list: tuple[str, ...]

    def lines(self) -> list[str]:
        return [
            f"total_tokens={self.total_tokens}",
            f"oov_tokens={self.oov_tokens}",
            f"total_types={self.total_types}",
            f"oov_types={self.oov_types}",
        ]


@dataclass(frozen=True, slots=True)
class SizeReport:
    entries: int
    baseline_entries: int | None = None
    percentage: float | None = None

    def lines(self) -> list[str]:
        out = [f"entries={self.entries}"]
        if self.baseline_entries is not None:
            out.append(f"baseline_entries={self.baseline_entries}")
            out.append(f"percentage={self.percentage:.1f}")
        return out


def oov_report(table: PhraseTable, test_sentences: Iterable[Sequence[str]]) -> OovReport:
    """Count test tokens and types with no single-token source entry covering them."""
    covered = {e.source.tokens[0] for e in table if len(e.source) == 1}
    total_tokens = 0
    oov_tokens = 0
    types: set[str] = set()
    oov_types: set[str] = set()
    for sentence in test_sentences:
        for token in sentence:
            total_tokens += 1
            types.add(token)
            if token not in covered:
                oov_tokens += 1
                oov_types.add(token)
    return OovReport(
        total_tokens=total_tokens,
        oov_tokens=oov_tokens,
        total_types=len(types),
        oov_types=len(oov_types),
        oov_type_list=tuple(sorted(oov_types)),
    )


def size_report_from_counts(entries: int, baseline_entries: int | None = None) -> SizeReport:
    """Size report straight from entry counts (tables too large to hold count too)."""
    if baseline_entries is None:
        return SizeReport(entries=entries)
    if baseline_entries == 0:
        raise ValidationError("empty baseline")
    return SizeReport(
        entries=entries,
        baseline_entries=baseline_entries,
        percentage=percentage_one_decimal(entries, baseline_entries),
    )


def size_report(table: PhraseTable, baseline: PhraseTable | None = None) -> SizeReport:
    """Entry count, optionally as a one-decimal percentage of a baseline table."""
    return size_report_from_counts(
        len(table), len(baseline) if baseline is not None else None
    )
