"""Log-linear scoring and the two-stage top-N / top-M phrase table pruning.

Entries are scored by the weighted sum of the natural logs of their four
features. Pruning keeps, per source phrase, the N best-scoring entries, then
per target phrase the M best survivors. Ties always go to the
lexicographically smaller phrase on the opposite side, so pruning a permuted
table yields the same canonical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analysis import percentage_one_decimal
from .errors import ValidationError
from .table_model import DEFAULT_WEIGHTS, PhraseEntry, PhraseTable, WeightConfig

#: Features below this are clamped before the log, so denormal inputs cannot
#: produce -inf scores.
DEFAULT_FEATURE_FLOOR = 1e-40


@dataclass(frozen=True, slots=True)
class PruneParams:
    """Caps for both pruning stages; None means unlimited."""

    n: int | None
    m: int | None
    weights: WeightConfig = DEFAULT_WEIGHTS
    feature_floor: float = DEFAULT_FEATURE_FLOOR

    def __post_init__(self) -> None:
        for name, cap in (("n", self.n), ("m", self.m)):
            if cap is not None and cap < 1:
                raise ValidationError(f"{name} must be >= 1 or unlimited, got {cap}")
        if not self.feature_floor > 0.0:
            raise ValidationError("feature floor must be positive")


@dataclass(frozen=True, slots=True)
class PruneReport:
    before: int
    after: int

    @property
    def percentage(self) -> float:
        if self.before == 0:
            return 100.0
        return percentage_one_decimal(self.after, self.before)

    def lines(self) -> list[str]:
        return [
            f"before={self.before}",
            f"after={self.after}",
            f"percentage={self.percentage:.1f}",
        ]


def score_entry(
    entry: PhraseEntry, weights: WeightConfig, floor: float = DEFAULT_FEATURE_FLOOR
) -> float:
    """Weighted sum of the natural logs of the entry's features."""
    total = 0.0
    for w, f in zip(weights.weights, entry.features.as_tuple()):
        total += w * math.log(max(f, floor))
    return total


def _prune_grouped(
    table: PhraseTable,
    cap: int | None,
    weights: WeightConfig,
    floor: float,
    by_source: bool,
) -> PhraseTable:
    if cap is None:
        return table
    groups: dict[tuple[str, ...], list[PhraseEntry]] = {}
    for entry in table:
        key = entry.source.tokens if by_source else entry.target.tokens
        groups.setdefault(key, []).append(entry)
    kept: list[PhraseEntry] = []
    for group in groups.values():
        if by_source:
            group.sort(key=lambda e: (-score_entry(e, weights, floor), e.target.tokens))
        else:
            group.sort(key=lambda e: (-score_entry(e, weights, floor), e.source.tokens))
        kept.extend(group[:cap])
    return PhraseTable(tuple(kept))


def prune_source_topn(
    table: PhraseTable,
    n: int | None,
    weights: WeightConfig = DEFAULT_WEIGHTS,
    floor: float = DEFAULT_FEATURE_FLOOR,
) -> PhraseTable:
    """Keep the n best-scoring entries per source phrase (ties: smaller target)."""
    return _prune_grouped(table, n, weights, floor, by_source=True)


def prune_target_topm(
    table: PhraseTable,
    m: int | None,
    weights: WeightConfig = DEFAULT_WEIGHTS,
    floor: float = DEFAULT_FEATURE_FLOOR,
) -> PhraseTable:
    """Keep the m best-scoring entries per target phrase (ties: smaller source)."""
    return _prune_grouped(table, m, weights, floor, by_source=False)


def prune_modified(table: PhraseTable, params: PruneParams) -> tuple[PhraseTable, PruneReport]:
    """Source-side top-N pruning followed by target-side top-M pruning."""
    after_source = prune_source_topn(table, params.n, params.weights, params.feature_floor)
    result = prune_target_topm(after_source, params.m, params.weights, params.feature_floor)
    return result, PruneReport(before=len(table), after=len(result))
