"""Shared builders, seeded random generators, and brute-force oracles.

The oracles here are deliberately written as plain triple loops over
phrase/word inventories, independent of the streaming join they check.
"""

from __future__ import annotations

import random

from phrasepivot import (
    Alignment,
    Direction,
    FeatureVector,
    LexiconEntry,
    LexiconTable,
    Phrase,
    PhraseEntry,
    PhraseTable,
)


def mk_entry(src: str, tgt: str, features=(0.5, 0.5, 0.5, 0.5), align: str = "") -> PhraseEntry:
    return PhraseEntry(
        Phrase.from_text(src),
        Phrase.from_text(tgt),
        FeatureVector(*features),
        Alignment.from_text(align),
    )


def mk_table(*entries: PhraseEntry) -> PhraseTable:
    return PhraseTable(tuple(entries))


def random_phrases(rng: random.Random, count: int, vocab: list[str], max_len: int = 3) -> list[Phrase]:
    phrases: set[tuple[str, ...]] = set()
    while len(phrases) < count:
        length = rng.randint(1, max_len)
        phrases.add(tuple(rng.choice(vocab) for _ in range(length)))
    return [Phrase(tokens) for tokens in sorted(phrases)]


def random_alignment(rng: random.Random, src_len: int, tgt_len: int, density: float = 0.4) -> Alignment:
    links = {
        (i, j)
        for i in range(src_len)
        for j in range(tgt_len)
        if rng.random() < density
    }
    return Alignment(frozenset(links))


def random_feature(rng: random.Random) -> float:
    return rng.uniform(1e-6, 1.0)


def random_pair_table(
    rng: random.Random,
    sources: list[Phrase],
    targets: list[Phrase],
    max_entries: int,
) -> PhraseTable:
    """A table of distinct (source, target) pairs sampled from the inventories."""
    capacity = len(sources) * len(targets)
    n_entries = min(max_entries, capacity)
    picks = rng.sample(range(capacity), n_entries)
    entries = []
    for pick in picks:
        src = sources[pick // len(targets)]
        tgt = targets[pick % len(targets)]
        features = FeatureVector(*(random_feature(rng) for _ in range(4)))
        entries.append(PhraseEntry(src, tgt, features, random_alignment(rng, len(src), len(tgt))))
    return PhraseTable(tuple(entries))


def random_leg_pair(
    rng: random.Random,
    max_entries: int = 400,
    n_src: tuple[int, int] = (10, 45),
    n_pvt: tuple[int, int] = (5, 30),
    n_tgt: tuple[int, int] = (10, 45),
) -> tuple[PhraseTable, PhraseTable]:
    """Two random legs sharing a pivot-phrase inventory (word vocab <= 50)."""
    vocab = [f"w{i}" for i in range(rng.randint(10, 50))]
    sources = random_phrases(rng, rng.randint(*n_src), vocab)
    pivots = random_phrases(rng, rng.randint(*n_pvt), vocab)
    targets = random_phrases(rng, rng.randint(*n_tgt), vocab)
    src_pvt = random_pair_table(rng, sources, pivots, max_entries)
    pvt_tgt = random_pair_table(rng, pivots, targets, max_entries)
    return src_pvt, pvt_tgt


def oracle_triangulate(src_pvt: PhraseTable, pvt_tgt: PhraseTable):
    """Brute-force triple loop over all (source, pivot, target) phrase triples.

    Returns {(source tokens, target tokens): (inv_prob, dir_prob)} with the
    same 1.0 cap as the implementation.
    """
    leg_a = {(e.source.tokens, e.target.tokens): e.features for e in src_pvt}
    leg_b = {(e.source.tokens, e.target.tokens): e.features for e in pvt_tgt}
    sources = sorted({e.source.tokens for e in src_pvt})
    pivots = sorted({e.target.tokens for e in src_pvt} | {e.source.tokens for e in pvt_tgt})
    targets = sorted({e.target.tokens for e in pvt_tgt})
    result = {}
    for s in sources:
        for t in targets:
            inv = 0.0
            direct = 0.0
            hit = False
            for p in pivots:
                fa = leg_a.get((s, p))
                fb = leg_b.get((p, t))
                if fa is not None and fb is not None:
                    hit = True
                    inv += fa.inv_phrase_prob * fb.inv_phrase_prob
                    direct += fa.dir_phrase_prob * fb.dir_phrase_prob
            if hit:
                result[(s, t)] = (min(1.0, inv), min(1.0, direct))
    return result


def oracle_compose(a1: frozenset, a2: frozenset, src_len: int, pvt_len: int, tgt_len: int) -> set:
    """Relational join by complete enumeration of the (i, j, k) index space."""
    joined = set()
    for i in range(src_len):
        for j in range(pvt_len):
            for k in range(tgt_len):
                if (i, j) in a1 and (j, k) in a2:
                    joined.add((i, k))
    return joined


def random_lexicon(
    rng: random.Random,
    given_vocab: list[str],
    condition_vocab: list[str],
    direction: Direction,
    source_lang: str,
    target_lang: str,
    null_rate: float = 0.15,
) -> LexiconTable:
    """A lexicon whose per-condition distributions sum below 1, with some NULLs."""
    entries = []
    conditions = list(condition_vocab)
    if rng.random() < null_rate:
        conditions.append("NULL")
    for condition in conditions:
        k = rng.randint(1, min(6, len(given_vocab)))
        givens = rng.sample(given_vocab, k)
        if rng.random() < null_rate:
            givens.append("NULL")
        raw = [rng.uniform(0.05, 1.0) for _ in givens]
        scale = rng.uniform(0.3, 1.0) / sum(raw)
        for given, value in zip(givens, raw):
            entries.append(LexiconEntry(given, condition, value * scale))
    return LexiconTable(direction, tuple(entries), source_lang, target_lang)


def oracle_pivot_lexicon(s_given_p, p_given_s, p_given_t, t_given_p):
    """Brute-force triple loop over (source, pivot, target) word triples."""

    def as_map(table):
        return {(e.given, e.condition): e.prob for e in table}

    t1, t2, t3, t4 = map(as_map, (s_given_p, p_given_s, p_given_t, t_given_p))
    src_words = sorted({s for s, _ in t1} | {s for _, s in t2})
    pvt_words = sorted(
        {p for _, p in t1} | {p for p, _ in t2} | {p for p, _ in t3} | {p for _, p in t4}
    )
    tgt_words = sorted({t for _, t in t3} | {t for t, _ in t4})
    result = {}
    for s in src_words:
        if s == "NULL":
            continue
        for t in tgt_words:
            if t == "NULL":
                continue
            st = 0.0
            ts = 0.0
            for p in pvt_words:
                if p == "NULL":
                    continue
                if (s, p) in t1 and (p, t) in t3:
                    st += t1[(s, p)] * t3[(p, t)]
                if (p, s) in t2 and (t, p) in t4:
                    ts += t2[(p, s)] * t4[(t, p)]
            if st > 0.0 and ts > 0.0:
                result[(s, t)] = (min(1.0, st), min(1.0, ts))
    return result
