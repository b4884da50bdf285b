"""Bounded-memory sorting of keyed text lines, spilling runs to disk.

Used by the triangulation join so that the intermediate records (which can
be an order of magnitude larger than either input table) never have to fit
in memory at once. Lines are newline-free strings; keys are computed by a
caller-supplied function and must be totally ordered and unique per line,
which makes the merge deterministic without relying on stability.
"""

from __future__ import annotations

import heapq
import os
import shutil
import tempfile
from typing import Any, Callable, Iterable, Iterator


def _run_reader(path: str) -> Iterator[str]:
    with open(path, "r", encoding="utf-8", newline="\n") as handle:
        for raw in handle:
            yield raw[:-1]


def external_sort(
    lines: Iterable[str],
    key: Callable[[str], Any],
    *,
    max_bytes: int,
    temp_dir: str | None = None,
) -> Iterator[str]:
    """Yield `lines` in ascending `key` order using at most ~max_bytes of buffer.

    Runs that exceed the buffer are sorted and written to a private temp
    directory, then merged lazily; everything is removed when the generator
    is exhausted or closed.
    """
    buffer: list[str] = []
    buffered_bytes = 0
    runs: list[str] = []
    spill_dir: str | None = None
    try:
        for line in lines:
            buffer.append(line)
            buffered_bytes += len(line) + 64
            if buffered_bytes > max_bytes:
                if spill_dir is None:
                    spill_dir = tempfile.mkdtemp(prefix="phrasepivot-sort-", dir=temp_dir)
                buffer.sort(key=key)
                run_path = os.path.join(spill_dir, f"run{len(runs):05d}")
                with open(run_path, "w", encoding="utf-8", newline="\n") as handle:
                    handle.writelines(f"{l}\n" for l in buffer)
                runs.append(run_path)
                buffer = []
                buffered_bytes = 0
        buffer.sort(key=key)
        if not runs:
            yield from buffer
        else:
            streams = [_run_reader(path) for path in runs]
            streams.append(iter(buffer))
            yield from heapq.merge(*streams, key=key)
    finally:
        if spill_dir is not None:
            shutil.rmtree(spill_dir, ignore_errors=True)
