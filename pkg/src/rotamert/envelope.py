"""Exact line search over the piecewise-constant corpus error surface.

Along a ray ``w + gamma * d`` every hypothesis of a sentence scores as a
line ``a + gamma * b`` with intercept ``a = w . h`` and slope
``b = d . h``.  The argmax hypothesis as a function of gamma is the
upper envelope of those lines: a slope-sorted sweep keeps the surviving
lines and the breakpoints where the winner changes.  Merging all
sentences' breakpoints yields intervals on which the corpus-wide
selection is constant, so interval error statistics update by integer
deltas while walking left to right.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .bleu import BleuStats, ErrorValue, aggregate, corpus_bleu
from .corpus import SentenceEntry, TuningCorpus
from .errors import DimensionMismatch

COALESCE_TOL = 1e-9


@dataclass(frozen=True)
class ScoreLine:
    """Score of one hypothesis along the search ray."""

    intercept: float
    slope: float
    hyp_index: int


@dataclass(frozen=True)
class SentenceEnvelope:
    """Upper envelope of one sentence: B breakpoints, B+1 winning segments."""

    breakpoints: tuple[float, ...]
    segments: tuple[int, ...]


@dataclass(frozen=True)
class IntervalSweep:
    """Corpus-level intervals with their aggregated statistics and errors."""

    boundaries: tuple[float, ...]
    interval_stats: tuple[BleuStats, ...]
    interval_error: tuple[ErrorValue, ...]


@dataclass(frozen=True)
class LineSearchResult:
    gamma_star: float
    error_at_star: ErrorValue
    chosen_interval: tuple[float, float]


def dot(u: Sequence[float], v: Sequence[float]) -> float:
    """Fixed-order dot product shared by every scoring path."""
    total = 0.0
    for a, b in zip(u, v):
        total += a * b
    return total


def project_lines(
    entry: SentenceEntry, w: Sequence[float], d: Sequence[float]
) -> list[ScoreLine]:
    """Turn each hypothesis into its score line along ``w + gamma * d``."""
    dim = len(entry.hypotheses[0].features)
    if len(w) != dim or len(d) != dim:
        raise DimensionMismatch(
            f"weights/direction of lengths {len(w)}/{len(d)} for {dim} features"
        )
    return [
        ScoreLine(dot(w, h.features), dot(d, h.features), i)
        for i, h in enumerate(entry.hypotheses)
    ]


def upper_envelope(lines: Sequence[ScoreLine]) -> SentenceEnvelope:
    """Sweep lines by ascending slope, keeping the upper envelope.

    Slope ties keep the higher intercept (it dominates everywhere); full
    ties keep the lowest hypothesis index.  A line is dropped when the
    breakpoint where it would take over does not exceed the previous
    one.
    """
    order = sorted(lines, key=lambda l: (l.slope, -l.intercept, l.hyp_index))
    hull: list[ScoreLine] = []
    breaks: list[float] = []
    for line in order:
        if hull and line.slope == hull[-1].slope:
            continue
        while True:
            if not hull:
                break
            top = hull[-1]
            crossing = (top.intercept - line.intercept) / (line.slope - top.slope)
            if breaks and crossing <= breaks[-1]:
                hull.pop()
                breaks.pop()
                continue
            breaks.append(crossing)
            break
        hull.append(line)
    return SentenceEnvelope(tuple(breaks), tuple(l.hyp_index for l in hull))


def sweep_intervals(
    corpus: TuningCorpus,
    envelopes: Sequence[SentenceEnvelope],
    stats_cache: Sequence[Sequence[BleuStats]],
) -> IntervalSweep:
    """Merge per-sentence breakpoints and walk intervals by stat deltas.

    Boundaries closer than ``COALESCE_TOL`` collapse into one; each
    boundary applies every affected sentence's outgoing/incoming
    hypothesis swap to the running aggregate.
    """
    if len(envelopes) != corpus.size or len(stats_cache) != corpus.size:
        raise DimensionMismatch(
            f"{len(envelopes)} envelopes / {len(stats_cache)} stat rows "
            f"for {corpus.size} sentences"
        )
    events: list[tuple[float, int, int, int]] = []
    for s, env in enumerate(envelopes):
        for i, gamma in enumerate(env.breakpoints):
            events.append((gamma, s, env.segments[i], env.segments[i + 1]))
    events.sort(key=lambda e: e[0])

    running = aggregate(
        stats_cache[s][env.segments[0]] for s, env in enumerate(envelopes)
    )
    boundaries: list[float] = []
    interval_stats: list[BleuStats] = [running]
    i = 0
    while i < len(events):
        group_start = events[i][0]
        j = i
        while j < len(events) and events[j][0] - group_start <= COALESCE_TOL:
            _, s, old_idx, new_idx = events[j]
            running = running - stats_cache[s][old_idx] + stats_cache[s][new_idx]
            j += 1
        boundaries.append(group_start)
        interval_stats.append(running)
        i = j
    interval_error = tuple(corpus_bleu(st) for st in interval_stats)
    return IntervalSweep(tuple(boundaries), tuple(interval_stats), interval_error)


def _interval_bounds(
    boundaries: Sequence[float], index: int
) -> tuple[float, float]:
    lower = boundaries[index - 1] if index > 0 else float("-inf")
    upper = boundaries[index] if index < len(boundaries) else float("inf")
    return lower, upper


def _distance_to_zero(lower: float, upper: float) -> float:
    # 0 for an interval containing gamma = 0, else gap to the nearer edge.
    return max(lower, -upper, 0.0)


def _argmax_at_zero(lines: Sequence[ScoreLine]) -> int:
    best = lines[0]
    for line in lines[1:]:
        if line.intercept > best.intercept:
            best = line
    return best.hyp_index


def line_search(
    corpus: TuningCorpus,
    stats_cache: Sequence[Sequence[BleuStats]],
    w: Sequence[float],
    d: Sequence[float],
    *,
    jobs: int = 1,
) -> LineSearchResult:
    """Minimize corpus error along ``w + gamma * d`` exactly.

    Returns the midpoint of the minimum-error interval (offset by 1.0
    into unbounded intervals); interval ties resolve toward the interval
    containing or closest to gamma = 0, then leftmost.  With no
    breakpoints at all the step is 0.  The result never scores worse
    than staying at gamma = 0.
    """
    def per_sentence(entry: SentenceEntry) -> tuple[list[ScoreLine], SentenceEnvelope]:
        lines = project_lines(entry, w, d)
        return lines, upper_envelope(lines)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            pairs = list(pool.map(per_sentence, corpus.entries))
    else:
        pairs = [per_sentence(entry) for entry in corpus.entries]
    projected = [lines for lines, _ in pairs]
    envelopes = [env for _, env in pairs]
    sweep = sweep_intervals(corpus, envelopes, stats_cache)

    best_index = 0
    best_key: tuple[float, float, int] | None = None
    for index, err in enumerate(sweep.interval_error):
        lower, upper = _interval_bounds(sweep.boundaries, index)
        key = (err.error, _distance_to_zero(lower, upper), index)
        if best_key is None or key < best_key:
            best_key = key
            best_index = index
    lower, upper = _interval_bounds(sweep.boundaries, best_index)
    error_star = sweep.interval_error[best_index]

    if not sweep.boundaries:
        gamma = 0.0
    elif lower == float("-inf"):
        gamma = upper - 1.0
    elif upper == float("inf"):
        gamma = lower + 1.0
    else:
        gamma = (lower + upper) / 2.0

    # Never move to something worse than the current point.  The sweep
    # already contains the gamma = 0 interval, so this only matters when
    # 0 sits exactly on a boundary and tie-breaking picks a different
    # hypothesis mix than either neighboring interval.
    zero_selection = [_argmax_at_zero(lines) for lines in projected]
    zero_error = corpus_bleu(
        aggregate(stats_cache[s][k] for s, k in enumerate(zero_selection))
    )
    if zero_error.error < error_star.error:
        zero_index = 0
        for index in range(len(sweep.interval_error)):
            low, up = _interval_bounds(sweep.boundaries, index)
            if low <= 0.0 <= up:
                zero_index = index
                break
        return LineSearchResult(
            0.0, zero_error, _interval_bounds(sweep.boundaries, zero_index)
        )
    return LineSearchResult(gamma, error_star, (lower, upper))
