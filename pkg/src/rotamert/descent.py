"""Coordinate descent over feature weights via exact line searches.

Each iteration sweeps the configured search directions, replacing the
weights by the exact line-search optimum along each one.  The loop stops
once two consecutive sweeps change the corpus error by at most
``epsilon`` (checked from the second iteration on), or after
``max_iter`` iterations.  ``best-direction`` mode evaluates every
direction from the current point per iteration and applies only the
most profitable step.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .bleu import BleuStats, ErrorValue, hypothesis_stats, selection_error
from .corpus import TuningCorpus
from .envelope import dot, line_search
from .errors import ConfigError, DegenerateDirectionWarning, DimensionMismatch

if TYPE_CHECKING:
    from .rotation import CoordinateSystem

SWEEP_MODES = ("sequential", "best-direction")

DEFAULT_EPSILON = 0.001
DEFAULT_MAX_ITER = 25


@dataclass(frozen=True)
class KcdConfig:
    """Loop controls: stopping tolerance, iteration cap, sweep order."""

    epsilon: float = DEFAULT_EPSILON
    max_iter: int = DEFAULT_MAX_ITER
    sweep_mode: str = "sequential"

    def __post_init__(self) -> None:
        if not self.epsilon > 0.0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be at least 1, got {self.max_iter}")
        if self.sweep_mode not in SWEEP_MODES:
            raise ConfigError(
                f"sweep_mode must be one of {SWEEP_MODES}, got {self.sweep_mode!r}"
            )


@dataclass(frozen=True)
class StepRecord:
    """One applied line-search step."""

    iteration: int
    dimension: int
    gamma: float
    error: ErrorValue


@dataclass(frozen=True)
class KcdTrace:
    steps: tuple[StepRecord, ...]
    final_weights: tuple[float, ...]
    iterations: int

    def to_tsv(self) -> str:
        rows = ["iter\tdim\tgamma\terror\tbleu"]
        for step in self.steps:
            rows.append(
                f"{step.iteration}\t{step.dimension}\t{step.gamma!r}"
                f"\t{step.error.error!r}\t{step.error.bleu * 100.0:.2f}"
            )
        return "\n".join(rows) + "\n"


def select_hypotheses(corpus: TuningCorpus, w: Sequence[float]) -> list[int]:
    """Argmax hypothesis per sentence under ``w``; score ties keep the lowest rank."""
    if len(w) != corpus.feature_dim:
        raise DimensionMismatch(
            f"{len(w)} weights for {corpus.feature_dim} features"
        )
    chosen = []
    for entry in corpus.entries:
        best_index = 0
        best_score = dot(w, entry.hypotheses[0].features)
        for i, hyp in enumerate(entry.hypotheses[1:], start=1):
            score = dot(w, hyp.features)
            if score > best_score:
                best_score = score
                best_index = i
        chosen.append(best_index)
    return chosen


def uniform_weights(dim: int) -> tuple[float, ...]:
    return (1.0 / dim,) * dim


def basis_directions(dim: int) -> tuple[tuple[float, ...], ...]:
    """The M coordinate axes as direction vectors."""
    return tuple(
        tuple(1.0 if j == i else 0.0 for j in range(dim)) for i in range(dim)
    )


def _check_directions(
    directions: Sequence[Sequence[float]], dim: int
) -> list[int]:
    """Validate direction shapes; return indices of usable (nonzero) ones."""
    if len(directions) != dim:
        raise DimensionMismatch(f"{len(directions)} directions for {dim} features")
    active = []
    for i, direction in enumerate(directions):
        if len(direction) != dim:
            raise DimensionMismatch(
                f"direction {i} has length {len(direction)}, expected {dim}"
            )
        if all(c == 0.0 for c in direction):
            warnings.warn(
                f"direction {i} is the zero vector; skipping it",
                DegenerateDirectionWarning,
                stacklevel=3,
            )
        else:
            active.append(i)
    return active


def kcd_optimize(
    corpus: TuningCorpus,
    init_w: Sequence[float] | None = None,
    system: CoordinateSystem | None = None,
    config: KcdConfig | None = None,
    *,
    stats_cache: Sequence[Sequence[BleuStats]] | None = None,
    jobs: int = 1,
) -> tuple[tuple[float, ...], KcdTrace]:
    """Run coordinate descent; returns final weights and the step trace.

    Weights default to uniform ``1/M`` and are never normalized.  Each
    applied step's error is taken from the exact line search, so the
    trace is non-increasing by construction.
    """
    dim = corpus.feature_dim
    w = tuple(init_w) if init_w is not None else uniform_weights(dim)
    if len(w) != dim:
        raise DimensionMismatch(f"{len(w)} initial weights for {dim} features")
    directions = basis_directions(dim) if system is None else system.directions
    if config is None:
        config = KcdConfig()
    if stats_cache is None:
        stats_cache = hypothesis_stats(corpus)

    active = _check_directions(directions, dim)
    current = selection_error(stats_cache, select_hypotheses(corpus, w))
    steps: list[StepRecord] = []
    previous_sweep: float | None = None
    iterations = 0

    for iteration in range(1, config.max_iter + 1):
        iterations = iteration
        if config.sweep_mode == "sequential":
            for dim_index in active:
                direction = directions[dim_index]
                result = line_search(corpus, stats_cache, w, direction, jobs=jobs)
                if result.error_at_star.error > current.error:
                    gamma, step_error = 0.0, current
                else:
                    gamma, step_error = result.gamma_star, result.error_at_star
                w = tuple(wi + gamma * di for wi, di in zip(w, direction))
                current = step_error
                steps.append(StepRecord(iteration, dim_index, gamma, step_error))
        else:  # best-direction
            candidates = []
            for dim_index in active:
                direction = directions[dim_index]
                result = line_search(corpus, stats_cache, w, direction, jobs=jobs)
                candidates.append((result.error_at_star.error, dim_index, result))
            if candidates:
                _, dim_index, result = min(candidates, key=lambda c: (c[0], c[1]))
                direction = directions[dim_index]
                if result.error_at_star.error > current.error:
                    gamma, step_error = 0.0, current
                else:
                    gamma, step_error = result.gamma_star, result.error_at_star
                w = tuple(wi + gamma * di for wi, di in zip(w, direction))
                current = step_error
                steps.append(StepRecord(iteration, dim_index, gamma, step_error))
        new_error = current.error
        if previous_sweep is not None and abs(previous_sweep - new_error) <= config.epsilon:
            break
        previous_sweep = new_error

    return w, KcdTrace(tuple(steps), w, iterations)
