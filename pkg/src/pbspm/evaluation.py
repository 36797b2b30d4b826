"""Candidate ranking, precision, correlation diagnostics, and the runner.

An experiment splits a temporal graph once, scores the non-observed training
pairs with the requested method, and measures how many of the top-L ranked
pairs fall in the probe set. Spectral methods repeat this over independent
random perturbations; the classical baselines are deterministic and run once.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .baselines import (
    KatzConfig,
    WalkConfig,
    aa_scores,
    cn_scores,
    katz_scores,
    max_eigenvalue,
    ra_scores,
    srw_scores,
)
from .errors import NumericalError, UndefinedMetricError, ZeroVarianceError
from .graph import AdjacencyView, TemporalGraph, adjacency
from .spectral import (
    ScoreMatrix,
    SpectralModel,
    eigendecompose,
    eigenvalue_correction,
    pbspm_scores,
    sample_perturbation,
    select_m,
    spm_scores,
    truncated_scores,
)
from .split import PopularityVector, SplitConfig, TrainProbeSplit, popularity, split_train_probe

__all__ = [
    "METHODS",
    "SPECTRAL_METHODS",
    "RankedCandidates",
    "ExperimentConfig",
    "PrecisionReport",
    "SweepPoint",
    "rank_candidates",
    "precision_at",
    "pearson_cc",
    "delta_cc",
    "run_experiment",
    "sweep",
    "sweep_m",
]

METHODS = ("CN", "AA", "RA", "Katz", "SRW", "SPM", "PBSPM", "FastPBSPM")
SPECTRAL_METHODS = ("SPM", "PBSPM", "FastPBSPM")


@dataclass(frozen=True)
class RankedCandidates:
    """Non-observed pairs sorted by score descending, ties by (i, j) ascending."""

    pairs: np.ndarray
    scores: np.ndarray

    def __len__(self) -> int:
        return self.pairs.shape[0]


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a single experiment needs besides the graph itself.

    ``L`` defaults to the filtered probe size; ``count_dropped_in_L`` switches
    to the unfiltered probe size instead. ``score_averaging`` selects whether
    precision is averaged over realizations or computed once on the averaged
    score matrix. ``katz_damping=None`` means half the convergence bound.
    """

    method: str
    alpha: float = 0.0
    p_fresher: float = 0.10
    p_h: float = 0.10
    realizations: int = 10
    m: Optional[int] = None
    seed: int = 0
    L: Optional[int] = None
    probe_fraction: float = 0.10
    score_averaging: str = "precision"
    count_dropped_in_L: bool = False
    katz_damping: Optional[float] = None
    katz_max_path_length: Optional[int] = None
    srw_steps: int = 3
    m_threshold: float = 0.05

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")
        if self.score_averaging not in ("precision", "matrix"):
            raise ValueError(
                f"score_averaging must be 'precision' or 'matrix', got {self.score_averaging!r}"
            )


@dataclass(frozen=True)
class PrecisionReport:
    """Outcome of one experiment: per-realization precisions plus diagnostics.

    ``mean_delta_lambda1`` and ``mean_delta_cc`` are None for baseline
    methods, which involve no perturbation. ``resolved_m`` records the
    truncation actually used by the fast method. ``mean_scores`` is only
    populated on request and never serialized.
    """

    config: ExperimentConfig
    L: int
    probe_dropped: int
    per_realization: tuple[float, ...]
    mean_precision: float
    std_precision: Optional[float]
    mean_delta_lambda1: Optional[float]
    mean_delta_cc: Optional[float]
    resolved_m: Optional[int] = None
    failures: tuple[str, ...] = ()
    mean_scores: Optional[ScoreMatrix] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SweepPoint:
    alpha: float
    p_fresher: float
    report: PrecisionReport


def rank_candidates(scores: ScoreMatrix, train_view: AdjacencyView) -> RankedCandidates:
    """Rank every non-edge pair of the training view by score.

    Ordering is deterministic: score descending, then (i, j) ascending.
    """
    if scores.n != train_view.n:
        raise ValueError(f"size mismatch: scores n={scores.n}, view n={train_view.n}")
    iu, ju = np.triu_indices(train_view.n, k=1)
    keep = train_view.matrix[iu, ju] == 0
    ii, jj = iu[keep], ju[keep]
    sc = scores.values[ii, jj]
    order = np.lexsort((jj, ii, -sc))
    pairs = np.column_stack((ii[order], jj[order]))
    pairs.setflags(write=False)
    ranked_scores = sc[order]
    ranked_scores.setflags(write=False)
    return RankedCandidates(pairs=pairs, scores=ranked_scores)


def precision_at(ranked: RankedCandidates, probe: Iterable[tuple[int, int]], L: int) -> float:
    """Fraction of the top-L ranked pairs that appear in the probe set."""
    probe_set = set(probe)
    if not probe_set:
        raise UndefinedMetricError("probe set is empty")
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    if L > len(ranked):
        raise ValueError(f"L={L} exceeds candidate count {len(ranked)}")
    hits = sum(1 for u, v in ranked.pairs[:L] if (int(u), int(v)) in probe_set)
    return hits / L


def pearson_cc(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation with population (1/N) normalization."""
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.shape != yv.shape or xv.ndim != 1:
        raise ValueError(f"vectors must share one dimension, got {xv.shape} and {yv.shape}")
    if xv.size < 2:
        raise ValueError(f"need at least 2 samples, got {xv.size}")
    sx = xv.std()
    sy = yv.std()
    if sx == 0 or sy == 0:
        raise ZeroVarianceError("correlation undefined for a constant vector")
    return float(np.mean(((xv - xv.mean()) / sx) * ((yv - yv.mean()) / sy)))


def delta_cc(
    model: SpectralModel, boosted_x1: np.ndarray, probe_degree_increment: np.ndarray
) -> float:
    """Correlation gain of the boosted principal eigenvector.

    Both the raw and the boosted principal eigenvector are correlated against
    the per-node probe degree increment; the difference shows whether the
    popularity rescaling pushed attractiveness toward the nodes that actually
    gained edges.
    """
    base = pearson_cc(model.eigenvectors[:, 0], probe_degree_increment)
    boosted = pearson_cc(boosted_x1, probe_degree_increment)
    return boosted - base


def _probe_degree_increment(graph: TemporalGraph, n_train: int) -> np.ndarray:
    rows = graph.edges[n_train:]
    ends = np.concatenate([rows[:, 0], rows[:, 1]])
    return np.bincount(ends, minlength=graph.n).astype(np.float64)


def _baseline_scores(
    method: str, train_view: AdjacencyView, cfg: ExperimentConfig
) -> ScoreMatrix:
    if method == "CN":
        return cn_scores(train_view)
    if method == "AA":
        return aa_scores(train_view)
    if method == "RA":
        return ra_scores(train_view)
    if method == "Katz":
        damping = cfg.katz_damping
        if damping is None:
            lam_max = max_eigenvalue(train_view)
            damping = 0.5 / lam_max if lam_max > 0 else 0.1
        return katz_scores(
            train_view, KatzConfig(damping=damping, max_path_length=cfg.katz_max_path_length)
        )
    if method == "SRW":
        return srw_scores(train_view, WalkConfig(steps=cfg.srw_steps))
    raise ValueError(f"not a baseline method: {method}")


def _spectral_models(
    train_view: AdjacencyView,
    train_edges: np.ndarray,
    cfg: ExperimentConfig,
) -> tuple[list[Optional[SpectralModel]], list[str]]:
    """One corrected spectral model per realization; None marks a failure."""
    models: list[Optional[SpectralModel]] = []
    failures: list[str] = []
    for r in range(cfg.realizations):
        try:
            sample = sample_perturbation(train_view, train_edges, cfg.p_h, cfg.seed + r)
            model = eigenvalue_correction(eigendecompose(sample.retained), sample.removed)
            models.append(model)
        except NumericalError as err:
            models.append(None)
            failures.append(f"realization {r}: {err}")
    if not any(m is not None for m in models):
        raise NumericalError(f"all {cfg.realizations} realizations failed: {failures}")
    return models, failures


def _spectral_realization_scores(
    model: SpectralModel, cfg: ExperimentConfig, pop: PopularityVector, m: Optional[int]
) -> tuple[ScoreMatrix, np.ndarray]:
    """Score matrix plus the (possibly boosted) principal eigenvector."""
    if cfg.method == "SPM":
        return spm_scores(model), model.eigenvectors[:, 0]
    factor = 1.0 + cfg.alpha * pop.values
    boosted_x1 = model.eigenvectors[:, 0] * factor
    if cfg.method == "PBSPM":
        return pbspm_scores(model, pop, cfg.alpha), boosted_x1
    return truncated_scores(model, pop, cfg.alpha, m), boosted_x1


def _resolve_m(cfg: ExperimentConfig, train_view: AdjacencyView) -> Optional[int]:
    if cfg.method != "FastPBSPM":
        return None
    if cfg.m is not None:
        if not 1 <= cfg.m <= train_view.n:
            raise ValueError(f"m must be in [1, {train_view.n}], got {cfg.m}")
        return cfg.m
    return select_m(eigendecompose(train_view).eigenvalues, cfg.m_threshold)


def _mean_or_none(values: list[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


def run_experiment(
    graph: TemporalGraph, cfg: ExperimentConfig, collect_mean_scores: bool = False
) -> PrecisionReport:
    """Split, score, rank, and evaluate precision for one method.

    The temporal split is deterministic. Spectral methods run
    ``cfg.realizations`` independent perturbations seeded ``seed .. seed+r-1``
    and average precision over them (or average the score matrices first when
    ``cfg.score_averaging == "matrix"``); baselines run once, unperturbed.
    With ``collect_mean_scores`` the report also carries the score matrix
    averaged over realizations, for emitting prediction lists.
    """
    split = split_train_probe(
        graph, SplitConfig(p_fresher=cfg.p_fresher, probe_fraction=cfg.probe_fraction)
    )
    train_view = adjacency(graph, split.train)
    L = cfg.L
    if L is None:
        L = split.probe_total if cfg.count_dropped_in_L else len(split.probe)

    if cfg.method not in SPECTRAL_METHODS:
        scores = _baseline_scores(cfg.method, train_view, cfg)
        prec = precision_at(rank_candidates(scores, train_view), split.probe, L)
        return PrecisionReport(
            config=cfg,
            L=L,
            probe_dropped=split.probe_dropped,
            per_realization=(prec,),
            mean_precision=prec,
            std_precision=0.0,
            mean_delta_lambda1=None,
            mean_delta_cc=None,
            mean_scores=scores if collect_mean_scores else None,
        )

    pop = popularity(graph, split.train, cfg.p_fresher)
    probe_inc = _probe_degree_increment(graph, n_train=split.train.size)
    m = _resolve_m(cfg, train_view)
    models, failures = _spectral_models(train_view, graph.edges[split.train], cfg)

    precisions: list[float] = []
    delta_lambda1: list[Optional[float]] = []
    delta_ccs: list[Optional[float]] = []
    score_sum = np.zeros_like(train_view.matrix) if (
        cfg.score_averaging == "matrix" or collect_mean_scores
    ) else None
    n_ok = 0
    for model in models:
        if model is None:
            continue
        scores, boosted_x1 = _spectral_realization_scores(model, cfg, pop, m)
        delta_lambda1.append(float(model.corrections[0]))
        try:
            delta_ccs.append(delta_cc(model, boosted_x1, probe_inc))
        except ZeroVarianceError:
            delta_ccs.append(None)
        if cfg.score_averaging == "precision":
            precisions.append(precision_at(rank_candidates(scores, train_view), split.probe, L))
        if score_sum is not None:
            score_sum += scores.values
        n_ok += 1

    mean_scores = None
    if score_sum is not None:
        mean_scores = ScoreMatrix(n=train_view.n, values=score_sum / n_ok)
        mean_scores.values.setflags(write=False)
    if cfg.score_averaging == "matrix":
        mean_prec = precision_at(rank_candidates(mean_scores, train_view), split.probe, L)
        per, std = (), None
    else:
        per = tuple(precisions)
        mean_prec = float(np.mean(precisions))
        std = float(np.std(precisions))
    return PrecisionReport(
        config=cfg,
        L=L,
        probe_dropped=split.probe_dropped,
        per_realization=per,
        mean_precision=mean_prec,
        std_precision=std,
        mean_delta_lambda1=_mean_or_none(delta_lambda1),
        mean_delta_cc=_mean_or_none(delta_ccs),
        resolved_m=m,
        failures=tuple(failures),
        mean_scores=mean_scores if collect_mean_scores else None,
    )


def _shared_spectral_state(graph: TemporalGraph, cfg: ExperimentConfig):
    split = split_train_probe(
        graph, SplitConfig(p_fresher=cfg.p_fresher, probe_fraction=cfg.probe_fraction)
    )
    train_view = adjacency(graph, split.train)
    probe_inc = _probe_degree_increment(graph, n_train=split.train.size)
    models, failures = _spectral_models(train_view, graph.edges[split.train], cfg)
    return split, train_view, probe_inc, models, failures


def _point_report(
    cfg: ExperimentConfig,
    split: TrainProbeSplit,
    train_view: AdjacencyView,
    probe_inc: np.ndarray,
    models: list[Optional[SpectralModel]],
    failures: list[str],
    pop: PopularityVector,
    m: Optional[int],
) -> PrecisionReport:
    L = cfg.L
    if L is None:
        L = split.probe_total if cfg.count_dropped_in_L else len(split.probe)
    precisions: list[float] = []
    delta_lambda1: list[Optional[float]] = []
    delta_ccs: list[Optional[float]] = []
    for model in models:
        if model is None:
            continue
        scores, boosted_x1 = _spectral_realization_scores(model, cfg, pop, m)
        delta_lambda1.append(float(model.corrections[0]))
        try:
            delta_ccs.append(delta_cc(model, boosted_x1, probe_inc))
        except ZeroVarianceError:
            delta_ccs.append(None)
        precisions.append(precision_at(rank_candidates(scores, train_view), split.probe, L))
    return PrecisionReport(
        config=cfg,
        L=L,
        probe_dropped=split.probe_dropped,
        per_realization=tuple(precisions),
        mean_precision=float(np.mean(precisions)),
        std_precision=float(np.std(precisions)),
        mean_delta_lambda1=_mean_or_none(delta_lambda1),
        mean_delta_cc=_mean_or_none(delta_ccs),
        resolved_m=m,
        failures=tuple(failures),
    )


def sweep(
    graph: TemporalGraph,
    base_cfg: ExperimentConfig,
    alphas: Sequence[float],
    p_freshers: Sequence[float],
) -> list[SweepPoint]:
    """Precision over the (alpha, p_fresher) grid with one shared split.

    The perturbation realizations depend only on the seed, so the spectral
    models are decomposed once and reused across every grid point; results
    are identical to running each point through ``run_experiment``.
    """
    if base_cfg.method not in ("PBSPM", "FastPBSPM"):
        raise ValueError(f"sweep requires a popularity-boosted method, got {base_cfg.method}")
    if len(alphas) == 0 or len(p_freshers) == 0:
        raise ValueError("alpha and p_fresher grids must be non-empty")
    points: list[SweepPoint] = []
    for pf in p_freshers:
        pf_cfg = replace(base_cfg, p_fresher=pf)
        split, train_view, probe_inc, models, failures = _shared_spectral_state(graph, pf_cfg)
        pop = popularity(graph, split.train, pf)
        m = _resolve_m(pf_cfg, train_view)
        for alpha in alphas:
            cfg = replace(pf_cfg, alpha=alpha)
            report = _point_report(
                cfg, split, train_view, probe_inc, models, failures, pop, m
            )
            points.append(SweepPoint(alpha=alpha, p_fresher=pf, report=report))
    return points


def sweep_m(
    graph: TemporalGraph, base_cfg: ExperimentConfig, ms: Sequence[int]
) -> list[tuple[int, PrecisionReport]]:
    """Precision of the truncated reconstruction for each requested m."""
    if len(ms) == 0:
        raise ValueError("m grid must be non-empty")
    cfg = replace(base_cfg, method="FastPBSPM")
    split, train_view, probe_inc, models, failures = _shared_spectral_state(graph, cfg)
    pop = popularity(graph, split.train, cfg.p_fresher)
    results = []
    for m in ms:
        if not 1 <= m <= train_view.n:
            raise ValueError(f"m must be in [1, {train_view.n}], got {m}")
        point_cfg = replace(cfg, m=m)
        report = _point_report(
            point_cfg, split, train_view, probe_inc, models, failures, pop, m
        )
        results.append((m, report))
    return results
