"""Structural perturbation scoring and its popularity-boosted variants.

A random slice of the training edges is removed, the remaining adjacency is
eigendecomposed, and each eigenvalue receives the first-order shift induced
by the removed slice. Summing the shifted eigenpairs back up yields a score
matrix whose large entries mark likely missing edges. The popularity-boosted
variant rescales every eigenvector component by ``1 + alpha * popularity``
before the reconstruction, and the fast variant keeps only the ``m`` leading
eigenpairs, with ``m`` read off the last large eigenvalue gap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegeneratePerturbationError, NumericalError
from .graph import AdjacencyView
from .split import PopularityVector

__all__ = [
    "PerturbationSample",
    "SpectralModel",
    "ScoreMatrix",
    "sample_perturbation",
    "eigendecompose",
    "eigenvalue_correction",
    "spm_scores",
    "boost_eigenvectors",
    "pbspm_scores",
    "truncated_scores",
    "select_m",
]


@dataclass(frozen=True)
class PerturbationSample:
    """A training view split into a retained part and a removed part.

    ``removed_edges`` holds positions into the edge list the sample was drawn
    from. Entrywise, ``retained + removed`` equals the original view.
    """

    retained: AdjacencyView
    removed: AdjacencyView
    removed_edges: frozenset[int]
    p_h: float


@dataclass(frozen=True)
class SpectralModel:
    """Eigenpairs of a symmetric view, ordered by |eigenvalue| descending.

    ``eigenvectors[:, k]`` is the unit eigenvector paired with
    ``eigenvalues[k]``; ``corrections[k]`` is the first-order eigenvalue
    shift attributed to a removed edge set (zero until populated).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    corrections: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class ScoreMatrix:
    """Symmetric pair-likelihood scores over all nodes."""

    n: int
    values: np.ndarray


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _score_matrix(values: np.ndarray) -> ScoreMatrix:
    # (M + M.T) / 2 makes BLAS round-off exactly symmetric.
    sym = (values + values.T) / 2.0
    return ScoreMatrix(n=sym.shape[0], values=_frozen(sym))


def sample_perturbation(
    train_view: AdjacencyView, train_edges: np.ndarray, p_h: float, seed: int
) -> PerturbationSample:
    """Remove a uniform random fraction ``p_h`` of the training edges.

    ``train_edges`` is an ``(m, >=2)`` array whose first two columns are the
    edge endpoints backing ``train_view``. The draw is without replacement
    from a generator seeded with ``seed``, so it is reproducible.

    Raises:
        DegeneratePerturbationError: ``round(p_h * m)`` is zero.
    """
    if not 0.0 < p_h < 1.0:
        raise ValueError(f"p_h must be in (0,1), got {p_h}")
    train_edges = np.asarray(train_edges)
    m = train_edges.shape[0]
    k = round(p_h * m)
    if k < 1:
        raise DegeneratePerturbationError(
            f"p_h={p_h} removes zero of {m} training edges"
        )
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(m, size=k, replace=False))

    removed = np.zeros_like(train_view.matrix)
    uu, vv = train_edges[chosen, 0], train_edges[chosen, 1]
    removed[uu, vv] = 1.0
    removed[vv, uu] = 1.0
    retained = train_view.matrix - removed
    return PerturbationSample(
        retained=AdjacencyView(train_view.n, _frozen(retained)),
        removed=AdjacencyView(train_view.n, _frozen(removed)),
        removed_edges=frozenset(int(c) for c in chosen),
        p_h=p_h,
    )


def eigendecompose(view: AdjacencyView) -> SpectralModel:
    """Full symmetric eigendecomposition, ordered by |eigenvalue| descending.

    Ties break by signed eigenvalue descending, then solver order. Each
    eigenvector is sign-fixed so its largest-magnitude component is positive,
    making downstream results independent of solver sign choices.
    """
    try:
        lam, vec = np.linalg.eigh(view.matrix)
    except np.linalg.LinAlgError as err:
        raise NumericalError(f"eigendecomposition failed: {err}") from err
    order = np.lexsort((np.arange(lam.size), -lam, -np.abs(lam)))
    lam = lam[order]
    vec = vec[:, order]
    peak = np.argmax(np.abs(vec), axis=0)
    signs = np.sign(vec[peak, np.arange(vec.shape[1])])
    signs[signs == 0] = 1.0
    vec = vec * signs
    return SpectralModel(
        eigenvalues=_frozen(lam),
        eigenvectors=_frozen(vec),
        corrections=_frozen(np.zeros_like(lam)),
    )


def eigenvalue_correction(model: SpectralModel, delta: AdjacencyView) -> SpectralModel:
    """First-order eigenvalue shifts from putting the removed edges back.

    For unit eigenvectors the shift of pair ``k`` is ``x_k^T delta x_k``,
    accumulated over the nonzero entries of ``delta`` so the cost scales with
    the removed edge count, not with n^2.
    """
    if delta.n != model.n:
        raise ValueError(f"dimension mismatch: model n={model.n}, delta n={delta.n}")
    uu, vv = np.nonzero(np.triu(delta.matrix))
    if uu.size == 0:
        corrections = np.zeros(model.n)
    else:
        w = delta.matrix[uu, vv] * np.where(uu == vv, 1.0, 2.0)
        X = model.eigenvectors
        corrections = np.einsum("e,ek,ek->k", w, X[uu, :], X[vv, :])
    return SpectralModel(
        eigenvalues=model.eigenvalues,
        eigenvectors=model.eigenvectors,
        corrections=_frozen(corrections),
    )


def _reconstruct(vectors: np.ndarray, weights: np.ndarray) -> ScoreMatrix:
    return _score_matrix((vectors * weights) @ vectors.T)


def spm_scores(model: SpectralModel) -> ScoreMatrix:
    """Sum of corrected eigenpairs: the plain structural perturbation score."""
    return _reconstruct(model.eigenvectors, model.eigenvalues + model.corrections)


def boost_eigenvectors(
    model: SpectralModel, s: PopularityVector, alpha: float
) -> np.ndarray:
    """Rescale component ``i`` of every eigenvector by ``1 + alpha * s[i]``.

    The result is intentionally not renormalized: the rescaling carries the
    popularity signal into the reconstruction.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if len(s) != model.n:
        raise ValueError(f"popularity covers {len(s)} nodes, model has {model.n}")
    return model.eigenvectors * (1.0 + alpha * s.values)[:, None]


def pbspm_scores(
    model: SpectralModel, s: PopularityVector, alpha: float
) -> ScoreMatrix:
    """Popularity-boosted reconstruction over all eigenpairs."""
    boosted = boost_eigenvectors(model, s, alpha)
    return _reconstruct(boosted, model.eigenvalues + model.corrections)


def truncated_scores(
    model: SpectralModel, s: PopularityVector, alpha: float, m: int
) -> ScoreMatrix:
    """Popularity-boosted reconstruction keeping only the m leading eigenpairs."""
    if not 1 <= m <= model.n:
        raise ValueError(f"m must be in [1, {model.n}], got {m}")
    boosted = boost_eigenvectors(model, s, alpha)
    weights = model.eigenvalues + model.corrections
    return _reconstruct(boosted[:, :m], weights[:m])


def select_m(eigenvalues: Sequence[float], threshold: float = 0.05) -> int:
    """Truncation size from the last large eigenvalue gap.

    With the spectrum sorted by absolute value descending, returns the largest
    ``i`` such that ``|lam_i| - |lam_{i+1}|`` exceeds ``threshold * |lam_1|``.
    When no gap qualifies (flat or tiny spectra) the rank-1 fallback ``m=1``
    is returned.
    """
    lam = np.abs(np.asarray(eigenvalues, dtype=np.float64))
    if lam.size == 0:
        raise ValueError("eigenvalue list is empty")
    if threshold < 0:
        raise ValueError(f"threshold must be nonnegative, got {threshold}")
    if lam.size == 1:
        return 1
    gaps = lam[:-1] - lam[1:]
    qualifying = np.nonzero(gaps > threshold * lam[0])[0]
    if qualifying.size == 0:
        return 1
    return int(qualifying[-1]) + 1
