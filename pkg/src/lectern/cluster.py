"""K-Means (k-means++ seeding, Lloyd iterations) and centroid sentence selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LecternError

DEFAULT_SEED = 12345
DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-4


class ClusterError(LecternError, ValueError):
    pass


class KTooLarge(ClusterError):
    pass


class EmptyMatrix(ClusterError):
    pass


@dataclass
class ClusterResult:
    k: int
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    selected: list[int]
    n_iter: int = 0
    # inertia after every assignment step, one list per restart
    run_histories: list[list[float]] = field(default_factory=list)


def squared_distances(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """N x k squared Euclidean distances, computed exactly column by column."""
    out = np.empty((x.shape[0], centroids.shape[0]))
    for j, c in enumerate(centroids):
        diff = x - c
        out[:, j] = np.einsum("ij,ij->i", diff, diff)
    return out


def data_diameter(x: np.ndarray) -> float:
    norms = np.einsum("ij,ij->i", x, x)
    sq = norms[:, None] + norms[None, :] - 2.0 * (x @ x.T)
    return float(np.sqrt(max(sq.max(), 0.0)))


def kmeans_plusplus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Indices of k seed rows chosen with D^2 weighting."""
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    closest = squared_distances(x, x[chosen[0]][None, :])[:, 0]
    while len(chosen) < k:
        total = closest.sum()
        if total > 0:
            cumulative = np.cumsum(closest)
            idx = int(np.searchsorted(cumulative, rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        else:
            # remaining rows duplicate chosen seeds
            rest = [i for i in range(n) if i not in set(chosen)]
            idx = rest[int(rng.integers(len(rest)))]
        chosen.append(idx)
        closest = np.minimum(closest, squared_distances(x, x[idx][None, :])[:, 0])
    return np.array(chosen)


def _assign(x, centroids):
    d = squared_distances(x, centroids)
    return np.argmin(d, axis=1), d


def _reseed_empty(x, centroids, labels, d) -> bool:
    """Give each empty cluster the row farthest from its own centroid.

    Only rows from clusters with more than one member are eligible, so no
    cluster is emptied in the process. Mutates all arguments in place.
    """
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k)
    moved = False
    rows = np.arange(x.shape[0])
    for j in np.flatnonzero(counts == 0):
        own = d[rows, labels]
        eligible = counts[labels] > 1
        if not eligible.any():
            break
        idx = int(np.argmax(np.where(eligible, own, -np.inf)))
        counts[labels[idx]] -= 1
        labels[idx] = j
        counts[j] = 1
        centroids[j] = x[idx]
        d[:, j] = squared_distances(x, x[idx][None, :])[:, 0]
        moved = True
    return moved


def _means(x, labels, k, previous):
    out = previous.copy()
    for j in range(k):
        members = x[labels == j]
        if len(members):
            out[j] = members.mean(axis=0)
    return out


def _inertia(d, labels) -> float:
    return float(d[np.arange(len(labels)), labels].sum())


def lloyd(x, init, max_iter=DEFAULT_MAX_ITER, tol=DEFAULT_TOL, diameter=None):
    """One Lloyd run from the given seed rows.

    Returns ``(labels, centroids, inertia, n_iter, history)`` where history
    holds the inertia after every assignment step.
    """
    k = len(init)
    threshold = tol * (data_diameter(x) if diameter is None else diameter)
    centroids = x[init].copy()
    labels, d = _assign(x, centroids)
    _reseed_empty(x, centroids, labels, d)
    history = [_inertia(d, labels)]
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        updated = _means(x, labels, k, centroids)
        shift = float(np.sqrt(((updated - centroids) ** 2).sum(axis=1)).max())
        centroids = updated
        new_labels, d = _assign(x, centroids)
        reseeded = _reseed_empty(x, centroids, new_labels, d)
        history.append(_inertia(d, new_labels))
        stable = np.array_equal(new_labels, labels)
        labels = new_labels
        if not reseeded and (stable or shift <= threshold):
            break
    else:
        # iteration cap hit; make sure labels are nearest-centroid labels
        for _ in range(k):
            labels, d = _assign(x, centroids)
            if not _reseed_empty(x, centroids, labels, d):
                break
    return labels, centroids, _inertia(d, labels), n_iter, history


def nearest_to_centroids(x: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> list[int]:
    """For cluster j, the member row closest to centroid j (lowest row on ties)."""
    picks = []
    for j, c in enumerate(centroids):
        members = np.flatnonzero(labels == j)
        diff = x[members] - c
        dist = np.einsum("ij,ij->i", diff, diff)
        picks.append(int(members[np.argmin(dist)]))
    return picks


def kmeans_fit(
    matrix,
    k: int,
    seed: int = DEFAULT_SEED,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    n_init: int = 1,
) -> ClusterResult:
    """Cluster the rows of ``matrix`` into k groups.

    Each of the ``n_init`` restarts gets its own generator spawned from
    ``seed``; the lowest-inertia run wins, earliest on ties. Clusters are
    relabelled so that ``selected`` (the row nearest each centroid) is
    strictly increasing and ``selected[i]`` belongs to cluster i.
    """
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptyMatrix("cannot cluster an empty matrix")
    n = x.shape[0]
    if k < 1:
        raise ClusterError("k must be at least 1")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the {n} available rows")
    if max_iter < 1 or n_init < 1 or tol < 0:
        raise ClusterError("max_iter and n_init must be positive and tol nonnegative")

    diameter = data_diameter(x)
    children = np.random.SeedSequence(seed % 2**128).spawn(n_init)
    best = None
    histories = []
    for child in children:
        rng = np.random.default_rng(child)
        run = lloyd(x, kmeans_plusplus(x, k, rng), max_iter, tol, diameter)
        histories.append(run[4])
        if best is None or run[2] < best[2]:
            best = run
    labels, centroids, inertia, n_iter, _ = best

    selected = nearest_to_centroids(x, labels, centroids)
    order = np.argsort(selected, kind="stable")
    relabel = np.empty(k, dtype=np.int64)
    relabel[order] = np.arange(k)
    return ClusterResult(
        k=k,
        assignments=relabel[labels],
        centroids=centroids[order],
        inertia=inertia,
        selected=[selected[i] for i in order],
        n_iter=n_iter,
        run_histories=histories,
    )


def select_centroid_sentences(result: ClusterResult, matrix) -> list[int]:
    """Row indices nearest each centroid, sorted into original order."""
    x = np.asarray(matrix, dtype=np.float64)
    return sorted(nearest_to_centroids(x, np.asarray(result.assignments), result.centroids))
