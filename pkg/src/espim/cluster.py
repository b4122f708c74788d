"""Seeded k-means and screen-region comparisons.

The clusterer is deliberately deterministic: every restart derives its own
random stream from (seed, restart index), initialization picks a seeded
first centroid and then farthest points, Lloyd iterations run to an
assignment fixpoint (or 300 iterations), and the best of 10 restarts by
inertia wins.  Ties -- in assignment, farthest-point selection and restart
comparison -- always break toward the lowest index, so results do not
depend on scheduling or dict order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "InfeasibleClusteringError",
    "Clustering",
    "RegionStats",
    "RegionSummary",
    "DriftResult",
    "kmeans",
    "region_analysis",
    "euclidean_drift",
]

Point = tuple[float, float]


class InfeasibleClusteringError(ValueError):
    """More clusters requested than distinct points available."""


@dataclass(frozen=True)
class Clustering:
    centroids: tuple[Point, ...]
    assignments: tuple[int, ...]
    inertia: float


def _nearest(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index of the nearest centroid per point (ties -> lowest index) and
    the squared distance to it."""
    d2 = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    return labels, d2[np.arange(len(points)), labels]


def _init_centroids(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded first pick, then repeatedly the point farthest from the set."""
    centroids = [points[int(rng.integers(len(points)))]]
    while len(centroids) < k:
        _, d2 = _nearest(points, np.asarray(centroids))
        centroids.append(points[int(d2.argmax())])
    return np.asarray(centroids, dtype=np.float64)


def _lloyd(points: np.ndarray, k: int, rng: np.random.Generator,
           max_iter: int) -> tuple[np.ndarray, np.ndarray, float]:
    centroids = _init_centroids(points, k, rng)
    labels, d2 = _nearest(points, centroids)
    prev_inertia = float(d2.sum())
    for _ in range(max_iter):
        new_centroids = centroids.copy()
        for j in range(k):
            members = points[labels == j]
            if len(members):
                new_centroids[j] = members.mean(axis=0)
            else:
                # revive an empty cluster at the point farthest from its
                # assigned centroid (largest current inertia contribution)
                far = int(d2.argmax())
                new_centroids[j] = points[far]
                d2 = d2.copy()
                d2[far] = 0.0
        new_labels, d2 = _nearest(points, new_centroids)
        inertia = float(d2.sum())
        assert inertia <= prev_inertia + 1e-9, "inertia must not increase"
        prev_inertia = inertia
        if np.array_equal(new_labels, labels):
            return new_centroids, new_labels, inertia
        centroids, labels = new_centroids, new_labels
    return centroids, labels, prev_inertia


def kmeans(
    points: Sequence[Point],
    k: int,
    seed: int,
    n_restarts: int = 10,
    max_iter: int = 300,
) -> Clustering:
    """Cluster 2-D points into k groups; deterministic in (points, k, seed)."""
    if len(points) == 0:
        raise InfeasibleClusteringError("no points to cluster")
    if k < 1:
        raise InfeasibleClusteringError(f"k must be >= 1, got {k}")
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected (n, 2) points, got shape {arr.shape}")
    n_distinct = len(np.unique(arr, axis=0))
    if k > n_distinct:
        raise InfeasibleClusteringError(
            f"k={k} exceeds the {n_distinct} distinct point(s) available"
        )

    best: tuple[np.ndarray, np.ndarray, float] | None = None
    for restart in range(n_restarts):
        rng = np.random.default_rng([seed, restart])
        result = _lloyd(arr, k, rng, max_iter)
        if best is None or result[2] < best[2] - 1e-12:
            best = result
    centroids, labels, inertia = best
    return Clustering(
        centroids=tuple((float(c[0]), float(c[1])) for c in centroids),
        assignments=tuple(int(l) for l in labels),
        inertia=inertia,
    )


@dataclass(frozen=True)
class RegionStats:
    label: str  # C1..Ck, ordered by centroid (y, x)
    centroid: Point
    target_count: int
    mean_fixation_distance: float | None
    mean_click_distance: float | None
    error_count: int


@dataclass(frozen=True)
class RegionSummary:
    regions: tuple[RegionStats, ...]
    clustering: Clustering
    # region index (into ``regions``) of every input point, per kind
    target_regions: tuple[int, ...] = ()
    fixation_regions: tuple[int, ...] = ()
    click_regions: tuple[int, ...] = ()
    error_regions: tuple[int, ...] = ()

    @property
    def total_errors(self) -> int:
        return sum(r.error_count for r in self.regions)


def region_analysis(
    targets: Sequence[Point],
    fixations: Sequence[Point],
    clicks: Sequence[Point],
    errors: Sequence[Point],
    k: int = 4,
    seed: int = 42,
) -> RegionSummary:
    """Cluster target centers into k regions and measure how far fixations
    and clicks land from each region's centroid, plus per-region error
    counts.  Region labels C1..Ck follow centroid position (top-to-bottom,
    then left-to-right) so summaries are comparable across runs."""
    if len(targets) == 0:
        raise InfeasibleClusteringError("region analysis needs at least one target")
    clustering = kmeans(targets, k=k, seed=seed)
    order = sorted(range(k), key=lambda j: (clustering.centroids[j][1], clustering.centroids[j][0]))
    centroids = np.asarray([clustering.centroids[j] for j in order], dtype=np.float64)

    def assign(pts: Sequence[Point]) -> tuple[tuple[int, ...], list[list[float]]]:
        buckets: list[list[float]] = [[] for _ in range(k)]
        labels: list[int] = []
        if len(pts):
            arr = np.asarray(pts, dtype=np.float64)
            lab, d2 = _nearest(arr, centroids)
            labels = [int(l) for l in lab]
            for l, dd in zip(labels, np.sqrt(d2)):
                buckets[l].append(float(dd))
        return tuple(labels), buckets

    target_labels, _ = assign(targets)
    fixation_labels, fix_d = assign(fixations)
    click_labels, click_d = assign(clicks)
    error_labels, err_d = assign(errors)

    regions = tuple(
        RegionStats(
            label=f"C{j + 1}",
            centroid=(float(centroids[j][0]), float(centroids[j][1])),
            target_count=sum(1 for l in target_labels if l == j),
            mean_fixation_distance=float(np.mean(fix_d[j])) if fix_d[j] else None,
            mean_click_distance=float(np.mean(click_d[j])) if click_d[j] else None,
            error_count=len(err_d[j]),
        )
        for j in range(k)
    )
    return RegionSummary(
        regions=regions,
        clustering=clustering,
        target_regions=target_labels,
        fixation_regions=fixation_labels,
        click_regions=click_labels,
        error_regions=error_labels,
    )


@dataclass(frozen=True)
class DriftResult:
    distances: tuple[float, ...]
    mean: float


def euclidean_drift(points: Sequence[Point], centers: Sequence[Point]) -> DriftResult:
    """Per-pair straight-line distances and their mean."""
    if len(points) != len(centers):
        raise ValueError(f"paired lists differ in length: {len(points)} vs {len(centers)}")
    if len(points) == 0:
        raise ValueError("need at least one pair")
    p = np.asarray(points, dtype=np.float64)
    c = np.asarray(centers, dtype=np.float64)
    d = np.hypot(p[:, 0] - c[:, 0], p[:, 1] - c[:, 1])
    return DriftResult(distances=tuple(float(v) for v in d), mean=float(d.mean()))
