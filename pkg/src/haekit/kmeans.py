"""One-dimensional K-means (Lloyd + k-means++) and elbow selection.

Working on the sorted values, a 1-D assignment is just k-1 split points, so
each Lloyd step costs O(k log n) for assignment plus one pass for the means.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, KTooLarge, NonFiniteValue
from .rng import XorShift64Star

MAX_ITER = 300
# inputs up to this size also get an exact dynamic-programming start
EXACT_MAX_N = 1500


@dataclass(frozen=True, eq=False)
class ClusterModel:
    k: int
    centroids: np.ndarray
    labels: np.ndarray = field(repr=False)
    wcss: float
    counts: np.ndarray
    minima: np.ndarray
    maxima: np.ndarray

    @property
    def fractions(self) -> np.ndarray:
        return self.counts / self.counts.sum()


def _prepare(values) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise EmptyInput("no values to cluster")
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue("values must be finite")
    return x


def _distinct_count(xs_sorted: np.ndarray) -> int:
    return int(np.count_nonzero(np.diff(xs_sorted)) + 1)


def _seed_plusplus(xs: np.ndarray, k: int, rng: XorShift64Star) -> np.ndarray:
    n = xs.size
    centers = [xs[min(int(rng.random() * n), n - 1)]]
    d2 = (xs - centers[0]) ** 2
    for _ in range(1, k):
        cum = np.cumsum(d2)
        r = rng.random() * cum[-1]
        idx = min(int(np.searchsorted(cum, r, side="right")), n - 1)
        centers.append(xs[idx])
        d2 = np.minimum(d2, (xs - xs[idx]) ** 2)
    return np.sort(np.array(centers))


def _splits(xs: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Split indices for strictly ascending centroids ``c``.

    Point ``x`` goes to cluster j over j+1 iff ``|x - c_j| <= |x - c_{j+1}|``
    (ties to the lower index); the midpoint search is corrected so that the
    result agrees with that comparison exactly.
    """
    n = xs.size
    s = np.searchsorted(xs, (c[:-1] + c[1:]) / 2, side="right")
    for j in range(c.size - 1):
        lo, hi = c[j], c[j + 1]
        i = int(s[j])
        while i > 0 and abs(xs[i - 1] - lo) > abs(xs[i - 1] - hi):
            i -= 1
        while i < n and abs(xs[i] - lo) <= abs(xs[i] - hi):
            i += 1
        s[j] = i
    return np.maximum.accumulate(s) if s.size else s


def _bounds(s: np.ndarray, n: int) -> np.ndarray:
    return np.concatenate(([0], s, [n]))


def _update(xs: np.ndarray, c: np.ndarray, s: np.ndarray) -> np.ndarray:
    b = _bounds(s, xs.size)
    new = c.copy()
    empty = []
    for j in range(c.size):
        if b[j + 1] > b[j]:
            new[j] = xs[b[j]:b[j + 1]].mean()
        else:
            empty.append(j)
    if empty:
        # re-seed empty clusters at the points worst served by the current assignment
        labels = np.repeat(np.arange(c.size), np.diff(b))
        d2 = (xs - c[labels]) ** 2
        taken = set()
        for j in empty:
            order = np.argsort(-d2, kind="stable")
            for idx in order:
                if xs[idx] not in taken and xs[idx] not in new:
                    new[j] = xs[idx]
                    taken.add(xs[idx])
                    break
        new = np.sort(new)
    return new


def _lloyd(xs: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    prev = None
    for _ in range(MAX_ITER):
        s = _splits(xs, c)
        if prev is not None and np.array_equal(s, prev):
            return c, s
        prev = s
        c = _update(xs, c, s)
    return c, _splits(xs, c)


def _wcss(xs: np.ndarray, c: np.ndarray, s: np.ndarray) -> float:
    b = _bounds(s, xs.size)
    return float(sum(np.sum((xs[b[j]:b[j + 1]] - c[j]) ** 2) for j in range(c.size)))


def _optimal_centroids(xs: np.ndarray, k: int) -> np.ndarray:
    """Means of the minimum-WCSS contiguous partition of sorted ``xs`` (O(k n^2))."""
    n = xs.size
    s1 = np.concatenate(([0.0], np.cumsum(xs)))
    s2 = np.concatenate(([0.0], np.cumsum(xs * xs)))
    j = np.arange(n + 1)[:, None]
    i = np.arange(n + 1)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        cost = (s2[i] - s2[j]) - (s1[i] - s1[j]) ** 2 / (i - j)
    cost = np.where(i > j, np.maximum(cost, 0.0), np.inf)
    best = cost[0].copy()
    back = []
    for _ in range(1, k):
        total = best[:, None] + cost
        arg = np.argmin(total, axis=0)
        back.append(arg)
        best = total[arg, np.arange(n + 1)]
    cuts = [n]
    for arg in reversed(back):
        cuts.append(int(arg[cuts[-1]]))
    cuts.append(0)
    cuts = cuts[::-1]
    return np.array([xs[a:b].mean() for a, b in zip(cuts[:-1], cuts[1:])])


def kmeans_1d(values, k: int, seed: int = 42, n_init: int = 10) -> ClusterModel:
    """Cluster scalars into ``k`` groups; deterministic for a given ``seed``.

    Runs ``n_init`` k-means++ initialisations drawn from one xorshift64*
    stream and keeps the lowest-WCSS result.  Small inputs also try the
    exact 1-D optimum as a start, which Lloyd leaves unchanged.  Centroids
    come back ascending.
    """
    x = _prepare(values)
    if k < 1:
        raise KTooLarge("k must be at least 1")
    order = np.argsort(x, kind="stable")
    xs = x[order]
    if k > _distinct_count(xs):
        raise KTooLarge(f"k={k} exceeds the number of distinct values")
    rng = XorShift64Star(seed)
    best = None
    starts = (_seed_plusplus(xs, k, rng) for _ in range(max(1, n_init)))
    if xs.size <= EXACT_MAX_N and k > 1:
        starts = [_optimal_centroids(xs, k), *starts]
    for start in starts:
        c, s = _lloyd(xs, start)
        w = _wcss(xs, c, s)
        if best is None or w < best[0]:
            best = (w, c, s)
    w, c, s = best
    b = _bounds(s, xs.size)
    counts = np.diff(b)
    labels = np.empty(x.size, dtype=np.int64)
    labels[order] = np.repeat(np.arange(k), counts)
    nonempty = counts > 0
    minima = np.full(k, np.nan)
    maxima = np.full(k, np.nan)
    minima[nonempty] = xs[b[:-1][nonempty]]
    maxima[nonempty] = xs[b[1:][nonempty] - 1]
    return ClusterModel(k, c, labels, w, counts, minima, maxima)


def wcss_curve(values, k_max: int, seed: int = 42, n_init: int = 10) -> np.ndarray:
    """WCSS for k = 1..k_max; k beyond the distinct-value count costs 0."""
    x = _prepare(values)
    d = _distinct_count(np.sort(x))
    out = np.zeros(k_max)
    for k in range(1, k_max + 1):
        if k < d:
            out[k - 1] = kmeans_1d(x, k, seed, n_init).wcss
    return out


def elbow_k(values, k_max: int = 8, seed: int = 42, n_init: int = 10) -> int:
    """k maximising the discrete curvature w(k-1) - 2 w(k) + w(k+1)."""
    if k_max < 3:
        raise ValueError("k_max must be at least 3")
    x = _prepare(values)
    if _distinct_count(np.sort(x)) == 1:
        return 1
    w = wcss_curve(x, k_max, seed, n_init)
    curvature = w[:-2] - 2 * w[1:-1] + w[2:]      # entry i is k = i + 2
    return int(np.argmax(curvature)) + 2
