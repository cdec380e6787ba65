"""Semantic property space: embedding ingestion, PCA reduction, k-means
clustering, and cluster membership.

The clustering stack is written against a fixed determinism contract: same
vectors, same K, same seed => same model, byte-identical when serialized.
k-means++ draws all its randomness from the SplitMix64 generator (see rng),
Lloyd assignment breaks distance ties toward the lowest centroid index, and
empty clusters are re-seeded to the farthest point from its assigned
centroid. PCA is plain SVD on centered data with a deterministic sign
convention (largest-magnitude loading positive per component).

Cluster count selection uses the largest-chord-distance rule: normalize the
(K, inertia) curve to the unit square and pick the K farthest from the
straight line joining the endpoints. That variant is parameter-free and
scale-invariant.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .errors import ValidationError
from .rng import SplitMix64

FORMAT_VERSION = 1


@dataclass
class EmbeddingSet:
    ids: list[str]
    vectors: np.ndarray  # N x dim, float64

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return len(self.ids)

    def rows_for(self, ids: list[str]) -> np.ndarray:
        pos = {sid: i for i, sid in enumerate(self.ids)}
        return self.vectors[[pos[sid] for sid in ids]]


def load_embeddings(path: str | Path, corpus: Corpus) -> EmbeddingSet:
    """Read line-delimited {"id", "vec"} records and validate against the
    corpus: consistent dimension, finite values, known ids, full coverage of
    train and test."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"embeddings file not found: {path}")
    ids: list[str] = []
    rows: list[list[float]] = []
    dim: int | None = None
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ValidationError(f"{path}:{lineno}: JSON parse error: {e.msg}") from e
            if "id" not in record or "vec" not in record:
                raise ValidationError(f"{path}:{lineno}: record needs 'id' and 'vec'")
            sid = record["id"]
            vec = record["vec"]
            if sid not in corpus.index:
                raise ValidationError(f"{path}:{lineno}: unknown id {sid!r} (not in corpus)")
            if sid in seen:
                raise ValidationError(f"{path}:{lineno}: duplicate id {sid!r}")
            seen.add(sid)
            if dim is None:
                dim = len(vec)
                if dim == 0:
                    raise ValidationError(f"{path}:{lineno}: empty vector")
            elif len(vec) != dim:
                raise ValidationError(
                    f"{path}:{lineno}: dimension mismatch for id {sid!r}: "
                    f"got {len(vec)}, expected {dim}"
                )
            ids.append(sid)
            rows.append(vec)

    if not ids:
        raise ValidationError(f"{path}: no embedding records")
    vectors = np.asarray(rows, dtype=np.float64)
    if not np.isfinite(vectors).all():
        bad = ids[int(np.argwhere(~np.isfinite(vectors))[0][0])]
        raise ValidationError(f"{path}: non-finite value in vector for id {bad!r}")

    required = corpus.partition_ids("train") + corpus.partition_ids("test")
    missing = [sid for sid in required if sid not in seen]
    if missing:
        head = ", ".join(repr(m) for m in missing[:10])
        more = f" (+{len(missing) - 10} more)" if len(missing) > 10 else ""
        raise ValidationError(f"{path}: missing embeddings for ids: {head}{more}")
    return EmbeddingSet(ids=ids, vectors=vectors)


@dataclass
class PcaModel:
    mean: np.ndarray  # dim
    components: np.ndarray  # k x dim, orthonormal rows
    explained_variance_ratio: np.ndarray  # k, non-increasing

    @property
    def k(self) -> int:
        return int(self.components.shape[0])

    @property
    def cumulative_explained(self) -> float:
        return float(self.explained_variance_ratio.sum())

    def transform(self, vectors: np.ndarray) -> np.ndarray:
        return (np.asarray(vectors, dtype=np.float64) - self.mean) @ self.components.T

    def inverse_transform(self, reduced: np.ndarray) -> np.ndarray:
        return np.asarray(reduced, dtype=np.float64) @ self.components + self.mean


class LowVarianceWarning(UserWarning):
    """Retained components explain less of the variance than intended."""


def fit_pca(
    embeddings: EmbeddingSet | np.ndarray,
    target_dim: int = 50,
    variance_floor: float = 0.80,
) -> PcaModel:
    """Center the data and keep the top `target_dim` principal directions.

    Warns (LowVarianceWarning) when the kept components explain less than
    `variance_floor` of the total variance; errors on zero-variance input.
    """
    X = embeddings.vectors if isinstance(embeddings, EmbeddingSet) else np.asarray(embeddings, dtype=np.float64)
    n, dim = X.shape
    if target_dim < 1:
        raise ValidationError(f"target_dim must be >= 1, got {target_dim}")
    if target_dim > dim:
        raise ValidationError(f"target_dim {target_dim} exceeds embedding dim {dim}")
    if n <= target_dim:
        raise ValidationError(f"need more samples ({n}) than target_dim ({target_dim})")

    mean = X.mean(axis=0)
    centered = X - mean
    total_var = float((centered**2).sum()) / (n - 1)
    if total_var == 0.0:
        raise ValidationError("embeddings have zero variance; PCA is undefined")

    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:target_dim].copy()
    # deterministic sign: largest-magnitude loading positive (first on ties)
    for row in components:
        pivot = int(np.argmax(np.abs(row)))
        if row[pivot] < 0:
            row *= -1.0
    variances = (s[:target_dim] ** 2) / (n - 1)
    ratio = variances / total_var

    model = PcaModel(mean=mean, components=components, explained_variance_ratio=ratio)
    if model.cumulative_explained < variance_floor:
        warnings.warn(
            f"top {target_dim} components explain only "
            f"{model.cumulative_explained:.1%} of the variance "
            f"(floor {variance_floor:.0%}); consider a higher target_dim",
            LowVarianceWarning,
            stacklevel=2,
        )
    return model


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray  # K x k_reduced
    assignments: dict[str, int]  # id -> cluster index
    inertia: float
    seed: int
    inertia_history: list[float] = field(default_factory=list)
    inertia_curve: dict[int, float] | None = None  # K -> inertia (elbow runs)

    def members(self, cluster_id: int) -> list[str]:
        return [sid for sid, c in self.assignments.items() if c == cluster_id]

    def to_json(self, config: dict | None = None) -> str:
        payload = {
            "format_version": FORMAT_VERSION,
            "config": config,
            "k": self.k,
            "seed": self.seed,
            "inertia": self.inertia,
            "inertia_history": self.inertia_history,
            "inertia_curve": (
                {str(kk): v for kk, v in sorted(self.inertia_curve.items())}
                if self.inertia_curve
                else None
            ),
            "centroids": self.centroids.tolist(),
            "assignments": {sid: self.assignments[sid] for sid in sorted(self.assignments)},
        }
        return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ClusterModel":
        payload = json.loads(text)
        return cls(
            k=payload["k"],
            centroids=np.asarray(payload["centroids"], dtype=np.float64),
            assignments=dict(payload["assignments"]),
            inertia=payload["inertia"],
            seed=payload["seed"],
            inertia_history=payload.get("inertia_history", []),
            inertia_curve=(
                {int(kk): v for kk, v in payload["inertia_curve"].items()}
                if payload.get("inertia_curve")
                else None
            ),
        )


def _assign(X: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest centroid per point (ties -> lowest index) and squared distances.

    Uses the ||x||^2 - 2x.c + ||c||^2 expansion so memory stays at N x K."""
    d2 = (
        (X**2).sum(axis=1)[:, None]
        - 2.0 * (X @ centroids.T)
        + (centroids**2).sum(axis=1)[None, :]
    )
    np.maximum(d2, 0.0, out=d2)
    labels = np.argmin(d2, axis=1)  # argmin takes the first minimum: lowest index
    # recompute the winning distance exactly (a point sitting on its centroid
    # must contribute 0, which the expansion above cannot guarantee)
    exact = ((X - centroids[labels]) ** 2).sum(axis=1)
    return labels, exact


def _plus_plus_init(X: np.ndarray, k: int, rng: SplitMix64) -> np.ndarray:
    """k-means++ seeding driven by the deterministic generator."""
    n = len(X)
    chosen = [rng.randrange(n)]
    d2 = ((X - X[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(k - 1):
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining points coincide with a centroid; take the first
            # index not yet chosen to stay deterministic
            taken = set(chosen)
            idx = next(i for i in range(n) if i not in taken)
        else:
            r = rng.next_float() * total
            idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
            idx = min(idx, n - 1)
        chosen.append(idx)
        d2 = np.minimum(d2, ((X - X[idx]) ** 2).sum(axis=1))
    return X[chosen].copy()


def _lloyd(X: np.ndarray, k: int, rng: SplitMix64, max_iter: int, tol: float,
           debug: bool):
    """One k-means++ init followed by Lloyd iterations."""
    n = len(X)
    centroids = _plus_plus_init(X, k, rng)
    history: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        labels, dist2 = _assign(X, centroids)

        # revive empty clusters from the farthest points, lowest cluster first
        empty = [c for c in range(k) if not (labels == c).any()]
        if empty:
            order = np.lexsort((np.arange(n), -dist2))  # distance desc, index asc
            for rank, c in enumerate(empty):
                far = int(order[rank])
                labels[far] = c
                centroids[c] = X[far]
            labels, dist2 = _assign(X, centroids)

        inertia = float(dist2.sum())
        if debug and history:
            assert inertia <= history[-1], (
                f"inertia increased: {history[-1]} -> {inertia}"
            )
        history.append(inertia)

        new_centroids = centroids.copy()
        for c in range(k):
            mask = labels == c
            if mask.any():
                # a cluster can stay empty when the data has fewer distinct
                # points than k; it then keeps its centroid
                new_centroids[c] = X[mask].mean(axis=0)
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift < tol:
            break

    labels, dist2 = _assign(X, centroids)
    inertia = float(dist2.sum())
    history.append(inertia)
    return centroids, labels, inertia, history


def kmeans_fit(
    X: np.ndarray,
    k: int,
    seed: int,
    ids: list[str] | None = None,
    max_iter: int = 300,
    tol: float = 1e-6,
    n_init: int = 1,
    debug: bool = False,
) -> ClusterModel:
    """Lloyd's algorithm with k-means++ seeding, fully deterministic.

    Each init stops when the largest centroid shift drops below `tol` or
    after `max_iter` rounds; with n_init > 1 the lowest-inertia run wins
    (ties to the earliest run). All randomness comes from one SplitMix64
    stream, so the result is a pure function of (X, k, seed, n_init). With
    debug=True the non-increasing inertia invariant is asserted every
    iteration.
    """
    X = np.asarray(X, dtype=np.float64)
    n = len(X)
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValidationError(f"k={k} exceeds the number of points ({n})")
    if n_init < 1:
        raise ValidationError(f"n_init must be >= 1, got {n_init}")
    if ids is None:
        ids = [str(i) for i in range(n)]
    elif len(ids) != n:
        raise ValidationError(f"got {len(ids)} ids for {n} vectors")

    rng = SplitMix64(seed)
    best = None
    for _ in range(n_init):
        run = _lloyd(X, k, rng, max_iter, tol, debug)
        if best is None or run[2] < best[2]:
            best = run
    centroids, labels, inertia, history = best
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments={sid: int(c) for sid, c in zip(ids, labels)},
        inertia=inertia,
        seed=seed,
        inertia_history=history,
    )


def elbow_select(
    X: np.ndarray,
    k_max: int,
    k_min: int = 2,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-6,
    n_init: int = 10,
) -> tuple[int, dict[int, float]]:
    """Pick K by the chord rule over the inertia curve.

    Fits k-means for every K in [k_min, k_max] (best of n_init seeded
    restarts each, so the curve is not at the mercy of one local optimum),
    normalizes the curve to the unit square, and returns the K with the
    largest perpendicular distance to the segment joining the endpoints
    (ties -> smaller K), along with the full curve for reporting. A strictly
    increasing inertia step raises, since more clusters fitting worse signals
    broken clustering.
    """
    n = len(X)
    if not (k_min < k_max < n):
        raise ValidationError(f"need k_min < k_max < n_points, got {k_min}, {k_max}, {n}")
    curve: dict[int, float] = {}
    for k in range(k_min, k_max + 1):
        curve[k] = kmeans_fit(X, k, seed=seed, max_iter=max_iter, tol=tol,
                              n_init=n_init).inertia

    ks = list(range(k_min, k_max + 1))
    inertias = [curve[k] for k in ks]
    for a, b, ka, kb in zip(inertias, inertias[1:], ks, ks[1:]):
        if b > a:
            raise ValidationError(
                f"inertia increased from K={ka} ({a:.6g}) to K={kb} ({b:.6g}); "
                "clustering is unstable on this data"
            )

    span_i = inertias[0] - inertias[-1]
    xs = [(k - k_min) / (k_max - k_min) for k in ks]
    ys = [(v - inertias[-1]) / span_i if span_i > 0 else 0.0 for v in inertias]
    # chord from (xs[0], ys[0]) to (xs[-1], ys[-1]) in normalized coordinates
    x1, y1, x2, y2 = xs[0], ys[0], xs[-1], ys[-1]
    denom = float(np.hypot(y2 - y1, x2 - x1))
    best_k, best_d = ks[0], -1.0
    for k, x, y in zip(ks, xs, ys):
        d = abs((y2 - y1) * x - (x2 - x1) * y + x2 * y1 - y2 * x1) / denom
        if d > best_d:
            best_k, best_d = k, d
    return best_k, curve


def cluster_members(model: ClusterModel, cluster_ids: set[int]) -> set[str]:
    """Ids assigned to any of the given clusters."""
    bad = [c for c in cluster_ids if not (0 <= c < model.k)]
    if bad:
        raise ValidationError(f"cluster ids out of range [0, {model.k}): {sorted(bad)}")
    wanted = set(cluster_ids)
    return {sid for sid, c in model.assignments.items() if c in wanted}


def sample_cluster_examples(model: ClusterModel, corpus: Corpus, cluster_id: int, n: int):
    """First n members of a cluster in corpus file order, for eyeballing what
    the cluster means."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if not (0 <= cluster_id < model.k):
        raise ValidationError(f"cluster id {cluster_id} out of range [0, {model.k})")
    member_ids = {sid for sid, c in model.assignments.items() if c == cluster_id}
    out = []
    for s in corpus.samples:
        if s.id in member_ids:
            out.append(s)
            if len(out) == n:
                break
    return out
