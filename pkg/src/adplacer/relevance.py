"""Scene-ad content similarity from precomputed keyframe feature vectors.

Feature extraction itself happens upstream; this module only consumes the
per-entity stacks of frame vectors (typically 40 frames x 512 dims, but any
consistent shape works) and turns them into a relevance matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Mapping, Sequence

import numpy as np

from .core import RelevanceMatrix
from .errors import (
    DimensionMismatch,
    FrameCountMismatch,
    MissingEntity,
    ZeroNormVector,
)

Pairing = Literal["aligned", "all_pairs"]


@dataclass(frozen=True, eq=False)
class KeyframeFeatures:
    """Stack of keyframe feature vectors for one scene or ad (one row per frame)."""

    entity_id: str
    frames: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.frames, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch(
                f"{self.entity_id!r}: frames must be a (frames, dims) matrix, "
                f"got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{self.entity_id!r}: feature values must be finite")
        norms = np.linalg.norm(arr, axis=1)
        if np.any(norms == 0.0):
            zero = np.flatnonzero(norms == 0.0).tolist()
            raise ZeroNormVector(
                f"{self.entity_id!r}: all-zero frame vector(s) at rows {zero}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "frames", arr)

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


def cosine_similarity(u, v) -> float:
    """dot(u, v) / (||u|| * ||v||), clipped into [-1, 1] against rounding."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise DimensionMismatch(
            f"vectors must share one dimension, got shapes {u.shape} and {v.shape}"
        )
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroNormVector("cosine similarity undefined for a zero-norm vector")
    c = float(np.dot(u, v)) / (nu * nv)
    return min(1.0, max(-1.0, c))


def pair_relevance(
    scene_feats: KeyframeFeatures,
    ad_feats: KeyframeFeatures,
    pairing: Pairing = "aligned",
) -> float:
    """Mean cosine similarity between two entities' keyframe features.

    ``aligned`` pairs frame k with frame k (requires equal frame counts);
    ``all_pairs`` averages over the full cross product of frames.
    """
    a, b = scene_feats.frames, ad_feats.frames
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(
            f"feature dims differ: {scene_feats.entity_id!r} has {a.shape[1]}, "
            f"{ad_feats.entity_id!r} has {b.shape[1]}"
        )
    if pairing == "aligned":
        if a.shape[0] != b.shape[0]:
            raise FrameCountMismatch(
                f"aligned pairing needs equal frame counts: "
                f"{scene_feats.entity_id!r} has {a.shape[0]}, "
                f"{ad_feats.entity_id!r} has {b.shape[0]}"
            )
        total = 0.0
        for k in range(a.shape[0]):
            total += cosine_similarity(a[k], b[k])
        return total / a.shape[0]
    if pairing == "all_pairs":
        an = a / np.linalg.norm(a, axis=1, keepdims=True)
        bn = b / np.linalg.norm(b, axis=1, keepdims=True)
        sims = np.clip(an @ bn.T, -1.0, 1.0)
        return float(sims.mean())
    raise ValueError(f"unknown pairing mode {pairing!r}")


def build_relevance_matrix(
    scene_feats: Sequence[KeyframeFeatures],
    ad_feats: Sequence[KeyframeFeatures],
    pairing: Pairing = "aligned",
) -> RelevanceMatrix:
    """Relevance matrix with entry (i, j) = pair_relevance(scene i, ad j).

    Rows and columns follow the order of the given sequences; use
    :func:`features_for` to arrange features by program/inventory ids first.
    """
    values = np.empty((len(scene_feats), len(ad_feats)), dtype=float)
    for i, sf in enumerate(scene_feats):
        for j, af in enumerate(ad_feats):
            values[i, j] = pair_relevance(sf, af, pairing)
    return RelevanceMatrix(values)


def features_for(
    entity_ids: Sequence[str],
    features: Mapping[str, KeyframeFeatures],
) -> list[KeyframeFeatures]:
    """Select features for the given ids, in order; all ids must be present."""
    missing = [eid for eid in entity_ids if eid not in features]
    if missing:
        raise MissingEntity(f"no feature vectors for: {', '.join(missing)}")
    return [features[eid] for eid in entity_ids]
