"""Front-quality indicators for two-objective minimization."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree


def hypervolume_2d(front: np.ndarray, reference: tuple[float, float]) -> float:
    """Exact area dominated by ``front`` and bounded by ``reference``.

    Points that do not strictly dominate the reference point contribute
    nothing and are dropped. Sweeps the points by increasing f1, adding the
    strip between each new f2 minimum and the previous one.
    """
    pts = np.asarray(front, dtype=float).reshape(-1, 2)
    r1, r2 = float(reference[0]), float(reference[1])
    pts = pts[(pts[:, 0] < r1) & (pts[:, 1] < r2)]
    if pts.shape[0] == 0:
        return 0.0
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    area = 0.0
    ceiling = r2
    for f1, f2 in pts:
        if f2 < ceiling:
            area += (r1 - f1) * (ceiling - f2)
            ceiling = f2
    return area


def generational_distance(front: np.ndarray, reference_front: np.ndarray) -> float:
    """Mean Euclidean distance from each front point to its nearest reference point."""
    front = np.asarray(front, dtype=float)
    reference_front = np.asarray(reference_front, dtype=float)
    if reference_front.size == 0:
        raise ValueError("reference front is empty")
    if front.size == 0:
        raise ValueError("front is empty")
    distances, _ = _tree(reference_front.tobytes(), reference_front.shape).query(front)
    return float(np.mean(distances))


@lru_cache(maxsize=16)
def _tree(buffer: bytes, shape: tuple[int, ...]) -> cKDTree:
    return cKDTree(np.frombuffer(buffer, dtype=float).reshape(shape))
