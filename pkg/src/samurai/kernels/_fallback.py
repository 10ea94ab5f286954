"""Pure-Python kernels, bit-compatible with ``samurai.kernels._core``.

Slower, but produces byte-identical outputs: component numbering follows
first row-major appearance, and dot products round every multiply and add
to float32 in ascending index order.
"""

from collections import deque

import numpy as np

_OFFSETS = {
    4: ((-1, 0), (0, -1), (0, 1), (1, 0)),
    8: ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)),
}


def label_components(mask, connectivity):
    """Flood-fill labeling; components numbered by first row-major pixel."""
    if connectivity not in _OFFSETS:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError("mask must be 2-D")
    offsets = _OFFSETS[connectivity]
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    nxt = 1
    for y in range(h):
        for x in range(w):
            if not mask[y, x] or labels[y, x]:
                continue
            labels[y, x] = nxt
            queue = deque([(y, x)])
            while queue:
                cy, cx = queue.popleft()
                for dy, dx in offsets:
                    ny, nx = cy + dy, cx + dx
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not labels[ny, nx]:
                        labels[ny, nx] = nxt
                        queue.append((ny, nx))
            nxt += 1
    return labels


def dot_f32(a, b):
    """Single-accumulator float32 dot product, ascending index order."""
    a = np.ascontiguousarray(a, dtype=np.float32)
    b = np.ascontiguousarray(b, dtype=np.float32)
    if a.ndim != 1 or b.ndim != 1 or a.shape[0] != b.shape[0]:
        raise ValueError("dot_f32 requires two 1-D vectors of equal length")
    # elementwise product already rounds each term to float32, matching the
    # compiled kernel's per-term rounding
    prod = a * b
    acc = np.float32(0.0)
    for term in prod:
        acc = acc + term
    return float(acc)


def score_matrix_f32(matrix, query):
    """Row-wise ``dot_f32`` of a (N, D) float32 matrix against a query."""
    matrix = np.ascontiguousarray(matrix, dtype=np.float32)
    query = np.ascontiguousarray(query, dtype=np.float32)
    if matrix.ndim != 2 or query.ndim != 1 or matrix.shape[1] != query.shape[0]:
        raise ValueError("score_matrix_f32 requires (N, D) matrix and (D,) query")
    out = np.empty(matrix.shape[0], dtype=np.float32)
    for i in range(matrix.shape[0]):
        out[i] = dot_f32(matrix[i], query)
    return out
