# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels: connected-component labeling and float32 dot products.

Contracts (shared with samurai.kernels._fallback, which must match these
bit for bit):

* ``label_components`` returns an int32 raster; background pixels are 0 and
  components are numbered from 1 in order of first row-major appearance.
* ``dot_f32`` / ``score_matrix_f32`` accumulate in a single float32
  accumulator in ascending index order (compiled with -ffp-contract=off so
  each multiply and add rounds separately).
"""

import numpy as np


cdef inline int _find(int[::1] parent, int x) nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef inline void _union(int[::1] parent, int a, int b) nogil:
    cdef int ra = _find(parent, a)
    cdef int rb = _find(parent, b)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb


def label_components(mask, int connectivity):
    """Two-pass union-find labeling of the true pixels of a 2-D mask."""
    if connectivity != 4 and connectivity != 8:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    mask_arr = np.ascontiguousarray(mask, dtype=np.uint8)
    if mask_arr.ndim != 2:
        raise ValueError("mask must be 2-D")
    cdef unsigned char[:, ::1] m = mask_arr
    cdef Py_ssize_t h = m.shape[0]
    cdef Py_ssize_t w = m.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    if h == 0 or w == 0:
        return labels_arr
    cdef int[:, ::1] labels = labels_arr
    # worst case (isolated pixels in a checkerboard): ceil(h*w/2) labels
    parent_arr = np.zeros(h * w // 2 + 2, dtype=np.int32)
    remap_arr = np.zeros(h * w // 2 + 2, dtype=np.int32)
    cdef int[::1] parent = parent_arr
    cdef int[::1] remap = remap_arr
    cdef bint eight = connectivity == 8
    cdef Py_ssize_t x, y
    cdef int nxt = 1, best, lab, count, r

    with nogil:
        for y in range(h):
            for x in range(w):
                if not m[y, x]:
                    continue
                best = 0
                if x > 0 and m[y, x - 1]:
                    best = labels[y, x - 1]
                if y > 0:
                    if m[y - 1, x]:
                        lab = labels[y - 1, x]
                        if best == 0:
                            best = lab
                        else:
                            _union(parent, best, lab)
                            if lab < best:
                                best = lab
                    if eight:
                        if x > 0 and m[y - 1, x - 1]:
                            lab = labels[y - 1, x - 1]
                            if best == 0:
                                best = lab
                            else:
                                _union(parent, best, lab)
                                if lab < best:
                                    best = lab
                        if x + 1 < w and m[y - 1, x + 1]:
                            lab = labels[y - 1, x + 1]
                            if best == 0:
                                best = lab
                            else:
                                _union(parent, best, lab)
                                if lab < best:
                                    best = lab
                if best == 0:
                    best = nxt
                    parent[nxt] = nxt
                    nxt += 1
                labels[y, x] = best

        # second pass: resolve roots and renumber by first appearance
        count = 0
        for y in range(h):
            for x in range(w):
                if labels[y, x] == 0:
                    continue
                r = _find(parent, labels[y, x])
                if remap[r] == 0:
                    count += 1
                    remap[r] = count
                labels[y, x] = remap[r]

    return labels_arr


def dot_f32(a, b):
    """Single-accumulator float32 dot product, ascending index order."""
    a_arr = np.ascontiguousarray(a, dtype=np.float32)
    b_arr = np.ascontiguousarray(b, dtype=np.float32)
    if a_arr.ndim != 1 or b_arr.ndim != 1 or a_arr.shape[0] != b_arr.shape[0]:
        raise ValueError("dot_f32 requires two 1-D vectors of equal length")
    cdef const float[::1] av = a_arr
    cdef const float[::1] bv = b_arr
    cdef float acc = 0.0
    cdef Py_ssize_t i
    with nogil:
        for i in range(av.shape[0]):
            acc = acc + av[i] * bv[i]
    return float(acc)


def score_matrix_f32(matrix, query):
    """Row-wise ``dot_f32`` of a (N, D) float32 matrix against a query."""
    m_arr = np.ascontiguousarray(matrix, dtype=np.float32)
    q_arr = np.ascontiguousarray(query, dtype=np.float32)
    if m_arr.ndim != 2 or q_arr.ndim != 1 or m_arr.shape[1] != q_arr.shape[0]:
        raise ValueError("score_matrix_f32 requires (N, D) matrix and (D,) query")
    out_arr = np.empty(m_arr.shape[0], dtype=np.float32)
    cdef const float[:, ::1] mv = m_arr
    cdef const float[::1] qv = q_arr
    cdef float[::1] out = out_arr
    cdef float acc
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(mv.shape[0]):
            acc = 0.0
            for j in range(mv.shape[1]):
                acc = acc + mv[i, j] * qv[j]
            out[i] = acc
    return out_arr
