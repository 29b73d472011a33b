# cython: language_level=3
"""Compiled twins of the kernels in ``_pykernels``.

Same algorithms, same floating-point operation order.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t idx_t


def longest_path_levels(Py_ssize_t n, const idx_t[::1] succ_ptr, const idx_t[::1] succ_idx):
    cdef idx_t[::1] indeg = np.zeros(n, dtype=np.int64)
    cdef idx_t[::1] level = np.zeros(n, dtype=np.int64)
    cdef idx_t[::1] stack = np.empty(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t top = 0, seen = 0, i, k, u, v
    cdef idx_t nxt

    for k in range(succ_ptr[n]):
        indeg[succ_idx[k]] += 1
    for i in range(n):
        if indeg[i] == 0:
            stack[top] = i
            top += 1
    while top > 0:
        top -= 1
        u = stack[top]
        seen += 1
        nxt = level[u] + 1
        for k in range(succ_ptr[u], succ_ptr[u + 1]):
            v = succ_idx[k]
            if level[v] < nxt:
                level[v] = nxt
            indeg[v] -= 1
            if indeg[v] == 0:
                stack[top] = v
                top += 1
    return np.asarray(level), seen == n


def joint_product(const idx_t[::1] cards, const idx_t[::1] par_ptr,
                  const idx_t[::1] par_idx, const idx_t[::1] cpt_ptr,
                  const double[::1] cpt_vals):
    cdef Py_ssize_t n = cards.shape[0]
    cdef Py_ssize_t total = 1, i, j, k, q
    cdef idx_t mult, off
    cdef double prob

    for i in range(n):
        total *= cards[i]
    out_arr = np.zeros(total, dtype=np.float64)
    cdef double[::1] out = out_arr
    if n == 0:
        if total:
            out[0] = 1.0
        return out_arr

    # stride of each parent slot; same reversed-parent walk as the Python version
    cdef idx_t[::1] pstride = np.zeros(max(par_ptr[n], 1), dtype=np.int64)
    for i in range(n):
        mult = cards[i]
        for q in range(par_ptr[i + 1] - 1, par_ptr[i] - 1, -1):
            pstride[q] = mult
            mult *= cards[par_idx[q]]

    cdef idx_t[::1] state = np.zeros(n, dtype=np.int64)
    for k in range(total):
        prob = 1.0
        for i in range(n):
            off = cpt_ptr[i] + state[i]
            for q in range(par_ptr[i + 1] - 1, par_ptr[i] - 1, -1):
                off += state[par_idx[q]] * pstride[q]
            prob *= cpt_vals[off]
        out[k] = prob
        j = n - 1
        while j >= 0:
            state[j] += 1
            if state[j] < cards[j]:
                break
            state[j] = 0
            j -= 1
    return out_arr
