# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend: CART split search and the Pegasos update loop.

Bit-identical to ``mutsel.backends.py``: same scan order, same tie
breaks, same floating-point expressions, and the build passes
-ffp-contract=off so the compiler cannot fuse multiply-adds. See the
pure backend's docstrings for the semantics; this file only restates
layout details that matter for the loops.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def grow_tree(const double[:, ::1] X, const long long[::1] y,
              const long long[:, ::1] sorted_idx, int max_depth):
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t f = sorted_idx.shape[0]
    cdef Py_ssize_t cap = 2 * n + 1
    if cap < 3:
        cap = 3

    idx_arr = np.array(sorted_idx, dtype=np.int64)
    feature_arr = np.full(cap, -1, dtype=np.int64)
    threshold_arr = np.full(cap, np.nan)
    left_arr = np.zeros(cap, dtype=np.int64)
    right_arr = np.zeros(cap, dtype=np.int64)
    value_arr = np.zeros(cap, dtype=np.int64)
    scratch_arr = np.empty(n, dtype=np.int64)
    # stack rows: start, end, depth, parent, is_left
    stack_arr = np.zeros((cap, 5), dtype=np.int64)

    cdef long long[:, ::1] idx = idx_arr
    cdef long long[::1] feature = feature_arr
    cdef double[::1] threshold = threshold_arr
    cdef long long[::1] left = left_arr
    cdef long long[::1] right = right_arr
    cdef long long[::1] value = value_arr
    cdef long long[::1] scratch = scratch_arr
    cdef long long[:, ::1] stack = stack_arr

    cdef Py_ssize_t sp = 1, n_nodes = 0
    cdef Py_ssize_t start, end, node, m, p, pos, nl_count
    cdef Py_ssize_t j, jj, best_j, i, row
    cdef long long depth, parent, is_left, c1, c1l, c0l, c1r, c0r
    cdef long long nl, nr
    cdef double lo, hi, thr, proxy, local_best, best_proxy, best_thr, local_thr
    cdef bint found, local_found

    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = 0
    stack[0, 3] = -1
    stack[0, 4] = 0

    while sp > 0:
        sp -= 1
        start = stack[sp, 0]
        end = stack[sp, 1]
        depth = stack[sp, 2]
        parent = stack[sp, 3]
        is_left = stack[sp, 4]
        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if is_left:
                left[parent] = node
            else:
                right[parent] = node
        m = end - start
        c1 = 0
        for i in range(start, end):
            c1 += y[idx[0, i]]

        found = False
        best_proxy = -np.inf
        best_j = -1
        best_thr = 0.0
        if depth < max_depth and m >= 2 and 0 < c1 < m:
            for j in range(f):
                local_found = False
                local_best = -np.inf
                local_thr = 0.0
                c1l = 0
                for p in range(m - 1):
                    row = idx[j, start + p]
                    c1l += y[row]
                    lo = X[row, j]
                    hi = X[idx[j, start + p + 1], j]
                    if hi > lo:
                        thr = (lo + hi) * 0.5
                        if thr < hi:
                            nl = p + 1
                            nr = m - nl
                            c0l = nl - c1l
                            c1r = c1 - c1l
                            c0r = nr - c1r
                            proxy = (<double>(c0l * c0l + c1l * c1l)) / (<double>nl) \
                                + (<double>(c0r * c0r + c1r * c1r)) / (<double>nr)
                            if proxy > local_best:
                                local_best = proxy
                                local_thr = thr
                                local_found = True
                if local_found and local_best > best_proxy:
                    best_proxy = local_best
                    best_j = j
                    best_thr = local_thr
                    found = True

        if not found:
            value[node] = 1 if 2 * c1 > m else 0
            left[node] = node
            right[node] = node
            continue

        feature[node] = best_j
        threshold[node] = best_thr
        nl_count = 0
        for jj in range(f):
            pos = 0
            for i in range(start, end):
                if X[idx[jj, i], best_j] <= best_thr:
                    scratch[pos] = idx[jj, i]
                    pos += 1
            nl_count = pos
            for i in range(start, end):
                if not X[idx[jj, i], best_j] <= best_thr:
                    scratch[pos] = idx[jj, i]
                    pos += 1
            for i in range(m):
                idx[jj, start + i] = scratch[i]

        stack[sp, 0] = start + nl_count
        stack[sp, 1] = end
        stack[sp, 2] = depth + 1
        stack[sp, 3] = node
        stack[sp, 4] = 0
        sp += 1
        stack[sp, 0] = start
        stack[sp, 1] = start + nl_count
        stack[sp, 2] = depth + 1
        stack[sp, 3] = node
        stack[sp, 4] = 1
        sp += 1

    return (feature_arr[:n_nodes].copy(), threshold_arr[:n_nodes].copy(),
            left_arr[:n_nodes].copy(), right_arr[:n_nodes].copy(),
            value_arr[:n_nodes].copy())


def predict_tree(const double[:, ::1] X, const long long[::1] feature,
                 const double[::1] threshold, const long long[::1] left,
                 const long long[::1] right,
                 const long long[::1] value):
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t i
    cdef long long node
    out_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out_arr


def pegasos(const double[:, ::1] G, const double[::1] y_pm,
            const long long[::1] draws, double lam):
    cdef Py_ssize_t n = G.shape[0]
    cdef Py_ssize_t T = draws.shape[0]
    cdef Py_ssize_t t, j
    cdef long long i
    cdef double yi
    alpha_arr = np.zeros(n, dtype=np.int64)
    s_arr = np.zeros(n)
    cdef long long[::1] alpha = alpha_arr
    cdef double[::1] s = s_arr
    for t in range(1, T + 1):
        i = draws[t - 1]
        yi = y_pm[i]
        if yi * s[i] < lam * (<double>t):
            alpha[i] += 1
            for j in range(n):
                s[j] = s[j] + yi * G[i, j]
    return alpha_arr
