"""Pure-numpy backend for the tree and Pegasos kernels.

This module defines the reference semantics; the compiled backend
mirrors them bit for bit. The contracts that make that possible:

* the split search scans features in index order and candidate cuts in
  ascending feature order, keeps the first strict improvement, and
  scores splits with the integer-count proxy
  (c0l^2 + c1l^2)/nl + (c0r^2 + c1r^2)/nr, whose maximisation is
  equivalent to minimising the weighted Gini impurity;
* thresholds are midpoints (v + v_next) * 0.5, and a candidate is
  dropped when the midpoint rounds up to v_next (cuts nothing);
* nodes are laid out in preorder with the left child first;
* the Pegasos loop consumes a precomputed draw sequence and updates a
  running score vector, one row of the Gram matrix per violation.
"""

import numpy as np


def grow_tree(X, y, sorted_idx, max_depth):
    """Grow a CART tree by greedy Gini split search.

    X          : (n, f) float64.
    y          : (n,) int64 in {0, 1}.
    sorted_idx : (f, n) int64, row j listing sample ids by ascending
                 value of feature j (a stable argsort per column).
    max_depth  : maximum number of split levels, >= 1.

    A node is split while depth allows, it holds at least two samples
    and both classes. Zero-gain splits are permitted: an impure node
    with any usable cut always splits, which lets structured problems
    (parity-style labels) reach a perfect deeper tree through
    locally useless cuts. A node with no usable cut (all feature
    values tied) becomes a leaf.

    Returns (feature, threshold, left, right, value) arrays in preorder;
    leaves carry feature == -1 and self-referencing children, internal
    nodes send x[feature] <= threshold to the left child. Leaf value is
    the majority class, ties resolved to class 0.
    """
    n, _ = X.shape
    idx = sorted_idx.copy()
    cap = max(2 * n + 1, 3)
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.full(cap, np.nan)
    left = np.zeros(cap, dtype=np.int64)
    right = np.zeros(cap, dtype=np.int64)
    value = np.zeros(cap, dtype=np.int64)
    scratch = np.empty(n, dtype=np.int64)
    n_nodes = 0
    # (start, end, depth, parent, is_left); right pushed first so the
    # left child is grown, and numbered, immediately after its parent
    stack = [(0, n, 0, -1, False)]
    while stack:
        start, end, depth, parent, is_left = stack.pop()
        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if is_left:
                left[parent] = node
            else:
                right[parent] = node
        m = end - start
        c1 = int(y[idx[0, start:end]].sum())
        split = None
        if depth < max_depth and m >= 2 and 0 < c1 < m:
            split = _best_split(X, y, idx, start, end, c1)
        if split is None:
            value[node] = 1 if 2 * c1 > m else 0
            left[node] = node
            right[node] = node
            continue
        j, thr = split
        feature[node] = j
        threshold[node] = thr
        n_left = _partition(X, idx, start, end, j, thr, scratch)
        stack.append((start + n_left, end, depth + 1, node, False))
        stack.append((start, start + n_left, depth + 1, node, True))
    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(),
            left[:n_nodes].copy(), right[:n_nodes].copy(),
            value[:n_nodes].copy())


def _best_split(X, y, idx, start, end, c1):
    m = end - start
    best_proxy = -np.inf
    best = None
    nl = np.arange(1, m, dtype=np.int64)
    nr = m - nl
    for j in range(idx.shape[0]):
        members = idx[j, start:end]
        vals = X[members, j]
        lo = vals[:-1]
        hi = vals[1:]
        thr = (lo + hi) * 0.5
        usable = (hi > lo) & (thr < hi)
        if not usable.any():
            continue
        c1l = np.cumsum(y[members])[:-1]
        c0l = nl - c1l
        c1r = c1 - c1l
        c0r = nr - c1r
        proxy = (c0l * c0l + c1l * c1l) / nl + (c0r * c0r + c1r * c1r) / nr
        proxy[~usable] = -np.inf
        p = int(np.argmax(proxy))
        if proxy[p] > best_proxy:
            best_proxy = proxy[p]
            best = (j, float(thr[p]))
    return best


def _partition(X, idx, start, end, j_split, thr, scratch):
    n_left = 0
    for jj in range(idx.shape[0]):
        members = idx[jj, start:end]
        mask = X[members, j_split] <= thr
        n_left = int(mask.sum())
        scratch[:n_left] = members[mask]
        scratch[n_left:members.size] = members[~mask]
        idx[jj, start:end] = scratch[:members.size]
    return n_left


def predict_tree(X, feature, threshold, left, right, value):
    """Route each row of X to a leaf; leaves self-loop so routing stops."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    while True:
        f_at = feature[node]
        active = np.flatnonzero(f_at >= 0)
        if active.size == 0:
            break
        cur = node[active]
        go_left = X[active, f_at[active]] <= threshold[cur]
        node[active] = np.where(go_left, left[cur], right[cur])
    return value[node].astype(np.int64)


def pegasos(G, y_pm, draws, lam):
    """Kernelised Pegasos: count-based dual solution.

    At step t (1-based) sample i = draws[t - 1] is examined; on a
    margin violation y_i * s_i < lam * t, where s is the running vector
    of unnormalised kernel scores, its count alpha_i increments and row
    i of the Gram matrix, signed by the label, folds into s. The
    decision score of training sample j is s_j / (lam * T).
    """
    n = G.shape[0]
    alpha = np.zeros(n, dtype=np.int64)
    s = np.zeros(n)
    lam = float(lam)
    for t in range(1, draws.shape[0] + 1):
        i = int(draws[t - 1])
        yi = float(y_pm[i])
        if yi * s[i] < lam * t:
            alpha[i] += 1
            s += yi * G[i]
    return alpha
