"""Compiled kernels for growing and evaluating CART trees.

The growth kernel owns its random stream: an inline splitmix64 generator
seeded per tree, consumed first by the bootstrap draw and then by the
per-node feature subsampling.  Gini bookkeeping uses exact integer sums of
squared class counts, so split gains are reproducible to the last bit and
directly comparable against an exhaustive search.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
UNLIMITED_DEPTH = np.int64(1) << 60


@njit(cache=True, nogil=True, inline="always")
def _next_u64(state):
    state[0] = state[0] + _GOLDEN
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True, inline="always")
def _rand_below(state, m):
    return np.int64(_next_u64(state) % np.uint64(m))


@njit(cache=True, nogil=True, inline="always")
def _fill_bootstrap(state, rows, n):
    for i in range(n):
        rows[i] = _rand_below(state, n)


@njit(cache=True, nogil=True)
def bootstrap_rows(seed, n):
    """The n with-replacement row draws a tree with this seed starts from."""
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    rows = np.empty(n, dtype=np.int64)
    _fill_bootstrap(state, rows, n)
    return rows


@njit(cache=True, nogil=True)
def grow_tree(X, y, n_classes, max_depth, min_samples_split, mtry, seed):
    """Grow one tree on a bootstrap sample of (X, y).

    Nodes are stored pre-order in flat arrays.  feature[i] < 0 marks a leaf;
    routing sends value <= threshold left.  Candidate splits are midpoints
    between consecutive distinct values of each sampled feature; the best
    strictly-larger Gini decrease wins, so ties keep the earliest candidate
    (features in draw order, thresholds ascending).

    Returns (feature, threshold, left, right, leaf_class, leaf_slot,
    leaf_counts) with leaf_counts holding one class histogram per leaf.
    """
    n, k = X.shape
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    rows = np.empty(n, dtype=np.int64)
    for i in range(n):
        rows[i] = _rand_below(state, n)

    cap = 2 * n + 1
    feature = np.full(cap, -1, dtype=np.int32)
    threshold = np.zeros(cap, dtype=np.float64)
    left = np.full(cap, -1, dtype=np.int32)
    right = np.full(cap, -1, dtype=np.int32)
    leaf_class = np.full(cap, -1, dtype=np.int32)
    leaf_slot = np.full(cap, -1, dtype=np.int32)
    leaf_counts = np.zeros((n + 1, n_classes), dtype=np.int64)
    n_nodes = 0
    n_leaves = 0

    stack = np.empty((2 * n + 4, 5), dtype=np.int64)  # start, end, depth, parent, side
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = 0
    stack[0, 3] = -1
    stack[0, 4] = 0
    sp = 1

    perm = np.empty(k, dtype=np.int64)
    for j in range(k):
        perm[j] = j
    cnt = np.empty(n_classes, dtype=np.int64)
    cl = np.empty(n_classes, dtype=np.int64)
    vbuf = np.empty(n, dtype=np.float64)
    cbuf = np.empty(n, dtype=np.int64)
    tmp = np.empty(n, dtype=np.int64)

    while sp > 0:
        sp -= 1
        s = stack[sp, 0]
        e = stack[sp, 1]
        depth = stack[sp, 2]
        parent = stack[sp, 3]
        side = stack[sp, 4]
        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if side == 0:
                left[parent] = node
            else:
                right[parent] = node

        nn = e - s
        for c in range(n_classes):
            cnt[c] = 0
        for i in range(s, e):
            cnt[y[rows[i]]] += 1
        best_c = 0
        for c in range(1, n_classes):
            if cnt[c] > cnt[best_c]:  # ties keep the earliest class label
                best_c = c

        if cnt[best_c] == nn or nn < min_samples_split or depth >= max_depth:
            leaf_class[node] = best_c
            leaf_slot[node] = n_leaves
            for c in range(n_classes):
                leaf_counts[n_leaves, c] = cnt[c]
            n_leaves += 1
            continue

        s2 = np.int64(0)
        for c in range(n_classes):
            s2 += cnt[c] * cnt[c]
        fn = float(nn)
        parent_gini = 1.0 - s2 / (fn * fn)

        m = mtry if mtry < k else k
        best_gain = -1.0
        best_f = -1
        best_t = 0.0
        for j in range(m):
            r = j + _rand_below(state, k - j)
            pj = perm[j]
            perm[j] = perm[r]
            perm[r] = pj
            f = perm[j]
            for i in range(nn):
                ri = rows[s + i]
                vbuf[i] = X[ri, f]
                cbuf[i] = y[ri]
            order = np.argsort(vbuf[:nn], kind="mergesort")
            for c in range(n_classes):
                cl[c] = 0
            sl2 = np.int64(0)
            sr2 = s2
            for i in range(nn - 1):
                ci = cbuf[order[i]]
                a = cl[ci]
                b = cnt[ci] - a
                sl2 += 2 * a + 1
                sr2 += 1 - 2 * b
                cl[ci] = a + 1
                v0 = vbuf[order[i]]
                v1 = vbuf[order[i + 1]]
                if v0 < v1:
                    nl = i + 1
                    nr = nn - nl
                    fl = float(nl)
                    fr = float(nr)
                    gl = 1.0 - sl2 / (fl * fl)
                    gr = 1.0 - sr2 / (fr * fr)
                    gain = parent_gini - (fl / fn) * gl - (fr / fn) * gr
                    if gain > best_gain:
                        t = 0.5 * (v0 + v1)
                        if t >= v1:  # midpoint rounded up to v1: nudge down
                            t = v0
                        best_gain = gain
                        best_f = f
                        best_t = t

        if best_f < 0:  # every sampled feature is constant here
            leaf_class[node] = best_c
            leaf_slot[node] = n_leaves
            for c in range(n_classes):
                leaf_counts[n_leaves, c] = cnt[c]
            n_leaves += 1
            continue

        feature[node] = best_f
        threshold[node] = best_t
        w = s
        q = 0
        for i in range(s, e):  # stable partition, lefts first
            ri = rows[i]
            if X[ri, best_f] <= best_t:
                rows[w] = ri
                w += 1
            else:
                tmp[q] = ri
                q += 1
        for i in range(q):
            rows[w + i] = tmp[i]

        stack[sp, 0] = w
        stack[sp, 1] = e
        stack[sp, 2] = depth + 1
        stack[sp, 3] = node
        stack[sp, 4] = 1
        sp += 1
        stack[sp, 0] = s
        stack[sp, 1] = w
        stack[sp, 2] = depth + 1
        stack[sp, 3] = node
        stack[sp, 4] = 0
        sp += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(),
            left[:n_nodes].copy(), right[:n_nodes].copy(),
            leaf_class[:n_nodes].copy(), leaf_slot[:n_nodes].copy(),
            leaf_counts[:n_leaves].copy())


@njit(cache=True, nogil=True)
def predict_tree(feature, threshold, left, right, leaf_class, X, out):
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = leaf_class[node]
