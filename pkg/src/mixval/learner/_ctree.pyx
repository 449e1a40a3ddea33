# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled tree-growing kernel.

Bit-identical mirror of mixval.learner._pytree.grow_tree: same
feature-sampling RNG (splitmix64), same integer-count score arithmetic,
same tie-breaking and node numbering. The sort is unstable, which is fine:
split scores and thresholds depend only on the label counts below each
distinct-value boundary, never on the order of tied values. Keep any
change synchronized with the Python mirror.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t

cnp.import_array()


cdef inline uint64_t _next(uint64_t* state) noexcept nogil:
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    cdef uint64_t z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline void _swap(double* v, uint8_t* lab, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef double tv = v[a]
    cdef uint8_t tl = lab[a]
    v[a] = v[b]
    lab[a] = lab[b]
    v[b] = tv
    lab[b] = tl


cdef void _insertion(double* v, uint8_t* lab, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double tv
    cdef uint8_t tl
    for i in range(lo + 1, hi + 1):
        tv = v[i]
        tl = lab[i]
        j = i - 1
        while j >= lo and v[j] > tv:
            v[j + 1] = v[j]
            lab[j + 1] = lab[j]
            j -= 1
        v[j + 1] = tv
        lab[j + 1] = tl


cdef void _sift(double* v, uint8_t* lab, Py_ssize_t lo, Py_ssize_t root,
                Py_ssize_t end) noexcept nogil:
    cdef Py_ssize_t child
    while True:
        child = lo + 2 * (root - lo) + 1
        if child > end:
            return
        if child + 1 <= end and v[child] < v[child + 1]:
            child += 1
        if v[root] < v[child]:
            _swap(v, lab, root, child)
            root = child
        else:
            return


cdef void _heapsort(double* v, uint8_t* lab, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t start = lo + (hi - lo - 1) // 2
    cdef Py_ssize_t end = hi
    while start >= lo:
        _sift(v, lab, lo, start, hi)
        start -= 1
    while end > lo:
        _swap(v, lab, lo, end)
        end -= 1
        _sift(v, lab, lo, lo, end)


cdef void _introsort(double* v, uint8_t* lab, Py_ssize_t lo, Py_ssize_t hi,
                     int limit) noexcept nogil:
    # Hoare partitioning around a median-of-3 pivot value; segments of 16
    # or fewer are left for the final insertion pass.
    cdef double a, b, c, pivot
    cdef Py_ssize_t i, j, mid
    while hi - lo > 16:
        if limit == 0:
            _heapsort(v, lab, lo, hi)
            return
        limit -= 1
        mid = lo + (hi - lo) // 2
        a = v[lo]
        b = v[mid]
        c = v[hi]
        if a < b:
            if b < c:
                pivot = b
            elif a < c:
                pivot = c
            else:
                pivot = a
        else:
            if a < c:
                pivot = a
            elif b < c:
                pivot = c
            else:
                pivot = b
        i = lo - 1
        j = hi + 1
        while True:
            i += 1
            while v[i] < pivot:
                i += 1
            j -= 1
            while v[j] > pivot:
                j -= 1
            if i >= j:
                break
            _swap(v, lab, i, j)
        if j - lo < hi - j:
            _introsort(v, lab, lo, j, limit)
            lo = j + 1
        else:
            _introsort(v, lab, j + 1, hi, limit)
            hi = j


cdef void _sort(double* v, uint8_t* lab, Py_ssize_t n) noexcept nogil:
    if n < 2:
        return
    cdef int limit = 0
    cdef Py_ssize_t size = n
    while size > 0:
        size >>= 1
        limit += 1
    _introsort(v, lab, 0, n - 1, 2 * limit)
    _insertion(v, lab, 0, n - 1)


def grow_tree(X, y, max_depth, min_leaf, n_candidates, seed):
    """Grow one tree on (already bootstrapped) rows; see _pytree.grow_tree."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.uint8)
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    if n == 0:
        raise ValueError("no rows")
    if y.shape[0] != n:
        raise ValueError("label length mismatch")

    cdef double[:, ::1] Xv = X
    cdef uint8_t[::1] yv = y
    cdef double* Xp = NULL
    if d > 0:
        Xp = &Xv[0, 0]
    cdef uint8_t* yp = &yv[0]

    cdef uint64_t state = <uint64_t>seed
    cdef int c_max_depth = max_depth
    cdef int64_t c_min_leaf = min_leaf
    cdef Py_ssize_t c_n_candidates = n_candidates

    cdef Py_ssize_t cap = 2 * n
    feat_arr = np.empty(cap, dtype=np.int32)
    thr_arr = np.zeros(cap, dtype=np.float64)
    left_arr = np.empty(cap, dtype=np.int32)
    right_arr = np.empty(cap, dtype=np.int32)
    frac_arr = np.empty(cap, dtype=np.float64)
    cdef int32_t[::1] featv = feat_arr
    cdef double[::1] thrv = thr_arr
    cdef int32_t[::1] leftv = left_arr
    cdef int32_t[::1] rightv = right_arr
    cdef double[::1] fracv = frac_arr

    idx_arr = np.arange(n, dtype=np.int64)
    cdef int64_t[::1] idxv = idx_arr
    cdef int64_t* idxp = &idxv[0]

    buf_arr = np.empty(max(n, 1), dtype=np.float64)
    lab_arr = np.empty(max(n, 1), dtype=np.uint8)
    tmp_arr = np.empty(max(n, 1), dtype=np.int64)
    ford_arr = np.empty(max(d, 1), dtype=np.int64)
    cdef double[::1] bufv = buf_arr
    cdef uint8_t[::1] labv = lab_arr
    cdef int64_t[::1] tmpv = tmp_arr
    cdef int64_t[::1] fordv = ford_arr
    cdef double* vbuf = &bufv[0]
    cdef uint8_t* lbuf = &labv[0]
    cdef int64_t* tmpbuf = &tmpv[0]
    cdef int64_t* forder = &fordv[0]

    # explicit DFS stack: start, end, depth, parent, is_left
    st_arr = np.empty((n + 2, 5), dtype=np.int64)
    cdef int64_t[:, ::1] stv = st_arr
    cdef Py_ssize_t sp = 1
    stv[0, 0] = 0
    stv[0, 1] = n
    stv[0, 2] = 0
    stv[0, 3] = -1
    stv[0, 4] = 0

    cdef Py_ssize_t n_nodes = 0
    cdef Py_ssize_t start, end, node, m, i, j, t, f, fi, fbest_t, nleft, k2
    cdef int64_t depth, parent, is_left, row, n1, c1, nl, nl1, nl0, nr, nr1, nr0, tmpf
    cdef uint64_t r
    cdef double s, fbest_s, best_s, best_thr, a, b, thr
    cdef Py_ssize_t best_f, found

    while sp > 0:
        sp -= 1
        start = stv[sp, 0]
        end = stv[sp, 1]
        depth = stv[sp, 2]
        parent = stv[sp, 3]
        is_left = stv[sp, 4]
        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if is_left:
                leftv[parent] = <int32_t>node
            else:
                rightv[parent] = <int32_t>node
        m = end - start
        n1 = 0
        for t in range(start, end):
            n1 += yp[idxp[t]]
        featv[node] = -1
        thrv[node] = 0.0
        leftv[node] = -1
        rightv[node] = -1
        fracv[node] = <double>n1 / <double>m
        if n1 == 0 or n1 == m or m < 2 * c_min_leaf or depth == c_max_depth:
            continue
        found = 0
        best_s = -1.0
        best_f = -1
        best_thr = 0.0
        for fi in range(d):
            forder[fi] = fi
        i = 0
        while i < d and found < c_n_candidates:
            r = _next(&state)
            j = i + <Py_ssize_t>(r % <uint64_t>(d - i))
            tmpf = forder[i]
            forder[i] = forder[j]
            forder[j] = tmpf
            f = <Py_ssize_t>forder[i]
            i += 1
            for t in range(m):
                row = idxp[start + t]
                vbuf[t] = Xp[row * d + f]
                lbuf[t] = yp[row]
            _sort(vbuf, lbuf, m)
            if vbuf[0] == vbuf[m - 1]:
                # constant on this node: does not consume the budget
                continue
            found += 1
            fbest_s = -1.0
            fbest_t = -1
            c1 = 0
            for t in range(m - 1):
                c1 += lbuf[t]
                if vbuf[t + 1] > vbuf[t]:
                    nl = t + 1
                    if nl >= c_min_leaf and m - nl >= c_min_leaf:
                        nl1 = c1
                        nl0 = nl - nl1
                        nr = m - nl
                        nr1 = n1 - nl1
                        nr0 = nr - nr1
                        s = (<double>(nl1 * nl1 + nl0 * nl0) / <double>nl
                             + <double>(nr1 * nr1 + nr0 * nr0) / <double>nr)
                        if s > fbest_s:
                            fbest_s = s
                            fbest_t = t
            if fbest_t < 0:
                continue
            a = vbuf[fbest_t]
            b = vbuf[fbest_t + 1]
            thr = 0.5 * (a + b)
            if thr >= b:
                # midpoint rounded up to the upper value; clamp left
                thr = a
            if fbest_s > best_s or (fbest_s == best_s and f < best_f):
                best_s = fbest_s
                best_f = f
                best_thr = thr
        if best_f < 0:
            continue
        # stable two-pass partition by x <= threshold
        nleft = 0
        for t in range(start, end):
            row = idxp[t]
            if Xp[row * d + best_f] <= best_thr:
                tmpbuf[nleft] = row
                nleft += 1
        k2 = nleft
        for t in range(start, end):
            row = idxp[t]
            if not (Xp[row * d + best_f] <= best_thr):
                tmpbuf[k2] = row
                k2 += 1
        for t in range(m):
            idxp[start + t] = tmpbuf[t]
        featv[node] = <int32_t>best_f
        thrv[node] = best_thr
        stv[sp, 0] = start + nleft
        stv[sp, 1] = end
        stv[sp, 2] = depth + 1
        stv[sp, 3] = node
        stv[sp, 4] = 0
        sp += 1
        stv[sp, 0] = start
        stv[sp, 1] = start + nleft
        stv[sp, 2] = depth + 1
        stv[sp, 3] = node
        stv[sp, 4] = 1
        sp += 1

    return (feat_arr[:n_nodes].copy(), thr_arr[:n_nodes].copy(),
            left_arr[:n_nodes].copy(), right_arr[:n_nodes].copy(),
            frac_arr[:n_nodes].copy())
