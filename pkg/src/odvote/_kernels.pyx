# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int16_t

cnp.import_array()


def winners(states, ballots):
    cdef int64_t[:, ::1] S = np.ascontiguousarray(states, dtype=np.int64)
    cdef int64_t[:, ::1] B = np.ascontiguousarray(ballots, dtype=np.int64)
    cdef Py_ssize_t n = S.shape[0], m = S.shape[1], na = B.shape[0]
    out = np.empty((n, na), dtype=np.int64)
    cdef int64_t[:, ::1] O = out
    cdef Py_ssize_t s, a, c, arg
    cdef int64_t best, v
    with nogil:
        for s in range(n):
            for a in range(na):
                best = S[s, 0] + B[a, 0]
                arg = 0
                for c in range(1, m):
                    v = S[s, c] + B[a, c]
                    if v > best:
                        best = v
                        arg = c
                O[s, a] = arg
    return out


def edge_levels(W, levels, Py_ssize_t m, int64_t nlev):
    cdef int64_t[:, ::1] w = np.ascontiguousarray(W, dtype=np.int64)
    cdef int64_t[::1] lv = np.ascontiguousarray(levels, dtype=np.int64)
    out = np.full((m, m), nlev, dtype=np.int64)
    cdef int64_t[:, ::1] O = out
    cdef Py_ssize_t n = w.shape[0], na = w.shape[1], s, a, i, j, cnt
    cdef int64_t l
    seen = np.zeros(m, dtype=np.int64)
    cdef int64_t[::1] sn = seen
    lst = np.zeros(m, dtype=np.int64)
    cdef int64_t[::1] L = lst
    with nogil:
        for s in range(n):
            l = lv[s]
            cnt = 0
            for a in range(na):
                if sn[w[s, a]] != s + 1:
                    sn[w[s, a]] = s + 1
                    L[cnt] = w[s, a]
                    cnt += 1
            for i in range(cnt):
                for j in range(i + 1, cnt):
                    if l < O[L[i], L[j]]:
                        O[L[i], L[j]] = l
                        O[L[j], L[i]] = l
    return out


def witness_levels(W, levels, Py_ssize_t nballots, Py_ssize_t m, int64_t nlev):
    cdef int64_t[:, ::1] w = np.ascontiguousarray(W, dtype=np.int64)
    cdef int64_t[::1] lv = np.ascontiguousarray(levels, dtype=np.int64)
    out = np.full((nballots, nballots, m, m), nlev, dtype=np.int16)
    cdef int16_t[:, :, :, ::1] O = out
    cdef Py_ssize_t n = w.shape[0], s, i, k
    cdef int64_t x, y
    cdef int16_t l
    with nogil:
        for s in range(n):
            l = <int16_t> lv[s]
            for i in range(nballots):
                x = w[s, i]
                for k in range(nballots):
                    y = w[s, k]
                    if x != y and l < O[i, k, x, y]:
                        O[i, k, x, y] = l
    return out


def l1_ball(center, int64_t limit, bint fixed_total, int64_t cap):
    cdef int64_t[::1] c = np.ascontiguousarray(center, dtype=np.int64)
    cdef Py_ssize_t m = c.shape[0]
    cdef Py_ssize_t size = 1024, count = 0
    buf = np.empty((size, m), dtype=np.int64)
    cdef int64_t[:, ::1] B = buf
    cur_a = np.zeros(m, dtype=np.int64)
    hi_a = np.zeros(m, dtype=np.int64)
    cost_a = np.zeros(m + 1, dtype=np.int64)
    delta_a = np.zeros(m + 1, dtype=np.int64)
    cdef int64_t[::1] cur = cur_a, hi = hi_a, cost = cost_a, delta = delta_a
    cdef Py_ssize_t p = 0, q
    cdef int64_t visited = 0, rem, v, nc, nd, last, absd
    cdef bint overflow = False, emit
    # iterative DFS; cur[p] is the value being tried at depth p
    visited = 1
    cost[0] = 0
    delta[0] = 0
    p = 0
    if m == 1 and fixed_total:
        buf[0, 0] = c[0]
        return buf[:1].copy(), 1, False
    rem = limit
    cur[0] = c[0] - rem if c[0] - rem > 0 else 0
    hi[0] = c[0] + rem
    cur[0] -= 1
    while p >= 0:
        cur[p] += 1
        if cur[p] > hi[p]:
            p -= 1
            continue
        v = cur[p]
        nc = cost[p] + (v - c[p] if v >= c[p] else c[p] - v)
        nd = delta[p] + v - c[p]
        absd = nd if nd >= 0 else -nd
        if fixed_total and nc + absd > limit:
            continue
        visited += 1
        if visited > cap:
            overflow = True
            break
        emit = False
        if fixed_total and p + 1 == m - 1:
            last = c[m - 1] - nd
            if last < 0:
                continue
            cur[m - 1] = last
            emit = True
        elif p + 1 == m:
            emit = True
        if emit:
            if count == size:
                size *= 2
                buf = np.resize(buf, (size, m))
                B = buf
            for q in range(m):
                B[count, q] = cur[q]
            count += 1
            continue
        cost[p + 1] = nc
        delta[p + 1] = nd
        p += 1
        rem = limit - nc
        cur[p] = c[p] - rem if c[p] - rem > 0 else 0
        hi[p] = c[p] + rem
        cur[p] -= 1
    return np.asarray(buf[:count]).copy(), visited, overflow


def od_trace(delta, ranks, eu, ev, ends):
    cdef int64_t[::1] d = np.ascontiguousarray(delta, dtype=np.int64)
    cdef int64_t[::1] r = np.ascontiguousarray(ranks, dtype=np.int64)
    cdef int64_t[::1] U = np.ascontiguousarray(eu, dtype=np.int64)
    cdef int64_t[::1] V = np.ascontiguousarray(ev, dtype=np.int64)
    cdef int64_t[::1] E = np.ascontiguousarray(ends, dtype=np.int64)
    cdef Py_ssize_t k = E.shape[0], j, e = 0
    out = np.zeros((k, 3), dtype=np.int64)
    cdef int64_t[:, ::1] O = out
    cdef int64_t safe = 1, pivot = -1, diff, ind, prod, eff, u, vv
    for j in range(k):
        while e < E[j]:
            u = U[e]
            vv = V[e]
            diff = d[u] - d[vv]
            ind = (r[u] < r[vv]) - (r[u] > r[vv])
            prod = diff * ind
            eff = (prod > 0) - (prod < 0)
            if eff < safe:
                safe = eff
            if eff > pivot:
                pivot = eff
            e += 1
        if E[j] > 0:
            O[j, 0] = safe
            O[j, 1] = pivot
        O[j, 2] = 1 if O[j, 0] + O[j, 1] >= 1 else 0
    return out
