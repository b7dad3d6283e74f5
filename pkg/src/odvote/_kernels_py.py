"""Reference implementations of the hot kernels (numpy + plain Python).

Every function here has a twin in ``_kernels.pyx`` with the same signature
and the same output, element for element.
"""

import numpy as np

CHUNK = 1 << 16


def winners(states, ballots):
    """``W[s, a]`` = winner of ``states[s] + ballots[a]`` (lowest index on ties)."""
    states = np.ascontiguousarray(states, dtype=np.int64)
    ballots = np.ascontiguousarray(ballots, dtype=np.int64)
    n = states.shape[0]
    out = np.empty((n, ballots.shape[0]), dtype=np.int64)
    for lo in range(0, n, CHUNK):
        block = states[lo : lo + CHUNK, None, :] + ballots[None, :, :]
        out[lo : lo + CHUNK] = np.argmax(block, axis=2)
    return out


def edge_levels(W, levels, m, nlev):
    """First level at which each candidate pair becomes pivotal (``nlev`` = never)."""
    out = np.full((m, m), nlev, dtype=np.int64)
    for s in range(W.shape[0]):
        lv = levels[s]
        ws = np.unique(W[s])
        for i in range(len(ws)):
            for j in range(i + 1, len(ws)):
                x, y = ws[i], ws[j]
                if lv < out[x, y]:
                    out[x, y] = lv
                    out[y, x] = lv
    return out


def witness_levels(W, levels, nballots, m, nlev):
    """``out[i, k, x, y]`` = first level with a state where ballots i, k elect x, y."""
    out = np.full((nballots, nballots, m, m), nlev, dtype=np.int16)
    for s in range(W.shape[0]):
        lv = levels[s]
        row = W[s]
        for i in range(nballots):
            x = row[i]
            for k in range(nballots):
                y = row[k]
                if x != y and lv < out[i, k, x, y]:
                    out[i, k, x, y] = lv
    return out


def l1_ball(center, limit, fixed_total, cap):
    """Non-negative integer vectors ``t`` with ``sum|t - center| <= limit``.

    With ``fixed_total`` only vectors of the centre's total are produced.
    Returns ``(states, visited, overflow)``; output is in lexicographic order.
    """
    center = [int(x) for x in center]
    m = len(center)
    total = sum(center)
    out = []
    cur = [0] * m
    visited = 0

    def rec(p, cost, delta):
        nonlocal visited
        visited += 1
        if visited > cap:
            return False
        rem = limit - cost
        if fixed_total and p == m - 1:
            last = center[p] - delta
            if last >= 0 and cost + abs(delta) <= limit:
                cur[p] = last
                out.append(tuple(cur))
            return True
        if p == m:
            out.append(tuple(cur))
            return True
        c = center[p]
        for v in range(max(0, c - rem), c + rem + 1):
            nd = delta + v - c
            nc = cost + abs(v - c)
            if fixed_total and nc + abs(nd) > limit:
                continue
            cur[p] = v
            if not rec(p + 1, nc, nd):
                return False
        return True

    ok = rec(0, 0, 0)
    arr = np.array(out, dtype=np.int64).reshape(len(out), m)
    return arr, visited, not ok


def od_trace(delta, ranks, eu, ev, ends):
    """Per-level (safe, pivot, dom) of the graph-based dominance check.

    ``delta = a_new - a_cur``; edges ``(eu[e], ev[e])`` are sorted so that
    level j uses the first ``ends[j]`` of them.
    """
    k = len(ends)
    out = np.zeros((k, 3), dtype=np.int64)
    safe = 1
    pivot = -1
    e = 0
    for j in range(k):
        while e < ends[j]:
            u = eu[e]
            v = ev[e]
            diff = int(delta[u] - delta[v])
            ind = int(ranks[u] < ranks[v]) - int(ranks[u] > ranks[v])
            prod = diff * ind
            eff = int(prod > 0) - int(prod < 0)
            if eff < safe:
                safe = eff
            if eff > pivot:
                pivot = eff
            e += 1
        if ends[j] == 0:
            out[j, 0] = 0
            out[j, 1] = 0
        else:
            out[j, 0] = safe
            out[j, 1] = pivot
        out[j, 2] = int(out[j, 0] + out[j, 1] >= 1)
    return out
