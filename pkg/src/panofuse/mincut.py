"""Exact two-terminal min-cut on a 4-connected pixel grid.

Augmenting-path max-flow in the style used for vision grid graphs: two
search trees grown from the terminals, FIFO active/orphan queues, and
timestamped origin checks during orphan adoption. Capacities are float64;
augmentation subtracts the exact bottleneck so saturated arcs hit zero
exactly. Forced pixels are contracted into the terminals: their n-links to
free pixels become terminal capacities, which leaves the optimum unchanged.
"""

from __future__ import annotations

import numpy as np

from . import accel

_TERMINAL = np.int64(-2)
_NONE = np.int64(-1)


@accel.dual()
def _bk_solve(n, adj_start, adj_arcs, arc_to, arc_cap, tr_cap, tree):
    if n == 0:
        return
    parent = np.full(n, _NONE, dtype=np.int64)
    ts = np.zeros(n, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    in_queue = np.zeros(n, dtype=np.bool_)
    q_head = 0
    q_tail = 0
    q_size = 0
    orphans = np.empty(n, dtype=np.int64)
    in_orphan = np.zeros(n, dtype=np.bool_)
    o_head = 0
    o_tail = 0
    o_size = 0

    for i in range(n):
        if tr_cap[i] > 0.0:
            tree[i] = 1
            parent[i] = _TERMINAL
            dist[i] = 1
        elif tr_cap[i] < 0.0:
            tree[i] = 2
            parent[i] = _TERMINAL
            dist[i] = 1
        else:
            continue
        queue[q_tail] = i
        q_tail = (q_tail + 1) % n
        q_size += 1
        in_queue[i] = True

    time = np.int64(0)
    guard = 50 * (n + adj_arcs.size) + 10000
    steps = 0
    while True:
        steps += 1
        if steps > guard:
            raise RuntimeError("min-cut solver exceeded its iteration guard")
        # growth phase: expand trees until the fronts touch
        boundary = _NONE
        while q_size > 0:
            p = queue[q_head]
            if tree[p] == 0:
                q_head = (q_head + 1) % n
                q_size -= 1
                in_queue[p] = False
                continue
            tp = tree[p]
            found = _NONE
            for idx in range(adj_start[p], adj_start[p + 1]):
                a = adj_arcs[idx]
                res = arc_cap[a] if tp == 1 else arc_cap[a ^ 1]
                if res <= 0.0:
                    continue
                q = arc_to[a]
                if tree[q] == 0:
                    tree[q] = tp
                    parent[q] = a if tp == 1 else (a ^ 1)
                    ts[q] = ts[p]
                    dist[q] = dist[p] + 1
                    if not in_queue[q]:
                        queue[q_tail] = q
                        q_tail = (q_tail + 1) % n
                        q_size += 1
                        in_queue[q] = True
                elif tree[q] != tp:
                    found = a if tp == 1 else (a ^ 1)
                    break
                elif ts[q] <= ts[p] and dist[q] > dist[p] + 1:
                    parent[q] = a if tp == 1 else (a ^ 1)
                    ts[q] = ts[p]
                    dist[q] = dist[p] + 1
            if found != _NONE:
                boundary = found
                break
            q_head = (q_head + 1) % n
            q_size -= 1
            in_queue[p] = False
        if boundary == _NONE:
            break

        time += 1
        # bottleneck along source chain, boundary arc, sink chain
        bottleneck = arc_cap[boundary]
        i = arc_to[boundary ^ 1]
        while parent[i] != _TERMINAL:
            a = parent[i]
            if arc_cap[a] < bottleneck:
                bottleneck = arc_cap[a]
            i = arc_to[a ^ 1]
        if tr_cap[i] < bottleneck:
            bottleneck = tr_cap[i]
        j = arc_to[boundary]
        while parent[j] != _TERMINAL:
            a = parent[j]
            if arc_cap[a] < bottleneck:
                bottleneck = arc_cap[a]
            j = arc_to[a]
        if -tr_cap[j] < bottleneck:
            bottleneck = -tr_cap[j]

        # push the bottleneck, collecting orphans at saturated parent arcs
        arc_cap[boundary] -= bottleneck
        arc_cap[boundary ^ 1] += bottleneck
        i = arc_to[boundary ^ 1]
        while parent[i] != _TERMINAL:
            a = parent[i]
            arc_cap[a] -= bottleneck
            arc_cap[a ^ 1] += bottleneck
            up = arc_to[a ^ 1]
            if arc_cap[a] <= 0.0:
                parent[i] = _NONE
                if not in_orphan[i]:
                    orphans[o_tail] = i
                    o_tail = (o_tail + 1) % n
                    o_size += 1
                    in_orphan[i] = True
            i = up
        tr_cap[i] -= bottleneck
        if tr_cap[i] <= 0.0:
            parent[i] = _NONE
            if not in_orphan[i]:
                orphans[o_tail] = i
                o_tail = (o_tail + 1) % n
                o_size += 1
                in_orphan[i] = True
        j = arc_to[boundary]
        while parent[j] != _TERMINAL:
            a = parent[j]
            arc_cap[a] -= bottleneck
            arc_cap[a ^ 1] += bottleneck
            up = arc_to[a]
            if arc_cap[a] <= 0.0:
                parent[j] = _NONE
                if not in_orphan[j]:
                    orphans[o_tail] = j
                    o_tail = (o_tail + 1) % n
                    o_size += 1
                    in_orphan[j] = True
            j = up
        tr_cap[j] += bottleneck
        if tr_cap[j] >= 0.0:
            parent[j] = _NONE
            if not in_orphan[j]:
                orphans[o_tail] = j
                o_tail = (o_tail + 1) % n
                o_size += 1
                in_orphan[j] = True

        # adoption phase: re-root or free every orphan
        while o_size > 0:
            q = orphans[o_head]
            o_head = (o_head + 1) % n
            o_size -= 1
            in_orphan[q] = False
            tq = tree[q]
            best_d = np.int64(2**62)
            best_arc = _NONE
            for idx in range(adj_start[q], adj_start[q + 1]):
                a = adj_arcs[idx]
                u = arc_to[a]
                if tree[u] != tq:
                    continue
                res = arc_cap[a ^ 1] if tq == 1 else arc_cap[a]
                if res <= 0.0:
                    continue
                # origin check: does u still hang off a terminal?
                d = np.int64(0)
                x = u
                ok = False
                while True:
                    if ts[x] == time:
                        d += dist[x]
                        ok = True
                        break
                    pa = parent[x]
                    if pa == _TERMINAL:
                        d += 1
                        ok = True
                        break
                    if pa == _NONE:
                        break
                    d += 1
                    x = arc_to[pa ^ 1] if tq == 1 else arc_to[pa]
                if not ok:
                    continue
                # memoize distances along the verified chain
                dd = d
                x = u
                while ts[x] != time and parent[x] != _TERMINAL:
                    ts[x] = time
                    dist[x] = dd
                    dd -= 1
                    x = arc_to[parent[x] ^ 1] if tq == 1 else arc_to[parent[x]]
                if d < best_d:
                    best_d = d
                    best_arc = a
            if best_arc != _NONE:
                parent[q] = (best_arc ^ 1) if tq == 1 else best_arc
                ts[q] = time
                dist[q] = best_d + 1
            else:
                # no valid parent: q leaves the tree, neighbors react
                for idx in range(adj_start[q], adj_start[q + 1]):
                    a = adj_arcs[idx]
                    u = arc_to[a]
                    if tree[u] != tq:
                        continue
                    res = arc_cap[a ^ 1] if tq == 1 else arc_cap[a]
                    if res > 0.0 and not in_queue[u]:
                        queue[q_tail] = u
                        q_tail = (q_tail + 1) % n
                        q_size += 1
                        in_queue[u] = True
                    pa = parent[u]
                    if pa >= 0:
                        up = arc_to[pa ^ 1] if tq == 1 else arc_to[pa]
                        if up == q:
                            parent[u] = _NONE
                            if not in_orphan[u]:
                                orphans[o_tail] = u
                                o_tail = (o_tail + 1) % n
                                o_size += 1
                                in_orphan[u] = True
                tree[q] = 0


def min_cut_grid(right_w, down_w, forced):
    """Globally optimal binary labeling of a grid.

    ``right_w[y, x]`` weights the link (y, x)-(y, x+1); ``down_w[y, x]`` the
    link (y, x)-(y+1, x). ``forced`` holds 0 (free), 1 (keep image 1 /
    source) or 2 (keep image 2 / sink). Returns a (H, W) uint8 labeling of
    1s and 2s that minimizes the sum of link weights between differing
    labels, respecting the forced pixels.
    """
    forced = np.asarray(forced, dtype=np.uint8)
    h, w = forced.shape
    right_w = np.asarray(right_w, dtype=np.float64)
    down_w = np.asarray(down_w, dtype=np.float64)
    if right_w.shape != (h, max(w - 1, 0)) or down_w.shape != (max(h - 1, 0), w):
        raise ValueError("link weight arrays do not match the grid shape")
    if np.any(right_w < 0) or np.any(down_w < 0):
        raise ValueError("link weights must be non-negative")

    free = forced == 0
    n = int(free.sum())
    labels = forced.copy()
    if n == 0:
        return labels
    nid = np.full((h, w), -1, dtype=np.int64)
    nid[free] = np.arange(n, dtype=np.int64)

    # free-free links become arc pairs
    hm = free[:, :-1] & free[:, 1:]
    vm = free[:-1, :] & free[1:, :]
    e_from = np.concatenate([nid[:, :-1][hm], nid[:-1, :][vm]])
    e_to = np.concatenate([nid[:, 1:][hm], nid[1:, :][vm]])
    e_cap = np.concatenate([right_w[hm], down_w[vm]])
    m = e_from.size
    arc_to = np.empty(2 * m, dtype=np.int64)
    arc_cap = np.empty(2 * m, dtype=np.float64)
    arc_to[0::2] = e_to
    arc_to[1::2] = e_from
    arc_cap[0::2] = e_cap
    arc_cap[1::2] = e_cap
    arc_from = np.empty(2 * m, dtype=np.int64)
    arc_from[0::2] = e_from
    arc_from[1::2] = e_to
    order = np.argsort(arc_from, kind="stable").astype(np.int64)
    adj_start = np.zeros(n + 1, dtype=np.int64)
    np.add.at(adj_start, arc_from + 1, 1)
    adj_start = np.cumsum(adj_start)

    # free-forced links become terminal capacities
    tr_cap = np.zeros(n, dtype=np.float64)
    for dy, dx, wgt in ((0, 1, right_w), (1, 0, down_w)):
        rows = slice(0, h - dy)
        cols = slice(0, w - dx)
        a_free = free[rows, cols]
        b_free = free[dy:, dx:]
        a_forced = forced[rows, cols]
        b_forced = forced[dy:, dx:]
        a_nid = nid[rows, cols]
        b_nid = nid[dy:, dx:]
        for lab, sign in ((1, 1.0), (2, -1.0)):
            sel = a_free & (b_forced == lab)
            np.add.at(tr_cap, a_nid[sel], sign * wgt[sel])
            sel = b_free & (a_forced == lab)
            np.add.at(tr_cap, b_nid[sel], sign * wgt[sel])

    tree = np.zeros(n, dtype=np.uint8)
    _bk_solve(n, adj_start, order, arc_to, arc_cap, tr_cap, tree)
    labels[free] = np.where(tree[nid[free]] == 1, 1, 2).astype(np.uint8)
    return labels
