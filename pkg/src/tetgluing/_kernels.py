"""Compiled inner loops.  Everything here takes and returns plain arrays."""

import numba
import numpy as np

from .model import EDGE_SLOTS, FACE_VERTICES, POSITION, SLOT_OF

_FACE_VERTICES = FACE_VERTICES.copy()
_EDGE_SLOTS = EDGE_SLOTS.copy()
_SLOT_OF = SLOT_OF.copy()
_POSITION = POSITION.copy()


@numba.njit(cache=True)
def edge_orbits_kernel(partner, rotation):
    """Walk around every interior edge.

    Returns ``(order, offsets, wedge_orbit, wedge_sign, simple, ok)``.
    ``order[offsets[o]:offsets[o+1]]`` is the cyclic wedge sequence of orbit
    ``o``; wedges are flat indices ``6 * tet + slot``.  ``wedge_sign[w]`` is
    +1 when the lower local vertex of the slot lies at the orbit's tail end.
    ``ok`` is False if some edge came back reversed.
    """
    nf = partner.shape[0]
    n = nf // 4
    nw = 6 * n
    order = np.empty(nw, dtype=np.int64)
    offsets = np.empty(nw + 1, dtype=np.int64)
    wedge_orbit = np.full(nw, -1, dtype=np.int64)
    wedge_sign = np.zeros(nw, dtype=np.int8)
    simple = np.ones(nw, dtype=np.bool_)
    mark = np.full(n, -1, dtype=np.int64)
    ok = True
    pos = 0
    o = 0
    offsets[0] = 0
    for w0 in range(nw):
        if wedge_orbit[w0] != -1:
            continue
        t0 = w0 // 6
        s0 = w0 % 6
        a = _EDGE_SLOTS[s0, 0]
        b = _EDGE_SLOTS[s0, 1]
        # the two faces holding slot (a, b) are opposite the other two vertices
        c = -1
        for v in range(4):
            if v != a and v != b:
                c = v
                break
        t, x, y, F = t0, a, b, c
        while True:
            w = 6 * t + _SLOT_OF[x, y]
            order[pos] = w
            pos += 1
            wedge_orbit[w] = o
            wedge_sign[w] = 1 if x < y else -1
            if mark[t] == o:
                simple[o] = False
            mark[t] = o
            fid = 4 * t + F
            g = partner[fid]
            r = rotation[fid]
            t2 = g // 4
            G = g % 4
            x2 = _FACE_VERTICES[G, (r - _POSITION[F, x]) % 3]
            y2 = _FACE_VERTICES[G, (r - _POSITION[F, y]) % 3]
            F2 = 6 - G - x2 - y2
            if t2 == t0 and _SLOT_OF[x2, y2] == s0:
                if x2 != a or F2 != c:
                    ok = False
                break
            t, x, y, F = t2, x2, y2, F2
        o += 1
        offsets[o] = pos
    return order, offsets[: o + 1].copy(), wedge_orbit, wedge_sign, simple[:o].copy(), ok


@numba.njit(cache=True)
def _bfs_ecc(indptr, indices, src, dist, queue):
    n = indptr.shape[0] - 1
    for i in range(n):
        dist[i] = -1
    dist[src] = 0
    head = 0
    tail = 1
    queue[0] = src
    ecc = 0
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u]
        if du > ecc:
            ecc = du
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if dist[v] < 0:
                dist[v] = du + 1
                queue[tail] = v
                tail += 1
    return ecc, tail


@numba.njit(cache=True)
def bfs_distances(indptr, indices, src):
    n = indptr.shape[0] - 1
    dist = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    _bfs_ecc(indptr, indices, src, dist, queue)
    return dist


@numba.njit(cache=True)
def diameter_kernel(indptr, indices):
    """Exact diameter by BFS from every vertex; -1 if disconnected."""
    n = indptr.shape[0] - 1
    dist = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    best = 0
    for s in range(n):
        ecc, reached = _bfs_ecc(indptr, indices, s, dist, queue)
        if reached < n:
            return -1
        if ecc > best:
            best = ecc
    return best


@numba.njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@numba.njit(cache=True)
def components_kernel(size, src, dst):
    """Union-find closure; labels numbered by smallest member, in order."""
    parent = np.arange(size)
    for k in range(src.shape[0]):
        a = _find(parent, src[k])
        b = _find(parent, dst[k])
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
    labels = np.empty(size, dtype=np.int64)
    root_label = np.full(size, -1, dtype=np.int64)
    count = 0
    for x in range(size):
        r = _find(parent, x)
        if root_label[r] < 0:
            root_label[r] = count
            count += 1
        labels[x] = root_label[r]
    return labels



@numba.njit(cache=True)
def bitparallel_diameter_kernel(indptr, indices):
    """Exact diameter, BFS from 64 sources at once on uint64 bitsets; -1 if disconnected."""
    n = indptr.shape[0] - 1
    visited = np.empty(n, dtype=np.uint64)
    frontier = np.empty(n, dtype=np.uint64)
    nxt = np.empty(n, dtype=np.uint64)
    one = np.uint64(1)
    best = 0
    for s0 in range(0, n, 64):
        cnt = min(64, n - s0)
        full = np.uint64(0xFFFFFFFFFFFFFFFF) if cnt == 64 else (one << np.uint64(cnt)) - one
        visited[:] = 0
        frontier[:] = 0
        for b in range(cnt):
            bit = one << np.uint64(b)
            visited[s0 + b] |= bit
            frontier[s0 + b] |= bit
        level = 0
        while True:
            grew = False
            for v in range(n):
                acc = np.uint64(0)
                for k in range(indptr[v], indptr[v + 1]):
                    acc |= frontier[indices[k]]
                acc &= ~visited[v]
                nxt[v] = acc
                if acc:
                    grew = True
            if not grew:
                break
            level += 1
            for v in range(n):
                visited[v] |= nxt[v]
                frontier[v] = nxt[v]
        for v in range(n):
            if visited[v] != full:
                return -1
        if level > best:
            best = level
    return best


@numba.njit(cache=True)
def _rank_among_others(v, x):
    return x if x < v else x - 1


@numba.njit(cache=True)
def boundary_kernel(n, t, F, u, G, r):
    """Side pairing, triangle components and corner classes of the boundary.

    Inputs are the per-pair arrays (smaller side ``(t, F)``, other side
    ``(u, G)``, rotation ``r``).  Triangle components come from the side
    pairing alone, not from vertex labels.
    """
    npairs = t.shape[0]
    side_partner = np.full(12 * n, -1, dtype=np.int64)
    csrc = np.empty(6 * npairs, dtype=np.int64)
    cdst = np.empty(6 * npairs, dtype=np.int64)
    c = 0
    for p in range(npairs):
        for j in range(3):
            v = _FACE_VERTICES[F[p], j]
            v2 = _FACE_VERTICES[G[p], (r[p] - j) % 3]
            s1 = 12 * t[p] + 3 * v + _rank_among_others(v, F[p])
            s2 = 12 * u[p] + 3 * v2 + _rank_among_others(v2, G[p])
            side_partner[s1] = s2
            side_partner[s2] = s1
            for step in (1, -1):
                w = _FACE_VERTICES[F[p], (j + step) % 3]
                w2 = _FACE_VERTICES[G[p], (r[p] - j - step) % 3]
                csrc[c] = 12 * t[p] + 3 * v + _rank_among_others(v, w)
                cdst[c] = 12 * u[p] + 3 * v2 + _rank_among_others(v2, w2)
                c += 1
    tsrc = np.arange(12 * n) // 3
    tdst = side_partner // 3
    component = components_kernel(4 * n, tsrc, tdst)
    corner_class = components_kernel(12 * n, csrc, cdst)
    return side_partner, component, corner_class
