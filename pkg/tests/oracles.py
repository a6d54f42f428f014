"""Slow, independent reference implementations used only by the tests.

Nothing here imports the package's combinatorics; the only shared input is
the raw ``partner`` / ``rotation`` arrays and the face-vertex convention
below, restated from scratch.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from fractions import Fraction
from math import gcd

import numpy as np

# vertex cycle of the face opposite local vertex i
CYCLES = {0: (1, 2, 3), 1: (0, 3, 2), 2: (0, 1, 3), 3: (0, 2, 1)}


class DSU:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def classes(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


def vertex_map(partner, rotation, fid):
    """Local vertex of the partner face hit by each vertex of face ``fid``."""
    g = int(partner[fid])
    r = int(rotation[fid])
    a = CYCLES[fid % 4]
    b = CYCLES[g % 4]
    return {a[j]: b[(r - j) % 3] for j in range(3)}, g


def brute_edges(partner, rotation):
    """Edge classes as lists of (tet, frozenset{u, w}) wedges."""
    n = len(partner) // 4
    wedges = [(t, frozenset((u, w))) for t in range(n) for u in range(4) for w in range(u + 1, 4)]
    dsu = DSU(wedges)
    for fid in range(4 * n):
        m, g = vertex_map(partner, rotation, fid)
        t, t2 = fid // 4, g // 4
        verts = CYCLES[fid % 4]
        for i in range(3):
            u, w = verts[i], verts[(i + 1) % 3]
            dsu.union((t, frozenset((u, w))), (t2, frozenset((m[u], m[w]))))
    return dsu.classes()


def brute_edge_stats(partner, rotation):
    """``(E, {k: E_k}, {k: simple E_k})``."""
    classes = brute_edges(partner, rotation)
    hist, simple = Counter(), Counter()
    for c in classes:
        k = len(c)
        hist[k] += 1
        tets = [t for t, _ in c]
        if len(set(tets)) == len(tets):
            simple[k] += 1
    return len(classes), dict(hist), dict(simple)


def brute_vertices(partner, rotation):
    n = len(partner) // 4
    dsu = DSU([(t, v) for t in range(n) for v in range(4)])
    for fid in range(4 * n):
        m, g = vertex_map(partner, rotation, fid)
        for a, b in m.items():
            dsu.union((fid // 4, a), (g // 4, b))
    return dsu.classes()


def brute_boundary(partner, rotation):
    """Per vertex class (= boundary component): (vertices, edges, faces) of its link.

    Link vertices are edge ends ``(t, u, w)`` (end of edge ``{u, w}`` at ``u``)
    glued across faces; each tetrahedron corner contributes one triangle.
    """
    n = len(partner) // 4
    ends = [(t, u, w) for t in range(n) for u in range(4) for w in range(4) if u != w]
    dsu = DSU(ends)
    for fid in range(4 * n):
        m, g = vertex_map(partner, rotation, fid)
        t, t2 = fid // 4, g // 4
        verts = CYCLES[fid % 4]
        for u in verts:
            for w in verts:
                if u != w:
                    dsu.union((t, u, w), (t2, m[u], m[w]))
    out = []
    for cls in brute_vertices(partner, rotation):
        corners = set(cls)
        f = len(corners)
        link_ends = {dsu.find(e) for e in ends if (e[0], e[1]) in corners}
        out.append((len(link_ends), 3 * f // 2, f))
    return out


def brute_dual_edges(partner):
    n = len(partner) // 4
    return sorted(tuple(sorted((f // 4, int(partner[f]) // 4))) for f in range(4 * n) if f < partner[f])


def bfs_all(n, edges):
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    dist = []
    for s in range(n):
        d = [-1] * n
        d[s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if d[y] < 0:
                    d[y] = d[x] + 1
                    q.append(y)
        dist.append(d)
    return dist


def diameter_oracle(n, edges):
    dist = bfs_all(n, edges)
    if any(x < 0 for row in dist for x in row):
        return math.inf
    return max(max(row) for row in dist)


def normalized_gap_oracle(n, edges, degree):
    a = np.zeros((n, n))
    for u, v in edges:
        a[u, v] += 1
        a[v, u] += 1
    lap = np.eye(n) - a / degree
    return float(np.sort(np.linalg.eigvalsh(lap))[1])


def snf_oracle(rows):
    """Textbook Smith normal form with explicit divisibility repair.

    Returns the full nonzero diagonal ``d1 | d2 | ...``.
    """
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        nz = [(i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nz:
            break
        i, j = min(nz, key=lambda p: abs(a[p[0]][p[1]]))
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            changed = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q, rem = divmod(a[i][t], a[t][t])
                    for k in range(n):
                        a[i][k] -= q * a[t][k]
                    if rem:
                        a[t], a[i] = a[i], a[t]
                        changed = True
            for j in range(t + 1, n):
                if a[t][j]:
                    q, rem = divmod(a[t][j], a[t][t])
                    for r in a:
                        r[j] -= q * r[t]
                    if rem:
                        for r in a:
                            r[t], r[j] = r[j], r[t]
                        changed = True
            if changed:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            for k in range(n):
                a[t][k] += a[bad[0]][k]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def catalan_oracle():
    """Catalan's constant from ``pi/8 log(2+sqrt 3) + 3/8 sum (n!)^2 / ((2n)! (2n+1)^2)``."""
    s = Fraction(0)
    term = Fraction(1)
    for k in range(60):
        if k:
            term = term * k * k / ((2 * k) * (2 * k - 1))
        s += term / (2 * k + 1) ** 2
    return math.pi / 8 * math.log(2 + math.sqrt(3)) + 3 * float(s) / 8


def double_factorial(m):
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def gcd_all(xs):
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g
