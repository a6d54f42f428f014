"""Cellular chain complexes over Z for the truncated manifold, its pair and its double.

Cells
-----
* tetrahedra, oriented by the standard orientation of each tetrahedron;
* hexagonal faces, one per glued pair, oriented by the vertex cycle of the
  smaller face id of the pair (the outward orientation of that side);
* interior edge segments, oriented from end ``2o`` to end ``2o + 1``;
* boundary triangles ``4t + v`` oriented outward from the manifold;
* boundary edges: one per (pair, corner), oriented along the hexagon's
  traversal at that corner;
* boundary vertices: the ``2E`` segment ends.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complex import BoundarySurface, OrbitTable, build_boundary_surface, build_edge_orbits
from .errors import OrientationInconsistency
from .model import FACE_VERTICES, POSITION, GluingInstance
from .smith import DEFAULT_MAX_NNZ, IntegerMatrix, smith_normal_form

DEFAULT_HOMOLOGY_MAX_N = 500


@dataclass
class ChainComplexOverZ:
    """Cells in dimensions 0..3 and boundary maps ``d[i]: C_i -> C_{i-1}``."""

    kind: str
    counts: tuple[int, int, int, int]
    d: dict[int, IntegerMatrix] = field(default_factory=dict)

    def __post_init__(self):
        for i in (1, 2, 3):
            m = self.d[i]
            if m.shape != (self.counts[i - 1], self.counts[i]):
                raise ValueError(f"boundary {i} has shape {m.shape}, expected {(self.counts[i - 1], self.counts[i])}")

    @property
    def euler_characteristic(self) -> int:
        c0, c1, c2, c3 = self.counts
        return c0 - c1 + c2 - c3

    def check(self) -> None:
        """Raise OrientationInconsistency unless every composite boundary vanishes."""
        for i in (1, 2):
            if not (self.d[i] @ self.d[i + 1]).is_zero():
                raise OrientationInconsistency(f"{self.kind}: d{i} o d{i + 1} != 0")


@dataclass(frozen=True)
class HomologySummary:
    kind: str
    betti: tuple[int, int, int, int]
    torsion: tuple[int, ...]

    @property
    def b1(self) -> int:
        return self.betti[1]

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** i * b for i, b in enumerate(self.betti))


class _Cells:
    """Maps hashable cell keys to consecutive indices, one table per dimension."""

    def __init__(self):
        self.index = [dict(), dict(), dict(), dict()]

    def add(self, dim, key):
        table = self.index[dim]
        if key not in table:
            table[key] = len(table)
        return table[key]

    def counts(self):
        return tuple(len(t) for t in self.index)


def _pairs(instance: GluingInstance):
    """Per pair ``p``: (tet, face) of its smaller side, of the other side, rotation."""
    out = []
    for fid in instance.first_faces():
        g = int(instance.partner[fid])
        out.append((int(fid) // 4, int(fid) % 4, g // 4, g % 4, int(instance.rotation[fid])))
    return out


def _face_roles(pairs):
    """``(t, i) -> (pair, is_smaller_side)``."""
    role = {}
    for p, (t, F, u, G, _) in enumerate(pairs):
        role[(t, F)] = (p, True)
        role[(u, G)] = (p, False)
    return role


def _hex_edges(orbits: OrbitTable, t: int, F: int):
    """Signed segments around face ``(t, F)`` in its cycle order."""
    cyc = FACE_VERTICES[F]
    out = []
    for j in range(3):
        o, s = orbits.direction(t, int(cyc[j]), int(cyc[(j + 1) % 3]))
        out.append((o, s))
    return out


def _accumulate(triples, rows, cols):
    return IntegerMatrix.from_triples(rows, cols, triples)


def build_relative_complex(instance: GluingInstance, orbits: OrbitTable | None = None) -> ChainComplexOverZ:
    """Chains of the manifold modulo its boundary: tets, hexagons, segments."""
    if orbits is None:
        orbits = build_edge_orbits(instance)
    n, E = instance.n, len(orbits)
    pairs = _pairs(instance)
    role = _face_roles(pairs)
    d3 = []
    for t in range(n):
        for i in range(4):
            p, smaller = role[(t, i)]
            d3.append((p, t, 1 if smaller else -1))
    d2 = []
    for p, (t, F, *_rest) in enumerate(pairs):
        for o, s in _hex_edges(orbits, t, F):
            d2.append((o, p, s))
    cx = ChainComplexOverZ(
        "relative",
        (0, E, 2 * n, n),
        {
            1: IntegerMatrix(0, E),
            2: _accumulate(d2, E, 2 * n),
            3: _accumulate(d3, 2 * n, n),
        },
    )
    cx.check()
    return cx


def _absolute_cells(instance, orbits, cells: _Cells, trip, copy: int, pairs, role):
    """Emit interior cells of one copy; boundary cells are shared across copies."""
    n, E = instance.n, len(orbits)
    # 0-cells and boundary 1-cells (shared)
    for e in range(2 * E):
        cells.add(0, ("v", e))
    for o in range(E):
        s = cells.add(1, ("s", o, copy))
        trip[1].append((cells.add(0, ("v", 2 * o)), s, -1))
        trip[1].append((cells.add(0, ("v", 2 * o + 1)), s, 1))
    for p, (t, F, u, G, r) in enumerate(pairs):
        cyc = FACE_VERTICES[F]
        for j in range(3):
            a, prev, nxt = int(cyc[j]), int(cyc[(j - 1) % 3]), int(cyc[(j + 1) % 3])
            key = ("b", p, j)
            fresh = key not in cells.index[1]
            c = cells.add(1, key)
            if fresh:
                trip[1].append((cells.add(0, ("v", orbits.endpoint(t, a, prev))), c, -1))
                trip[1].append((cells.add(0, ("v", orbits.endpoint(t, a, nxt))), c, 1))
        h = cells.add(2, ("h", p, copy))
        for o, s in _hex_edges(orbits, t, F):
            trip[2].append((cells.index[1][("s", o, copy)], h, s))
        for j in range(3):
            trip[2].append((cells.index[1][("b", p, j)], h, 1))

    def corner_term(t, i, v):
        # triangle (t, v) meets face (t, i) in one boundary edge
        p, smaller = role[(t, i)]
        if smaller:
            return cells.index[1][("b", p, int(POSITION[i, v]))], 1
        r = pairs[p][4]
        j = (r - int(POSITION[i, v])) % 3
        return cells.index[1][("b", p, j)], -1

    # outward boundary triangles (shared); in the double they become interior
    for t in range(n):
        for v in range(4):
            key = ("T", t, v)
            fresh = key not in cells.index[2]
            c = cells.add(2, key)
            if fresh:
                for i in range(4):
                    if i != v:
                        b, s = corner_term(t, i, v)
                        trip[2].append((b, c, -s))
    for t in range(n):
        c3 = cells.add(3, ("t", t, copy))
        for i in range(4):
            p, smaller = role[(t, i)]
            trip[3].append((cells.index[2][("h", p, copy)], c3, 1 if smaller else -1))
        for v in range(4):
            trip[3].append((cells.index[2][("T", t, v)], c3, 1))


def _assemble(kind, cells, trip):
    counts = cells.counts()
    d = {i: _accumulate(trip[i], counts[i - 1], counts[i]) for i in (1, 2, 3)}
    cx = ChainComplexOverZ(kind, counts, d)
    cx.check()
    return cx


def build_absolute_complex(
    instance: GluingInstance,
    orbits: OrbitTable | None = None,
    surface: BoundarySurface | None = None,
) -> ChainComplexOverZ:
    """CW chains of the truncated manifold including its boundary surface.

    ``surface`` is only used to cross-check the boundary vertex count.
    """
    if orbits is None:
        orbits = build_edge_orbits(instance)
    pairs = _pairs(instance)
    cells = _Cells()
    trip = {1: [], 2: [], 3: []}
    _absolute_cells(instance, orbits, cells, trip, 0, pairs, _face_roles(pairs))
    if surface is not None and surface.num_vertices != 2 * len(orbits):
        raise OrientationInconsistency("boundary vertex count differs from 2E")
    return _assemble("absolute", cells, trip)


def build_double_complex(instance: GluingInstance, orbits: OrbitTable | None = None) -> ChainComplexOverZ:
    """Two copies of the truncated manifold glued along the whole boundary."""
    if orbits is None:
        orbits = build_edge_orbits(instance)
    pairs = _pairs(instance)
    role = _face_roles(pairs)
    cells = _Cells()
    trip = {1: [], 2: [], 3: []}
    _absolute_cells(instance, orbits, cells, trip, 0, pairs, role)
    _absolute_cells(instance, orbits, cells, trip, 1, pairs, role)
    return _assemble("double", cells, trip)


def homology_summary(cx: ChainComplexOverZ, max_nnz: int | None = DEFAULT_MAX_NNZ) -> HomologySummary:
    ranks = {0: 0, 4: 0}
    torsion = ()
    for i in (1, 2, 3):
        res = smith_normal_form(cx.d[i], max_nnz)
        ranks[i] = res.rank
        if i == 2:
            torsion = res.invariant_factors
    betti = tuple(cx.counts[i] - ranks[i] - ranks[i + 1] for i in range(4))
    return HomologySummary(cx.kind, betti, tuple(torsion))


def heegaard_bounds(E: int, n: int, b1_double: int) -> tuple[int, int]:
    """``(lower, upper)`` for the Heegaard genus of the double."""
    return int(b1_double), int(n) + 1 + int(E)


@dataclass(frozen=True)
class HomologyPanel:
    b1_rel: int
    b1_abs: int
    b1_double: int
    torsion_factors: tuple[int, ...]
    heegaard_lower: int
    heegaard_upper: int
    relative: HomologySummary
    absolute: HomologySummary
    double: HomologySummary


def homology_panel(
    instance: GluingInstance,
    orbits: OrbitTable | None = None,
    surface: BoundarySurface | None = None,
    max_nnz: int | None = DEFAULT_MAX_NNZ,
) -> HomologyPanel:
    """All three complexes for one sample, with torsion of the absolute H1."""
    if orbits is None:
        orbits = build_edge_orbits(instance)
    if surface is None:
        surface = build_boundary_surface(instance, orbits)
    rel = homology_summary(build_relative_complex(instance, orbits), max_nnz)
    ab = homology_summary(build_absolute_complex(instance, orbits, surface), max_nnz)
    dbl = homology_summary(build_double_complex(instance, orbits), max_nnz)
    lo, hi = heegaard_bounds(len(orbits), instance.n, dbl.b1)
    return HomologyPanel(rel.b1, ab.b1, dbl.b1, ab.torsion, lo, hi, rel, ab, dbl)
