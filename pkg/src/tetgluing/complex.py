"""Edge orbits, vertex orbits and the boundary surface of a gluing.

The glued complex is a Delta-complex of ``n`` tetrahedra; truncating its
vertices gives a compact 3-manifold whose boundary is triangulated by the
``4n`` vertex-truncation triangles.  Wedges (tetrahedron, edge slot) are
flat indices ``6 * tet + slot`` with slots ordered 01, 02, 03, 12, 13, 23.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._kernels import boundary_kernel, components_kernel, edge_orbits_kernel
from .errors import OddEulerCharacteristic, OrientationInconsistency
from .model import EDGE_SLOTS, FACE_VERTICES, GluingInstance


@dataclass(frozen=True)
class EdgeOrbit:
    id: int
    wedges: tuple[tuple[int, int], ...]
    length: int
    simple: bool

    @property
    def tets(self) -> frozenset[int]:
        return frozenset(t for t, _ in self.wedges)


class OrbitTable(Sequence[EdgeOrbit]):
    """All edge orbits of one instance, kept as flat arrays.

    Indexing yields :class:`EdgeOrbit` views; bulk statistics should use the
    ``lengths`` and ``simple`` arrays directly.
    """

    def __init__(self, n, order, offsets, wedge_orbit, wedge_sign, simple):
        self.n = n
        self.order = order
        self.offsets = offsets
        self.wedge_orbit = wedge_orbit
        self.wedge_sign = wedge_sign
        self.simple = simple
        self.lengths = np.diff(offsets)

    def __len__(self) -> int:
        return len(self.lengths)

    def __getitem__(self, o):
        if isinstance(o, slice):
            return [self[i] for i in range(*o.indices(len(self)))]
        if o < 0:
            o += len(self)
        if not 0 <= o < len(self):
            raise IndexError(o)
        ws = self.order[self.offsets[o]: self.offsets[o + 1]]
        return EdgeOrbit(
            id=int(o),
            wedges=tuple((int(w) // 6, int(w) % 6) for w in ws),
            length=int(len(ws)),
            simple=bool(self.simple[o]),
        )

    def tets_of(self, o: int) -> np.ndarray:
        return np.unique(self.order[self.offsets[o]: self.offsets[o + 1]] // 6)

    def endpoint(self, tet: int, u: int, w: int) -> int:
        """Boundary-vertex id of the end at local vertex ``u`` of edge ``{u, w}``.

        Orbit ``o`` has ends ``2o`` (tail) and ``2o + 1`` (head).
        """
        slot = _slot(u, w)
        wedge = 6 * tet + slot
        o = int(self.wedge_orbit[wedge])
        lower_is_tail = self.wedge_sign[wedge] > 0
        return 2 * o + (0 if (u < w) == lower_is_tail else 1)

    def direction(self, tet: int, u: int, w: int) -> tuple[int, int]:
        """``(orbit, sign)`` with sign +1 when ``u -> w`` runs tail to head."""
        wedge = 6 * tet + _slot(u, w)
        sign = int(self.wedge_sign[wedge]) * (1 if u < w else -1)
        return int(self.wedge_orbit[wedge]), sign


def _slot(u: int, w: int) -> int:
    a, b = (u, w) if u < w else (w, u)
    return {(0, 1): 0, (0, 2): 1, (0, 3): 2, (1, 2): 3, (1, 3): 4, (2, 3): 5}[(a, b)]


def build_edge_orbits(instance: GluingInstance) -> OrbitTable:
    """Traverse the cycle of wedges around every interior edge."""
    order, offsets, wedge_orbit, wedge_sign, simple, ok = edge_orbits_kernel(
        instance.partner, instance.rotation.astype(np.int64)
    )
    if not ok:
        raise OrientationInconsistency("an interior edge is identified with its reverse")
    return OrbitTable(instance.n, order, offsets, wedge_orbit, wedge_sign, simple)


def edge_histogram(orbits: OrbitTable) -> tuple[int, dict[int, int], dict[int, int]]:
    """``(E, {k: E_k}, {k: simple E_k})``; the simple map lists only nonzero k."""
    lengths = np.asarray(orbits.lengths)
    ks, counts = np.unique(lengths, return_counts=True)
    hist = {int(k): int(c) for k, c in zip(ks, counts)}
    sks, scounts = np.unique(lengths[np.asarray(orbits.simple, dtype=bool)], return_counts=True)
    simple_hist = {int(k): int(c) for k, c in zip(sks, scounts)}
    return len(lengths), hist, simple_hist


def pair_statistic(orbits: OrbitTable, K: int, L: int) -> int:
    """Unordered pairs of distinct orbits, lengths at most K and L, sharing a tetrahedron."""
    if K < 1 or L < 1:
        raise ValueError("K and L must be >= 1")
    lengths = np.asarray(orbits.lengths)
    short = np.flatnonzero(lengths <= max(K, L))
    by_tet: dict[int, list[int]] = defaultdict(list)
    for o in short:
        for t in orbits.tets_of(int(o)):
            by_tet[int(t)].append(int(o))
    pairs = set()
    for members in by_tet.values():
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                pairs.add((members[i], members[j]))
    count = 0
    for o1, o2 in pairs:
        l1, l2 = lengths[o1], lengths[o2]
        if (l1 <= K and l2 <= L) or (l1 <= L and l2 <= K):
            count += 1
    return count


def _components(size: int, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    return components_kernel(size, src.astype(np.int64), dst.astype(np.int64))


def _pair_arrays(instance: GluingInstance):
    """Per pair: (tet, face) of both sides and the rotation."""
    firsts = instance.first_faces()
    seconds = instance.partner[firsts]
    r = instance.rotation[firsts].astype(np.int64)
    return firsts // 4, firsts % 4, seconds // 4, seconds % 4, r


def vertex_orbits(instance: GluingInstance) -> np.ndarray:
    """Orbit id of each of the ``4n`` vertex labels, numbered by first label.

    ``V`` is ``labels.max() + 1``.
    """
    t, F, u, G, r = _pair_arrays(instance)
    src, dst = [], []
    for j in range(3):
        src.append(4 * t + FACE_VERTICES[F, j])
        dst.append(4 * u + FACE_VERTICES[G, (r - j) % 3])
    return _components(4 * instance.n, np.concatenate(src), np.concatenate(dst))


@dataclass
class BoundarySurface:
    """Triangulated boundary of the truncated manifold.

    Triangle ``4t + v`` truncates vertex ``v`` of tetrahedron ``t``.  Its
    side lying in hexagonal face ``i`` has index ``12t + 3v + idx(i)`` where
    ``idx`` ranks ``i`` among the local vertices other than ``v``; corners use
    the same scheme (the corner toward ``w`` of triangle ``4t + v``).
    """

    n: int
    side_partner: np.ndarray
    component: np.ndarray          # component id per triangle
    corner_class: np.ndarray       # boundary-vertex id per corner
    num_vertices: int
    num_edges: int
    num_faces: int
    component_cells: list[tuple[int, int, int]]   # (v, e, f) per component

    @property
    def num_components(self) -> int:
        return len(self.component_cells)

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_faces


def build_boundary_surface(instance: GluingInstance, orbits: OrbitTable | None = None) -> BoundarySurface:
    """Assemble the boundary triangulation from the hexagonal-face gluings.

    ``orbits`` is accepted for interface symmetry; the surface is built from
    the gluing alone so that its vertex count is an independent check on
    ``2E``.
    """
    n = instance.n
    side_partner, component, corner_class = boundary_kernel(n, *_pair_arrays(instance))
    num_components = int(component.max()) + 1

    # every corner, side and triangle of triangle 4t+v sits in its component
    corner_comp = np.repeat(component, 3)
    num_classes = int(corner_class.max()) + 1
    class_comp = np.empty(num_classes, dtype=np.int64)
    class_comp[corner_class] = corner_comp
    verts = np.bincount(class_comp, minlength=num_components)
    edges = np.bincount(corner_comp, minlength=num_components) // 2
    faces = np.bincount(component, minlength=num_components)
    cells = [(int(a), int(b), int(c)) for a, b, c in zip(verts, edges, faces)]
    return BoundarySurface(
        n=n,
        side_partner=side_partner,
        component=component,
        corner_class=corner_class,
        num_vertices=int(verts.sum()),
        num_edges=6 * n,
        num_faces=4 * n,
        component_cells=cells,
    )


def boundary_invariants(surface: BoundarySurface) -> tuple[int, list[int], list[int]]:
    """``(component count, chi per component, genus per component)``."""
    chis, genera = [], []
    for v, e, f in surface.component_cells:
        chi = v - e + f
        if chi % 2:
            raise OddEulerCharacteristic(f"component with cells {(v, e, f)} has chi={chi}")
        chis.append(chi)
        genera.append((2 - chi) // 2)
    return len(chis), chis, genera


def default_cutoff(n: int) -> int:
    """Short-edge threshold ``ceil(n ** (1/4))``, computed exactly."""
    k = max(1, math.isqrt(math.isqrt(n)))
    while k ** 4 < n:
        k += 1
    while k > 1 and (k - 1) ** 4 >= n:
        k -= 1
    return k


@dataclass(frozen=True)
class GenericityReport:
    dual_simple: bool
    all_short_edges_simple: bool
    no_adjacent_short_edges: bool

    @property
    def generic(self) -> bool:
        return self.dual_simple and self.all_short_edges_simple and self.no_adjacent_short_edges


def genericity_check(instance: GluingInstance, orbits: OrbitTable, cutoff: int | None = None) -> GenericityReport:
    from .dual_graph import build_dual, is_simple

    if cutoff is None:
        cutoff = default_cutoff(instance.n)
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    lengths = np.asarray(orbits.lengths)
    short = lengths <= cutoff
    return GenericityReport(
        dual_simple=is_simple(build_dual(instance)),
        all_short_edges_simple=bool(np.all(np.asarray(orbits.simple)[short])),
        no_adjacent_short_edges=pair_statistic(orbits, cutoff, cutoff) == 0,
    )


@dataclass(frozen=True)
class CuspSpectrum:
    parts: tuple[Fraction, ...]

    @property
    def largest(self) -> Fraction:
        return self.parts[0]

    @property
    def second(self) -> Fraction:
        return self.parts[1] if len(self.parts) > 1 else Fraction(0)

    @property
    def num_parts(self) -> int:
        return len(self.parts)


def cusp_spectrum(orbits: OrbitTable) -> CuspSpectrum:
    """Edge lengths sorted decreasingly and divided by ``6n``."""
    if len(orbits) == 0:
        raise ValueError("need at least one orbit")
    total = 6 * orbits.n
    lengths = sorted((int(k) for k in orbits.lengths), reverse=True)
    return CuspSpectrum(tuple(Fraction(k, total) for k in lengths))


@dataclass(frozen=True)
class ComplexSummary:
    n: int
    V: int
    E: int
    edge_hist: dict
    simple_hist: dict
    boundary_components: int
    genus_list: tuple[int, ...]
    chi_boundary: int


def summarize(instance: GluingInstance, orbits: OrbitTable | None = None) -> ComplexSummary:
    if orbits is None:
        orbits = build_edge_orbits(instance)
    E, hist, shist = edge_histogram(orbits)
    labels = vertex_orbits(instance)
    surface = build_boundary_surface(instance, orbits)
    count, _, genera = boundary_invariants(surface)
    return ComplexSummary(
        n=instance.n,
        V=int(labels.max()) + 1,
        E=E,
        edge_hist=hist,
        simple_hist=shist,
        boundary_components=count,
        genus_list=tuple(genera),
        chi_boundary=surface.euler_characteristic,
    )


__all__ = [
    "EDGE_SLOTS",
    "BoundarySurface",
    "ComplexSummary",
    "CuspSpectrum",
    "EdgeOrbit",
    "GenericityReport",
    "OrbitTable",
    "boundary_invariants",
    "build_boundary_surface",
    "build_edge_orbits",
    "cusp_spectrum",
    "default_cutoff",
    "edge_histogram",
    "genericity_check",
    "pair_statistic",
    "summarize",
    "vertex_orbits",
]
