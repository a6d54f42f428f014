"""Sequential ("peeling") constructions of a uniform gluing.

The partial complex is tracked through its boundary.  Every unglued face has
three sides; a side is a *flag* ``3 * face + k`` standing for the edge
``(c[k], c[k+1])`` of the face's vertex cycle ``c``.  A boundary edge of the
partial complex is a chain of glued faces whose two ends are flags of unglued
faces, and ``end[flag]`` is the flag at the other end.  Gluing two flags
concatenates their chains, or closes the edge if they were the two ends of
the same chain.  ``wedges[flag]`` counts the tetrahedron corners along the
chain, so the length of an edge is known the moment it closes.

All randomness is drawn through a ``choose(k)`` callable returning an integer
in ``range(k)``; the default draws from :func:`rng_for`, and the path
enumerator substitutes an odometer.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .errors import InvalidN
from .model import FACE_VERTICES, FORWARD_FACE, POSITION, GluingInstance, rng_for

Chooser = Callable[[int], int]


def _local_end_table() -> np.ndarray:
    # flag (F, k) of a lone tetrahedron is paired with the other face on its edge
    out = np.empty(12, dtype=np.int64)
    for F in range(4):
        for k in range(3):
            u, w = FACE_VERTICES[F, k], FACE_VERTICES[F, (k + 1) % 3]
            G = FORWARD_FACE[w, u]
            out[3 * F + k] = 3 * G + POSITION[G, w]
    return out


LOCAL_END = _local_end_table()


def rng_chooser(rng: np.random.Generator) -> Chooser:
    return lambda k: int(rng.integers(k))


class PeelState:
    """A partial gluing of ``n`` tetrahedra together with its boundary."""

    def __init__(self, n: int):
        if n < 1:
            raise InvalidN(f"n must be >= 1, got {n}")
        self.n = n
        self.t = 0
        self.partner = np.full(4 * n, -1, dtype=np.int64)
        self.rotation = np.zeros(4 * n, dtype=np.int8)
        base = np.repeat(12 * np.arange(n), 12)
        self.end = (base + np.tile(LOCAL_END, n)).tolist()
        self.wedges = [1] * (12 * n)
        self.boundary: list[int] = list(range(4 * n))
        self._pos = list(range(4 * n))
        self.singular = [False] * (4 * n)
        self.num_singular = 0
        self.closed_lengths: list[int] = []

    # boundary bookkeeping
    @property
    def num_boundary_faces(self) -> int:
        return len(self.boundary)

    def is_boundary(self, f: int) -> bool:
        return self._pos[f] >= 0

    def _remove(self, f: int) -> None:
        i = self._pos[f]
        last = self.boundary.pop()
        if last != f:
            self.boundary[i] = last
            self._pos[last] = i
        self._pos[f] = -1
        if self.singular[f]:
            self.singular[f] = False
            self.num_singular -= 1

    def neighbors(self, f: int) -> tuple[int, int, int]:
        """Boundary faces across the three sides of boundary face ``f``."""
        e = self.end
        return e[3 * f] // 3, e[3 * f + 1] // 3, e[3 * f + 2] // 3

    def face_is_singular(self, f: int) -> bool:
        a, b, c = self.neighbors(f)
        return f in (a, b, c) or a == b or b == c or a == c

    def _refresh(self, f: int) -> None:
        if self._pos[f] < 0:
            return
        s = self.face_is_singular(f)
        if s != self.singular[f]:
            self.singular[f] = s
            self.num_singular += 1 if s else -1

    # random choices
    def random_face(self, choose: Chooser) -> int:
        return self.boundary[choose(len(self.boundary))]

    def random_other_face(self, f: int, choose: Chooser) -> int:
        i = choose(len(self.boundary) - 1)
        if i >= self._pos[f]:
            i += 1
        return self.boundary[i]

    def glue(self, f: int, g: int, r: int, track=()) -> tuple[list[int], list]:
        """Glue boundary faces ``f`` and ``g`` with rotation ``r``.

        Returns the lengths of the edges closed by this gluing, and for each
        flag in ``track`` either its successor flag on the same oriented edge
        or ``("closed", length)``.
        """
        if f == g or self._pos[f] < 0 or self._pos[g] < 0:
            raise ValueError("can only glue two distinct boundary faces")
        end, wedges = self.end, self.wedges
        track = list(track)
        closed = []
        touched = set()
        for k in range(3):
            a = 3 * f + k
            b = 3 * g + (r - k - 1) % 3
            a2, b2 = end[a], end[b]
            if a2 == b:
                length = wedges[a]
                closed.append(length)
                for i, x in enumerate(track):
                    if x == a or x == b:
                        track[i] = ("closed", length)
                continue
            w = wedges[a] + wedges[b]
            end[a2], end[b2] = b2, a2
            wedges[a2] = wedges[b2] = w
            touched.add(a2 // 3)
            touched.add(b2 // 3)
            for i, x in enumerate(track):
                if x == a:
                    track[i] = b2
                elif x == b:
                    track[i] = a2
        self.partner[f], self.partner[g] = g, f
        self.rotation[f] = self.rotation[g] = r
        self._remove(f)
        self._remove(g)
        for h in touched:
            self._refresh(h)
        self.t += 1
        self.closed_lengths.extend(closed)
        return closed, track

    @property
    def complete(self) -> bool:
        return self.t == 2 * self.n

    def to_instance(self) -> GluingInstance:
        if not self.complete:
            raise ValueError("gluing is not complete")
        return GluingInstance(self.n, self.partner.copy(), self.rotation.copy())


def count_singular_faces(state: PeelState) -> int:
    """Singular boundary faces, recomputed from the chain ends."""
    return sum(1 for f in state.boundary if state.face_is_singular(f))


@dataclass
class PeelTrace:
    """Per-step record; step ``t`` starts with ``4n - 2t`` boundary faces."""

    n: int
    E_t: list[int] = field(default_factory=list)
    F_sing_t: list[int] = field(default_factory=list)
    f_regular: list[bool] = field(default_factory=list)
    closed_lengths: list[list[int]] = field(default_factory=list)

    def record(self, closed, f_sing, regular):
        self.E_t.append(len(closed))
        self.F_sing_t.append(f_sing)
        self.f_regular.append(regular)
        self.closed_lengths.append(list(closed))

    @property
    def steps(self) -> int:
        return len(self.E_t)

    @property
    def total_edges(self) -> int:
        return sum(self.E_t)

    def rows(self):
        for t in range(self.steps):
            yield t, self.E_t[t], self.F_sing_t[t], int(self.f_regular[t])


def _default_chooser(n, seed, choose):
    if choose is None:
        choose = rng_chooser(rng_for(n, seed))
    return choose


def peel_algorithm1(n: int, seed: int = 0, *, choose: Chooser | None = None) -> tuple[GluingInstance, PeelTrace]:
    """Glue a random boundary face to another random boundary face, 2n times.

    The next face is drawn from the boundary left after the current gluing.
    """
    choose = _default_chooser(n, seed, choose)
    state = PeelState(n)
    trace = PeelTrace(n)
    f = state.random_face(choose)
    while not state.complete:
        g = state.random_other_face(f, choose)
        r = choose(3)
        f_sing = state.num_singular
        regular = not state.singular[f]
        closed, _ = state.glue(f, g, r)
        trace.record(closed, f_sing, regular)
        if not state.complete:
            f = state.random_face(choose)
    return state.to_instance(), trace


def oriented_flag(tet: int, u: int, w: int) -> int:
    """Flag of the face of ``tet`` whose cycle runs ``u -> w``."""
    if u == w or not (0 <= u < 4 and 0 <= w < 4):
        raise ValueError("need two distinct local vertices")
    F = int(FORWARD_FACE[u, w])
    return 3 * (4 * tet + F) + int(POSITION[F, u])


@dataclass(frozen=True)
class Algorithm2Result:
    k: int               # length of the edge through e
    l: int               # length of the edge through e'
    steps_e: int         # gluings spent around e
    steps_e_prime: int   # gluings spent around e' (0 if it closed earlier)


def peel_algorithm2(
    n: int,
    seed: int = 0,
    e: tuple[int, int] = (0, 1),
    e_prime: tuple[int, int] = (0, 2),
    *,
    choose: Chooser | None = None,
    with_trace: bool = False,
):
    """Peel around the oriented edge ``e`` of tetrahedron 0 until it closes, then ``e'``.

    Each step glues the face to the right of the current oriented boundary
    edge, i.e. the face whose vertex cycle runs along it.  Once both edges
    are closed the current edge is re-drawn as a uniform boundary flag,
    which is a uniform boundary edge with a uniform orientation.

    Returns ``(instance, (k, l))``, plus the trace and an
    :class:`Algorithm2Result` when ``with_trace`` is set.
    """
    if {e[0], e[1]} == {e_prime[0], e_prime[1]}:
        raise ValueError("e and e' must be different edges")
    choose = _default_chooser(n, seed, choose)
    state = PeelState(n)
    trace = PeelTrace(n)
    cur = oriented_flag(0, *e)
    other = oriented_flag(0, *e_prime)   # None once e' is closed or in use
    phase = 0
    k = l = None
    steps = [0, 0]
    while not state.complete:
        f = cur // 3
        g = state.random_other_face(f, choose)
        r = choose(3)
        f_sing = state.num_singular
        regular = not state.singular[f]
        tracked = [cur] if other is None else [cur, other]
        closed, new = state.glue(f, g, r, tracked)
        trace.record(closed, f_sing, regular)
        if phase < 2:
            steps[phase] += 1
        cur = new[0]
        if other is not None:
            other = new[1]
            if isinstance(other, tuple):
                l, other = other[1], None
        if not isinstance(cur, tuple):
            continue
        if phase == 0:
            k = cur[1]
        elif phase == 1:
            l = cur[1]
        if state.complete:
            break
        if phase == 0 and other is not None:
            phase, cur, other = 1, other, None
        else:
            phase = 2
            cur = 3 * state.random_face(choose) + choose(3)
    result = Algorithm2Result(k, l, steps[0], steps[1])
    inst = state.to_instance()
    if with_trace:
        return inst, (k, l), trace, result
    return inst, (k, l)


def enumerate_paths(run: Callable[[Chooser], object]) -> Iterator[tuple[tuple[int, ...], object]]:
    """Run ``run(choose)`` once per possible sequence of choices.

    Every sequence is equally likely under independent uniform choices only
    when all branches make the same number of calls with the same ranges;
    callers should weight by ``prod(1 / k)`` otherwise, so the ranges are
    returned alongside the outcome as ``((ranges...), outcome)``.
    """
    prefix: list[int] = []
    while True:
        ranges: list[int] = []
        depth = 0

        def choose(kk):
            nonlocal depth
            if depth < len(prefix):
                c = prefix[depth]
            else:
                c = 0
                prefix.append(0)
            ranges.append(kk)
            depth += 1
            return c

        out = run(choose)
        del prefix[depth:]
        yield tuple(ranges), out
        # odometer: bump the deepest digit that still has room
        while prefix and prefix[-1] + 1 >= ranges[len(prefix) - 1]:
            prefix.pop()
        if not prefix:
            return
        prefix[-1] += 1


@dataclass(frozen=True)
class TraceReport:
    n: int
    trials: int
    t: np.ndarray
    mean_E: np.ndarray
    mean_F_sing: np.ndarray
    regular_fraction: np.ndarray
    comparator_regular: np.ndarray     # expected regular closures given mean F_sing
    comparator_singular: np.ndarray    # upper bound on singular closures given mean F_sing
    singular_bound: np.ndarray         # 12 log(4n / (4n - 2t))
    mean_total_edges: float

    def rows(self):
        for i in range(len(self.t)):
            yield (
                int(self.t[i]),
                float(self.mean_E[i]),
                float(self.mean_F_sing[i]),
                float(self.regular_fraction[i]),
                float(self.comparator_regular[i]),
                float(self.comparator_singular[i]),
                float(self.singular_bound[i]),
            )


def regular_comparator(n: int, t, f_sing) -> np.ndarray:
    m = 4 * n - 2 * np.asarray(t, dtype=float)
    return (m - np.asarray(f_sing, dtype=float)) / (m * (m - 1))


def singular_comparator(n: int, t, f_sing) -> np.ndarray:
    m = 4 * n - 2 * np.asarray(t, dtype=float)
    return 9 * np.asarray(f_sing, dtype=float) / (m * (m - 1))


def singular_face_bound(n: int, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return 12 * np.log(4 * n / (4 * n - 2 * t))


def trace_report(traces) -> TraceReport:
    """Per-step means over a set of traces of the same ``n``."""
    traces = list(traces)
    if not traces:
        raise ValueError("need at least one trace")
    n = traces[0].n
    if any(tr.n != n or tr.steps != 2 * n for tr in traces):
        raise ValueError("traces must be complete and share n")
    E = np.array([tr.E_t for tr in traces], dtype=float)
    F = np.array([tr.F_sing_t for tr in traces], dtype=float)
    R = np.array([tr.f_regular for tr in traces], dtype=float)
    t = np.arange(2 * n)
    mean_F = F.mean(axis=0)
    return TraceReport(
        n=n,
        trials=len(traces),
        t=t,
        mean_E=E.mean(axis=0),
        mean_F_sing=mean_F,
        regular_fraction=R.mean(axis=0),
        comparator_regular=regular_comparator(n, t, mean_F),
        comparator_singular=singular_comparator(n, t, mean_F),
        singular_bound=singular_face_bound(n, t),
        mean_total_edges=float(E.sum(axis=1).mean()),
    )


def write_traces_csv(path, traces) -> None:
    """One row per (trial, step): ``trial, t, E_t, F_sing_t, f_regular``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "t", "E_t", "F_sing_t", "f_regular"])
        for trial, tr in enumerate(traces):
            for row in tr.rows():
                w.writerow([trial, *row])


def write_report_csv(path, report: TraceReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "mean_E_t", "mean_F_sing_t", "regular_fraction",
                    "comparator_regular", "comparator_singular", "singular_bound"])
        for row in report.rows():
            w.writerow(row)


def half_log_bracket(n: int) -> tuple[float, float]:
    """Desk-scale bracket for the mean edge count: ``[ln(n)/2 - 2, ln(n)/2 + 4]``."""
    h = 0.5 * math.log(n)
    return h - 2, h + 4
