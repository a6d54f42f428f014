"""Labeled tetrahedra and the uniform probability space of face gluings.

Tetrahedron ``t`` owns the global vertex labels ``4t .. 4t+3``; its face
``i`` is the face opposite local vertex ``i``.  A face is addressed either
as a :class:`FaceId` or by its flat index ``4 * tet + face``.

A gluing of ``n`` tetrahedra is a perfect matching of the ``4n`` faces
together with a rotation in ``{0, 1, 2}`` per matched pair.  For a pair
whose smaller face has outward vertex cycle ``(a0 a1 a2)`` and whose larger
face has cycle ``(b0 b1 b2)``, rotation ``r`` identifies ``a_j`` with
``b_{(r - j) mod 3}``.  The formula is symmetric, so the same expression maps
the larger face back onto the smaller one.
"""

from __future__ import annotations

import itertools
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import InvalidN, RetryLimitExceeded, TooLarge, UnknownFace

# Outward-oriented vertex cycles; every tetrahedron edge occurs once in each
# direction over the four cycles.
FACE_VERTICES = np.array(
    [[1, 2, 3],
     [0, 3, 2],
     [0, 1, 3],
     [0, 2, 1]],
    dtype=np.int64,
)

# Unordered vertex pairs, lexicographic: 01, 02, 03, 12, 13, 23.
EDGE_SLOTS = np.array(
    [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]], dtype=np.int64
)

SLOT_OF = np.full((4, 4), -1, dtype=np.int64)
for _s, (_u, _v) in enumerate(EDGE_SLOTS):
    SLOT_OF[_u, _v] = SLOT_OF[_v, _u] = _s

# POSITION[f, v] is the index of local vertex v in the cycle of face f.
POSITION = np.full((4, 4), -1, dtype=np.int64)
for _f in range(4):
    for _j, _v in enumerate(FACE_VERTICES[_f]):
        POSITION[_f, _v] = _j

# FORWARD_FACE[u, v] is the face whose outward cycle runs u -> v.
FORWARD_FACE = np.full((4, 4), -1, dtype=np.int64)
for _f in range(4):
    for _j in range(3):
        FORWARD_FACE[FACE_VERTICES[_f, _j], FACE_VERTICES[_f, (_j + 1) % 3]] = _f

DEFAULT_MAX_RETRIES = 1000


class FaceId(NamedTuple):
    tet: int
    face: int

    @property
    def index(self) -> int:
        return 4 * self.tet + self.face

    @classmethod
    def from_index(cls, index: int) -> "FaceId":
        return cls(int(index) // 4, int(index) % 4)


def double_factorial_pairings(m: int) -> int:
    """Number of perfect matchings of ``m`` labeled items, ``(m-1)!!``."""
    out = 1
    for k in range(m - 1, 0, -2):
        out *= k
    return out


def omega_size(n: int) -> int:
    """Cardinality of the space of gluings of ``n`` tetrahedra."""
    return double_factorial_pairings(4 * n) * 3 ** (2 * n)


class GluingInstance:
    """A complete gluing datum for ``n`` tetrahedra.

    Stored as two read-only arrays of length ``4n``: ``partner[f]`` is the
    flat index of the face glued to ``f`` and ``rotation[f]`` is the rotation
    of the pair containing ``f`` (the same value on both faces).
    """

    __slots__ = ("n", "partner", "rotation", "_key")

    def __init__(self, n: int, partner, rotation, *, validate: bool = True):
        partner = np.asarray(partner, dtype=np.int64)
        rotation = np.asarray(rotation, dtype=np.int8)
        if validate:
            _validate(n, partner, rotation)
        partner.setflags(write=False)
        rotation.setflags(write=False)
        self.n = int(n)
        self.partner = partner
        self.rotation = rotation
        self._key = None

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "GluingInstance":
        """Build from an iterable of ``(FaceId, FaceId, rotation)``."""
        partner = np.full(4 * n, -1, dtype=np.int64)
        rotation = np.zeros(4 * n, dtype=np.int8)
        for a, b, r in pairs:
            ia, ib = _flat(a, n), _flat(b, n)
            if partner[ia] != -1 or partner[ib] != -1 or ia == ib:
                raise ValueError(f"face used twice in pairs: {a}, {b}")
            partner[ia], partner[ib] = ib, ia
            rotation[ia] = rotation[ib] = r
        return cls(n, partner, rotation)

    @property
    def num_faces(self) -> int:
        return 4 * self.n

    @property
    def pairs(self) -> list[tuple[FaceId, FaceId, int]]:
        """The ``2n`` pairs, smaller face first, sorted by first face."""
        firsts = np.flatnonzero(np.arange(4 * self.n) < self.partner)
        return [
            (FaceId.from_index(a), FaceId.from_index(self.partner[a]), int(self.rotation[a]))
            for a in firsts
        ]

    def first_faces(self) -> np.ndarray:
        """Flat indices of the smaller face of every pair, ascending."""
        return np.flatnonzero(np.arange(4 * self.n) < self.partner)

    def key(self) -> bytes:
        """Canonical byte string; equal instances have equal keys."""
        if self._key is None:
            self._key = self.partner.tobytes() + self.rotation.tobytes()
        return self._key

    def __eq__(self, other):
        if not isinstance(other, GluingInstance):
            return NotImplemented
        return self.n == other.n and self.key() == other.key()

    def __hash__(self):
        return hash((self.n, self.key()))

    def __repr__(self):
        return f"GluingInstance(n={self.n}, pairs={len(self.partner) // 2})"

    def to_text(self) -> str:
        lines = [str(self.n)]
        for a, b, r in self.pairs:
            lines.append(f"{a.tet} {a.face} {b.tet} {b.face} {r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GluingInstance":
        rows = [line.split() for line in text.splitlines() if line.strip()]
        if not rows or len(rows[0]) != 1:
            raise ValueError("first line must hold the tetrahedron count")
        n = int(rows[0][0])
        if len(rows) - 1 != 2 * n:
            raise ValueError(f"expected {2 * n} pair lines, got {len(rows) - 1}")
        pairs = []
        for row in rows[1:]:
            if len(row) != 5:
                raise ValueError(f"malformed pair line: {' '.join(row)}")
            ta, fa, tb, fb, r = map(int, row)
            a, b = FaceId(ta, fa), FaceId(tb, fb)
            if b < a:
                # rotation is symmetric under swapping the two faces
                a, b = b, a
            pairs.append((a, b, r))
        return cls.from_pairs(n, pairs)


def _flat(face, n: int) -> int:
    tet, f = face
    if not (0 <= tet < n and 0 <= f < 4):
        raise UnknownFace(face)
    return 4 * tet + f


def _validate(n: int, partner: np.ndarray, rotation: np.ndarray) -> None:
    if n < 1:
        raise InvalidN(f"n must be >= 1, got {n}")
    if partner.shape != (4 * n,) or rotation.shape != (4 * n,):
        raise ValueError("partner and rotation must have length 4n")
    idx = np.arange(4 * n)
    if partner.min() < 0 or partner.max() >= 4 * n:
        raise ValueError("partner array is not a perfect matching")
    if np.any(partner[partner] != idx) or np.any(partner == idx):
        raise ValueError("partner array is not a fixed-point-free involution")
    if np.any((rotation < 0) | (rotation > 2)):
        raise ValueError("rotations must lie in {0, 1, 2}")
    if np.any(rotation[partner] != rotation):
        raise ValueError("rotation differs between the two faces of a pair")


def rng_for(n: int, seed: int) -> np.random.Generator:
    """The random stream used by every sampler for ``(n, seed)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(n)])))


def derive_seed(master: int, n: int, trial: int) -> int:
    """Per-trial 64-bit seed, a SeedSequence hash of ``(master, n, trial)``."""
    state = np.random.SeedSequence([int(master), int(n), int(trial)]).generate_state(1, np.uint64)
    return int(state[0])


def _random_matching(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    perm = rng.permutation(4 * n)
    return perm[0::2], perm[1::2]


def _assemble(n: int, a: np.ndarray, b: np.ndarray, rots: np.ndarray) -> GluingInstance:
    partner = np.empty(4 * n, dtype=np.int64)
    rotation = np.empty(4 * n, dtype=np.int8)
    partner[a], partner[b] = b, a
    rotation[a] = rotation[b] = rots
    return GluingInstance(n, partner, rotation, validate=False)


def sample_uniform(n: int, seed: int) -> GluingInstance:
    """Uniform sample from the ``(4n-1)!! * 3**(2n)`` gluings of ``n`` tetrahedra."""
    if n < 1:
        raise InvalidN(f"n must be >= 1, got {n}")
    rng = rng_for(n, seed)
    a, b = _random_matching(rng, n)
    rots = rng.integers(0, 3, size=2 * n)
    return _assemble(n, a, b, rots)


def _matching_is_simple(n: int, a: np.ndarray, b: np.ndarray) -> bool:
    ta, tb = a // 4, b // 4
    if np.any(ta == tb):
        return False
    lo, hi = np.minimum(ta, tb), np.maximum(ta, tb)
    codes = lo * n + hi
    return np.unique(codes).size == codes.size


def sample_simple(
    n: int,
    seed: int,
    max_retries: int = DEFAULT_MAX_RETRIES,
    *,
    strict: bool = True,
) -> GluingInstance:
    """Uniform sample conditioned on a loop-free, multi-edge-free dual graph.

    Rejection sampling on the face matching; rotations are drawn only once a
    matching is accepted (they do not affect the dual graph).  With
    ``strict=False`` the ``n >= 5`` check is skipped, so impossible sizes
    exhaust the retry budget instead.
    """
    if n < 1 or (strict and n < 5):
        raise InvalidN(f"no simple 4-regular graph on {n} vertices")
    if max_retries < 1:
        raise ValueError("max_retries must be positive")
    rng = rng_for(n, seed)
    for _ in range(max_retries):
        a, b = _random_matching(rng, n)
        if _matching_is_simple(n, a, b):
            rots = rng.integers(0, 3, size=2 * n)
            return _assemble(n, a, b, rots)
    raise RetryLimitExceeded(f"no simple dual graph after {max_retries} attempts (n={n})")


def _matchings(items: Sequence[int]) -> Iterator[list[tuple[int, int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        remaining = rest[:i] + rest[i + 1:]
        for tail in _matchings(remaining):
            yield [(first, other)] + tail


def enumerate_all(n: int) -> Iterator[GluingInstance]:
    """Every gluing of ``n`` tetrahedra exactly once (``n`` in {1, 2})."""
    if n < 1:
        raise InvalidN(f"n must be >= 1, got {n}")
    if n > 2:
        raise TooLarge(f"exhaustive enumeration is limited to n <= 2, got {n}")
    for matching in _matchings(list(range(4 * n))):
        a = np.array([p[0] for p in matching], dtype=np.int64)
        b = np.array([p[1] for p in matching], dtype=np.int64)
        for rots in itertools.product(range(3), repeat=2 * n):
            yield _assemble(n, a, b, np.array(rots))


def face_map(instance: GluingInstance, f) -> tuple[tuple[int, int], ...]:
    """Vertex correspondence from face ``f`` to its partner.

    Returns three ``(vertex of f, vertex of partner)`` pairs of global labels,
    listed in the outward cycle order of ``f``.
    """
    fi = _flat(f, instance.n)
    g = int(instance.partner[fi])
    r = int(instance.rotation[fi])
    t, F = divmod(fi, 4)
    u, G = divmod(g, 4)
    return tuple(
        (4 * t + int(FACE_VERTICES[F, j]), 4 * u + int(FACE_VERTICES[G, (r - j) % 3]))
        for j in range(3)
    )


def write_instance(instance: GluingInstance, path) -> None:
    with open(path, "w") as fh:
        fh.write(instance.to_text())


def read_instance(path) -> GluingInstance:
    with open(path) as fh:
        return GluingInstance.from_text(fh.read())
