import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import double_factorial
from tetgluing.errors import InvalidN, RetryLimitExceeded, TooLarge, UnknownFace
from tetgluing.model import (
    FACE_VERTICES,
    FORWARD_FACE,
    FaceId,
    GluingInstance,
    derive_seed,
    enumerate_all,
    face_map,
    omega_size,
    read_instance,
    sample_simple,
    sample_uniform,
    write_instance,
)


def test_face_cycles_are_outward():
    # each oriented edge u->v lies in exactly one face cycle
    seen = set()
    for f in range(4):
        assert f not in FACE_VERTICES[f]
        for j in range(3):
            e = (FACE_VERTICES[f, j], FACE_VERTICES[f, (j + 1) % 3])
            assert e not in seen
            seen.add(e)
    assert len(seen) == 12
    assert all(FORWARD_FACE[u, v] >= 0 for u in range(4) for v in range(4) if u != v)


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_omega_size(n):
    assert omega_size(n) == double_factorial(4 * n - 1) * 3 ** (2 * n)


def test_omega_small_values():
    assert omega_size(1) == 27
    assert omega_size(2) == 8505


def test_enumerate_counts(omega1, omega2):
    assert len(omega1) == 27
    assert len({g.key() for g in omega1}) == 27
    assert len(omega2) == 8505
    assert len({g.key() for g in omega2}) == 8505


def test_enumerate_too_large():
    with pytest.raises(TooLarge):
        next(enumerate_all(3))
    with pytest.raises(InvalidN):
        next(enumerate_all(0))


def test_sampler_is_deterministic():
    a = sample_uniform(50, 11)
    b = sample_uniform(50, 11)
    c = sample_uniform(50, 12)
    assert a == b
    assert a != c


def test_invalid_n():
    with pytest.raises(InvalidN):
        sample_uniform(0, 1)
    with pytest.raises(InvalidN):
        sample_simple(4, 1)


def test_simple_retry_limit():
    # n=1 has no simple dual graph at all
    with pytest.raises(RetryLimitExceeded):
        sample_simple(1, 0, max_retries=5, strict=False)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 60), seed=st.integers(0, 2**32))
def test_sample_is_valid_gluing(n, seed):
    g = sample_uniform(n, seed)
    p = g.partner
    assert np.all(p[p] == np.arange(4 * n))
    assert np.all(p != np.arange(4 * n))
    assert np.all(g.rotation[p] == g.rotation)
    assert set(np.unique(g.rotation)) <= {0, 1, 2}
    assert len(g.pairs) == 2 * n


@settings(max_examples=20, deadline=None)
@given(n=st.integers(5, 40), seed=st.integers(0, 2**32))
def test_sample_simple_has_simple_dual(n, seed):
    g = sample_simple(n, seed)
    tets = [(a.tet, b.tet) for a, b, _ in g.pairs]
    assert all(x != y for x, y in tets)
    assert len({tuple(sorted(t)) for t in tets}) == len(tets)


def test_text_round_trip(tmp_path):
    g = sample_uniform(12, 3)
    path = tmp_path / "g.txt"
    write_instance(g, path)
    assert read_instance(path) == g
    assert GluingInstance.from_text(g.to_text()) == g


def test_from_pairs_and_face_map():
    g = GluingInstance.from_pairs(1, [((0, 0), (0, 1), 0), ((0, 2), (0, 3), 2)])
    assert g.partner.tolist() == [1, 0, 3, 2]
    # rotation 0 sends a_j to b_{-j}: 1->0, 2->2, 3->3 for faces 0 and 1
    assert face_map(g, FaceId(0, 0)) == ((1, 0), (2, 2), (3, 3))
    with pytest.raises(UnknownFace):
        face_map(g, FaceId(3, 0))


def test_instance_is_read_only():
    g = sample_uniform(3, 0)
    with pytest.raises(ValueError):
        g.partner[0] = 1


def test_derive_seed_is_stable_and_spread():
    assert derive_seed(0, 100, 5) == derive_seed(0, 100, 5)
    seeds = {derive_seed(0, n, t) for n in (10, 100) for t in range(500)}
    assert len(seeds) == 1000
