"""Lobachevsky function and the linear volume proxy.

No hyperbolic structure is computed anywhere in this package; the proxy is
``n`` times the volume of the regular ideal right-angled octahedron.
"""

from __future__ import annotations

import math

import numpy as np

DEFAULT_TOL = 1e-12
_CHUNK = 1 << 20


def lobachevsky(theta: float, tol: float = DEFAULT_TOL) -> float:
    """``L(theta) = 1/2 * sum_{m>=1} sin(2 m theta) / m**2``.

    After ``M`` terms the tail is, by summation by parts against the closed
    form of ``sum sin(2 j theta)``,

        cos((2M+1) theta) / (2 sin(theta) (M+1)**2) + R,
        |R| <= (1/(M+1)**2 - 1/(M+2)**2) / (2 sin(theta)**2),

    so the leading tail term is added and ``M`` is chosen with ``|R| / 2``
    below ``tol / 2``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    theta = math.remainder(float(theta), math.pi)
    s = math.sin(theta)
    if abs(s) < 1e-300:
        return 0.0
    M = 1
    while (1 / (M + 1) ** 2 - 1 / (M + 2) ** 2) / (4 * s * s) > tol / 2:
        M *= 2
    total = 0.0
    for start in range(1, M + 1, _CHUNK):
        m = np.arange(start, min(start + _CHUNK, M + 1), dtype=np.float64)
        total += float(np.sum(np.sin(2.0 * m * theta) / (m * m)))
    total += math.cos((2 * M + 1) * theta) / (2 * s * (M + 1) ** 2)
    return 0.5 * total


# tighter tolerance so the factor 8 still leaves the volume within DEFAULT_TOL
OCTAHEDRON_VOLUME = 8.0 * lobachevsky(math.pi / 4, DEFAULT_TOL / 16)


def volume_proxy(n: int) -> float:
    """Combinatorial volume proxy ``n * v_oct``: asymptotic value and upper bound.

    A labeled proxy only; no metric is computed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return n * OCTAHEDRON_VOLUME


def volume_report(n: int) -> dict:
    return {
        "n": int(n),
        "volume_proxy": volume_proxy(n),
        "octahedron_volume": OCTAHEDRON_VOLUME,
        "kind": "combinatorial proxy (asymptotic value and upper bound; no metric computed)",
    }
