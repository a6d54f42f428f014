"""Random 3-manifolds from gluing truncated tetrahedra."""
