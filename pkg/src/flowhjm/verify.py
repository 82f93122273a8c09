"""Oracle checks for the basis: orthonormality, Gram-Schmidt agreement, Riesz identity."""

from __future__ import annotations

import numpy as np

from flowhjm.basis import RieszRepresenter, generator, get_basis, gram_schmidt_numeric, inner_product_w

RIESZ_POINTS = (0.0, 0.05, 1 / 12, 0.5, 1.0)


def gram_matrix(size: int = 7, variant: str = "orthonormal") -> np.ndarray:
    eye = np.eye(size)
    return np.array([[inner_product_w(eye[i], eye[j], variant=variant) for j in range(size)] for i in range(size)])


def gram_schmidt_deviation(size: int = 7, variant: str = "orthonormal", grid=None) -> float:
    """Largest pointwise gap between closed forms and numeric Gram-Schmidt on [0, 5]."""
    grid = np.linspace(0.0, 5.0, 100) if grid is None else grid
    numeric = gram_schmidt_numeric([generator(i) for i in range(1, size + 1)])
    closed = get_basis(size, variant).values(grid)
    return float(max(np.max(np.abs(f(grid) - closed[i])) for i, f in enumerate(numeric)))


def riesz_deviation(size: int = 7, variant: str = "orthonormal", points=RIESZ_POINTS) -> float:
    """max |<h_xi, e_i>_w - e_i(xi)| over basis index and xi."""
    eye = np.eye(size)
    basis = get_basis(size, variant)
    worst = 0.0
    for xi in points:
        h = RieszRepresenter(xi)
        vals = basis.values(xi)
        for i in range(size):
            worst = max(worst, abs(inner_product_w(h, eye[i], variant=variant) - vals[i]))
    return worst


def verify_basis(size: int = 7, variant: str = "orthonormal"):
    """Yield ``(name, passed, detail)`` for each check."""
    ortho = float(np.max(np.abs(gram_matrix(size, variant) - np.eye(size))))
    yield "orthonormality", ortho < 1e-6, f"max |<e_i,e_j> - delta_ij| = {ortho:.3e} (tol 1e-6)"
    gs = gram_schmidt_deviation(size, variant)
    yield "gram-schmidt oracle", gs < 1e-5, f"max pointwise gap on [0,5] = {gs:.3e} (tol 1e-5)"
    rz = riesz_deviation(size, variant)
    yield "riesz identity", rz < 1e-5, f"max |<h_xi,e_i> - e_i(xi)| = {rz:.3e} (tol 1e-5)"
