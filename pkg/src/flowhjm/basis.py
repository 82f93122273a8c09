"""Weighted Sobolev (Filipovic) space H_w with weight w(xi) = exp(xi).

Norm: |f|_w^2 = f(0)^2 + int_0^inf w(xi) f'(xi)^2 dxi.

Every basis function used here has the form ``c + p(xi) exp(-xi)`` with ``p``
a polynomial, so values and derivatives have closed forms and inner products
reduce to factorial moments.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

# Truncation point and node count for inner products. Integrands are
# polynomials (degree <= 2N - 4) times exp(-xi); the tail beyond 80 is
# negligible up to N ~ 10.
XI_MAX = 80.0
QUAD_NODES = 200

VARIANTS = ("orthonormal", "printed")


def weight(xi):
    """The weight function w(xi) = exp(xi)."""
    return np.exp(xi)


def inverse_weight(xi):
    return np.exp(-np.asarray(xi, dtype=float))


@functools.lru_cache(maxsize=None)
def _gl_unit(n: int):
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights on ``[a, b]``."""
    t, w = _gl_unit(n)
    half = 0.5 * (b - a)
    return half * t + 0.5 * (a + b), half * w


def _laguerre1(n: int) -> np.ndarray:
    """Ascending coefficients of the generalized Laguerre polynomial L_n^(1)."""
    return np.array(
        [(-1) ** m * math.comb(n + 1, n - m) / math.factorial(m) for m in range(n + 1)]
    )


def _orthonormal_poly(k: int) -> tuple[float, np.ndarray]:
    # e_1 = 1, e_2 = exp(-xi) - 1, and for k >= 3
    # e_k = (-1)^(k-3) / (k-2) * xi * L_{k-3}^(1)(xi) * exp(-xi).
    if k == 1:
        return 1.0, np.zeros(1)
    if k == 2:
        return -1.0, np.ones(1)
    n = k - 3
    poly = np.concatenate([[0.0], _laguerre1(n)]) * ((-1) ** n / (k - 2))
    return 0.0, poly


_PRINTED_HIGH = {
    5: (np.array([0.0, -6.0, -36.0, 1.0]), 42.0 * math.sqrt(5.0)),
    6: (np.array([0.0, -24.0, -192.0, -1440.0, 1.0]), 24.0 * math.sqrt(806115.0)),
    7: (
        np.array([0.0, -120.0, -1200.0, -10800.0, -100800.0, 1.0]),
        1560.0 * math.sqrt(49407661.0),
    ),
}


def _printed_poly(k: int) -> tuple[float, np.ndarray]:
    # Closed forms as stated in the source lemma. e_5..e_7 are unit-norm but
    # not orthogonal to e_3, e_4; kept for comparison only.
    if k in _PRINTED_HIGH:
        num, den = _PRINTED_HIGH[k]
        return 0.0, num / den
    if k > 7:
        raise ValueError("the printed variant only defines e_1..e_7")
    return _orthonormal_poly(k)


@dataclass(frozen=True)
class OrthonormalBasis:
    """Closed-form evaluators for e_1..e_N.

    Parameters
    ----------
    size : int
        Number of basis functions N.
    variant : {"orthonormal", "printed"}
        ``"orthonormal"`` is the exact Gram-Schmidt output of the generators
        ``1, exp(-xi), xi exp(-xi), xi^2 exp(-xi), ...``. ``"printed"`` swaps
        in the literal e_5..e_7 formulas of the published lemma.
    """

    size: int = 7
    variant: str = "orthonormal"
    consts: np.ndarray = field(init=False, repr=False, compare=False)
    polys: np.ndarray = field(init=False, repr=False, compare=False)
    dpolys: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"basis size must be positive, got {self.size}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown basis variant {self.variant!r}")
        make = _orthonormal_poly if self.variant == "orthonormal" else _printed_poly
        parts = [make(k) for k in range(1, self.size + 1)]
        deg = max(len(p) for _, p in parts)
        polys = np.zeros((self.size, deg + 1))
        for i, (_, p) in enumerate(parts):
            polys[i, : len(p)] = p
        # d/dxi [p exp(-xi)] = (p' - p) exp(-xi)
        dpolys = np.zeros_like(polys)
        for i in range(self.size):
            d = P.polysub(P.polyder(polys[i]), polys[i])
            dpolys[i, : len(d)] = d
        object.__setattr__(self, "consts", np.array([c for c, _ in parts]))
        object.__setattr__(self, "polys", polys)
        object.__setattr__(self, "dpolys", dpolys)

    def values(self, xi) -> np.ndarray:
        """All basis values, shape ``(N,) + np.shape(xi)``."""
        xi = np.asarray(xi, dtype=float)
        decay = np.exp(-xi)
        out = np.empty((self.size,) + xi.shape)
        for i in range(self.size):
            out[i] = self.consts[i] + P.polyval(xi, self.polys[i]) * decay
        return out

    def derivatives(self, xi) -> np.ndarray:
        """All basis derivatives, shape ``(N,) + np.shape(xi)``."""
        xi = np.asarray(xi, dtype=float)
        decay = np.exp(-xi)
        out = np.empty((self.size,) + xi.shape)
        for i in range(self.size):
            out[i] = P.polyval(xi, self.dpolys[i]) * decay
        return out

    def __call__(self, i: int, xi):
        self._check_index(i)
        return self.values(xi)[i - 1]

    def derivative(self, i: int, xi):
        self._check_index(i)
        return self.derivatives(xi)[i - 1]

    def _check_index(self, i):
        if not 1 <= i <= self.size:
            raise IndexError(f"basis index {i} outside 1..{self.size}")


@functools.lru_cache(maxsize=32)
def get_basis(size: int = 7, variant: str = "orthonormal") -> OrthonormalBasis:
    return OrthonormalBasis(size, variant)


def eval_basis(i: int, xi, size: int = 7, variant: str = "orthonormal"):
    """Value of e_i at ``xi`` (scalar or array)."""
    if not 1 <= i <= size:
        raise IndexError(f"basis index {i} outside 1..{size}")
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("basis functions are evaluated on xi >= 0")
    out = get_basis(size, variant)(i, xi)
    return float(out) if out.ndim == 0 else out


def eval_curve(x, xi, variant: str = "orthonormal"):
    """Evaluate sum_k x_k e_k(xi).

    ``x`` may be a single coefficient vector of length N or a batch of shape
    ``(n, N)``; the result then has shape ``(n,) + np.shape(xi)``.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(xi))):
        raise ValueError("non-finite curve coefficients or evaluation points")
    basis = get_basis(x.shape[-1], variant)
    vals = basis.values(xi).reshape(basis.size, -1)
    out = x @ vals
    out = out.reshape(x.shape[:-1] + xi.shape)
    return float(out) if out.ndim == 0 else out


class RieszRepresenter:
    """h_xi(u) = 1 + int_0^{min(xi, u)} w^{-1}(v) dv = 2 - exp(-min(xi, u)).

    Represents point evaluation at ``xi``: <h_xi, f>_w = f(xi). The derivative
    jumps at u = xi, which is exposed as a quadrature breakpoint.
    """

    def __init__(self, xi: float):
        if xi < 0:
            raise ValueError("xi must be non-negative")
        self.xi = float(xi)
        self.breakpoints = (self.xi,) if self.xi > 0 else ()

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return 2.0 - np.exp(-np.minimum(self.xi, u))

    def derivative(self, u):
        u = np.asarray(u, dtype=float)
        return np.where(u < self.xi, np.exp(-u), 0.0)


def riesz_representer(xi: float, u: float) -> float:
    if xi < 0 or u < 0:
        raise ValueError("xi and u must be non-negative")
    return float(2.0 - math.exp(-min(xi, u)))


class _CoeffCurve:
    def __init__(self, coeffs, variant):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.basis = get_basis(len(self.coeffs), variant)

    def __call__(self, xi):
        return self.coeffs @ self.basis.values(xi)

    def derivative(self, xi):
        return self.coeffs @ self.basis.derivatives(xi)


def _five_point(f: Callable, xi: np.ndarray, h: float = 1e-3) -> np.ndarray:
    return (-f(xi + 2 * h) + 8 * f(xi + h) - 8 * f(xi - h) + f(xi - 2 * h)) / (12 * h)


def _as_curve(f, variant):
    if callable(f):
        return f
    return _CoeffCurve(f, variant)


def inner_product_w(
    f,
    g,
    weight_fn: Callable = weight,
    xi_max: float = XI_MAX,
    n_nodes: int = QUAD_NODES,
    variant: str = "orthonormal",
) -> float:
    """<f, g>_w = f(0) g(0) + int_0^inf w(xi) f'(xi) g'(xi) dxi.

    ``f`` and ``g`` are callables or basis-coefficient vectors. Callables may
    carry a ``derivative`` method and a ``breakpoints`` tuple (points where the
    derivative is discontinuous); otherwise a five-point central difference is
    used, which evaluates the callable slightly left of zero.
    """
    f = _as_curve(f, variant)
    g = _as_curve(g, variant)
    cuts = sorted(
        {b for c in (f, g) for b in getattr(c, "breakpoints", ()) if 0 < b < xi_max}
    )
    edges = [0.0, *cuts, xi_max]
    total = float(f(np.array(0.0)) * g(np.array(0.0)))
    for a, b in zip(edges[:-1], edges[1:]):
        nodes, wts = gauss_legendre(a, b, n_nodes)
        df = f.derivative(nodes) if hasattr(f, "derivative") else _five_point(f, nodes)
        dg = g.derivative(nodes) if hasattr(g, "derivative") else _five_point(g, nodes)
        total += float(np.sum(wts * weight_fn(nodes) * df * dg))
    if not math.isfinite(total):
        raise ValueError("inner product is not finite")
    return total


def generator(i: int) -> Callable:
    """The i-th linearly independent generator: 1, then xi^(i-2) exp(-xi)."""
    if i < 1:
        raise ValueError("generator index starts at 1")
    if i == 1:
        return lambda xi: np.ones_like(np.asarray(xi, dtype=float))
    k = i - 2
    return lambda xi: np.asarray(xi, dtype=float) ** k * np.exp(-np.asarray(xi, dtype=float))


@dataclass
class Expansion:
    """A function written as a linear combination of generator callables."""

    coeffs: np.ndarray
    generators: Sequence[Callable]

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        return sum(c * g(xi) for c, g in zip(self.coeffs, self.generators))


def gram_schmidt_numeric(
    generators: Sequence[Callable],
    weight_fn: Callable = weight,
    tol: float = 1e-10,
    **quad,
) -> list[Expansion]:
    """Orthonormalize ``generators`` in H_w by modified Gram-Schmidt.

    Works entirely on the Gram matrix of the generators computed by
    quadrature, with one re-orthogonalization pass per vector. Raises
    ``ValueError`` naming the index of a numerically dependent generator.
    """
    n = len(generators)
    gram = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            gram[i, j] = gram[j, i] = inner_product_w(
                generators[i], generators[j], weight_fn, **quad
            )
    ortho: list[np.ndarray] = []
    for i in range(n):
        v = np.zeros(n)
        v[i] = 1.0
        scale = math.sqrt(gram[i, i])
        for _ in range(2):
            for q in ortho:
                v = v - (q @ gram @ v) * q
        norm2 = v @ gram @ v
        if not norm2 > (tol * scale) ** 2:
            raise ValueError(f"generator {i + 1} is numerically dependent on the previous ones")
        ortho.append(v / math.sqrt(norm2))
    return [Expansion(q, list(generators)) for q in ortho]
