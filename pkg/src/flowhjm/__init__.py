"""Pricing options on flow forwards with Hilbert-space neural networks.

The log-forward curve lives in the Filipovic space H_w with weight
w(xi) = exp(xi). Curves are represented by their coefficients in an
orthonormal exponential-polynomial basis, simulated under an exponential
HJM model, and fed to a projected Hilbert-space network.
"""

from flowhjm.basis import (
    OrthonormalBasis,
    eval_basis,
    eval_curve,
    gram_schmidt_numeric,
    inner_product_w,
    riesz_representer,
)
from flowhjm.forward import ContractSpec, NoiseSpec, sample_payoff, simulate_log_forward
from flowhjm.pricing import PriceEstimate, black76_price_one_dim, mc_price

__all__ = [
    "ContractSpec",
    "NoiseSpec",
    "OrthonormalBasis",
    "PriceEstimate",
    "black76_price_one_dim",
    "eval_basis",
    "eval_curve",
    "gram_schmidt_numeric",
    "inner_product_w",
    "mc_price",
    "riesz_representer",
    "sample_payoff",
    "simulate_log_forward",
]
