"""European option prices under Black-Scholes-Merton."""

from __future__ import annotations

import math


class DomainError(ValueError):
    pass


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def blackscholes(S: float, K: float, r: float, sigma: float, T: float):
    """Return ``(call, put)`` for spot S, strike K, continuous rate r,
    volatility sigma and maturity T in years.

    ``sigma == 0`` is the deterministic limit: both options pay their
    discounted intrinsic value.
    """
    S, K, r, sigma, T = (float(v) for v in (S, K, r, sigma, T))
    if not all(math.isfinite(v) for v in (S, K, r, sigma, T)):
        raise DomainError("blackscholes inputs must be finite")
    if S <= 0 or K <= 0:
        raise DomainError(f"spot and strike must be positive, got S={S}, K={K}")
    if T <= 0:
        raise DomainError(f"maturity must be positive, got T={T}")
    if sigma < 0:
        raise DomainError(f"volatility must be non-negative, got sigma={sigma}")

    disc_k = K * math.exp(-r * T)
    if sigma == 0.0:
        return max(S - disc_k, 0.0), max(disc_k - S, 0.0)

    vol = sigma * math.sqrt(T)
    d1 = (math.log(S / K) + (r + 0.5 * sigma * sigma) * T) / vol
    d2 = d1 - vol
    call = S * norm_cdf(d1) - disc_k * norm_cdf(d2)
    put = disc_k * norm_cdf(-d2) - S * norm_cdf(-d1)
    return call, put
