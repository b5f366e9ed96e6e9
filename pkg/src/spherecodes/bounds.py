"""Closed-form information-theoretic reference curves.

Everything here is a pure function of its arguments, in nats. Universal
constants that the theory leaves unspecified (c0 and the regime prefactors)
default to 1.0 and travel with the results, so no curve gets mistaken for
an absolute number.
"""

import math


def capacity(sigma2: float) -> float:
    """AWGN capacity 0.5 ln(1 + 1/sigma2), nats per dimension."""
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be > 0, got {sigma2}")
    return 0.5 * math.log1p(1.0 / sigma2)


def capacity_inv(y: float) -> float:
    """Noise level with capacity y: sigma2 = 1/(e^{2y} - 1), via expm1."""
    if y <= 0:
        raise ValueError(f"capacity value must be > 0, got {y}")
    return 1.0 / math.expm1(2.0 * y)


def binary_entropy(p: float) -> float:
    """h(p) in nats, continuously extended so h(0) = h(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log(1.0 - p)


def rdf_lower_bound(d: int, k: int, eps: float, c0: float = 1.0) -> float:
    """Rate-distortion floor for describing k centers to precision eps:

        (dk/2) ln(1/eps) - dk ln(1 + c0 (eps d)^{-1/2}) - k ln k.

    May go negative at large eps; returned as computed.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    return (
        0.5 * d * k * math.log(1.0 / eps)
        - d * k * math.log(1.0 + c0 / math.sqrt(eps * d))
        - k * math.log(k)
    )


def labeled_mi_upper(d: int, k: int, sigma2: float, n: float) -> float:
    """Information cap with labels revealed: k parallel Gaussian channels,
    (dk/2) ln(1 + n/(k sigma2))."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be > 0, got {sigma2}")
    return 0.5 * d * k * math.log1p(n / (k * sigma2))


def sc_lower_trivial(eps: float, R: float) -> float:
    """Sample-complexity floor in genie units: e^{-2R}/eps - 1.

    Can be negative (vacuous) at large eps or rate; returned as computed.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    if R < 0:
        raise ValueError(f"rate must be >= 0, got {R}")
    return math.exp(-2.0 * R) / eps - 1.0


def single_sample_mi_upper(delta: float, e_delta: float, k: int) -> float:
    """Per-sample information cap h(e) + (delta + e) ln k.

    e_delta is the decoding error at the slightly-super-capacity noise
    level sigma0^2 = capacity_inv((1 + delta) ln(k)/d); it is measured by
    Monte Carlo elsewhere and supplied here as data.
    """
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if not 0.0 <= e_delta <= 1.0:
        raise ValueError(f"e_delta must be in [0, 1], got {e_delta}")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return binary_entropy(e_delta) + (delta + e_delta) * math.log(k)


def quantitative_lower_curve(regime: str, d: int, k: int, const: float = 1.0) -> float:
    """Super-linear sample-complexity factor above capacity.

    positive regime: const * sqrt(ln k / ln ln k);
    zero regime: const * min(sqrt(ln k / ln ln k), sqrt(d / ln k)).
    Needs k >= 3 so ln ln k > 0.
    """
    if k < 3:
        raise ValueError(f"k must be >= 3 (ln ln k > 0), got {k}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    lk = math.log(k)
    llk = math.log(lk)
    if llk <= 0:
        raise ValueError(f"ln ln k must be > 0, got {llk}")
    first = math.sqrt(lk / llk)
    if regime == "positive":
        return const * first
    if regime == "zero":
        return const * min(first, math.sqrt(d / lk))
    raise ValueError(f"unknown regime {regime!r}")
