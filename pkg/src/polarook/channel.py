"""AWGN channel with on-off keying.

The transmit symbol is 0 or the amplitude `a`, noise is unit-variance
Gaussian, and the signal-to-noise ratio is p*a^2 where p is the probability
of the "on" symbol. LLRs follow the log(P[0]/P[1]) convention used by the
whole package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_LLR_CLIP = 40.0

_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(64)


@dataclass(frozen=True)
class ChannelParams:
    amplitude: float
    p_on: float
    llr_clip: float = DEFAULT_LLR_CLIP

    def __post_init__(self):
        if not 0.0 < self.p_on < 1.0:
            raise ValueError(f"p_on must lie in (0,1), got {self.p_on}")
        if self.amplitude < 0.0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")

    @property
    def snr_linear(self) -> float:
        return self.p_on * self.amplitude**2

    @property
    def snr_db(self) -> float:
        return 10.0 * np.log10(self.snr_linear)


def db_to_linear(snr_db: float) -> float:
    return float(10.0 ** (snr_db / 10.0))


def linear_to_db(snr_linear: float) -> float:
    return float(10.0 * np.log10(snr_linear))


def channel_sample(x, params: ChannelParams, rng) -> np.ndarray:
    """Transmit a 0/1 vector: y = a*x + n with unit-variance Gaussian noise.

    `rng` is either a numpy Generator or a seed; a seed gives a fresh,
    reproducible stream.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    x = np.asarray(x, dtype=np.float64)
    return params.amplitude * x + rng.standard_normal(x.shape[0])


def prior_llr(p_on: float, clip: float = DEFAULT_LLR_CLIP) -> float:
    """log(P[X=0]/P[X=1]) for the target input distribution."""
    val = float(np.log((1.0 - p_on) / p_on))
    return float(np.clip(val, -clip, clip))


def channel_llr(y, params: ChannelParams, include_prior: bool = True) -> np.ndarray:
    """Per-symbol log(P[y|x=0]/P[y|x=1]) = (a^2 - 2*a*y)/2, optionally with
    the prior term added, magnitude-clipped to params.llr_clip."""
    y = np.asarray(y, dtype=np.float64)
    a = params.amplitude
    llr = (a * a - 2.0 * a * y) / 2.0
    if include_prior:
        llr = llr + np.log((1.0 - params.p_on) / params.p_on)
    return np.clip(llr, -params.llr_clip, params.llr_clip)


def _mixture_log2_density(y: np.ndarray, p: float, a: float) -> np.ndarray:
    # log2 of (1-p)*phi(y) + p*phi(y-a), with the Gaussian normalisation
    # factored out so only the exponents need care.
    e0 = -0.5 * y**2
    e1 = -0.5 * (y - a) ** 2
    m = np.maximum(e0, e1)
    mix = (1.0 - p) * np.exp(e0 - m) + p * np.exp(e1 - m)
    log_norm = -0.5 * np.log(2.0 * np.pi)
    return (np.log(mix) + m + log_norm) / np.log(2.0)


def mutual_information(p: float, gamma: float) -> float:
    """I(X;Y) in bits for OOK at linear SNR gamma with P[X=1]=p.

    Uses 64-point Gauss-Hermite quadrature of E[-log2 f_Y(Y)] under each
    conditional; the conditional differential entropies cancel exactly, so
    I = h(Y) - 0.5*log2(2*pi*e).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0,1), got {p}")
    if gamma <= 0.0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    a = float(np.sqrt(gamma / p))
    # E_{Z~N(mu,1)}[g(Z)] = 1/sqrt(pi) * sum_k w_k g(mu + sqrt(2) t_k)
    z = np.sqrt(2.0) * _GH_NODES
    w = _GH_WEIGHTS / np.sqrt(np.pi)
    h_y = -(1.0 - p) * np.dot(w, _mixture_log2_density(z, p, a))
    h_y += -p * np.dot(w, _mixture_log2_density(a + z, p, a))
    h_y_given_x = 0.5 * np.log2(2.0 * np.pi * np.e)
    return float(max(h_y - h_y_given_x, 0.0))


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def optimize_p(gamma: float, p_resolution: float = 1e-4) -> tuple[float, float]:
    """Maximise I(X;Y) over the on-probability at fixed linear SNR.

    Coarse grid over (0, 0.5] followed by golden-section refinement of the
    bracketing interval. The maximiser never exceeds 0.5 for this channel
    (trading sparser ones for amplitude), which the coarse grid confirms by
    construction rather than assumption.
    """
    if gamma <= 0.0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    grid = np.linspace(0.01, 0.5, 50)
    vals = [mutual_information(p, gamma) for p in grid]
    k = int(np.argmax(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]

    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = mutual_information(x1, gamma)
    f2 = mutual_information(x2, gamma)
    while hi - lo > p_resolution:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = mutual_information(x2, gamma)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = mutual_information(x1, gamma)
    p_star = 0.5 * (lo + hi)
    p_star = min(p_star, 0.5)
    return p_star, mutual_information(p_star, gamma)


def snr_for_rate(target_rate: float, shaped: bool, snr_db_lo: float = -20.0, snr_db_hi: float = 20.0, tol_db: float = 1e-3) -> float:
    """SNR (dB) at which the achievable rate reaches `target_rate`.

    shaped=True uses the per-SNR optimised input, shaped=False the uniform
    input; both curves are monotone in SNR so bisection applies.
    """

    def rate_at(snr_db: float) -> float:
        gamma = db_to_linear(snr_db)
        if shaped:
            return optimize_p(gamma)[1]
        return mutual_information(0.5, gamma)

    lo, hi = snr_db_lo, snr_db_hi
    if rate_at(lo) > target_rate or rate_at(hi) < target_rate:
        raise ValueError("target rate not bracketed by the SNR search range")
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if rate_at(mid) < target_rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
