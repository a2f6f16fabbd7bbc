"""Posterior summaries and chain-quality diagnostics."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterDomainError

__all__ = ["ChainSummary", "inefficiency_factor", "autocorrelation", "chain_summary"]


@dataclass(frozen=True)
class ChainSummary:
    mean: float
    sd: float
    q025: float
    q975: float
    inefficiency_factor: float
    n_draws: int


def autocorrelation(draws: np.ndarray) -> np.ndarray:
    """Sample autocorrelation function (biased normalization) via FFT."""
    x = np.asarray(draws, dtype=float)
    n = x.size
    x = x - x.mean()
    var = np.dot(x, x)
    if var == 0.0:
        out = np.zeros(n)
        out[0] = 1.0
        return out
    nfft = int(2 ** np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(x, nfft)
    acov = np.fft.irfft(f * np.conjugate(f), nfft)[:n]
    return acov / var


def inefficiency_factor(draws, min_draws: int = 100) -> float:
    """1 + 2 * sum of autocorrelations, truncated at the first lag where the
    sample autocorrelation becomes non-positive (initial positive sequence).

    The factor by which autocorrelation inflates the Monte Carlo variance of
    the chain mean; 1 for white noise, (1+rho)/(1-rho) for AR(1).
    """
    x = np.asarray(draws, dtype=float)
    if x.size < min_draws:
        raise ParameterDomainError(f"need at least {min_draws} draws")
    if np.all(x == x[0]):
        warnings.warn("degenerate (constant) chain; returning IF = 1",
                      RuntimeWarning, stacklevel=2)
        return 1.0
    rho = autocorrelation(x)[1:]
    nonpos = np.nonzero(rho <= 0.0)[0]
    cut = nonpos[0] if nonpos.size else rho.size
    return float(1.0 + 2.0 * rho[:cut].sum())


def chain_summary(draws) -> ChainSummary:
    """Moments, equal-tailed 95% interval endpoints (linear interpolation of
    order statistics, inclusive: numpy's default rule), and the inefficiency
    factor of one parameter's chain."""
    x = np.asarray(draws, dtype=float)
    if x.size == 0:
        raise ParameterDomainError("draws must be nonempty")
    q025, q975 = np.percentile(x, [2.5, 97.5])
    if x.size >= 100 and not np.all(x == x[0]):
        iact = inefficiency_factor(x)
    else:
        iact = 1.0
    return ChainSummary(
        mean=float(x.mean()),
        sd=float(x.std(ddof=1)) if x.size > 1 else 0.0,
        q025=float(q025),
        q975=float(q975),
        inefficiency_factor=iact,
        n_draws=int(x.size),
    )
