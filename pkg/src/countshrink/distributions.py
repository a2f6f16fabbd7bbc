"""Exact samplers and log-densities for everything the Gibbs sweeps need.

All samplers are pure functions of (parameters, rng stream): fixing the seed
fixes the output sequence exactly, and concurrent callers are safe as long as
each owns its own ``numpy.random.Generator``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import ParameterDomainError, ResourceLimitError

__all__ = [
    "GigParams",
    "CrtDraw",
    "sample_gig",
    "gig_log_kernel",
    "sample_crt",
    "crt_table_counts",
    "build_crt_cache",
    "crt_exact_pmf",
    "log_stirling1_row",
    "sample_truncated_rw_proposal",
    "safe_poisson",
]

# Above this count the O(y) Bernoulli representation of a CRT draw is replaced
# by exact jump sampling of the next-table index (same law, O(shape*log y)).
CRT_BERNOULLI_LIMIT = 200_000

# Table cap for crt_exact_pmf (the O(y^2) Stirling recursion).
STIRLING_COUNT_CAP = 10_000

# numpy's poisson rejects rates this large; a rounded normal there is exact
# to O(rate^{-1/2}) total variation.
_POISSON_NORMAL_SWITCH = 1e15

# exp(|t|) overflows just past 709, so no log-scale draw can land beyond this.
_T_CAP = 760.0


# ---------------------------------------------------------------------------
# Generalized inverse Gaussian
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GigParams:
    """Parameters of the density proportional to
    ``x^(order-1) * exp(-(linear_rate*x + inverse_rate/x)/2)`` on x > 0.

    ``inverse_rate = 0`` degenerates to Ga(order, linear_rate/2) and requires
    ``order > 0`` for normalizability.
    """

    order: float
    linear_rate: float
    inverse_rate: float

    def validate(self) -> None:
        p = np.asarray(self.order, dtype=float)
        a = np.asarray(self.linear_rate, dtype=float)
        b = np.asarray(self.inverse_rate, dtype=float)
        if not np.all(np.isfinite(p)):
            raise ParameterDomainError("order must be finite")
        if not (np.all(np.isfinite(a)) and np.all(a > 0)):
            raise ParameterDomainError("linear_rate must be finite and > 0")
        if not (np.all(np.isfinite(b)) and np.all(b >= 0)):
            raise ParameterDomainError("inverse_rate must be finite and >= 0")
        if np.any((b == 0) & (p <= 0)):
            raise ParameterDomainError(
                "order must be > 0 when inverse_rate is 0 (density not normalizable)"
            )


def gig_log_kernel(x, params: GigParams):
    """Unnormalized log-density of the GIG kernel at x > 0."""
    x = np.asarray(x, dtype=float)
    return (params.order - 1.0) * np.log(x) - 0.5 * (
        params.linear_rate * x + params.inverse_rate / x
    )


def _gig_log_standard(p, omega, rng):
    """Draw T = log Z, Z following the standardized kernel
    z^(p-1) exp(-omega (z + 1/z)/2), elementwise over arrays p >= 0, omega > 0.

    In t = log z the density exp(p*t - omega*cosh t) is strictly log-concave
    for every order, so a single rejection scheme covers all parameters.
    Centered at the mode with kappa = sqrt(p^2 + omega^2) = omega*cosh(t_mode)
    and omega*sinh(t_mode) = p, the log-density is

        psi(t) = p*t + kappa - ((kappa+p) e^t + (kappa-p) e^-t) / 2

    which never touches cosh of a large argument directly.  Envelope: flat
    top on the interval where psi >= -1, tangent exponential tails beyond.
    """
    kappa = np.hypot(p, omega)
    kp = kappa + p
    # kappa - p = omega^2/(kappa+p); floored so that 0*inf never appears
    km = np.maximum(omega * (omega / kp), 1e-320)

    def psi(t, k=slice(None)):
        with np.errstate(over="ignore"):
            return p[k] * t + kappa[k] - 0.5 * (
                kp[k] * np.exp(t) + km[k] * np.exp(-t)
            )

    def dpsi(t, k=slice(None)):
        with np.errstate(over="ignore"):
            return p[k] - 0.5 * (kp[k] * np.exp(t) - km[k] * np.exp(-t))

    # |psi''| >= kappa on t >= 0, so psi(sqrt(2/kappa)) <= -1 already; the
    # cap covers parameter corners where the quadratic guess overshoots the
    # representable range.
    guess = np.minimum(np.sqrt(2.0 / kappa), _T_CAP)
    t_r = _bisect_to_level(psi, np.zeros_like(guess), guess)

    hi = guess.copy()
    for _ in range(100):
        need = psi(-hi) > -1.0
        if not np.any(need):
            break
        hi[need] = np.minimum(hi[need] * 2.0, _T_CAP)
    t_l = -_bisect_to_level(lambda s, k=slice(None): psi(-s, k),
                            np.zeros_like(hi), hi)

    lp_r = psi(t_r)
    lp_l = psi(t_l)
    slope_r = dpsi(t_r)
    slope_l = dpsi(t_l)
    area_mid = t_r - t_l
    with np.errstate(invalid="ignore"):
        area_r = np.where(np.isfinite(slope_r), np.exp(lp_r) / (-slope_r), 0.0)
        area_l = np.where(np.isfinite(slope_l), np.exp(lp_l) / slope_l, 0.0)
    total = area_mid + area_r + area_l

    out = np.empty_like(p)
    pending = np.arange(p.size)
    while pending.size:
        k = pending
        u = rng.random(k.size) * total[k]
        v = rng.random(k.size)
        in_mid = u <= area_mid[k]
        in_right = (~in_mid) & (u <= area_mid[k] + area_r[k])
        t = np.where(
            in_mid,
            t_l[k] + u,
            np.where(
                in_right,
                t_r[k] - np.log(v) / (-slope_r[k]),
                t_l[k] + np.log(v) / slope_l[k],
            ),
        )
        log_env = np.where(
            in_mid,
            0.0,
            np.where(
                in_right,
                lp_r[k] + slope_r[k] * (t - t_r[k]),
                lp_l[k] + slope_l[k] * (t - t_l[k]),
            ),
        )
        accept = np.log(rng.random(k.size)) <= psi(t, k) - log_env
        out[k[accept]] = t[accept]
        pending = k[~accept]

    # recenter; arcsinh(p/omega) needs the log form once the ratio overflows
    with np.errstate(over="ignore", divide="ignore"):
        ratio = p / omega
        t_mode = np.where(
            ratio < 1e15,
            np.arcsinh(np.minimum(ratio, 1e15)),
            np.log(2.0) + np.log(np.maximum(p, 1e-320)) - np.log(omega),
        )
    return t_mode + out


def _bisect_to_level(f, lo, hi, iters=40):
    """Vectorized bisection for the point where the decreasing f crosses -1
    on [lo, hi].  Accuracy only tunes the envelope's acceptance rate, never
    its validity (tangents are taken at the point actually found)."""
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = f(mid) > -1.0
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def sample_gig(params: GigParams, rng: np.random.Generator, size=None):
    """Draw from the GIG law defined by ``params``.

    Fields of ``params`` may be scalars or broadcastable arrays; ``size`` is
    only honored for all-scalar parameters.  Returns a scalar for scalar
    input without ``size``, else a 1-D ndarray.
    """
    params.validate()
    p, a, b = np.broadcast_arrays(
        np.asarray(params.order, dtype=float),
        np.asarray(params.linear_rate, dtype=float),
        np.asarray(params.inverse_rate, dtype=float),
    )
    scalar = p.ndim == 0 and size is None
    if p.ndim == 0:
        n = 1 if size is None else int(size)
        p, a, b = (np.full(n, float(v)) for v in (p, a, b))
    else:
        p, a, b = p.ravel().copy(), a.ravel().copy(), b.ravel().copy()

    out = np.empty_like(p)
    gamma_case = b == 0.0
    if np.any(gamma_case):
        out[gamma_case] = rng.gamma(p[gamma_case], 2.0 / a[gamma_case])
    gig = ~gamma_case
    if np.any(gig):
        sa, sb = np.sqrt(a[gig]), np.sqrt(b[gig])
        omega = np.maximum(sa * sb, 1e-300)
        t = _gig_log_standard(np.abs(p[gig]), omega, rng)
        t = np.where(p[gig] < 0, -t, t)
        out[gig] = np.exp(np.log(sb) - np.log(sa) + t)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Chinese-restaurant-table draws and the Stirling pmf
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrtDraw:
    count: int
    shape: float
    tables: int


def _lgr(z, alpha):
    """gammaln(z) - gammaln(z + alpha), stable for arbitrarily large z."""
    if z <= 1e10:
        return gammaln(z) - gammaln(z + alpha)
    # two-term asymptotic; relative error O(alpha^3 / z^2)
    return -alpha * np.log(z) - alpha * (alpha - 1.0) / (2.0 * z)


def _crt_tables_jump(count, shape, rng):
    """Exact table count for one huge ``count`` without the O(count) sum.

    Customers a+1..b open no new table with probability
    Gamma(b)Gamma(shape+a) / (Gamma(a)Gamma(shape+b)); the index of the next
    table is drawn by inverting that survival function with bisection.
    Identical in law to the Bernoulli-sum representation.
    """
    def log_no_table(a, b):
        return _lgr(b, shape) - _lgr(a, shape)

    tables = 1  # the first customer always opens a table
    pos = 1.0
    count = float(count)
    while pos < count:
        log_u = np.log(rng.random())
        if log_no_table(pos, count) >= log_u:
            break
        lo, hi = pos, count
        while hi - lo > 0.5:
            mid = np.floor(0.5 * (lo + hi))
            if mid <= lo:
                break
            if log_no_table(pos, mid) <= log_u:
                hi = mid
            else:
                lo = mid
        tables += 1
        pos = hi
    return tables


def sample_crt(count, shape: float, rng: np.random.Generator) -> CrtDraw:
    """Chinese-restaurant-table draw: tables = sum of Ber(shape/(j-1+shape))
    over j = 1..count, matching the pmf proportional to |s(count, t)| shape^t.
    """
    if count < 0 or count != int(count):
        raise ParameterDomainError("count must be a nonnegative integer")
    if not (np.isfinite(shape) and shape > 0):
        raise ParameterDomainError("shape must be finite and > 0")
    count = int(count)
    if count == 0:
        return CrtDraw(0, shape, 0)
    if count > CRT_BERNOULLI_LIMIT:
        return CrtDraw(count, shape, _crt_tables_jump(count, shape, rng))
    j = np.arange(count, dtype=float)
    tables = int(np.count_nonzero(rng.random(count) * (shape + j) < shape))
    return CrtDraw(count, shape, tables)


def build_crt_cache(counts):
    """Precomputed flat Bernoulli index for repeated table-count draws over a
    fixed count vector (one chain's data)."""
    counts = np.asarray(counts)
    small = (counts > 0) & (counts <= CRT_BERNOULLI_LIMIT)
    small_idx = np.nonzero(small)[0]
    big_idx = np.nonzero(counts > CRT_BERNOULLI_LIMIT)[0]
    small_counts = counts[small_idx].astype(np.int64)
    if small_idx.size:
        j_flat = np.concatenate([np.arange(c, dtype=float) for c in small_counts])
        starts = np.concatenate(([0], np.cumsum(small_counts)[:-1])).astype(np.intp)
    else:
        j_flat = np.empty(0)
        starts = np.empty(0, dtype=np.intp)
    return j_flat, starts, small_idx, big_idx


def crt_table_counts(counts, shape, rng, cache=None):
    """Vectorized CRT table counts for an array of counts (one sweep's nu)."""
    counts = np.asarray(counts)
    if cache is None:
        cache = build_crt_cache(counts)
    j_flat, starts, small_idx, big_idx = cache
    tables = np.zeros(counts.shape[0], dtype=float)
    if j_flat.size:
        hits = rng.random(j_flat.size) * (shape + j_flat) < shape
        tables[small_idx] = np.add.reduceat(hits, starts)
    for i in big_idx:
        tables[i] = _crt_tables_jump(counts[i], shape, rng)
    return tables


def log_stirling1_row(n: int) -> np.ndarray:
    """log |s(n, k)| for k = 0..n, unsigned Stirling numbers of the first
    kind, by the recursion |s(m,k)| = (m-1)|s(m-1,k)| + |s(m-1,k-1)| kept
    entirely in log space.  Zero entries come out as -inf.
    """
    n = int(n)
    row = np.full(n + 1, -np.inf)
    row[0] = 0.0
    for m in range(1, n + 1):
        with np.errstate(divide="ignore", invalid="ignore"):
            shifted = row[0:m].copy()                    # |s(m-1, k-1)|
            scaled = np.log(m - 1.0) + row[1 : m + 1]    # (m-1)|s(m-1, k)|
            row[1 : m + 1] = np.logaddexp(scaled, shifted)
        row[0] = -np.inf
    return row


def crt_exact_pmf(count: int, shape: float, count_cap: int = STIRLING_COUNT_CAP):
    """Normalized pmf of the table count over t = 1..count, proportional to
    |s(count, t)| shape^t; sums to 1 to within accumulation error."""
    if count < 1:
        raise ParameterDomainError("count must be >= 1")
    if count > count_cap:
        raise ResourceLimitError(
            f"count {count} exceeds the Stirling table cap {count_cap}"
        )
    if not (np.isfinite(shape) and shape > 0):
        raise ParameterDomainError("shape must be finite and > 0")
    log_s = log_stirling1_row(int(count))[1:]
    logits = log_s + np.arange(1, int(count) + 1) * np.log(shape)
    return np.exp(logits - logsumexp(logits))


# ---------------------------------------------------------------------------
# Small helpers used by the samplers
# ---------------------------------------------------------------------------

def sample_truncated_rw_proposal(current, step_sd, lower, upper, rng):
    """min(upper, max(lower, Normal(current, step_sd^2))): the clamped
    random-walk proposal; point masses at the bounds are intended."""
    if not lower < upper:
        raise ParameterDomainError("lower must be < upper")
    if not step_sd > 0:
        raise ParameterDomainError("step_sd must be > 0")
    return float(np.clip(rng.normal(current, step_sd), lower, upper))


def safe_poisson(rng, lam):
    """Poisson draw tolerating arbitrarily large rates.

    Above 1e15 numpy's sampler is unavailable; the rounded normal there is
    exact to negligible total variation.  Returns float64 because such
    counts exceed int64.
    """
    lam = np.asarray(lam, dtype=float)
    out = np.empty(lam.shape, dtype=float)
    big = lam > _POISSON_NORMAL_SWITCH
    if np.any(~big):
        out[~big] = rng.poisson(lam[~big])
    if np.any(big):
        out[big] = np.rint(rng.normal(lam[big], np.sqrt(lam[big])))
    return out
