"""Gibbs samplers for the three models (IG, EH, PG).

Every full conditional follows the conjugate algebra of the hierarchical
model y_i ~ Po(eta_i lambda_i), lambda_i ~ Ga(alpha, beta/u_i), u_i ~ pi(u_i):

* lambda_i | .  ~ Ga(y_i + alpha, eta_i + beta/u_i)
* beta | .      ~ Ga(m alpha + a_beta, sum lambda_i/u_i + b_beta)
* alpha         via the collapsed negative-binomial representation: latent
                 table counts nu_i (CRT), then Ga(sum nu_i + a_alpha,
                 sum log(1 + eta_i u_i / beta) + b_alpha)
* IG:  u_i | .  ~ InvGamma(gamma + alpha, gamma + lambda_i beta), and a
       clamped random-walk MH step for gamma on [eps1, eps2] that, by
       design, omits the proposal-asymmetry correction
* EH:  w_i ~ Ga(1 + gamma, 1 + log(1 + u_i))  (v_i marginalized out),
       v_i ~ Ga(1 + w_i, 1 + u_i),
       u_i ~ GIG(order 1 - alpha, linear 2 v_i, inverse 2 beta lambda_i),
       gamma ~ Ga(a_gamma + m, b_gamma + sum log(1 + log(1 + u_i)))
* delta (regression offsets) via an independence MH step whose proposal is
  the Laplace approximation of the Poisson log-likelihood combined with the
  normal prior.

Sweep order: (nu, alpha) -> lambda -> beta -> local block -> gamma -> delta.
The alpha step marginalizes lambda out, and the gamma step under EH
marginalizes (v, w) out, so each marginalized component is refreshed from
its exact conditional before anything conditions on it again; this is the
partially-collapsed composition that leaves the joint posterior exactly
invariant (verified by the successive-conditional tests).  Within the EH
block the order is w -> v -> u for the same reason.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, cholesky

from .data import CountDataset
from .distributions import build_crt_cache, crt_table_counts, GigParams, sample_gig
from .errors import ChainDivergenceError, ParameterDomainError
from .priors import PriorFamily, log_density_u
from .streams import spawn_stream

__all__ = [
    "HyperPriors",
    "ModelSpec",
    "ChainState",
    "PosteriorDraws",
    "run_chain",
    "update_alpha",
    "update_lambda",
    "update_beta",
    "update_local_ig",
    "update_gamma_ig",
    "update_local_eh",
    "update_gamma_eh",
    "update_delta",
    "log_fgamma_ig",
    "newton_poisson_mode",
]

_FLOOR = 1e-300  # crash insurance for pathological states; unreachable on real data


@dataclass(frozen=True)
class HyperPriors:
    """Hyperprior constants; defaults are unit gammas on the global shape and rate,
    gamma ~ U(0.001, 150) for IG with random-walk sd 1, and N(0, 100)
    regression-coefficient priors."""

    a_alpha: float = 1.0
    b_alpha: float = 1.0
    a_beta: float = 1.0
    b_beta: float = 1.0
    a_gamma: float = 1.0
    b_gamma: float = 1.0
    eps1: float = 0.001
    eps2: float = 150.0
    step_sd: float = 1.0
    delta_prior_mean: np.ndarray | None = None
    delta_prior_var: float = 100.0

    def __post_init__(self):
        for name in ("a_alpha", "b_alpha", "a_beta", "b_beta", "a_gamma",
                     "b_gamma", "step_sd", "delta_prior_var"):
            if not getattr(self, name) > 0:
                raise ParameterDomainError(f"{name} must be > 0")
        if not self.eps1 < self.eps2:
            raise ParameterDomainError("eps1 must be < eps2")


@dataclass(frozen=True)
class ModelSpec:
    family: PriorFamily
    hyper: HyperPriors = field(default_factory=HyperPriors)
    n_draws: int = 3000
    n_burn: int = 500
    seed: int = 0
    store_locals: bool = False
    sample_alpha: bool = True
    sample_beta: bool = True
    sample_gamma: bool = True
    init_alpha: float = 1.0
    init_beta: float = 1.0
    init_gamma: float = 1.0


@dataclass
class ChainState:
    """All latent quantities of one Gibbs sweep."""

    lam: np.ndarray
    u: np.ndarray
    alpha: float
    beta: float
    gamma: float
    nu: np.ndarray
    v: np.ndarray | None = None
    w: np.ndarray | None = None
    delta: np.ndarray | None = None
    eta: np.ndarray | None = None   # effective offsets, offsets*exp(X delta)


def initial_state(data: CountDataset, spec: ModelSpec) -> ChainState:
    """Deterministic, positive, dispersion-free starting point."""
    m = data.n_units
    delta = np.zeros(data.n_covariates) if data.n_covariates else None
    eta = effective_offsets(data, delta)
    return ChainState(
        lam=(data.y + 0.5) / eta,
        u=np.ones(m),
        alpha=spec.init_alpha,
        beta=spec.init_beta,
        gamma=spec.init_gamma,
        nu=np.minimum(data.y, 1).astype(float),
        v=np.ones(m) if spec.family.kind == "EH" else None,
        w=np.ones(m) if spec.family.kind == "EH" else None,
        delta=delta,
        eta=eta,
    )


def effective_offsets(data: CountDataset, delta) -> np.ndarray:
    if data.covariates is None or delta is None:
        return data.offsets.copy()
    return data.offsets * np.exp(data.covariates @ delta)


# ---------------------------------------------------------------------------
# Full-conditional parameter algebra (kept separate so tests can pin formulas)
# ---------------------------------------------------------------------------

def lambda_params(state: ChainState, data: CountDataset):
    return data.y + state.alpha, state.eta + state.beta / state.u


def beta_params(state: ChainState, data: CountDataset, hyper: HyperPriors):
    m = data.n_units
    return m * state.alpha + hyper.a_beta, np.sum(state.lam / state.u) + hyper.b_beta


def alpha_params(nu_sum: float, state: ChainState, data: CountDataset,
                 hyper: HyperPriors):
    rate = np.sum(np.log1p(state.eta * state.u / state.beta)) + hyper.b_alpha
    return nu_sum + hyper.a_alpha, rate


def ig_u_params(state: ChainState, family: PriorFamily):
    g = state.gamma
    shape_offset = 1.0 if family.ig_finite_mean else 0.0
    return g + shape_offset + state.alpha, g + state.lam * state.beta


def eh_w_params(state: ChainState):
    return 1.0 + state.gamma, 1.0 + np.log1p(state.u)


def eh_v_params(state: ChainState):
    return 1.0 + state.w, 1.0 + state.u


def eh_gamma_params(state: ChainState, data: CountDataset, hyper: HyperPriors):
    return (hyper.a_gamma + data.n_units,
            hyper.b_gamma + np.sum(np.log1p(np.log1p(state.u))))


def log_fgamma_ig(gamma: float, u: np.ndarray, family: PriorFamily) -> float:
    """Log full-conditional kernel of the IG hyperparameter (the bounds
    indicator lives in the clamped proposal)."""
    fam = PriorFamily("IG", gamma, family.ig_finite_mean)
    return float(np.sum(log_density_u(fam, u)))


# ---------------------------------------------------------------------------
# Updates
# ---------------------------------------------------------------------------

def update_alpha(state, data, hyper, rng, crt_cache=None):
    """Collapsed dispersion update: redraw the table counts nu_i given the
    current alpha, then alpha from its gamma full conditional."""
    state.nu = crt_table_counts(data.y, state.alpha, rng, cache=crt_cache)
    shape, rate = alpha_params(state.nu.sum(), state, data, hyper)
    state.alpha = rng.gamma(shape, 1.0 / rate)
    return state


def update_lambda(state, data, hyper, rng):
    shape, rate = lambda_params(state, data)
    state.lam = np.maximum(rng.gamma(shape, 1.0 / rate), _FLOOR)
    return state


def update_beta(state, data, hyper, rng):
    shape, rate = beta_params(state, data, hyper)
    state.beta = rng.gamma(shape, 1.0 / rate)
    return state


def update_local_ig(state, data, hyper, rng, family):
    shape, rate = ig_u_params(state, family)
    state.u = rate / rng.gamma(shape, np.ones_like(rate))
    return state


def update_gamma_ig(state, data, hyper, rng, family, proposal: str = "clamp"):
    """One random-walk MH step for the IG hyperparameter on [eps1, eps2].

    The default uses the clamped min(eps2, max(eps1, Z)) proposal with the asymmetry correction deliberately ignored; the clamp's
    point masses at the bounds make the kernel slightly non-invariant there
    (visible as a small positive drift of successive-conditional z-scores
    with the cycle count), which is documented rather than repaired.
    ``proposal="reject"`` is the exactly invariant alternative: same normal
    proposal, but draws outside the bounds are rejected in place, so the
    symmetric-proposal ratio needs no correction.
    """
    cur = state.gamma
    z = rng.normal(cur, hyper.step_sd)
    if proposal == "clamp":
        prop = float(np.clip(z, hyper.eps1, hyper.eps2))
    else:
        if not hyper.eps1 <= z <= hyper.eps2:
            return state, False
        prop = float(z)
    log_ratio = (log_fgamma_ig(prop, state.u, family)
                 - log_fgamma_ig(cur, state.u, family))
    if np.log(rng.random()) <= log_ratio:
        state.gamma = prop
        return state, True
    return state, False


def update_local_eh(state, data, hyper, rng):
    """Partially collapsed EH block: w (v marginalized out), then v | w, then
    u from its GIG full conditional."""
    w_shape, w_rate = eh_w_params(state)
    state.w = rng.gamma(w_shape, 1.0 / w_rate)
    v_shape, v_rate = eh_v_params(state)
    state.v = np.maximum(rng.gamma(v_shape, 1.0 / v_rate), _FLOOR)
    gig = GigParams(order=1.0 - state.alpha,
                    linear_rate=2.0 * state.v,
                    inverse_rate=2.0 * state.beta * state.lam)
    state.u = np.maximum(sample_gig(gig, rng), _FLOOR)
    return state


def update_gamma_eh(state, data, hyper, rng):
    shape, rate = eh_gamma_params(state, data, hyper)
    state.gamma = rng.gamma(shape, 1.0 / rate)
    return state


# ---------------------------------------------------------------------------
# Regression coefficients (independence MH with a Laplace proposal)
# ---------------------------------------------------------------------------

def newton_poisson_mode(y, x, lam, offsets, delta0, tol: float = 1e-8,
                        max_iter: int = 50):
    """Solve sum y_i x_i = sum lam_i a_i exp(x_i'delta) x_i for the
    conditional-likelihood mode.  Returns (delta_hat, hessian, converged);
    inexactness is acceptable because the MH correction repairs it."""
    delta = np.asarray(delta0, dtype=float).copy()
    target = x.T @ y
    hess = None
    for _ in range(max_iter):
        mu = lam * offsets * np.exp(np.clip(x @ delta, -500, 500))
        grad = target - x.T @ mu
        hess = x.T @ (x * mu[:, None])
        if np.max(np.abs(grad)) < tol:
            return delta, hess, True
        try:
            step = cho_solve(cho_factor(hess), grad)
        except LinAlgError:
            return delta, hess, False
        # dampen huge first steps away from a bad start
        nrm = np.max(np.abs(step))
        if nrm > 10.0:
            step *= 10.0 / nrm
        delta = delta + step
    mu = lam * offsets * np.exp(np.clip(x @ delta, -500, 500))
    return delta, x.T @ (x * mu[:, None]), np.max(np.abs(target - x.T @ mu)) < tol


def _mvn_draw(mean, cov, rng):
    return mean + cholesky(cov, lower=True) @ rng.standard_normal(mean.shape[0])


def update_delta(state, data, hyper, rng):
    """Independence MH for the regression coefficients.

    Proposal: N(mu, Sigma) with Sigma = (H + S0^-1)^-1 and
    mu = Sigma (H delta_hat + S0^-1 mu0), H the likelihood curvature at the
    Newton mode.  Acceptance multiplies the Poisson likelihood ratio by
    N(delta_hat | delta_old, H^-1) / N(delta_hat | delta_new, H^-1); the
    normal prior cancels between target and proposal.  A singular curvature
    falls back to a prior-only proposal (flagged in the return value).
    """
    x = data.covariates
    p = x.shape[1]
    mu0 = (np.zeros(p) if hyper.delta_prior_mean is None
           else np.asarray(hyper.delta_prior_mean, dtype=float))
    s0_inv = np.eye(p) / hyper.delta_prior_var

    old = state.delta
    delta_hat, hess, ok = newton_poisson_mode(
        data.y, x, state.lam, data.offsets, old)
    fallback = False
    if ok:
        try:
            prop_cov = np.linalg.inv(hess + s0_inv)
            prop_mean = prop_cov @ (hess @ delta_hat + s0_inv @ mu0)
            new = _mvn_draw(prop_mean, prop_cov, rng)
        except np.linalg.LinAlgError:
            fallback = True
    else:
        fallback = True
    if fallback:
        new = _mvn_draw(mu0, np.linalg.inv(s0_inv), rng)

    def loglik(d):
        lin = x @ d
        return float(data.y @ lin
                     - np.sum(state.lam * data.offsets * np.exp(np.clip(lin, -500, 500))))

    log_ratio = loglik(new) - loglik(old)
    if not fallback:
        r_old = delta_hat - old
        r_new = delta_hat - new
        log_ratio += 0.5 * (r_new @ hess @ r_new - r_old @ hess @ r_old)

    accepted = np.isfinite(log_ratio) and np.log(rng.random()) <= log_ratio
    if accepted:
        state.delta = new
        state.eta = effective_offsets(data, new)
    return state, bool(accepted), fallback


# ---------------------------------------------------------------------------
# The chain driver
# ---------------------------------------------------------------------------

@dataclass
class PosteriorDraws:
    """Post-burn-in samples, column-addressable per parameter."""

    lam: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray | None
    delta: np.ndarray | None
    u: np.ndarray | None
    v: np.ndarray | None
    w: np.ndarray | None
    nu: np.ndarray | None
    family: str
    seed: int
    n_burn: int
    ids: list[str]
    gamma_accept_rate: float | None = None
    delta_accept_rate: float | None = None
    delta_fallbacks: int = 0

    @property
    def n_draws(self) -> int:
        return int(self.lam.shape[0])

    def columns(self):
        """Yield (name, 1-D draw vector) for every stored scalar column."""
        for j, uid in enumerate(self.ids):
            yield f"lambda_{uid}", self.lam[:, j]
        yield "alpha", self.alpha
        yield "beta", self.beta
        if self.gamma is not None:
            yield "gamma", self.gamma
        if self.delta is not None:
            for j in range(self.delta.shape[1]):
                yield f"delta_{j + 1}", self.delta[:, j]
        for name, block in (("u", self.u), ("v", self.v), ("w", self.w),
                            ("nu", self.nu)):
            if block is not None:
                for j, uid in enumerate(self.ids):
                    yield f"{name}_{uid}", block[:, j]

    def summaries(self):
        from .diagnostics import chain_summary
        return {name: chain_summary(col) for name, col in self.columns()}


_CHECKED = ("lam", "u", "alpha", "beta", "gamma")


def run_chain(data: CountDataset, spec: ModelSpec,
              rng: np.random.Generator | None = None) -> PosteriorDraws:
    """Run one Gibbs chain; fully deterministic given (data, spec, seed)."""
    family = spec.family
    if rng is None:
        rng = spawn_stream(spec.seed)
    hyper = spec.hyper
    state = initial_state(data, spec)
    m = data.n_units
    regression = data.n_covariates > 0
    crt_cache = build_crt_cache(data.y)

    n_total = spec.n_burn + spec.n_draws
    lam_draws = np.empty((spec.n_draws, m))
    alpha_draws = np.empty(spec.n_draws)
    beta_draws = np.empty(spec.n_draws)
    gamma_draws = np.empty(spec.n_draws) if family.kind != "PG" else None
    delta_draws = (np.empty((spec.n_draws, data.n_covariates))
                   if regression else None)
    locals_draws = {
        k: np.empty((spec.n_draws, m))
        for k in (("u", "nu") if family.kind == "IG"
                  else ("u", "v", "w", "nu") if family.kind == "EH"
                  else ("nu",))
    } if spec.store_locals else {}

    gamma_acc = 0
    delta_acc = 0
    delta_fb = 0

    for sweep in range(n_total):
        if spec.sample_alpha:
            update_alpha(state, data, hyper, rng, crt_cache)
        update_lambda(state, data, hyper, rng)
        if spec.sample_beta:
            update_beta(state, data, hyper, rng)
        if family.kind == "IG":
            update_local_ig(state, data, hyper, rng, family)
            if spec.sample_gamma:
                _, acc = update_gamma_ig(state, data, hyper, rng, family)
                gamma_acc += acc
        elif family.kind == "EH":
            update_local_eh(state, data, hyper, rng)
            if spec.sample_gamma:
                update_gamma_eh(state, data, hyper, rng)
        if regression:
            _, acc, fb = update_delta(state, data, hyper, rng)
            delta_acc += acc
            delta_fb += fb

        for name in _CHECKED:
            val = getattr(state, name)
            if val is not None and not np.all(np.isfinite(val)):
                raise ChainDivergenceError(sweep, name)

        k = sweep - spec.n_burn
        if k >= 0:
            lam_draws[k] = state.lam
            alpha_draws[k] = state.alpha
            beta_draws[k] = state.beta
            if gamma_draws is not None:
                gamma_draws[k] = state.gamma
            if delta_draws is not None:
                delta_draws[k] = state.delta
            for key, buf in locals_draws.items():
                buf[k] = getattr(state, key)

    return PosteriorDraws(
        lam=lam_draws,
        alpha=alpha_draws,
        beta=beta_draws,
        gamma=gamma_draws,
        delta=delta_draws,
        u=locals_draws.get("u"),
        v=locals_draws.get("v"),
        w=locals_draws.get("w"),
        nu=locals_draws.get("nu"),
        family=family.kind,
        seed=spec.seed,
        n_burn=spec.n_burn,
        ids=list(data.ids),
        gamma_accept_rate=(gamma_acc / n_total
                           if family.kind == "IG" and spec.sample_gamma else None),
        delta_accept_rate=(delta_acc / n_total if regression else None),
        delta_fallbacks=delta_fb,
    )
