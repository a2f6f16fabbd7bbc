import numpy as np
import pytest
from scipy.special import kve

from countshrink.distributions import GigParams
from countshrink.errors import ParameterDomainError
from countshrink.oracle import (
    BiasCurve,
    bias_curve,
    gig_moment_quadrature,
    mcmc_vs_oracle,
    posterior_mean_quadrature,
    stabilized_bias,
)
from countshrink.priors import GlobalParams, PriorFamily

G11 = GlobalParams(1.0, 1.0)


class TestPosteriorMean:
    def test_pg_closed_form(self):
        assert posterior_mean_quadrature(PriorFamily("PG"), G11, 0) == 0.5
        assert posterior_mean_quadrature(PriorFamily("PG"), G11, 3) == 2.0

    def test_offset_enters_pg(self):
        assert posterior_mean_quadrature(PriorFamily("PG"), G11, 4, eta=3.0) \
            == pytest.approx(5.0 / 4.0)

    def test_ig_bias_approaches_minus_gamma(self):
        y, bias = stabilized_bias(PriorFamily("IG", 0.5), G11)
        assert y <= 10_000
        assert abs(bias - (-0.5)) < 0.02

    def test_eh_absolute_bias_strictly_decreasing(self):
        vals = [abs(posterior_mean_quadrature(PriorFamily("EH", 1.0), G11, y) - y)
                for y in (100, 1000, 10_000)]
        assert vals[0] > vals[1] > vals[2]
        assert vals[2] < 0.5

    def test_quadrature_invariant_to_doubled_limit(self):
        for fam in (PriorFamily("IG", 0.5), PriorFamily("EH", 1.0)):
            a = posterior_mean_quadrature(fam, G11, 500, limit=200)
            b = posterior_mean_quadrature(fam, G11, 500, limit=400)
            assert abs(a - b) / a < 1e-6

    @pytest.mark.parametrize("fam", [PriorFamily("IG", 0.7),
                                     PriorFamily("EH", 1.0),
                                     PriorFamily("PG")])
    def test_shrinkage_factor_bound(self, fam):
        g = GlobalParams(1.3, 0.9)
        for y in (0, 1, 7, 100, 4096):
            lam = posterior_mean_quadrature(fam, g, y)
            assert 0.0 < lam < g.alpha + y

    def test_monotone_in_count(self):
        for fam in (PriorFamily("IG", 1.0), PriorFamily("EH", 1.0)):
            means = [posterior_mean_quadrature(fam, G11, y) for y in range(101)]
            diffs = np.diff(means)
            assert np.all(diffs >= 0), (
                f"posterior mean not monotone for {fam.kind}: "
                f"first violation at y={int(np.argmin(diffs))}"
            )

    def test_domain_checks(self):
        with pytest.raises(ParameterDomainError):
            posterior_mean_quadrature(PriorFamily("EH", 1.0), G11, -1)
        with pytest.raises(ParameterDomainError):
            posterior_mean_quadrature(PriorFamily("EH", 1.0), G11, 1, eta=0.0)


class TestBiasCurve:
    def test_ig_gamma_one_tends_to_minus_one(self):
        # 1 + xi with xi = -2
        curve = bias_curve(PriorFamily("IG", 1.0), G11, [512, 1024, 2048, 4096])
        assert abs(curve.bias[-1] - (-1.0)) < 0.01

    def test_fixed_u_relative_loss_does_not_vanish(self):
        # PG == fixed u = 1: |lam - y|/y -> beta/(beta+u) = 1/2
        curve = bias_curve(PriorFamily("PG"), G11, [100, 10_000])
        assert curve.relative[-1] > 0.49

    def test_eh_weak_tail_robustness(self):
        curve = bias_curve(PriorFamily("EH", 1.0), G11, [10_000])
        assert curve.relative[0] < 1e-4

    def test_validation(self):
        with pytest.raises(ParameterDomainError):
            BiasCurve(np.array([3, 2, 1]), np.zeros(3), np.zeros(3))
        with pytest.raises(ParameterDomainError):
            bias_curve(PriorFamily("PG"), G11, [])


class TestGigMomentOracle:
    @pytest.mark.parametrize("p,a,b", [(0.5, 1.0, 2.0), (-1.5, 0.1, 10.0),
                                       (3.0, 10.0, 0.1), (0.0, 2.0, 4.0)])
    def test_matches_bessel_closed_form(self, p, a, b):
        # E[X^k] = (b/a)^(k/2) K_{p+k}(w)/K_p(w); exp-scaled Bessel ratios
        w = np.sqrt(a * b)
        for k in (1.0, 2.0, -1.0):
            closed = (b / a) ** (k / 2) * kve(p + k, w) / kve(p, w)
            assert gig_moment_quadrature(GigParams(p, a, b), k) == pytest.approx(
                closed, rel=1e-8)


class TestMcmcVsOracle:
    def test_pg_conjugate(self):
        r = mcmc_vs_oracle(PriorFamily("PG"), G11, 3, n_draws=8000, n_burn=1000,
                           seed=1)
        assert r.quadrature == 2.0
        assert abs(r.z) < 3.0

    def test_ig(self):
        r = mcmc_vs_oracle(PriorFamily("IG", 1.0), G11, 10, n_draws=8000,
                           n_burn=1000, seed=2)
        assert abs(r.z) < 3.0

    def test_eh(self):
        r = mcmc_vs_oracle(PriorFamily("EH", 1.0), G11, 50, n_draws=8000,
                           n_burn=1000, seed=3)
        assert abs(r.z) < 3.0
