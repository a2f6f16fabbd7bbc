"""Sampler-vs-oracle and sweep-invariance spot checks.

Every Gibbs update has an MCMC-free counterpart here: the posterior-mean
quadrature for single units, and the successive-conditional (Geweke) joint
test for whole sweeps.
"""
from countshrink import GlobalParams, PriorFamily
from countshrink.geweke import geweke_test
from countshrink.oracle import mcmc_vs_oracle

g = GlobalParams(1.0, 1.0)
print("single-unit posterior means, chain vs quadrature:")
for fam, y in ((PriorFamily("PG"), 3), (PriorFamily("IG", 1.0), 10),
               (PriorFamily("EH", 1.0), 50)):
    r = mcmc_vs_oracle(fam, g, y, n_draws=6000, n_burn=800, seed=5)
    print(f"  {r.family:3s} y={r.y:3d}: chain {r.mcmc_mean:8.4f}  "
          f"quadrature {r.quadrature:8.4f}  z = {r.z:+.2f}")

print("\njoint invariance of one full sweep (m=5, 30k cycles):")
for kind in ("PG", "IG", "EH"):
    res = geweke_test(PriorFamily(kind), m=5, n_cycles=30_000, seed=1)
    print(f"  {kind}: max |z| over {len(res.names)} functionals = {res.max_abs_z:.2f}")
