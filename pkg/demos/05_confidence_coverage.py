"""Confidence distributions with exact frequentist coverage.

For a scalar family whose statistic CDF decreases in the parameter, the
distribution with CDF 1 - F_theta(v) is a data-dependent "posterior"
needing no prior, and its central credible intervals are exact
confidence intervals. The demonstration builds the normal-location and
exponential-mean families, extracts intervals, and verifies coverage by
seeded Monte Carlo at several true parameters.
"""

from safeprob.confidence import (
    confidence_cdf,
    coverage_estimate,
    credible_interval,
    exponential_mean,
    normal_location,
)

print(__doc__)

normal = normal_location(10)
interval = credible_interval(normal, v=0.42, a=0.025, b=0.975)
print(f"normal location, n=10, observed mean 0.42:")
print(f"  95% credible interval: [{interval.lower:.6f}, {interval.upper:.6f}]")
print(f"  confidence level at the true value 0.7: "
      f"{confidence_cdf(normal, 0.42, 0.7):.4f}")

expmean = exponential_mean(5)
interval = credible_interval(expmean, v=5.0, a=0.05, b=0.95)
print(f"\nexponential mean, n=5, observed sum 5.0:")
print(f"  90% credible interval: [{interval.lower:.6f}, {interval.upper:.6f}]")

print("\nMonte Carlo coverage, 100000 draws each (target = b - a):")
seed = 4200
for family, thetas in ((normal, (-1.0, 0.7)), (expmean, (0.8, 2.0))):
    for theta0 in thetas:
        seed += 1
        out = coverage_estimate(family, theta0, a=0.025, b=0.975,
                                samples=100_000, seed=seed)
        print(f"  {family.name:24s} theta0={theta0:5.2f}: "
              f"coverage {out['coverage']:.4f} +/- {out['stderr']:.4f}")

print("""
Coverage matches the nominal level to Monte Carlo accuracy because the
confidence level of the true parameter is exactly uniform - the same
fact that makes these distributions safe for interval statements while
remaining unsafe for other bets (see the gamble demonstration).
""")
