"""An inference the confidence distribution is NOT safe for.

The same distribution that delivers exact interval coverage misleads a
gambler who accepts a bet on the parameter's sign whenever her
"posterior" favours it. With a true mean of -0.2 and ten observations,
the rule accepts whenever the sample mean is positive; she believes the
bet has negative expected loss, but the actual expected loss is
1 - Phi(0.2 * sqrt(10)), about 0.26. Safety for intervals does not
transfer to arbitrary functions of the parameter.
"""

from safeprob.decisions import gamble_demo

print(__doc__)

for theta_bar in (-0.2, -0.5, -1.0):
    out = gamble_demo(theta_bar, n=10, samples=500_000, seed=2)
    print(f"true parameter {theta_bar:5.2f}: "
          f"actual loss {out['actual_expected_loss']:.4f} "
          f"(MC {out['actual_expected_loss_mc']:.4f}), "
          f"believed {out['believed_expected_loss']:+.4f}")

print("""
The believed number is what the gambler computes from her own
distribution; the actual number is the frequentist expectation under the
true parameter. They disagree in sign: the inference is unsafe, exactly
as the average-conditioner safety check predicts.
""")
