"""Ignoring an observation can be the safest thing to do.

A decision maker must predict a binary outcome U from a binary signal V.
She knows the marginal P(U=1) = 9/10 but nothing about the dependence,
so her credal set is every joint with that marginal. Conditioning the
whole set on V = v yields the useless interval [0, 1] for P(U=1|V=v):
every observation makes things worse (dilation). The working distribution
that simply ignores V and predicts the marginal is not "true", but it is
safe for a precisely describable family of prediction tasks - and this
script shows which ones.
"""

from safeprob.demos import dilation_extension_scenario, dilation_scenario
from safeprob.safety import (
    LEFT_AVERAGE,
    NOTION_NOTATION,
    RIGHT_ANGLE,
    SafetyQuery,
    check_safety,
    hierarchy_report,
)

scn = dilation_scenario()
print(__doc__)

print("Credal vertices (every extreme joint with P(U=1) = 9/10):")
for p in scn["credal"].vertex_list():
    print("  ", {z: str(w) for z, w in p.weights.items() if w})

print("\nVerdicts for the ignoring distribution, whole hierarchy:")
report = hierarchy_report(scn["U"], scn["V"], scn["ptilde"], scn["credal"])
for name, verdict in report.items():
    print(f"  {NOTION_NOTATION.get(name, name):12s} -> "
          f"{'holds' if verdict.holds else 'FAILS'}")
print("""
Reading: the conditional itself is wrong (validity fails: some member of
the credal set disagrees with it), but marginal validity, calibration and
every average-sense notion hold, so expectations of any function of U
computed from the working distribution are exactly right.
""")

print("Three-valued twist: add an outcome with unknown probability.")
ext = dilation_extension_scenario()
indicator = check_safety(
    SafetyQuery(ext["indicator"], LEFT_AVERAGE, ext["V"], RIGHT_ANGLE),
    ext["ptilde"], ext["credal"],
)
mean = check_safety(
    SafetyQuery(ext["U"], LEFT_AVERAGE, ext["V"], RIGHT_ANGLE),
    ext["ptilde"], ext["credal"],
)
print(f"  indicator of the known-marginal value stays unbiased: {indicator.holds}")
print(f"  the full mean is unbiased: {mean.holds}")
ce = mean.counterexample
print("  witness vertex (puts no mass on outcome 2):",
      {z: str(w) for z, w in ce.vertex.weights.items() if w})
print(f"  actual mean {ce.lhs} vs believed mean {ce.rhs}")
