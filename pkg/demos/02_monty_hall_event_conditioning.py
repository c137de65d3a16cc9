"""The Monty Hall sanity check, mechanically.

The contestant picks door 1 and the host opens a goat door. Observing
"the car is behind door 1 or 2" is an event, not a random variable, and
renormalising the prior onto that event (naive conditioning) is only
sound when the observable events partition the outcomes. Here they
overlap at door 1, so the naive 50/50 answer can be rejected before any
modelling of the host: it is unsafe under every notion checked.
"""

from safeprob.demos import monty_events, monty_partition_control
from safeprob.updates import build_event_scenario, partition_check, rule_completion
from safeprob.safety import hierarchy_report, NOTION_NOTATION

print(__doc__)

ev = monty_events()
built = build_event_scenario(ev)
print("Underlying outcome space (car position, observed set):")
print("  ", list(built["space"].atoms))
print("Naive rule rows:")
for label, row in built["naive"].rows.items():
    print(f"  observed {label}: ", {str(k[0]): str(p) for k, p in row.items() if p})

out = partition_check(ev)
print(f"\nObservable sets form a partition: {out['is_partition']}")
print(f"Naive conditioning valid: {out['verdict'].holds}")
ce = out["verdict"].counterexample
print("  counterexample host strategy:",
      {z: str(w) for z, w in ce.vertex.weights.items() if w})

control = partition_check(monty_partition_control())
print(f"\nControl with a genuine partition {{1}},{{2,3}}: "
      f"partition={control['is_partition']}, valid={control['verdict'].holds}")

print("\nFull hierarchy for the naive joint over the two host strategies:")
joint = rule_completion(built["naive"], built["space"])
report = hierarchy_report(built["target"], built["conditioner"], joint, built["credal"])
for name, verdict in report.items():
    print(f"  {NOTION_NOTATION.get(name, name):12s} -> "
          f"{'holds' if verdict.holds else 'FAILS'}")
print("""
Only the weak range guarantee survives (both host strategies give the
car's door number the same mean); everything with real content fails.
""")
