"""Classify a spread of operators into the shape taxonomy.

Three EQ shapes (bell, trapezoidal, triangular; the latter two rounded or
sharp) crossed with two BM kinds (regular, irregular) give the 6-class
taxonomy, 10 with corner variants. This sweeps the 36 interior grid
candidates plus the three reference operators.
"""

from collections import Counter

from graymode import CHOSEN, STANDARD, UNIFORM, enumerate_grid, family_of, taxonomy

print("reference operators:")
for name, op in (("uniform", UNIFORM), ("standard", STANDARD), ("chosen", CHOSEN)):
    print(f"  {name:9s} -> {taxonomy(op).label}")

print("\n36 interior candidates (weights from 0.1 to 0.8, step 0.1):")
values = [round(0.1 * i, 1) for i in range(1, 9)]
tallies = Counter()
for cand in enumerate_grid(values, interior_only=True):
    op = cand.operator()
    label = taxonomy(op)
    tallies[label.label] += 1
    print(f"  ({op.lambda_r:.1f}, {op.lambda_g:.1f}, {op.lambda_b:.1f})  "
          f"K = {family_of(op):7.3f}  {label.label}")

print("\nclass totals:")
for label, count in tallies.most_common():
    print(f"  {label:28s} {count}")
