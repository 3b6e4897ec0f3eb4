"""Operator families: one parameter K names the family, one weight the member.

K = lambda_g^2 / (lambda_r * lambda_b). The uniform operator is the
lambda_b = 1/3 member of K = 1; the NTSC standard operator is the
lambda_b = 0.114 member of K = 10.109. Given K and one weight, the other
two follow from a quadratic; fixing green is only feasible above a
K threshold.
"""

from graymode import (
    CHOSEN,
    STANDARD,
    UNIFORM,
    case_study_grid,
    enumerate_grid,
    family_of,
    member_from_blue,
    member_from_green,
)
from graymode.families import FamilyIncompatibleError

for name, op in (("uniform", UNIFORM), ("standard", STANDARD), ("chosen", CHOSEN)):
    print(f"{name:9s} weights = ({op.lambda_r:.3f}, {op.lambda_g:.3f}, "
          f"{op.lambda_b:.3f})  K = {family_of(op):.3f}")

print("\nmembers of the standard family (K = 10.109) as lambda_b varies:")
for lb in (0.05, 0.114, 0.3, 0.6):
    op = member_from_blue(10.109, lb)
    print(f"  lambda_b = {lb:<5} -> ({op.lambda_r:.4f}, {op.lambda_g:.4f}, "
          f"{op.lambda_b:.4f})")

print("\nfixing green at 0.587 needs K >= (2*0.587/0.413)^2 ~ 8.08:")
for k in (6.5, 8.5, 10.5):
    try:
        op = member_from_green(k, 0.587)
        print(f"  K = {k:<5} -> ({op.lambda_r:.4f}, 0.587, {op.lambda_b:.4f})")
    except FamilyIncompatibleError as exc:
        print(f"  K = {k:<5} -> infeasible ({exc})")

print("\nthe 17-configuration case-study grid:")
for spec, op in case_study_grid():
    print(f"  {spec.name:15s} ({op.lambda_r:.4f}, {op.lambda_g:.4f}, "
          f"{op.lambda_b:.4f})")

values = [round(0.1 * i, 1) for i in range(11)]
print(f"\ndiscrete candidates at step 0.1 over [0, 1]: "
      f"{len(enumerate_grid(values))} (66 with degenerate triples)")
interior = [round(0.1 * i, 1) for i in range(1, 9)]
print(f"interior candidates over [0.1, 0.8]:          "
      f"{len(enumerate_grid(interior, interior_only=True))}")
