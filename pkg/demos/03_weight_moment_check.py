"""
Monte-Carlo check of the sample-weight moments
==============================================

Feed the student-t weighting machinery pure standard-normal gradients
(first moment pinned at 0, second at 1) and compare the observed moments
of the squared deviation D, the sample weight w, and the effective decay
beta_w against their analytic targets.
"""

from tadam.verify import mc_moment_check

report = mc_moment_check(d=10, nu=10.0, beta1=0.9, n_steps=100_000, seed=0)

print(f"d={report.d}, nu={report.nu}, beta1={report.beta1}, "
      f"{report.n_steps} draws\n")
for claim in report.claims():
    lo, hi = claim["interval"]
    window = f"[{lo if lo is not None else '-inf'}, {hi}]"
    print(f"{claim['verdict']:<7} {claim['claim']}")
    print(f"        observed {claim['statistic']:.6f}, allowed {window}\n")

print("The first two moments land where the algebra says they should.")
print("The mean decay sits a hair ABOVE beta1: the decay is the ratio")
print("W/(W + w), convex in w, so averaging over the weight's scatter")
print("pushes the mean up (Jensen), and the one-sided comparison fails")
print("by ~2e-4 at this sample size.")
