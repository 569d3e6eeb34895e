"""
Error rate for an irrational scale
==================================

With t irrational the main term keeps the target beta, so the error e(n)
is governed by how well n t approaches m + beta. The statistic
|e(n)| n / log n stays bounded along the best hits; its size at each row
follows |gamma_n| n and the slope of theta at u^-1 q^beta.
"""

from fractions import Fraction

from qexptheta import PrecisionContext, Scenario, irrational_table, rate_constant_estimate, render

ctx = PrecisionContext(256)

for u in [(1, 1), 1]:
    s = Scenario(Fraction(1, 2), u, "sqrt:2", Fraction(3, 10))
    reports = irrational_table(s, 5000, 8, ctx)
    print(f"u={u}")
    for r in reports:
        print(f"  n={r.n:5d} n*gamma={float(r.gamma_n * r.n):+.3f} |e|={render(abs(r.e_n), 6)} rate={render(r.rate_stat, 6)}")
    for n_max in (2500, 5000):
        est = rate_constant_estimate(irrational_table(s, n_max, 8, ctx))
        print(f"  sup rate over n <= {n_max}: {render(est.value, 6)} at n={est.n}")

# with beta = 0 and u = 1 theta is stationary at z = 1 and e(n) shrinks like gamma^2
s = Scenario(Fraction(1, 2), 1, "sqrt:2", 0)
print("beta=0, u=1:", [render(r.rate_stat, 3) for r in irrational_table(s, 5000, 8, ctx)])
