"""
Theta main term for a rational scale
====================================

Along exact hits n t = m + lambda the scaled q-exponential
(q;q)_inf q^(m^2/2 + m lambda) u^-m (-q^(1/2 - n t) u; q)_inf
tends to theta(u^-1 q^lambda; q). The residual r(n) sits under an
explicit bound once m is large, and the proof splits it as r1 + r2.
"""

from fractions import Fraction

from qexptheta import M0, PrecisionContext, Scenario, laplace_decomposition, rational_hits, rational_table, render

ctx = PrecisionContext(512)
s = Scenario(Fraction(1, 2), 1, "3/2", Fraction(1, 2))

print(f"{'n':>3} {'m':>3} {'|r(n)|':>14} {'bound':>14} ratio")
for r in rational_table(s, 10, ctx):
    note = "" if r.m >= M0 else "  (m below threshold)"
    print(f"{r.n:3d} {r.m:3d} {render(abs(r.r_n), 6):>14} {render(r.bound, 6):>14} {float(r.ratio):.4f}{note}")

# piecewise bounds from the split at k = m
hit = rational_hits(s.scale, s.target, 8)[-1]
d = laplace_decomposition(s, hit, PrecisionContext(256))
print(f"n={d.n} m={d.m}")
print("  |r1| =", render(abs(d.r1_n), 6), "bound", render(d.r1_bound, 6))
print("  |r2| =", render(abs(d.r2_n), 6), "bound", render(d.r2_bound, 6))
print("  r1 + r2 vs r(n):", render(d.additivity_rel_diff, 3))
