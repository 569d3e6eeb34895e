"""
Diophantine hits for rational and irrational scales
===================================================

For rational t = p/r the fractional parts of n t cycle through r values,
so exact hits n t = m + lambda recur. For irrational t the continued
fraction drives the Chebyshev hits n t = m + beta + gamma, |gamma| <= 3/n.
"""

from fractions import Fraction

from qexptheta import best_hits, cf_expansion, chebyshev_hits, fractional_parts, parse_scale, rational_hits, render

t = parse_scale("2/7")
print("S(2/7) =", [str(x) for x in fractional_parts(t)])
print("hits for lambda=3/7:", [(h.n, h.m) for h in rational_hits(t, Fraction(3, 7), 6)])

sqrt2 = parse_scale("sqrt:2")
cf = cf_expansion(sqrt2, 8)
print("sqrt 2 partial quotients:", cf.partial_quotients)
print("convergents:", [str(c) for c in cf.convergents])

hits = chebyshev_hits(sqrt2, Fraction(3, 10), 5000)
print(f"{len(hits)} hits with n <= 5000 for beta = 3/10")
# the best hits minimise |gamma| * n
for h in best_hits(hits, 8):
    print(f"n={h.n:5d} m={h.m:5d} gamma={render(h.gamma, 8)} n*gamma={float(h.gamma * h.n):+.3f}")
