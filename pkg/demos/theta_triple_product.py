"""
Jacobi theta function two ways
==============================

The bilateral sum of q^(k^2/2) z^k next to the triple product
(q, -q^(1/2) z, -q^(1/2)/z; q)_inf, over a sweep of |z| and q.
"""

import cmath

from qexptheta import PrecisionContext, rel_diff, render, theta_cutoff, theta_product, theta_series

ctx = PrecisionContext(512)

print(f"{'q':>5} {'|z|':>7} {'K':>5} {'theta':>28} rel_diff")
for q in ["0.1", "0.5", "0.9", "0.99"]:
    for r in [0.01, 1.0, 100.0]:
        z = r * cmath.exp(0.7j)
        series = theta_series(z, q, ctx)
        product = theta_product(z, q, ctx)
        # K is the truncation index of the bilateral sum
        K = theta_cutoff(z, q, ctx.bits)
        print(f"{q:>5} {r:7.2f} {K:5d} {render(abs(product), 20):>28} {render(rel_diff(series, product, ctx), 3)}")

# at the zero z = -q^(-1/2) both forms drop to the rounding level
z = -ctx.mp.sqrt(2)
print("theta(-sqrt 2; 1/2):", render(abs(theta_series(z, "0.5", ctx)), 3), render(abs(theta_product(z, "0.5", ctx)), 3))
