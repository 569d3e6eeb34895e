"""
Classical q-series identities at 256 bits
==========================================

Euler's expansion of (z; q)_inf, the q-binomial theorem and the
q -> 1 limit towards exp(-z), each checked against its product form.
"""

from fractions import Fraction

from qexptheta import (
    PrecisionContext,
    euler_qexp_series,
    pochhammer_infinite,
    q1_limit_probe,
    qbinomial_check,
    rel_diff,
    render,
)

ctx = PrecisionContext(256)

# (z; q)_inf as an infinite product and as Euler's power series in z
for q in ["0.1", "0.5", "0.9", "0.99"]:
    z = (2, -1)
    series = euler_qexp_series(z, q, ctx)
    product = pochhammer_infinite(z, q, ctx)
    print(f"q={q:5} product={render(product.real, 16)} rel_diff={render(rel_diff(series, product, ctx), 3)}")

# q-binomial theorem: sum of (a;q)_k/(q;q)_k z^k against (az;q)_inf/(z;q)_inf
print("q-binomial rel_diff:", render(qbinomial_check((3, 1), (0.5, 0.4), Fraction(7, 10), ctx), 3))

# ((1-q) z; q)_inf approaches exp(-z) as q -> 1, with an explicit bound at each step
for j in range(1, 7):
    probe = q1_limit_probe((3, 2), 1 - Fraction(1, 10**j), ctx)
    print(f"q=1-1e-{j}  deviation={render(probe.deviation, 6)}  bound_ok={probe.bound_ok}")
