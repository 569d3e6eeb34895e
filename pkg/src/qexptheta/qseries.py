"""q-shifted factorials, Euler's q-exponential expansion and identity checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._series import peak_sum
from .errors import DomainError, SingularityError
from .xnum import (
    GUARD_BITS,
    PrecisionContext,
    XComplex,
    XReal,
    exact_complex,
    mp_for,
    rel_diff,
    to_fraction,
    xcomplex,
    xreal,
)

# Past this many remaining factors the product tail is summed as a logarithm.
DIRECT_TAIL_LIMIT = 256


@dataclass(frozen=True)
class QBase:
    """The base ``q`` of every q-series here, held as an exact rational in (0, 1)."""

    q: Fraction

    def __post_init__(self):
        q = to_fraction(self.q)
        if not 0 < q < 1:
            raise DomainError(f"q must satisfy 0 < q < 1, got {q}")
        object.__setattr__(self, "q", q)

    def at(self, mp) -> XReal:
        return xreal(self.q, mp)


def as_base(q) -> QBase:
    return q if isinstance(q, QBase) else QBase(q)


def _is_exact_root(a, q: Fraction, k: int) -> bool:
    """True when ``a * q**k == 1`` holds exactly for the binary value of ``a``."""
    re, im = exact_complex(a)
    return im == 0 and re * q**k == 1


def pochhammer_finite(a, base, n: int, ctx: PrecisionContext) -> XComplex:
    """``(a; q)_n`` for any integer ``n``; negative ``n`` is ``1/prod_{k=1}^{-n} (1 - a q^-k)``."""
    base = as_base(base)
    n = int(n)
    mp = ctx.extended(GUARD_BITS + abs(n).bit_length()).mp
    av = xcomplex(a, mp)
    q = base.at(mp)
    prod = mp.mpc(1)
    if n >= 0:
        qk = mp.mpf(1)
        for _ in range(n):
            prod *= 1 - av * qk
            qk *= q
        return ctx.mp.mpc(prod)
    qinv = 1 / q
    qk = mp.mpf(1)
    for k in range(1, -n + 1):
        qk *= qinv
        if _is_exact_root(a, base.q, -k):
            raise SingularityError(f"(a; q)_{n} has a pole: factor 1 - a*q^(-{k}) vanishes")
        factor = 1 - av * qk
        if factor == 0:
            factor = _exact_factor(a, base.q, -k, mp)
        prod *= factor
    return ctx.mp.mpc(1 / prod)


def _exact_factor(a, q: Fraction, k: int, mp):
    re, im = exact_complex(a)
    qk = q**k
    return mp.mpc(xreal(1 - re * qk, mp), xreal(-im * qk, mp))


def _log_tail(y, q, mp, tol, relative=False):
    """``log (y; q)_inf = -sum_j y^j / (j (1 - q^j))`` for ``|y| <= 1/2``.

    Stops once the tail bound ``|y|^j / (j (1 - q))`` is below ``tol``
    (times ``min(1, |sum|)`` when ``relative``).
    """
    total = mp.mpc(0)
    yj = mp.mpc(1)
    qj = mp.mpf(1)
    bound_scale = 1 / (1 - q)
    j = 0
    while True:
        j += 1
        yj *= y
        qj *= q
        total -= yj / (j * (1 - qj))
        limit = tol * min(1, abs(total)) if relative else tol
        if abs(yj) * bound_scale <= limit * j:
            return total


def pochhammer_infinite(a, base, ctx: PrecisionContext) -> XComplex:
    """``(a; q)_inf`` to relative error ``rel_tol``.

    Factors are multiplied directly while ``|a q^k| > 1/2``. If more than
    ``DIRECT_TAIL_LIMIT`` factors would remain before the tail bound
    ``|a| q^K <= rel_tol (1 - q) / 4`` is met, the rest is evaluated as
    ``exp`` of its logarithmic series, which converges like ``2**-j``.
    """
    base = as_base(base)
    mp0 = mp_for(64)
    a0 = xcomplex(a, mp0)
    if a0 == 0:
        return ctx.mp.mpc(1)
    q0 = base.at(mp0)
    lq = float(-mp0.log(q0))
    # index where |a q^k| first drops to 1/2 (estimate)
    k_half = max(0, int(float(mp0.log(abs(a0)) + mp0.log(2)) / lq) + 1)
    guard = GUARD_BITS + k_half.bit_length() + max(0, mp0.mag(1 / (1 - q0)))
    mp = ctx.extended(guard).mp
    av = xcomplex(a, mp)
    q = base.at(mp)
    tol = xreal(ctx.rel_tol, mp)
    half = mp.mpf(0.5)
    tiny = mp.mpf(2) ** (-(mp.prec // 2))
    cutoff = tol * (1 - q) / 4
    prod = mp.mpc(1)
    x = av
    k = 0
    while abs(x) > half:
        factor = 1 - x
        if abs(factor) <= tiny:
            if _is_exact_root(a, base.q, k):
                return ctx.mp.mpc(0)
            if factor == 0:
                factor = _exact_factor(a, base.q, k, mp)
        prod *= factor
        x *= q
        k += 1
    remaining = (mp.mag(x) - mp.mag(cutoff)) * 0.6931471805599453 / lq
    if remaining <= DIRECT_TAIL_LIMIT:
        while abs(x) > cutoff:
            prod *= 1 - x
            x *= q
    else:
        prod *= mp.exp(_log_tail(x, q, mp, tol * mp.mpf(2) ** -8))
    return ctx.mp.mpc(prod)


def pochhammer_infinite_minus_one(a, base, ctx: PrecisionContext) -> XComplex:
    """``(a; q)_inf - 1`` without the cancellation of the naive difference."""
    base = as_base(base)
    mp = ctx.extended(GUARD_BITS).mp
    av = xcomplex(a, mp)
    if av == 0:
        return ctx.mp.mpc(0)
    if abs(av) > 0.5:
        return ctx.mp.mpc(pochhammer_infinite(a, base, ctx.extended(GUARD_BITS)) - 1)
    q = base.at(mp)
    log_val = _log_tail(av, q, mp, xreal(ctx.rel_tol, mp) * mp.mpf(2) ** -8, relative=True)
    return ctx.mp.mpc(mp.expm1(log_val))


def euler_qexp_series(z, base, ctx: PrecisionContext) -> XComplex:
    """``sum_k q^(k(k-1)/2) (-z)^k / (q; q)_k``, which equals ``(z; q)_inf``."""
    base = as_base(base)

    def terms(mp):
        zv = xcomplex(z, mp)
        q = base.at(mp)
        term = mp.mpc(1)
        qk = mp.mpf(1)
        yield term
        while True:
            # t_{k+1} / t_k = -z q^k / (1 - q^(k+1))
            ratio = -zv * qk
            qk *= q
            term = term * ratio / (1 - qk)
            yield term

    total, _ = peak_sum(terms, ctx)
    return ctx.mp.mpc(total)


def qbinomial_series(a, z, base, ctx: PrecisionContext) -> XComplex:
    """``sum_k (a; q)_k z^k / (q; q)_k`` for ``|z| < 1``."""
    base = as_base(base)

    def terms(mp):
        av = xcomplex(a, mp)
        zv = xcomplex(z, mp)
        q = base.at(mp)
        term = mp.mpc(1)
        qk = mp.mpf(1)
        yield term
        while True:
            ratio = (1 - av * qk) * zv
            qk *= q
            term = term * ratio / (1 - qk)
            yield term

    total, _ = peak_sum(terms, ctx)
    return ctx.mp.mpc(total)


def qbinomial_check(a, z, base, ctx: PrecisionContext) -> XReal:
    """Relative gap between ``(az; q)_inf / (z; q)_inf`` and the q-binomial series."""
    base = as_base(base)
    wctx = ctx.extended(GUARD_BITS)
    mp = wctx.mp
    if abs(xcomplex(z, mp)) >= 1:
        raise DomainError("q-binomial check needs |z| < 1")
    az = xcomplex(a, mp) * xcomplex(z, mp)
    lhs = pochhammer_infinite(az, base, wctx) / pochhammer_infinite(z, base, wctx)
    rhs = qbinomial_series(a, z, base, wctx)
    return rel_diff(lhs, rhs, ctx)


@dataclass(frozen=True)
class LimitProbe:
    value: XComplex
    deviation: XReal
    bound_ok: bool


def q1_limit_probe(z, base, ctx: PrecisionContext) -> LimitProbe:
    """Compare ``((1 - q) z; q)_inf`` with its ``q -> 1`` limit ``exp(-z)``.

    ``bound_ok`` checks ``|((1 - q) z; q)_inf| <= exp(|z|)`` up to ``rel_tol``.
    """
    base = as_base(base)
    wctx = ctx.extended(GUARD_BITS)
    mp = wctx.mp
    zv = xcomplex(z, mp)
    arg = (1 - base.at(mp)) * zv
    value = pochhammer_infinite(arg, base, wctx)
    deviation = abs(value - mp.exp(-zv))
    envelope = mp.exp(abs(zv))
    bound_ok = bool(abs(value) <= envelope * (1 + xreal(ctx.rel_tol, mp)))
    return LimitProbe(ctx.mp.mpc(value), ctx.mp.mpf(deviation), bound_ok)
