"""Theta function as a bilateral series and as a Jacobi triple product."""

from __future__ import annotations

import math

from ._series import peak_sum
from .errors import DomainError
from .qseries import as_base, pochhammer_infinite
from .xnum import GUARD_BITS, PrecisionContext, XComplex, mp_for, xcomplex

_LN2 = math.log(2)


def _check_nonzero(z, mp):
    zv = xcomplex(z, mp)
    if zv == 0:
        raise DomainError("theta(z; q) is undefined at z = 0")
    return zv


def theta_cutoff(z, base, bits: int) -> int:
    """Symmetric truncation index ``K`` for the bilateral series.

    ``K`` is the first index past the peak with
    ``q^(K^2/2) rho^K <= 2**-bits * max_k q^(k^2/2) rho^k``, ``rho = max(|z|, 1/|z|)``.
    Beyond the peak the terms decay faster than geometrically, so the
    neglected tail is bounded by the last kept term.
    """
    base = as_base(base)
    mp0 = mp_for(64)
    zv = _check_nonzero(z, mp0)
    log_rho = abs(float(mp0.log(abs(zv))))
    lq = float(-mp0.log(base.at(mp0)))
    peak = log_rho / lq
    budget = (bits + 8) * _LN2
    # (lq/2) (k - peak)^2 >= budget, solved for k past the peak
    k = peak + math.sqrt(2 * budget / lq)
    return int(math.ceil(k)) + 2


def theta_series(z, base, ctx: PrecisionContext) -> XComplex:
    """``sum_{|k| <= K} q^(k^2/2) z^k`` with ``K`` from :func:`theta_cutoff`.

    ``K`` follows the working precision, so a retry forced by cancellation
    also widens the truncation window.
    """
    base = as_base(base)
    _check_nonzero(z, mp_for(64))

    def terms(mp):
        K = theta_cutoff(z, base, mp.prec)
        zv = xcomplex(z, mp)
        zi = 1 / zv
        q = base.at(mp)
        c = mp.sqrt(q)  # q^(k + 1/2) for the step k -> k + 1
        up = mp.mpc(1)
        down = mp.mpc(1)
        yield up
        for _ in range(K):
            up = up * c * zv
            down = down * c * zi
            yield up
            yield down
            c *= q

    total, _ = peak_sum(terms, ctx, stop_early=False)
    return ctx.mp.mpc(total)


def theta_product(z, base, ctx: PrecisionContext) -> XComplex:
    """``(q; q)_inf (-q^(1/2) z; q)_inf (-q^(1/2)/z; q)_inf``."""
    base = as_base(base)
    wctx = ctx.extended(GUARD_BITS)
    mp = wctx.mp
    zv = _check_nonzero(z, mp)
    q = base.at(mp)
    root = mp.sqrt(q)
    qq = pochhammer_infinite(q, base, wctx)
    left = pochhammer_infinite(-root * zv, base, wctx)
    right = pochhammer_infinite(-root / zv, base, wctx)
    return ctx.mp.mpc(qq * (left * right))
