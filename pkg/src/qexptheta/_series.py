"""Adaptive summation shared by the series evaluators.

Terms are produced by a factory ``make_terms(mp)`` so the whole sum can be
replayed at a higher working precision when cancellation eats the guard
bits (loss is measured as ``mag(max |term|) - mag(|sum|)``).
"""

from __future__ import annotations

from .xnum import GUARD_BITS, PrecisionContext, XComplex, xreal

SMALL_RUN = 4
# Stopping threshold sits this many bits under rel_tol so the truncation
# error stays inside the rel_tol contract after a geometric tail.
TAIL_MARGIN_BITS = 8
MAX_TERMS = 10**7


def peak_sum(make_terms, ctx: PrecisionContext, *, stop_early=True, max_attempts=6):
    """Sum ``make_terms(mp)`` and return ``(total, max_abs_term)`` rounded to ``ctx``.

    With ``stop_early`` the summation ends after ``SMALL_RUN`` consecutive
    terms each below ``rel_tol * 2**-8 * min(max |term|, |partial sum|)``;
    otherwise the factory must be finite.
    """
    extra = GUARD_BITS
    for _ in range(max_attempts):
        mp = ctx.extended(extra).mp
        tol = xreal(ctx.rel_tol, mp) * mp.mpf(2) ** (-TAIL_MARGIN_BITS)
        total = mp.mpf(0)
        biggest = mp.mpf(0)
        run = 0
        for count, term in enumerate(make_terms(mp)):
            total += term
            size = abs(term)
            if size > biggest:
                biggest = size
            if stop_early:
                if size <= tol * min(biggest, abs(total)):
                    run += 1
                    if run >= SMALL_RUN:
                        break
                else:
                    run = 0
            if count > MAX_TERMS:
                raise RuntimeError("series failed to converge within the term budget")
        if biggest == 0:
            return ctx.mp.mpf(0), ctx.mp.mpf(0)
        if total == 0:
            loss = extra + GUARD_BITS
        else:
            loss = mp.mag(biggest) - mp.mag(total)
        if loss <= extra - 16:
            break
        extra = loss + GUARD_BITS
    return _round(total, ctx), _round(biggest, ctx)


def _round(x, ctx):
    mp = ctx.mp
    if isinstance(x, XComplex):
        return mp.mpc(x)
    return mp.mpf(x)
