"""Scaled q-exponential versus its theta-function main term.

For ``n t = m + lambda`` the value ``(-q^(-n t + 1/2) u; q)_inf`` equals

    u^m (theta(u^-1 q^lambda; q) + r(n)) / ((q; q)_inf q^(m^2/2 + m lambda))

and ``r(n)`` is bounded explicitly; for irrational ``t`` with
``n t = m + beta + gamma_n`` the remainder ``e(n)`` is ``O(log n / n)``.
Residuals come from inverting that relation against the exactly summed
left-hand side. :func:`laplace_decomposition` rebuilds ``r(n)`` from the
split of the sum at its peak index ``m`` as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ._series import peak_sum
from .dioph import (
    DiophantineHit,
    IrrationalScale,
    RationalScale,
    chebyshev_hits,
    best_hits,
    fractional_parts,
    parse_scale,
    rational_hits,
)
from .errors import DomainError, InsufficientDataError, PrecisionInsufficientError
from .qseries import QBase, as_base, pochhammer_finite, pochhammer_infinite, pochhammer_infinite_minus_one
from .theta import theta_cutoff, theta_product, theta_series
from .xnum import (
    GUARD_BITS,
    PrecisionContext,
    XComplex,
    XReal,
    exact_complex,
    ipow,
    log10_abs,
    mp_for,
    pow_real,
    rel_diff,
    to_fraction,
    xcomplex,
    xreal,
)

# Bound assertions apply from this m on; smaller m is reported only.
M0 = 12
# A residual within this many bits of the working precision is noise.
NOISE_FLOOR_BITS = 32

_LN2 = math.log(2)


@dataclass(frozen=True)
class Scenario:
    """One instance of the theorem: base q, u, scale t and target lambda/beta.

    ``u = 0`` is accepted so the left-hand side can be probed at its trivial
    point; every operation that divides by ``u`` rejects it.
    """

    base: QBase
    u: tuple
    scale: RationalScale | IrrationalScale
    target: Fraction

    def __post_init__(self):
        object.__setattr__(self, "base", as_base(self.base))
        object.__setattr__(self, "u", exact_complex(self.u))
        scale = self.scale
        if not isinstance(scale, (RationalScale, IrrationalScale)):
            scale = parse_scale(str(scale))
            object.__setattr__(self, "scale", scale)
        target = to_fraction(self.target)
        if isinstance(scale, RationalScale):
            if target not in fractional_parts(scale):
                raise DomainError(f"lambda={target} is not in S({scale})")
        elif not 0 <= target < 1:
            raise DomainError(f"beta must lie in [0, 1), got {target}")
        object.__setattr__(self, "target", target)

    @classmethod
    def make(cls, q, u, t, target=0) -> "Scenario":
        return cls(QBase(q), u, t, target)

    @property
    def is_rational(self) -> bool:
        return isinstance(self.scale, RationalScale)

    def require_nonzero_u(self):
        if self.u == (0, 0):
            raise DomainError("u must be nonzero here")

    def u_at(self, mp) -> XComplex:
        return xcomplex(self.u, mp)

    def q_at(self, mp) -> XReal:
        return self.base.at(mp)


# -- left-hand side -----------------------------------------------------------


def _nt(s: Scenario, n: int, mp):
    """``n t`` as an exact Fraction (rational t) or a correctly rounded mpf."""
    if s.is_rational:
        return Fraction(n * s.scale.p, s.scale.r)
    return s.scale.times(n, mp)


def _window_start(s: Scenario, nt_float: float, bits: int) -> int:
    """First index whose term can matter at ``bits`` of precision.

    ``log|T_k|`` is concave in ``k``, so everything before the returned
    index is below ``2**-(bits + 16)`` times the peak term in total.
    """
    q = float(s.base.q)
    lq = math.log(q)
    ln_u = math.log(abs(complex(float(s.u[0]), float(s.u[1]))))
    logs = [0.0]
    k = 0
    best = 0.0
    while True:
        step = (k + 0.5 - nt_float) * lq + ln_u - math.log1p(-q ** (k + 1))
        if step < 0:
            break
        logs.append(logs[-1] + step)
        best = max(best, logs[-1])
        k += 1
    budget = (bits + 16 + math.log2(k + 2)) * _LN2
    for idx, val in enumerate(logs):
        if val >= best - budget:
            return idx
    return 0


def lhs_series(s: Scenario, n: int, ctx: PrecisionContext) -> XComplex:
    """``sum_k q^(k^2/2 - k n t) u^k / (q; q)_k``, the expanded ``(-q^(-n t + 1/2) u; q)_inf``.

    The sum starts at the first term that can matter (terms rise to a peak
    near ``k = n t`` and the prefix below the working precision is skipped)
    and stops after four consecutive negligible terms past the peak.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if s.u == (0, 0):
        return ctx.mp.mpc(1)
    nt_float = float(_nt(s, n, mp_for(64)))

    def terms(mp):
        wctx = PrecisionContext(mp.prec)
        q = s.q_at(mp)
        u = s.u_at(mp)
        k = _window_start(s, nt_float, mp.prec)
        # exponents of size k*n*t need their own guard bits
        mp_x = mp_for(mp.prec + GUARD_BITS + 2 * (k + n).bit_length())
        nt = _nt(s, n, mp_x)
        if isinstance(nt, Fraction):
            exponent = Fraction(k * k, 2) - k * nt
            step_exp = Fraction(2 * k + 1, 2) - nt
        else:
            exponent = mp_x.mpf(k * k) / 2 - k * nt
            step_exp = mp_x.mpf(2 * k + 1) / 2 - nt
        term = pow_real(s.base.q, exponent, wctx) * ipow(u, k, wctx) / pochhammer_finite(q, s.base, k, wctx)
        step = pow_real(s.base.q, step_exp, wctx)  # q^(k + 1/2 - n t)
        qk1 = pow_real(s.base.q, k + 1, wctx)  # q^(k + 1)
        while True:
            yield term
            term = term * step * u / (1 - qk1)
            step *= q
            qk1 *= q

    total, _ = peak_sum(terms, ctx)
    return ctx.mp.mpc(total)


def lhs_product(s: Scenario, n: int, ctx: PrecisionContext) -> XComplex:
    """``prod_k (1 + q^(k - n t + 1/2) u)`` straight from the product definition."""
    if n < 1:
        raise DomainError("n must be >= 1")
    nt = _nt(s, n, mp_for(64))
    wctx = ctx.extended(GUARD_BITS + max(1, int(float(nt))).bit_length())
    mp = wctx.mp
    nt = _nt(s, n, mp)
    half_shift = Fraction(1, 2) - nt if isinstance(nt, Fraction) else mp.mpf(0.5) - nt
    a = -pow_real(s.base.q, half_shift, wctx) * s.u_at(mp)
    return ctx.mp.mpc(pochhammer_infinite(a, s.base, wctx))


# -- shared constants (pure, cached per precision) -----------------------------


@lru_cache(maxsize=256)
def _qq_inf(q: Fraction, bits: int):
    return pochhammer_infinite(q, q, PrecisionContext(bits)).real


@lru_cache(maxsize=256)
def _neg_q_inf(q: Fraction, shift: int, bits: int):
    """``(-q^shift; q)_inf``."""
    ctx = PrecisionContext(bits)
    return pochhammer_infinite(-pow_real(q, shift, ctx), q, ctx).real


@lru_cache(maxsize=1024)
def _theta_at(q: Fraction, u: tuple, shift, bits: int, modulus: bool):
    """``theta(u^-1 q^shift; q)``, or ``theta(|u|^-1 q^shift; q)`` with ``modulus``."""
    ctx = PrecisionContext(bits)
    mp = ctx.mp
    uv = xcomplex(u, mp)
    if modulus:
        uv = abs(uv)
    return theta_product(pow_real(q, shift, ctx) / uv, q, ctx)


def theta_crosscheck(s: Scenario, ctx: PrecisionContext) -> XReal:
    """Series-versus-product gap for the scenario's main-term theta value."""
    mp = ctx.mp
    z = pow_real(s.base.q, s.target, ctx) / s.u_at(mp)
    return rel_diff(theta_series(z, s.base, ctx), theta_product(z, s.base, ctx), ctx)


# -- rational case ------------------------------------------------------------


@dataclass(frozen=True)
class RationalReport:
    n: int
    m: int
    lhs: XComplex
    theta_main: XComplex
    r_n: XComplex
    bound: XReal
    ratio: XReal
    oracle_rel_diff: XReal
    bits_used: int

    @property
    def lhs_mag_log10(self) -> XReal:
        return log10_abs(self.lhs)


def _scale_factor(s: Scenario, m: int, shift, wctx: PrecisionContext):
    """``(q; q)_inf q^(m^2/2 + m shift) u^-m``."""
    mp = wctx.mp
    if isinstance(shift, Fraction):
        exponent = Fraction(m * m, 2) + m * shift
    else:
        mp_x = mp_for(wctx.bits + GUARD_BITS + 2 * max(1, m).bit_length())
        exponent = mp_x.mpf(m * m) / 2 + m * mp_x.mpf(shift)
    return _qq_inf(s.base.q, wctx.bits) * pow_real(s.base.q, exponent, wctx) * ipow(s.u_at(mp), -m, wctx)


def residual_from_lhs(s: Scenario, m: int, lhs, ctx: PrecisionContext, shift=None) -> XComplex:
    """Invert the main-term relation: scaled ``lhs`` minus ``theta(u^-1 q^target; q)``."""
    s.require_nonzero_u()
    shift = s.target if shift is None else shift
    theta_main = _theta_at(s.base.q, s.u, s.target, ctx.bits, False)
    return ctx.mp.mpc(_scale_factor(s, m, shift, ctx) * xcomplex(lhs, ctx.mp) - theta_main)


def rational_main_term(s: Scenario, m: int, ctx: PrecisionContext) -> XComplex:
    """``u^m theta(u^-1 q^lambda; q) / ((q; q)_inf q^(m^2/2 + m lambda))``."""
    if m < 0:
        raise DomainError("m must be >= 0")
    s.require_nonzero_u()
    wctx = ctx.extended(GUARD_BITS)
    theta_main = _theta_at(s.base.q, s.u, s.target, wctx.bits, False)
    return ctx.mp.mpc(theta_main / _scale_factor(s, m, s.target, wctx))


def rational_bound(s: Scenario, m: int, ctx: PrecisionContext) -> XReal:
    """``3 (-q; q)_inf theta(|u|^-1 q^lambda; q) / (1 - q) * (q^(m/2) + q^(m^2/8) / |u|^(floor(m/2) + 1))``."""
    if m < 0:
        raise DomainError("m must be >= 0")
    return _bound(s, m, 3, ctx)


def _bound(s: Scenario, m: int, factor: int, ctx: PrecisionContext) -> XReal:
    s.require_nonzero_u()
    wctx = ctx.extended(GUARD_BITS)
    mp = wctx.mp
    q = s.base.q
    theta_abs = _theta_at(q, s.u, s.target, wctx.bits, True).real
    lead = factor * _neg_q_inf(q, 1, wctx.bits) * theta_abs / (1 - s.q_at(mp))
    bracket = pow_real(q, Fraction(m, 2), wctx) + pow_real(q, Fraction(m * m, 8), wctx) / abs(
        s.u_at(mp)
    ) ** (m // 2 + 1)
    return ctx.mp.mpf(lead * bracket)


def _residual(s: Scenario, n: int, m: int, shift, ctx: PrecisionContext):
    """Residual with precision escalation; returns ``(lhs, theta_main, r, oracle, bits)``.

    ``P`` is ``ctx.bits``. The first pass runs at ``P + 64`` bits and is
    kept when cancellation against the theta term cost at most 48 bits.
    Otherwise the pass is repeated once at ``2P + 64``; a residual that is
    then still below ``2**(-2P + 32)`` times the theta term raises
    :class:`PrecisionInsufficientError`.
    """
    s.require_nonzero_u()
    bits = ctx.bits
    for effective in (bits, 2 * bits):
        wctx = PrecisionContext(effective + GUARD_BITS)
        mp = wctx.mp
        lhs = lhs_series(s, n, wctx)
        theta_main = _theta_at(s.base.q, s.u, s.target, wctx.bits, False)
        r = _scale_factor(s, m, shift, wctx) * lhs - theta_main
        loss = (mp.mag(theta_main) - mp.mag(r)) if r != 0 else wctx.bits
        if loss <= GUARD_BITS - 16:
            break
    else:
        if loss > effective - NOISE_FLOOR_BITS:
            raise PrecisionInsufficientError(
                f"residual at n={n} sits at the noise floor even at {effective} bits"
            )
    oracle = rel_diff(lhs, lhs_product(s, n, wctx), ctx)
    return lhs, theta_main, r, oracle, wctx.bits


def rational_residual(s: Scenario, hit: DiophantineHit, ctx: PrecisionContext) -> RationalReport:
    """Residual ``r(n)`` at an exact hit ``n t = m + lambda`` with its explicit bound."""
    if not s.is_rational:
        raise DomainError("rational_residual needs a rational scale")
    if hit.n * s.scale.p != (hit.m * s.scale.r + s.target * s.scale.r):
        raise DomainError(f"hit (n={hit.n}, m={hit.m}) does not satisfy n t = m + lambda")
    lhs, theta_main, r, oracle, used = _residual(s, hit.n, hit.m, s.target, ctx)
    mp = ctx.mp
    bound = rational_bound(s, hit.m, ctx)
    r = mp.mpc(r)
    return RationalReport(
        n=hit.n,
        m=hit.m,
        lhs=mp.mpc(lhs),
        theta_main=mp.mpc(theta_main),
        r_n=r,
        bound=bound,
        ratio=mp.mpf(abs(r) / bound),
        oracle_rel_diff=oracle,
        bits_used=used,
    )


# -- proof decomposition ------------------------------------------------------


@dataclass(frozen=True)
class DecompositionReport:
    n: int
    m: int
    s1: XComplex
    s2: XComplex
    s11: XComplex
    s12: XComplex
    s13: XComplex
    r1_n: XComplex
    r2_n: XComplex
    r1_bound: XReal
    r2_bound: XReal
    r_n: XComplex
    partition_rel_diff: XReal
    additivity_rel_diff: XReal

    @property
    def r1_ok(self) -> bool:
        return abs(self.r1_n) <= self.r1_bound

    @property
    def r2_ok(self) -> bool:
        return abs(self.r2_n) <= self.r2_bound


def _decompose_pieces(s: Scenario, m: int, wctx: PrecisionContext):
    """Recentred pieces of the split sum, all relative to ``w = u^-1 q^lambda``."""
    mp = wctx.mp
    q = s.base.q
    qv = s.q_at(mp)
    w = pow_real(q, s.target, wctx) / s.u_at(mp)
    half = m // 2
    K = max(theta_cutoff(w, q, wctx.bits), m + 1)

    def tail_minus_one(i):
        # (q^(i+1); q)_inf - 1
        return pochhammer_infinite_minus_one(pow_real(q, i + 1, wctx), q, wctx)

    gauss = [mp.mpf(1)]  # q^(j^2/2)
    c = mp.sqrt(qv)
    for _ in range(K + 1):
        gauss.append(gauss[-1] * c)
        c *= qv
    up = [mp.mpc(1)]
    down = [mp.mpc(1)]
    for j in range(1, K + 2):
        up.append(up[-1] * w)
        down.append(down[-1] / w)
    s11 = -mp.fsum(gauss[j] * up[j] for j in range(half + 1, K + 2))
    s12 = mp.fsum(gauss[j] * up[j] * tail_minus_one(m - j) for j in range(0, half + 1))
    s13 = mp.fsum(gauss[j] * up[j] * (1 + tail_minus_one(m - j)) for j in range(half + 1, m + 1))
    r2 = mp.fsum(gauss[j] * down[j] * tail_minus_one(m + j) for j in range(1, K + 2))
    theta_plus = mp.fsum(gauss[j] * up[j] for j in range(0, K + 2))
    theta_minus = mp.fsum(gauss[j] * down[j] for j in range(1, K + 2))
    scale = max(abs(g * x) for g, x in zip(gauss, up))
    scale = max(scale, max(abs(g * x) for g, x in zip(gauss, down)))
    return s11, s12, s13, r2, theta_plus, theta_minus, scale


def laplace_decomposition(s: Scenario, hit: DiophantineHit, ctx: PrecisionContext) -> DecompositionReport:
    """Split the defining sum at ``k = m`` and bound each recentred piece.

    ``s1 = sum_{k<=m}``, ``s2 = sum_{k>m}`` of ``(q^(k+1); q)_inf q^(k^2/2 - k m - k lambda) u^k``.
    After recentring, ``r1 = s11 + s12 + s13`` carries the factor-2 bound
    and ``r2`` the ``q^(m+2) (-q^3; q)_inf`` bound; ``r1 + r2`` must equal
    the residual obtained by inverting the main-term relation.
    """
    if not s.is_rational:
        raise DomainError("laplace_decomposition needs a rational scale")
    s.require_nonzero_u()
    m = hit.m
    report = rational_residual(s, hit, ctx)
    extra = GUARD_BITS
    for _ in range(3):
        # tolerance follows the bits so series truncation shrinks with them
        wctx = ctx.with_bits(ctx.bits + extra)
        mp = wctx.mp
        s11, s12, s13, r2, theta_plus, theta_minus, scale = _decompose_pieces(s, m, wctx)
        r1 = s11 + s12 + s13
        # r1 + r2 may cancel further than either piece
        sizes = [abs(x) for x in (r1, r2, r1 + r2) if x != 0]
        loss = mp.mag(scale) - mp.mag(min(sizes)) if sizes else 0
        if loss <= extra - 16:
            break
        extra = loss + GUARD_BITS
    inv_scale = ipow(s.u_at(mp), m, wctx) / pow_real(s.base.q, Fraction(m * m, 2) + m * s.target, wctx)
    s1 = inv_scale * (theta_plus + r1)
    s2 = inv_scale * (theta_minus + r2)
    qq = _qq_inf(s.base.q, wctx.bits)
    partition = rel_diff(s1 + s2, qq * lhs_series(s, hit.n, wctx), ctx)
    r1_bound = _bound(s, m, 2, ctx)
    q = s.base.q
    theta_abs = _theta_at(q, s.u, s.target, wctx.bits, True).real
    r2_bound = ctx.mp.mpf(
        pow_real(q, m + 2, wctx) * _neg_q_inf(q, 3, wctx.bits) * theta_abs / (1 - s.q_at(mp))
    )
    out = ctx.mp
    return DecompositionReport(
        n=hit.n,
        m=m,
        s1=out.mpc(s1),
        s2=out.mpc(s2),
        s11=out.mpc(s11),
        s12=out.mpc(s12),
        s13=out.mpc(s13),
        r1_n=out.mpc(r1),
        r2_n=out.mpc(r2),
        r1_bound=r1_bound,
        r2_bound=r2_bound,
        r_n=report.r_n,
        partition_rel_diff=partition,
        additivity_rel_diff=rel_diff(r1 + r2, report.r_n, ctx),
    )


# -- irrational case ----------------------------------------------------------


def nu_n(n: int, base) -> int:
    """``floor(-log n / log q)``, settled exactly with integer powers."""
    if n < 1:
        raise DomainError("n must be >= 1")
    q = as_base(base).q
    num, den = q.numerator, q.denominator
    k = int(math.floor(math.log(n) / -math.log(float(q))))
    # largest k with (1/q)^k <= n, i.e. den^k <= n num^k
    while k > 0 and den**k > n * num**k:
        k -= 1
    while den ** (k + 1) <= n * num ** (k + 1):
        k += 1
    return k


@dataclass(frozen=True)
class IrrationalReport:
    n: int
    m: int
    gamma_n: XReal
    nu_n: int
    lhs: XComplex
    theta_main: XComplex
    e_n: XComplex
    rate_stat: XReal
    oracle_rel_diff: XReal
    bits_used: int


def irrational_residual(s: Scenario, hit: DiophantineHit, ctx: PrecisionContext) -> IrrationalReport:
    """Residual ``e(n)`` for ``n t = m + beta + gamma_n`` and ``rate_stat = |e(n)| n / log n``.

    The exponent ``m n t - m^2/2`` is evaluated as ``m^2/2 + m (beta + gamma_n)``.
    ``rate_stat`` is ``+inf`` at ``n = 1`` where ``log n`` vanishes.
    """
    if hit.beta != s.target:
        raise DomainError(f"hit targets beta={hit.beta}, scenario has {s.target}")
    # beta + gamma_n as a real number, also when gamma_n = 0
    mp_hi = mp_for(ctx.bits * 2 + 2 * GUARD_BITS)
    gamma = hit.gamma
    shift = xreal(s.target, mp_hi) + xreal(gamma, mp_hi)
    lhs, theta_main, e, oracle, used = _residual(s, hit.n, hit.m, shift, ctx)
    mp = ctx.mp
    e = mp.mpc(e)
    rate = mp.inf if hit.n == 1 else abs(e) * hit.n / mp.log(hit.n)
    return IrrationalReport(
        n=hit.n,
        m=hit.m,
        gamma_n=mp.mpf(gamma),
        nu_n=nu_n(hit.n, s.base),
        lhs=mp.mpc(lhs),
        theta_main=mp.mpc(theta_main),
        e_n=e,
        rate_stat=mp.mpf(rate),
        oracle_rel_diff=oracle,
        bits_used=used,
    )


@dataclass(frozen=True)
class RateEstimate:
    value: XReal
    n: int


def rate_constant_estimate(reports: list[IrrationalReport]) -> RateEstimate:
    """Empirical ``sup |e(n)| n / log n`` and the ``n`` attaining it (``n = 1`` is skipped)."""
    if len(reports) < 3:
        raise InsufficientDataError("rate_constant_estimate needs at least 3 reports")
    usable = [r for r in reports if r.n >= 2]
    if not usable:
        raise InsufficientDataError("no report with n >= 2")
    top = max(usable, key=lambda r: (r.rate_stat, -r.n))
    return RateEstimate(top.rate_stat, top.n)


# -- tables -------------------------------------------------------------------


def rational_table(s: Scenario, count: int, ctx: PrecisionContext, n_min: int = 1) -> list[RationalReport]:
    """Reports for the first ``count`` exact hits of the scenario."""
    return [rational_residual(s, h, ctx) for h in rational_hits(s.scale, s.target, count, n_min)]


def irrational_table(
    s: Scenario, n_max: int, count: int, ctx: PrecisionContext
) -> list[IrrationalReport]:
    """Reports over ``best_hits(chebyshev_hits(n <= n_max), count)``."""
    hits = best_hits(chebyshev_hits(s.scale, s.target, n_max, ctx), count)
    return [irrational_residual(s, h, ctx) for h in hits]
