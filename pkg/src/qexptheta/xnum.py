"""Extended-range arbitrary-precision real and complex scalars.

Values are mpmath ``mpf``/``mpc`` numbers. Each precision gets its own
private :class:`mpmath.MPContext`, so the binary exponent is an unbounded
Python integer and nothing here touches mpmath's global ``mp`` state.
Magnitudes such as ``q**(-m*m/2)`` with ``m`` in the thousands are routine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath
from mpmath.libmp import from_rational, to_str

from .errors import DomainError, SingularityError

DEFAULT_BITS = 256
GUARD_BITS = 64
MIN_BITS = 64

# mpmath scalar types are created per context; these are the shared bases.
XReal = mpmath.ctx_mp_python._mpf
XComplex = mpmath.ctx_mp_python._mpc


@lru_cache(maxsize=None)
def mp_for(bits: int) -> mpmath.MPContext:
    """Private mpmath context at ``bits`` of precision (never mutated)."""
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


@dataclass(frozen=True)
class PrecisionContext:
    """Mantissa precision plus the relative tolerance used to truncate series.

    ``rel_tol`` is kept as an exact :class:`~fractions.Fraction`; it defaults
    to ``2**(16 - bits)``.
    """

    bits: int = DEFAULT_BITS
    rel_tol: Fraction | None = None

    def __post_init__(self):
        if not isinstance(self.bits, int) or self.bits < MIN_BITS:
            raise DomainError(f"precision must be an integer >= {MIN_BITS} bits, got {self.bits!r}")
        tol = Fraction(1, 2 ** (self.bits - 16)) if self.rel_tol is None else to_fraction(self.rel_tol)
        if not 0 < tol < 1:
            raise DomainError(f"rel_tol must lie in (0, 1), got {tol}")
        object.__setattr__(self, "rel_tol", tol)

    @property
    def mp(self) -> mpmath.MPContext:
        return mp_for(self.bits)

    @property
    def tol(self):
        return xreal(self.rel_tol, self.mp)

    def extended(self, extra: int) -> "PrecisionContext":
        """Same tolerance, ``extra`` more mantissa bits."""
        return PrecisionContext(self.bits + int(extra), self.rel_tol)

    def with_bits(self, bits: int) -> "PrecisionContext":
        """Fresh context at ``bits`` with the default tolerance for that size."""
        return PrecisionContext(bits)


def to_fraction(x) -> Fraction:
    """Exact rational value of an int, float, Fraction, mpf or numeric string.

    Strings may be decimals (``"0.3"`` is exactly 3/10) or ``"p/r"``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise DomainError(f"non-finite value {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot read {x!r} as an exact number") from exc
    if isinstance(x, XReal):
        sign, man, exp, _ = x._mpf_
        if not man:
            if exp:
                raise DomainError(f"non-finite value {x}")
            return Fraction(0)
        val = Fraction(man) * (Fraction(2) ** exp)
        return -val if sign else val
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def xreal(x, mp: mpmath.MPContext) -> XReal:
    """Real scalar in ``mp``; rationals are correctly rounded, mpf kept exact."""
    if isinstance(x, XReal):
        return mp.convert(x)
    if isinstance(x, XComplex):
        if x.imag:
            raise DomainError(f"expected a real value, got {x}")
        return mp.convert(x.real)
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return mp.mpf(x)
    fr = to_fraction(x)
    return mp.make_mpf(from_rational(fr.numerator, fr.denominator, mp.prec, "n"))


def xcomplex(x, mp: mpmath.MPContext) -> XComplex:
    """Complex scalar in ``mp`` from a number, ``(re, im)`` pair or ``"re,im"``."""
    if isinstance(x, XComplex):
        return mp.convert(x)
    if isinstance(x, complex):
        return mp.mpc(x)
    if isinstance(x, str) and "," in x:
        re, im = x.split(",", 1)
        return mp.mpc(xreal(re, mp), xreal(im, mp))
    if isinstance(x, tuple):
        re, im = x
        return mp.mpc(xreal(re, mp), xreal(im, mp))
    return mp.mpc(xreal(x, mp))


def exact_complex(x) -> tuple[Fraction, Fraction]:
    """Exact ``(re, im)`` rationals for anything :func:`xcomplex` accepts."""
    if isinstance(x, XComplex):
        return to_fraction(x.real), to_fraction(x.imag)
    if isinstance(x, complex):
        return Fraction(x.real), Fraction(x.imag)
    if isinstance(x, str) and "," in x:
        re, im = x.split(",", 1)
        return to_fraction(re), to_fraction(im)
    if isinstance(x, tuple):
        return to_fraction(x[0]), to_fraction(x[1])
    return to_fraction(x), Fraction(0)


def context_of(*values) -> mpmath.MPContext:
    """Highest-precision mpmath context among ``values`` (default if none)."""
    best = None
    for v in values:
        ctx = getattr(type(v), "context", None)
        if ctx is not None and (best is None or ctx.prec > best.prec):
            best = ctx
    return best if best is not None else mp_for(DEFAULT_BITS)


def _exponent_value(x, mp):
    if isinstance(x, (XReal, float)):
        return mp.convert(x)
    return xreal(to_fraction(x), mp)


def pow_real(q, x, ctx: PrecisionContext) -> XReal:
    """``q**x`` for ``0 < q < 1`` and an exact rational or real exponent.

    Guard bits cover the magnitude of ``x*log(q)`` so the result keeps a
    relative error of a few ulps even for exponents near ``10**7``.
    """
    qv = xreal(q, mp_for(ctx.bits + GUARD_BITS))
    if not 0 < qv < 1:
        raise DomainError(f"pow_real needs 0 < q < 1, got q={qv}")
    if isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1):
        k = int(x)
        mp = mp_for(ctx.bits + 16 + 2 * k.bit_length())
        return ctx.mp.mpf(xreal(q, mp) ** k)
    mp0 = mp_for(64)
    scale = max(0, mp0.mag(_exponent_value(x, mp0)) + mp0.mag(mp0.log(mp0.convert(qv))))
    mp = mp_for(ctx.bits + 32 + scale)
    return ctx.mp.mpf(mp.exp(_exponent_value(x, mp) * mp.log(xreal(q, mp))))


def ipow(u, k: int, ctx: PrecisionContext) -> XComplex:
    """``u**k`` for a signed integer ``k`` by binary exponentiation."""
    k = int(k)
    mp = mp_for(ctx.bits + 8 + 2 * max(1, abs(k).bit_length()))
    base = xcomplex(u, mp)
    if k < 0:
        if base == 0:
            raise SingularityError("ipow: zero base with negative exponent")
        base = 1 / base
        k = -k
    result = mp.mpc(1)
    while k:
        if k & 1:
            result *= base
        k >>= 1
        if k:
            base *= base
    return ctx.mp.mpc(result)


def rel_diff(a, b, ctx: PrecisionContext | None = None) -> XReal:
    """``|a - b| / max(|a|, |b|)``, and 0 when both vanish."""
    mp = ctx.mp if ctx is not None else context_of(a, b)
    wmp = mp_for(mp.prec + 16)
    a = xcomplex(a, wmp)
    b = xcomplex(b, wmp)
    denom = max(abs(a), abs(b))
    if denom == 0:
        return mp.mpf(0)
    return mp.mpf(abs(a - b) / denom)


def digits_for(bits: int) -> int:
    """Decimal digits that round-trip a ``bits``-bit mantissa."""
    return int(math.ceil(bits * math.log10(2))) + 1


def render(x, digits: int | None = None) -> str:
    """Scientific rendering ``+d.ddd...e+EEE``; the decimal point always follows one digit."""
    if isinstance(x, XComplex):
        raise TypeError("render takes a real value; render re and im separately")
    mp = context_of(x)
    x = xreal(x, mp)
    if digits is None:
        digits = digits_for(mp.prec)
    digits = max(1, int(digits))
    sign, man, exp, _ = x._mpf_
    if not man:
        if exp:
            return "nan" if x != x else ("-inf" if sign else "+inf")
        return "+" + "0." + "0" * (digits - 1) + "e+000"
    text = to_str(x._mpf_, digits, strip_zeros=False, min_fixed=1, max_fixed=0)
    mant, _, e10 = text.partition("e")
    e10 = int(e10 or 0)
    if not mant.startswith("-"):
        mant = "+" + mant
    return f"{mant}e{'-' if e10 < 0 else '+'}{abs(e10):03d}"


def parse_real(text: str, ctx: PrecisionContext) -> XReal:
    """Inverse of :func:`render` at the precision of ``ctx``."""
    text = text.strip()
    if text in ("+inf", "inf"):
        return ctx.mp.inf
    if text == "-inf":
        return -ctx.mp.inf
    return xreal(to_fraction(text), ctx.mp)


def split(x) -> tuple[XReal, int]:
    """Normalized ``(mantissa, exponent)`` with ``|mantissa|`` in [1/2, 1), or ``(0, 0)``."""
    mp = context_of(x)
    if x == 0:
        return mp.mpf(0), 0
    mant, exp = mp.frexp(x)
    return mant, int(exp)


def log10_abs(x) -> XReal:
    """``log10|x|`` without leaving extended range."""
    mp = context_of(x)
    v = abs(x)
    if v == 0:
        return -mp.inf
    return mp.log10(v)
