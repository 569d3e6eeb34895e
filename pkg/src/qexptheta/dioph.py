"""Integer sequences (n, m) with n*t close to m + beta.

Rational scales give exact hits. For irrational scales the scan works on
``floor(n * t * 2**F)``, which is an exact integer for quadratic surds
(via :func:`math.isqrt`) and for decimal literals (via exact rationals), so
a hit never depends on a rounded floating-point value of ``n * t``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, PrecisionError
from .xnum import DEFAULT_BITS, PrecisionContext, XReal, mp_for, to_fraction, xreal

CHEBYSHEV_CONSTANT = 3
# extra bits over log2(n_max) a literal must carry to resolve gamma_n
LITERAL_GUARD_BITS = 40
_LOG2_10 = math.log2(10)


@dataclass(frozen=True)
class RationalScale:
    """``t = p / r`` in lowest terms."""

    p: int
    r: int = 1

    def __post_init__(self):
        p, r = int(self.p), int(self.r)
        if p < 1 or r < 1:
            raise DomainError(f"rational scale needs positive p and r, got {self.p}/{self.r}")
        g = math.gcd(p, r)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "r", r // g)

    @classmethod
    def of(cls, value) -> "RationalScale":
        fr = to_fraction(value)
        return cls(fr.numerator, fr.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.r)

    def times(self, n: int, mp) -> XReal:
        return xreal(Fraction(n * self.p, self.r), mp)

    def floor_scaled(self, n: int, bits: int) -> int:
        return (n * self.p << bits) // self.r

    def __str__(self):
        return f"{self.p}/{self.r}" if self.r != 1 else str(self.p)


@dataclass(frozen=True)
class IrrationalScale:
    """Positive irrational ``t`` given exactly enough to scan hits.

    ``kind == "surd"`` means ``t = (a + b*sqrt(d)) / c`` with integers;
    ``kind == "literal"`` is a decimal string taken as an exact rational
    carrying ``literal_bits`` bits of the intended irrational.
    """

    kind: str
    a: int = 0
    b: int = 1
    c: int = 1
    d: int = 2
    text: str = ""

    def __post_init__(self):
        if self.kind == "surd":
            a, b, c, d = (int(v) for v in (self.a, self.b, self.c, self.d))
            if d < 2 or math.isqrt(d) ** 2 == d:
                raise DomainError(f"surd needs a non-square d >= 2, got d={d}")
            if b == 0 or c == 0:
                raise DomainError("surd needs nonzero b and c")
            if c < 0:
                a, b, c = -a, -b, -c
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
            object.__setattr__(self, "c", c)
            object.__setattr__(self, "d", d)
            if self.floor_scaled(1, 64) <= 0:
                raise DomainError("scale must be positive")
        elif self.kind == "literal":
            if not re.fullmatch(r"\s*\d+\.\d+\s*", self.text):
                raise DomainError(f"literal scale must look like 1.4142..., got {self.text!r}")
            object.__setattr__(self, "text", self.text.strip())
            if self.exact <= 0:
                raise DomainError("scale must be positive")
        else:
            raise DomainError(f"unknown irrational descriptor kind {self.kind!r}")

    @classmethod
    def surd(cls, a: int, b: int, c: int, d: int) -> "IrrationalScale":
        return cls("surd", a, b, c, d)

    @classmethod
    def sqrt(cls, d: int) -> "IrrationalScale":
        return cls("surd", 0, 1, 1, d)

    @classmethod
    def golden(cls) -> "IrrationalScale":
        return cls("surd", 1, 1, 2, 5)

    @classmethod
    def literal(cls, text: str) -> "IrrationalScale":
        return cls("literal", text=text)

    @property
    def exact(self) -> Fraction:
        """The literal as an exact rational (literal descriptors only)."""
        return Fraction(self.text)

    @property
    def literal_bits(self) -> int | None:
        if self.kind != "literal":
            return None
        digits = len(self.text.replace(".", "").lstrip("0"))
        return int(digits * _LOG2_10)

    def floor_scaled(self, n: int, bits: int) -> int:
        """``floor(n * t * 2**bits)`` exactly."""
        if self.kind == "literal":
            fr = self.exact
            return (n * fr.numerator << bits) // fr.denominator
        A = (n * self.a) << bits
        B = (n * self.b) << bits
        root = math.isqrt(B * B * self.d)
        # B*sqrt(d) is irrational, so its floor is isqrt or -isqrt - 1
        S = root if B >= 0 else -root - 1
        return (A + S) // self.c

    def times(self, n: int, mp) -> XReal:
        """``n * t`` correctly rounded in ``mp``."""
        bits = mp.prec + 64 + max(0, int(n).bit_length())
        return xreal(Fraction(self.floor_scaled(n, bits), 1 << bits), mp)

    def value(self, mp) -> XReal:
        return self.times(1, mp)

    def __str__(self):
        if self.kind == "literal":
            return self.text
        if (self.a, self.b, self.c) == (0, 1, 1):
            return f"sqrt:{self.d}"
        return f"surd:{self.a},{self.b},{self.c},{self.d}"


def parse_scale(text: str):
    """``"p/r"`` or an integer is rational; ``"sqrt:d"``, ``"surd:a,b,c,d"`` or a decimal literal is irrational."""
    text = str(text).strip()
    if text.startswith("sqrt:"):
        return IrrationalScale.sqrt(int(text[5:]))
    if text.startswith("surd:"):
        parts = [int(v) for v in text[5:].split(",")]
        if len(parts) != 4:
            raise DomainError("surd descriptor needs four integers a,b,c,d")
        return IrrationalScale.surd(*parts)
    if text in ("golden", "phi"):
        return IrrationalScale.golden()
    if re.fullmatch(r"\d+(/\d+)?", text):
        return RationalScale.of(Fraction(text))
    return IrrationalScale.literal(text)


@dataclass(frozen=True)
class DiophantineHit:
    """``n * t = m + beta + gamma`` with ``|gamma| <= 3/n``."""

    n: int
    m: int
    gamma: XReal | int
    beta: Fraction
    floor_flag: bool = True

    @property
    def weighted_gap(self):
        """``n * |gamma|``, the ranking key of :func:`best_hits`."""
        return self.n * abs(self.gamma)


def fractional_parts(t: RationalScale) -> list[Fraction]:
    """The finite set ``{ {n t} : n >= 1 }`` in ascending order."""
    found = {Fraction((n * t.p) % t.r, t.r) for n in range(1, t.r + 1)}
    return sorted(found)


def rational_hits(t: RationalScale, lam, count: int, n_min: int = 1) -> list[DiophantineHit]:
    """First ``count`` integers ``n >= n_min`` with ``{n t} = lam``, paired with ``m = floor(n t)``."""
    lam = to_fraction(lam)
    if lam not in fractional_parts(t):
        raise DomainError(f"lambda={lam} is not a fractional part of n*{t}")
    target = lam.numerator * (t.r // lam.denominator)
    hits = []
    n = max(1, int(n_min))
    while len(hits) < count:
        if (n * t.p) % t.r == target:
            hits.append(DiophantineHit(n, n * t.p // t.r, 0, lam, True))
        n += 1
    return hits


@dataclass(frozen=True)
class CFExpansion:
    partial_quotients: list[int]
    convergents: list[Fraction]


def _surd_quotients(t: IrrationalScale, depth: int) -> list[int]:
    a, b, c, d = t.a, t.b, t.c, t.d
    if b < 0:
        a, b, c = -a, -b, -c
    P, D, Q = a, b * b * d, c
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    s = math.isqrt(D)
    out = []
    for _ in range(depth):
        # floor((P + sqrt(D)) / Q) for irrational sqrt(D)
        ak = (P + s) // Q if Q > 0 else -((P + s) // -Q) - 1
        out.append(ak)
        P = ak * Q - P
        Q = (D - P * P) // Q
    return out


def cf_expansion(t, depth: int) -> CFExpansion:
    """Partial quotients and convergents of ``t`` to ``depth`` terms.

    Surds use the exact periodic recurrence and never run out of precision.
    Literal descriptors stop with :class:`PrecisionError` once a convergent
    denominator would satisfy ``q_k^2 > 2**literal_bits``.
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if isinstance(t, IrrationalScale) and t.kind == "surd":
        quotients = _surd_quotients(t, depth)
        limit = None
    else:
        x = t.value if isinstance(t, RationalScale) else t.exact
        limit = None if isinstance(t, RationalScale) else t.literal_bits
        quotients = []
        while len(quotients) < depth:
            ak = math.floor(x)
            quotients.append(ak)
            frac = x - ak
            if frac == 0:
                break
            x = 1 / frac
    convergents = []
    h_prev, h = 1, 0
    k_prev, k = 0, 1
    for ak in quotients:
        h_prev, h = ak * h_prev + h, h_prev
        k_prev, k = ak * k_prev + k, k_prev
        if limit is not None and k_prev * k_prev > 2**limit:
            raise PrecisionError(
                f"literal carries {limit} bits; convergent denominator {k_prev} exceeds the guard"
            )
        convergents.append(Fraction(h_prev, k_prev))
    if limit is not None and len(quotients) < depth:
        raise PrecisionError("literal expansion terminated before the requested depth")
    return CFExpansion(quotients, convergents)


def check_literal_precision(t, n_max: int) -> None:
    """Raise unless a literal descriptor resolves ``gamma_n`` up to ``n_max``."""
    if isinstance(t, IrrationalScale) and t.kind == "literal":
        need = int(n_max).bit_length() + LITERAL_GUARD_BITS
        if t.literal_bits < need:
            raise PrecisionError(
                f"literal {t.text!r} carries ~{t.literal_bits} bits; n_max={n_max} needs {need}"
            )


def chebyshev_hits(t, beta, n_max: int, ctx: PrecisionContext | None = None) -> list[DiophantineHit]:
    """Every ``n <= n_max`` whose signed gap to the nearest integer satisfies ``|gamma_n| <= 3/n``.

    ``m`` is the nearest integer to ``n t - beta``; ``floor_flag`` records
    whether it also equals ``floor(n t)``.
    """
    beta = to_fraction(beta)
    if not 0 <= beta < 1:
        raise DomainError(f"beta must lie in [0, 1), got {beta}")
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    check_literal_precision(t, n_max)
    bits = (ctx.bits if ctx is not None else DEFAULT_BITS) + 64
    mp = mp_for(bits)
    F = bits + 2 * int(n_max).bit_length() + 64
    hits = []
    for n in range(1, n_max + 1):
        hit = _classify(t, beta, n, F, mp)
        if hit is not None:
            hits.append(hit)
    return hits


def _classify(t, beta: Fraction, n: int, F: int, mp):
    bn, bd = beta.numerator, beta.denominator
    while True:
        T = t.floor_scaled(n, F)
        S = bd << F
        X = bd * T - (bn << F)  # S*(n t - beta) - err, 0 <= err < bd
        m = (2 * X + S) // (2 * S)
        G = X - m * S
        margin = n * abs(G) - CHEBYSHEV_CONSTANT * S
        if abs(margin) > n * bd and abs(2 * abs(G) - S) > 2 * bd:
            break
        F *= 2
    if margin > 0:
        return None
    gamma = xreal(Fraction(G, S), mp)
    return DiophantineHit(n, m, gamma, beta, m == T >> F)


def best_hits(hits: list[DiophantineHit], count: int) -> list[DiophantineHit]:
    """The ``count`` hits with smallest ``n |gamma_n|`` (ties to smaller n), in ascending n."""
    if not hits:
        raise DomainError("best_hits needs at least one hit")
    ranked = sorted(hits, key=lambda h: (h.weighted_gap, h.n))[:count]
    return sorted(ranked, key=lambda h: h.n)
