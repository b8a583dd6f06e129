"""Quadratic Hilbert symbols over Q and over Q(sqrt 2).

Over Q(sqrt 2) the odd places are evaluated with the tame symbol and the
two real places by signs.  The single dyadic place <sqrt 2> is never
evaluated directly: its value is whatever makes the product of all local
symbols equal to +1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .arith import factorize, legendre
from .zsqrt2 import SQRT2, Zsqrt2, factor_rational_prime

REAL = "inf"
Rational = Union[int, Fraction]


def _as_integer_class(x: Rational) -> int:
    # n/d and n*d differ by the square d^2
    x = Fraction(x)
    if x == 0:
        raise ValueError("Hilbert symbol arguments must be nonzero")
    return x.numerator * x.denominator


def _split_valuation(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def hilbert_symbol_Q(a: Rational, b: Rational, v: int | str) -> int:
    """(a, b)_v over Q; v is a prime or ``"inf"``."""
    a, b = _as_integer_class(a), _as_integer_class(b)
    if v == REAL:
        return -1 if a < 0 and b < 0 else 1
    p = int(v)
    alpha, u = _split_valuation(a, p)
    beta, w = _split_valuation(b, p)
    if p == 2:
        eps_u, eps_w = ((u - 1) // 2) % 2, ((w - 1) // 2) % 2
        om_u, om_w = ((u * u - 1) // 8) % 2, ((w * w - 1) // 8) % 2
        e = eps_u * eps_w + alpha * om_w + beta * om_u
        return -1 if e % 2 else 1
    e = (alpha * beta * ((p - 1) // 2)) % 2
    val = -1 if e else 1
    if beta % 2:
        val *= legendre(u, p)
    if alpha % 2:
        val *= legendre(w, p)
    return val


def hilbert_places_Q(a: Rational, b: Rational) -> list:
    primes = {2}
    for x in (_as_integer_class(a), _as_integer_class(b)):
        primes.update(factorize(x))
    return sorted(primes) + [REAL]


@dataclass(frozen=True)
class PlaceOfQ1:
    """A place of Q(sqrt 2).

    kind is "odd_prime" (with a prime element and the rational prime below
    it), "dyadic", or "real_embedding" (embedding sqrt2 -> sign*1.414...).
    """

    kind: str
    prime_elem: Zsqrt2 | None = None
    rational_prime: int | None = None
    embedding_sign: int | None = None

    @property
    def residue_norm(self) -> int:
        if self.kind != "odd_prime":
            raise ValueError("residue norm only for odd places")
        assert self.prime_elem is not None
        return abs(self.prime_elem.norm())

    def label(self) -> str:
        if self.kind == "dyadic":
            return "<sqrt2>"
        if self.kind == "real_embedding":
            return "real(+)" if self.embedding_sign == 1 else "real(-)"
        return f"<{self.prime_elem}>"


DYADIC = PlaceOfQ1("dyadic", SQRT2, 2)
REAL_PLUS = PlaceOfQ1("real_embedding", embedding_sign=1)
REAL_MINUS = PlaceOfQ1("real_embedding", embedding_sign=-1)


def places_above(p: int) -> list[PlaceOfQ1]:
    if p == 2:
        return [DYADIC]
    kind, factors = factor_rational_prime(p)
    if kind == "inert":
        return [PlaceOfQ1("odd_prime", Zsqrt2(p), p)]
    return [PlaceOfQ1("odd_prime", f, p) for f in factors]


def valuation(x: Zsqrt2, pi: Zsqrt2) -> tuple[int, Zsqrt2]:
    """(v, x / pi^v) with the quotient prime to pi."""
    if not x:
        raise ValueError("valuation of zero")
    v = 0
    while True:
        q = x.exact_div(pi)
        if q is None:
            return v, x
        x, v = q, v + 1


class _ResidueField:
    """Z[sqrt2]/P for an odd prime P; elements are pairs (u, v) = u + v*sqrt2."""

    def __init__(self, place: PlaceOfQ1):
        pi = place.prime_elem
        p = place.rational_prime
        assert pi is not None and p is not None
        self.p = p
        self.inert = abs(pi.norm()) == p * p
        if not self.inert:
            # sqrt2 = -a/b mod p on the prime pi = a + b sqrt2
            self.root = (-pi.a * pow(pi.b, -1, p)) % p

    def reduce(self, x: Zsqrt2) -> tuple[int, int]:
        if self.inert:
            return (x.a % self.p, x.b % self.p)
        return ((x.a + x.b * self.root) % self.p, 0)

    def mul(self, x, y):
        p = self.p
        return ((x[0] * y[0] + 2 * x[1] * y[1]) % p, (x[0] * y[1] + x[1] * y[0]) % p)

    def pow(self, x, k):
        out = (1, 0)
        while k:
            if k & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            k >>= 1
        return out

    def inverse(self, x):
        p = self.p
        n = (x[0] * x[0] - 2 * x[1] * x[1]) % p
        if n == 0:
            raise ZeroDivisionError("inverting zero in the residue field")
        ninv = pow(n, -1, p)
        return (x[0] * ninv % p, -x[1] * ninv % p)

    @property
    def order(self) -> int:
        return self.p * self.p if self.inert else self.p


def tame_symbol_Q1(alpha: Zsqrt2 | int, beta: Zsqrt2 | int, place: PlaceOfQ1) -> int:
    """(alpha, beta)_P at an odd place P by the tame formula."""
    alpha, beta = Zsqrt2.coerce(alpha), Zsqrt2.coerce(beta)
    if place.kind != "odd_prime":
        raise ValueError("tame symbol needs an odd place")
    pi = place.prime_elem
    assert pi is not None
    u, a0 = valuation(alpha, pi)
    w, b0 = valuation(beta, pi)
    if u == 0 and w == 0:
        return 1
    F = _ResidueField(place)
    t = F.mul(F.pow(F.reduce(a0), w), F.inverse(F.pow(F.reduce(b0), u)))
    if (u * w) % 2:
        t = ((-t[0]) % F.p, (-t[1]) % F.p)
    val = F.pow(t, (F.order - 1) // 2)
    if val == (1, 0):
        return 1
    if val == (F.p - 1, 0):
        return -1
    raise ArithmeticError(f"tame symbol landed outside +-1: {val}")  # pragma: no cover


def real_symbol_Q1(alpha: Zsqrt2 | int, beta: Zsqrt2 | int, embedding: int) -> int:
    alpha, beta = Zsqrt2.coerce(alpha), Zsqrt2.coerce(beta)
    if alpha.embedding_sign(embedding) < 0 and beta.embedding_sign(embedding) < 0:
        return -1
    return 1


def relevant_places(alpha: Zsqrt2, beta: Zsqrt2) -> list[PlaceOfQ1]:
    """Odd places where alpha or beta is not a unit, then dyadic, then reals."""
    primes = set(factorize(alpha.norm())) | set(factorize(beta.norm()))
    primes.discard(2)
    out: list[PlaceOfQ1] = []
    for p in sorted(primes):
        out.extend(places_above(p))
    return out + [DYADIC, REAL_PLUS, REAL_MINUS]


@dataclass
class SymbolTable:
    alpha: Zsqrt2
    beta: Zsqrt2
    entries: dict[PlaceOfQ1, int] = field(default_factory=dict)

    @property
    def product(self) -> int:
        out = 1
        for v in self.entries.values():
            out *= v
        return out

    @property
    def all_trivial(self) -> bool:
        return all(v == 1 for v in self.entries.values())

    def to_dict(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "symbols": {pl.label(): v for pl, v in self.entries.items()},
            "product": self.product,
        }


def symbol_table(alpha: Zsqrt2 | int, beta: Zsqrt2 | int) -> SymbolTable:
    alpha, beta = Zsqrt2.coerce(alpha), Zsqrt2.coerce(beta)
    if not alpha or not beta:
        raise ValueError("Hilbert symbol arguments must be nonzero")
    table = SymbolTable(alpha, beta)
    dyadic = 1
    for place in relevant_places(alpha, beta):
        if place.kind == "odd_prime":
            val = tame_symbol_Q1(alpha, beta, place)
        elif place.kind == "real_embedding":
            val = real_symbol_Q1(alpha, beta, place.embedding_sign)
        else:
            continue
        table.entries[place] = val
        dyadic *= val
    table.entries[DYADIC] = dyadic
    return table


def dyadic_symbol_Q1(alpha: Zsqrt2 | int, beta: Zsqrt2 | int) -> int:
    return symbol_table(alpha, beta).entries[DYADIC]


def hilbert_symbol_Q1(alpha: Zsqrt2 | int, beta: Zsqrt2 | int, place: PlaceOfQ1) -> int:
    if place.kind == "odd_prime":
        return tame_symbol_Q1(alpha, beta, place)
    if place.kind == "real_embedding":
        return real_symbol_Q1(alpha, beta, place.embedding_sign)
    return dyadic_symbol_Q1(alpha, beta)


def is_global_norm(alpha: Zsqrt2 | int, d: int) -> tuple[bool, SymbolTable]:
    """Whether alpha is a norm from Q(sqrt2)(sqrt d), by the Hasse norm theorem."""
    alpha = Zsqrt2.coerce(alpha)
    if not alpha:
        raise ValueError("alpha must be nonzero")
    if Zsqrt2(d).is_square() or Zsqrt2(2 * d).is_square():
        raise ValueError(f"{d} is a square in Q(sqrt2)")
    table = symbol_table(alpha, Zsqrt2(d))
    return table.all_trivial, table
