"""Exact arithmetic in Z[sqrt 2], the ring of integers of Q(sqrt 2)."""
from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import NamedTuple, Union

from .arith import is_prime


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


def _round_div(n: int, d: int) -> int:
    # nearest integer to n/d, d > 0
    return (2 * n + d) // (2 * d)


@dataclass(frozen=True)
class Zsqrt2:
    """a + b*sqrt(2)."""

    a: int
    b: int = 0

    @classmethod
    def coerce(cls, x: Union["Zsqrt2", int]) -> "Zsqrt2":
        if isinstance(x, Zsqrt2):
            return x
        if isinstance(x, int):
            return cls(x, 0)
        return NotImplemented

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a}{self.b:+d}*sqrt2"

    def __add__(self, other):
        o = Zsqrt2.coerce(other)
        return Zsqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Zsqrt2(-self.a, -self.b)

    def __sub__(self, other):
        o = Zsqrt2.coerce(other)
        return Zsqrt2(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return Zsqrt2.coerce(other) - self

    def __mul__(self, other):
        o = Zsqrt2.coerce(other)
        return Zsqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        base = self
        if k < 0:
            # only units have inverses in Z[sqrt2]
            if not self.is_unit():
                raise ValueError(f"{self} is not a unit; negative powers leave Z[sqrt2]")
            base, k = self.conjugate() * self.norm(), -k
        out = Zsqrt2(1)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def conjugate(self) -> "Zsqrt2":
        return Zsqrt2(self.a, -self.b)

    def norm(self) -> int:
        return self.a * self.a - 2 * self.b * self.b

    def divmod(self, other) -> tuple["Zsqrt2", "Zsqrt2"]:
        """Euclidean division: self = q*other + r with |N(r)| < |N(other)|."""
        y = Zsqrt2.coerce(other)
        n = y.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Z[sqrt2]")
        num = self * y.conjugate()
        if n < 0:
            num, n = -num, -n
        q = Zsqrt2(_round_div(num.a, n), _round_div(num.b, n))
        return q, self - q * y

    def __divmod__(self, other):
        return self.divmod(other)

    def exact_div(self, other) -> "Zsqrt2 | None":
        """self / other if it lies in Z[sqrt2], else None."""
        y = Zsqrt2.coerce(other)
        n = y.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Z[sqrt2]")
        num = self * y.conjugate()
        if num.a % n or num.b % n:
            return None
        return Zsqrt2(num.a // n, num.b // n)

    def divides(self, other) -> bool:
        return Zsqrt2.coerce(other).exact_div(self) is not None

    def embedding_sign(self, sign: int = 1) -> int:
        """Sign of a + b*(sign*sqrt2), computed exactly."""
        a, b = self.a, sign * self.b
        sa, sb = _sgn(a), _sgn(b)
        if sb == 0 or sa == sb:
            return sa if sa else sb
        if sa == 0:
            return sb
        return sa if a * a > 2 * b * b else sb

    def is_totally_positive(self) -> bool:
        return self.embedding_sign(1) > 0 and self.embedding_sign(-1) > 0

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def is_square(self) -> bool:
        if not self.is_totally_positive() and self:
            return False
        n = self.norm()
        if n < 0 or isqrt(n) ** 2 != n:
            return False
        # x = (u + v sqrt2)^2 => u^2 + 2v^2 = a, with u^2 - 2v^2 = +-sqrt(N)
        s = isqrt(n)
        for t in (s, -s):
            if (self.a + t) % 2:
                continue
            u2 = (self.a + t) // 2
            if u2 < 0 or isqrt(u2) ** 2 != u2:
                continue
            u = isqrt(u2)
            if (self.a - t) % 4:
                continue
            v2 = (self.a - t) // 4
            if v2 < 0 or isqrt(v2) ** 2 != v2:
                continue
            v = isqrt(v2)
            if Zsqrt2(u, v) * Zsqrt2(u, v) == self or Zsqrt2(u, -v) * Zsqrt2(u, -v) == self:
                return True
        return False


ONE = Zsqrt2(1, 0)
SQRT2 = Zsqrt2(0, 1)
EPSILON = Zsqrt2(1, 1)  # fundamental unit 1 + sqrt2, norm -1
EPSILON_SQ = Zsqrt2(3, 2)


def fundamental_unit_Q1() -> Zsqrt2:
    return EPSILON


def gcd(x, y) -> Zsqrt2:
    x, y = Zsqrt2.coerce(x), Zsqrt2.coerce(y)
    while y:
        x, y = y, x.divmod(y)[1]
    return x


def are_associates(x: Zsqrt2, y: Zsqrt2) -> bool:
    if not x or not y:
        return not x and not y
    q = x.exact_div(y)
    return q is not None and q.is_unit()


class SplittingType(NamedTuple):
    kind: str  # "split" | "inert" | "ramified"
    factors: tuple[Zsqrt2, ...]


def factor_rational_prime(p: int) -> SplittingType:
    """Decomposition of a rational prime p in Z[sqrt2]."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return SplittingType("ramified", (SQRT2,))
    if p % 8 in (3, 5):
        return SplittingType("inert", ())
    for b in range(isqrt(p) + 2):
        for target in (p, -p):
            a2 = target + 2 * b * b
            if a2 >= 0:
                a = isqrt(a2)
                if a * a == a2:
                    pi = Zsqrt2(a, b)
                    return SplittingType("split", (pi, pi.conjugate()))
    raise ArithmeticError(f"no element of norm +-{p} found")  # pragma: no cover


def totally_positive_associate(x: Zsqrt2) -> Zsqrt2:
    """Totally positive associate of x with the smallest rational part.

    Ties (possible only for x associate to its conjugate) go to the larger b.
    """
    if not x:
        raise ValueError("zero has no totally positive associate")
    if x.norm() < 0:
        raise ValueError(f"{x} has negative norm; no associate is totally positive")
    if x.embedding_sign(1) < 0:
        x = -x
    inv = EPSILON_SQ.conjugate()
    best = x
    # walking in the direction that decreases a; a is convex along the orbit
    for step in (EPSILON_SQ, inv):
        cur = x
        while True:
            nxt = cur * step
            if nxt.a < cur.a or (nxt.a == cur.a and nxt.b > cur.b):
                cur = nxt
            else:
                break
        if cur.a < best.a or (cur.a == best.a and cur.b > best.b):
            best = cur
    return best


class ResidueClass4Sqrt2(NamedTuple):
    a_mod8: int
    b_mod4: int


def residue_class_mod_4sqrt2(x: Zsqrt2) -> ResidueClass4Sqrt2:
    # <4 sqrt2> = {8d + 4c sqrt2}
    return ResidueClass4Sqrt2(x.a % 8, x.b % 4)


def residue_class_mod_4(x: Zsqrt2) -> tuple[int, int]:
    return (x.a % 4, x.b % 4)


# squares of odd elements: 1 and 3 + 2 sqrt2
_UNRAMIFIED_MOD4 = {(1, 0), (3, 2)}
_SPLIT_MOD_4SQRT2 = {ResidueClass4Sqrt2(1, 0), ResidueClass4Sqrt2(3, 2)}
PRIME_GENERATOR_CLASSES = {
    ResidueClass4Sqrt2(3, 0): "+3",
    ResidueClass4Sqrt2(5, 0): "-3",
    ResidueClass4Sqrt2(1, 2): "+(1+2sqrt2)",
    ResidueClass4Sqrt2(7, 2): "-(1+2sqrt2)",
}


def classify_sqrt2_behavior(alpha: Zsqrt2) -> str:
    """Behaviour of <sqrt2> in Q(sqrt2)(sqrt(alpha)) for odd alpha.

    A square alpha gives the split algebra Q(sqrt2) x Q(sqrt2), reported as split.
    """
    if alpha.a % 2 == 0:
        raise ValueError(f"{alpha} is divisible by sqrt2")
    if residue_class_mod_4(alpha) not in _UNRAMIFIED_MOD4:
        return "ramified"
    if residue_class_mod_4sqrt2(alpha) in _SPLIT_MOD_4SQRT2:
        return "split"
    return "inert"
