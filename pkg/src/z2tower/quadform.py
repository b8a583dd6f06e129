"""Class groups of real quadratic fields via indefinite binary quadratic forms.

Forms (a, b, c) of discriminant D = b^2 - 4ac > 0 model narrow ideal
classes.  The narrow group is obtained by enumerating all reduced forms,
splitting them into reduction cycles (one cycle per class) and composing
cycle representatives.  The wide group is the quotient by the class of
(-1, b0, -c0), i.e. the narrow class of a principal ideal with a generator
of negative norm.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt
from typing import Callable, Iterable, NamedTuple

from . import kernels
from .arith import factorize, is_prime, sqrt_mod_prime

DEFAULT_DISC_BOUND = int(os.environ.get("Z2TOWER_DISC_BOUND", 10**9))
# structure() is quadratic in the group order in the worst case
MAX_GROUP_ORDER = 4096


class ResourceError(RuntimeError):
    """A computation was refused because it exceeds a configured bound."""


class BinaryQuadForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def __str__(self) -> str:
        return f"({self.a}, {self.b}, {self.c})"


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return _squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n == 1:
        return True
    for p in (2, 3, 5, 7):
        if n % (p * p) == 0:
            return False
    if n < 10**12:
        i = 11
        while i * i <= n:
            if n % (i * i) == 0:
                return False
            i += 2
        return True
    return all(e == 1 for e in factorize(n).values())


def _check_disc(D: int) -> None:
    if D <= 0 or D % 4 not in (0, 1) or isqrt(D) ** 2 == D:
        raise ValueError(f"{D} is not a positive non-square discriminant")


def is_reduced(f: BinaryQuadForm) -> bool:
    """|sqrt(D) - 2|a|| < b < sqrt(D), decided in integers."""
    a, b, _ = f
    D = f.discriminant
    if b <= 0 or b * b >= D:
        return False
    two_a = 2 * abs(a)
    return (two_a + b) ** 2 > D and (two_a <= b or (two_a - b) ** 2 < D)


def _normalize_b(b: int, a: int, D: int, s: int) -> int:
    m = 2 * abs(a)
    if abs(a) > s:
        r = b % m
        return r - m if r > abs(a) else r
    return s - (s - b) % m


def rho(f: BinaryQuadForm) -> BinaryQuadForm:
    """One reduction step (a, b, c) -> (c, r, (r^2 - D)/4c)."""
    a, b, c = f
    D = f.discriminant
    r = _normalize_b(-b, c, D, isqrt(D))
    return BinaryQuadForm(c, r, (r * r - D) // (4 * c))


def reduce(f: BinaryQuadForm) -> BinaryQuadForm:
    D = f.discriminant
    _check_disc(D)
    if not f.is_primitive():
        raise ValueError(f"form {f} is not primitive")
    if f.a == 0:
        raise ValueError(f"form {f} has a = 0")
    while not is_reduced(f):
        f = rho(f)
    return f


def principal_form(D: int) -> BinaryQuadForm:
    _check_disc(D)
    s = isqrt(D)
    b = s if (s - D) % 2 == 0 else s - 1
    return BinaryQuadForm(1, b, (b * b - D) // 4)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def compose(f: BinaryQuadForm, g: BinaryQuadForm) -> BinaryQuadForm:
    """Gauss/Dirichlet composition of forms with equal discriminant and a > 0."""
    D = f.discriminant
    if g.discriminant != D:
        raise ValueError("composition needs equal discriminants")
    if f.a <= 0 or g.a <= 0:
        raise ValueError("compose expects forms with positive leading coefficient")
    a1, b1, c1 = f
    a2, b2, c2 = g
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, u, v = _xgcd(s, d)
        x2, y2 = u, -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - D) // (4 * a3)
    out = BinaryQuadForm(a3, b3, c3)
    if out.discriminant != D:  # pragma: no cover - algebraic identity
        raise ArithmeticError(f"composition of {f} and {g} broke the discriminant")
    return out


def prime_form(ell: int, D: int) -> BinaryQuadForm:
    """A form (ell, b, c) representing a prime ideal of norm ell."""
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    if ell == 2:
        for b in (0, 1, 2, 3):
            if (b - D) % 2 == 0 and (b * b - D) % 8 == 0:
                return BinaryQuadForm(2, b, (b * b - D) // 8)
        raise ValueError(f"2 is inert in the quadratic order of discriminant {D}")
    try:
        t = sqrt_mod_prime(D, ell)
    except ValueError:
        raise ValueError(f"{ell} is inert in the quadratic order of discriminant {D}") from None
    b = t if (t - D) % 2 == 0 else ell - t
    return BinaryQuadForm(ell, b, (b * b - D) // (4 * ell))


@dataclass(frozen=True)
class AbelianGroupStructure:
    cyclic_orders: tuple[int, ...]
    generators: tuple = field(default=(), compare=False)

    @property
    def order(self) -> int:
        return math.prod(self.cyclic_orders)

    def rank(self, ell: int = 2) -> int:
        return sum(1 for d in self.cyclic_orders if d % ell == 0)

    def sylow(self, ell: int = 2) -> "AbelianGroupStructure":
        parts = []
        gens = []
        for i, d in enumerate(self.cyclic_orders):
            pe = 1
            while d % ell == 0:
                d //= ell
                pe *= ell
            if pe > 1:
                parts.append(pe)
                if self.generators:
                    gens.append(self.generators[i])
        return AbelianGroupStructure(tuple(parts), tuple(gens))

    def __str__(self) -> str:
        if not self.cyclic_orders:
            return "1"
        return " + ".join(f"Z/{d}Z" for d in self.cyclic_orders)


class FiniteAbelianGroup:
    """Finite abelian group on element labels 0..n-1 with a cached product."""

    def __init__(self, n: int, mul: Callable[[int, int], int], identity: int):
        self.n = n
        self._mul = mul
        self.identity = identity
        self._table: dict[tuple[int, int], int] = {}
        self._orders: list[int] | None = None

    def mul(self, x: int, y: int) -> int:
        key = (x, y) if x <= y else (y, x)
        out = self._table.get(key)
        if out is None:
            out = self._table[key] = self._mul(x, y)
        return out

    def power(self, x: int, k: int) -> int:
        out, base = self.identity, x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def cyclic(self, x: int) -> list[int]:
        out = [self.identity]
        y = x
        while y != self.identity:
            out.append(y)
            y = self.mul(y, x)
        return out

    def orders(self) -> list[int]:
        if self._orders is None:
            orders = [0] * self.n
            for x in range(self.n):
                if orders[x]:
                    continue
                powers = self.cyclic(x)
                k = len(powers)
                for j, y in enumerate(powers):
                    if not orders[y]:
                        orders[y] = k // gcd(j, k)
            self._orders = orders
        return self._orders

    def order_of(self, x: int) -> int:
        return self.orders()[x]

    def _ell_exponents(self, ell: int) -> list[int]:
        # #{x : x^(ell^k) = 1} = ell^(sum_i min(k, e_i))
        orders = self.orders()
        ell_orders = [o for o in orders if _is_power_of(o, ell)]
        exps = []
        k, prev = 1, 0
        while True:
            cnt = sum(1 for o in ell_orders if (ell**k) % o == 0)
            logc = _exact_log(cnt, ell)
            r_k = logc - prev
            if r_k == 0:
                break
            exps.append(r_k)
            prev = logc
            k += 1
        # exps[k-1] = #{i : e_i >= k}
        out = []
        for k in range(len(exps), 0, -1):
            ge_k = exps[k - 1]
            ge_k1 = exps[k] if k < len(exps) else 0
            out.extend([k] * (ge_k - ge_k1))
        return out  # descending

    def _sylow_basis(self, ell: int, exps: list[int]) -> list[int]:
        orders = self.orders()
        basis: list[int] = []
        span = {self.identity}
        for e in exps:
            target = ell**e
            for x in range(self.n):
                if orders[x] != target:
                    continue
                if self.power(x, target // ell) in span:
                    continue
                basis.append(x)
                new_span = set()
                for h in span:
                    y = h
                    for _ in range(target):
                        new_span.add(y)
                        y = self.mul(y, x)
                span = new_span
                break
            else:  # pragma: no cover - greedy basis always exists
                raise ArithmeticError("failed to extend Sylow basis")
        return basis

    def structure(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Invariant factors d1 | d2 | ... and a generating element for each."""
        if self.n > MAX_GROUP_ORDER:
            raise ResourceError(f"group order {self.n} exceeds limit {MAX_GROUP_ORDER}")
        if self.n == 1:
            return (), ()
        columns: list[list[tuple[int, int]]] = []
        for ell in sorted(factorize(self.n)):
            exps = self._ell_exponents(ell)
            basis = self._sylow_basis(ell, exps)
            columns.append([(ell**e, g) for e, g in zip(exps, basis)])
        width = max(len(c) for c in columns)
        factors, gens = [], []
        for i in range(width):
            d, g = 1, self.identity
            for col in columns:
                if i < len(col):
                    d *= col[i][0]
                    g = self.mul(g, col[i][1])
            factors.append(d)
            gens.append(g)
        return tuple(reversed(factors)), tuple(reversed(gens))

    def quotient(self, subgroup: Iterable[int]) -> tuple["FiniteAbelianGroup", list[int]]:
        """Quotient group and the coset label of every element."""
        sub = sorted(set(subgroup))
        label = [-1] * self.n
        reps = []
        for x in range(self.n):
            if label[x] >= 0:
                continue
            for h in sub:
                label[self.mul(x, h)] = len(reps)
            reps.append(x)
        q = FiniteAbelianGroup(
            len(reps), lambda i, j: label[self.mul(reps[i], reps[j])], label[self.identity]
        )
        return q, label


def _is_power_of(n: int, ell: int) -> bool:
    while n % ell == 0:
        n //= ell
    return n == 1


def _exact_log(n: int, ell: int) -> int:
    k = 0
    while n % ell == 0:
        n //= ell
        k += 1
    if n != 1:
        raise ArithmeticError("element counts are not prime powers")
    return k


@dataclass
class FundamentalUnit:
    """(x + y sqrt(D)) / 2 with x^2 - D y^2 = 4 * unit_norm."""

    D: int
    x: int
    y: int
    unit_norm: int

    @property
    def regulator_estimate(self) -> float:
        # log((x + y sqrt D)/2); big ints go through math.log exactly enough
        return math.log(self.x + math.isqrt(self.D * self.y * self.y)) - math.log(2)

    def pell_holds(self) -> bool:
        return self.x * self.x - self.D * self.y * self.y == 4 * self.unit_norm


@lru_cache(maxsize=4096)
def fundamental_unit(D: int) -> FundamentalUnit:
    """Fundamental unit from the continued fraction of the integral generator."""
    _check_disc(D)
    s = isqrt(D)
    if D % 4 == 1:
        # omega = (1 + sqrt D)/2 as (P + sqrt D)/Q
        P, Q = 1, 2
    else:
        # omega = sqrt(D/4) = (0 + sqrt D)/2
        P, Q = 0, 2
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    while True:
        a = (P + s) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        if D % 4 == 1:
            # p - q*conj(omega) = (2p - q + q sqrt D)/2
            x, y = 2 * p - q, q
        else:
            x, y = 2 * p, q
        n4 = x * x - D * y * y
        if n4 in (4, -4):
            unit = FundamentalUnit(D, x, y, n4 // 4)
            if not unit.pell_holds():  # pragma: no cover
                raise ArithmeticError(f"Pell identity failed for D={D}")
            return unit
        P = a * Q - P
        Q = (D - P * P) // Q


class ClassGroup:
    """Narrow and wide class groups of the quadratic order of discriminant D."""

    def __init__(self, D: int, bound: int | None = None):
        _check_disc(D)
        if not is_fundamental_discriminant(D):
            # non-maximal orders would need imprimitive forms filtered out
            raise ValueError(f"{D} is not a fundamental discriminant")
        bound = DEFAULT_DISC_BOUND if bound is None else bound
        if D > bound:
            raise ResourceError(f"discriminant {D} exceeds bound {bound}")
        self.D = D
        forms = kernels.reduced_forms(D)
        labels, ncycles = kernels.cycle_labels(D, forms)
        self.reduced_count = len(forms)
        self._lookup = {f: lab for f, lab in zip(forms, labels)}
        reps: list[BinaryQuadForm | None] = [None] * ncycles
        for (a, b), lab in zip(forms, labels):
            f = BinaryQuadForm(a, b, (b * b - D) // (4 * a))
            cur = reps[lab]
            if cur is None or _rep_key(f) < _rep_key(cur):
                reps[lab] = f
        self.representatives: list[BinaryQuadForm] = reps  # type: ignore[assignment]
        self.narrow_order = ncycles
        self.principal = self.class_of(principal_form(D))
        self.narrow = FiniteAbelianGroup(ncycles, self._mul, self.principal)
        pf = principal_form(D)
        self.negative_principal = self.class_of(BinaryQuadForm(-1, pf.b, -pf.c))
        kernel = {self.principal, self.negative_principal}
        self.wide, self._wide_label = self.narrow.quotient(kernel)

    def class_of(self, f: BinaryQuadForm) -> int:
        if f.discriminant != self.D:
            raise ValueError(f"form {f} has discriminant {f.discriminant}, expected {self.D}")
        g = reduce(f)
        return self._lookup[(g.a, g.b)]

    def _mul(self, i: int, j: int) -> int:
        return self.class_of(compose(self.representatives[i], self.representatives[j]))

    def wide_class(self, narrow_label: int) -> int:
        return self._wide_label[narrow_label]

    @property
    def wide_order(self) -> int:
        return self.wide.n

    def narrow_structure(self) -> AbelianGroupStructure:
        factors, gens = self.narrow.structure()
        return AbelianGroupStructure(factors, tuple(self.representatives[g] for g in gens))

    def wide_structure(self) -> AbelianGroupStructure:
        factors, gens = self.wide.structure()
        # generator of a wide class: a narrow representative of the coset
        rep = {}
        for x in range(self.narrow.n):
            rep.setdefault(self._wide_label[x], x)
        return AbelianGroupStructure(factors, tuple(self.representatives[rep[g]] for g in gens))

    def ideal_class_order(self, ell: int) -> int:
        """Order in the wide group of a prime ideal above ell."""
        return self.wide.order_of(self.wide_class(self.class_of(prime_form(ell, self.D))))


def _rep_key(f: BinaryQuadForm) -> tuple:
    return (f.a < 0, abs(f.a), f.b)


@lru_cache(maxsize=256)
def class_group(D: int, bound: int | None = None) -> ClassGroup:
    return ClassGroup(D, bound)


def reduced_cycles(D: int) -> list[list[BinaryQuadForm]]:
    """All reduced forms of discriminant D grouped into reduction cycles."""
    forms = kernels.reduced_forms(D)
    labels, n = kernels.cycle_labels(D, forms)
    out: list[list[BinaryQuadForm]] = [[] for _ in range(n)]
    for (a, b), lab in zip(forms, labels):
        out[lab].append(BinaryQuadForm(a, b, (b * b - D) // (4 * a)))
    return out


def narrow_class_group(D: int, bound: int | None = None) -> AbelianGroupStructure:
    return class_group(D, bound).narrow_structure()


def wide_class_group(D: int, bound: int | None = None) -> AbelianGroupStructure:
    return class_group(D, bound).wide_structure()


def wide_class_group_2part(D: int, bound: int | None = None) -> AbelianGroupStructure:
    return wide_class_group(D, bound).sylow(2)


def ideal_class_order(ell: int, D: int, bound: int | None = None) -> int:
    return class_group(D, bound).ideal_class_order(ell)


def class_number(D: int, bound: int | None = None) -> int:
    return class_group(D, bound).wide_order


def quadratic_discriminant(d: int) -> int:
    """Field discriminant of Q(sqrt d) for squarefree d."""
    return d if d % 4 == 1 else 4 * d
