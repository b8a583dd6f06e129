"""Class numbers of real biquadratic fields.

Two independent routes: Kuroda's formula h = Q h1 h2 h3 / 4 with the unit
index Q found by exact square-root search, and, for tiny fields, a direct
certificate below the Minkowski bound.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import mpmath

from .arith import is_squarefree, legendre, primes_up_to
from .quadform import FundamentalUnit, class_number, fundamental_unit, quadratic_discriminant

MAX_PRECISION_BITS = 1 << 20
MINKOWSKI_LIMIT = 50.0


class OracleError(RuntimeError):
    """The oracle cannot produce a certified answer."""


@dataclass(frozen=True)
class BiquadField:
    m: int
    n: int

    def __post_init__(self):
        for x in (self.m, self.n):
            if x <= 1 or not is_squarefree(x):
                raise ValueError(f"{x} is not a squarefree integer > 1")
        if self.m == self.n:
            raise ValueError("radicands must be distinct")

    @property
    def g(self) -> int:
        return math.gcd(self.m, self.n)

    @property
    def k(self) -> int:
        return self.m * self.n // (self.g * self.g)

    @property
    def radicands(self) -> tuple[int, int, int]:
        return (self.m, self.n, self.k)

    @property
    def discriminant(self) -> int:
        return math.prod(quadratic_discriminant(d) for d in self.radicands)

    def minkowski_bound(self) -> float:
        return math.factorial(4) / 4**4 * math.sqrt(self.discriminant)

    def __str__(self) -> str:
        return f"Q(sqrt{self.m}, sqrt{self.n})"

    # coordinates on the basis 1, sqrt m, sqrt n, sqrt k
    def mul(self, x, y):
        m, n, k, g = self.m, self.n, self.k, self.g
        a0, a1, a2, a3 = x
        b0, b1, b2, b3 = y
        return (
            a0 * b0 + m * a1 * b1 + n * a2 * b2 + k * a3 * b3,
            a0 * b1 + a1 * b0 + (n // g) * (a2 * b3 + a3 * b2),
            a0 * b2 + a2 * b0 + (m // g) * (a1 * b3 + a3 * b1),
            a0 * b3 + a3 * b0 + g * (a1 * b2 + a2 * b1),
        )

    def embed(self, x, s1: int, s2: int, sqrt_m, sqrt_n, sqrt_k):
        return x[0] + s1 * x[1] * sqrt_m + s2 * x[2] * sqrt_n + s1 * s2 * x[3] * sqrt_k

    def conjugate(self, x, s1: int, s2: int):
        return (x[0], s1 * x[1], s2 * x[2], s1 * s2 * x[3])

    def char_poly(self, x) -> list[Fraction]:
        """Coefficients of prod (X - sigma(x)), highest degree first."""
        poly = [(Fraction(1), Fraction(0), Fraction(0), Fraction(0))]
        for s1, s2 in SIGNS:
            neg = tuple(-c for c in self.conjugate(x, s1, s2))
            new = [(Fraction(0),) * 4 for _ in range(len(poly) + 1)]
            for i, c in enumerate(poly):
                new[i] = tuple(a + b for a, b in zip(new[i], c))
                prod_c = self.mul(c, neg)
                new[i + 1] = tuple(a + b for a, b in zip(new[i + 1], prod_c))
            poly = new
        out = []
        for c in poly:
            if any(c[1:]):  # pragma: no cover - Galois-stable
                raise ArithmeticError("characteristic polynomial is not rational")
            out.append(Fraction(c[0]))
        return out

    def is_integral(self, x) -> bool:
        return all(c.denominator == 1 for c in self.char_poly(x))

    def norm(self, x) -> Fraction:
        return self.char_poly(x)[-1]

    @cached_property
    def integral_basis(self) -> tuple[tuple[Fraction, ...], ...]:
        """Z-basis of the ring of integers, found inside (1/4) Z[1, sqrt m, sqrt n, sqrt k]."""
        gens = [tuple(4 if i == j else 0 for j in range(4)) for i in range(4)]
        for c in itertools.product(range(4), repeat=4):
            if any(c) and self.is_integral(tuple(Fraction(ci, 4) for ci in c)):
                gens.append(c)
        basis = _hnf(gens)
        return tuple(tuple(Fraction(ci, 4) for ci in row) for row in basis)


SIGNS = ((1, 1), (-1, 1), (1, -1), (-1, -1))


def _hnf(rows: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Row Hermite normal form of a full-rank integer lattice (nonzero rows)."""
    rows = [list(r) for r in rows]
    ncols = len(rows[0])
    out = []
    for col in range(ncols):
        active = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                (nxt if r[col] != 0 else rest).append(r)
            active = nxt
        if active:
            piv = active[0]
            if piv[col] < 0:
                piv = [-a for a in piv]
            out.append(piv)
        rows = [r for r in rest if any(r)]
    return [tuple(r) for r in out]


def unit_coordinates(K: BiquadField, radicand: int, unit: FundamentalUnit):
    """The quadratic unit (x + y sqrt D)/2 on the basis of K."""
    pos = K.radicands.index(radicand)
    D = unit.D
    if D == radicand:
        lead, coeff = Fraction(unit.x, 2), Fraction(unit.y, 2)
    else:
        lead, coeff = Fraction(unit.x, 2), Fraction(unit.y)
    out = [lead, Fraction(0), Fraction(0), Fraction(0)]
    out[pos + 1] = coeff
    return tuple(out)


@dataclass
class UnitIndexResult:
    Q: int
    # (subset of subfield positions, sign, exact square root on K's basis)
    witnesses: list[tuple[tuple[int, ...], int, tuple[Fraction, ...]]] = field(default_factory=list)
    precision_bits: int = 0


def _nearest_quarter(x) -> tuple[Fraction, float]:
    q = int(mpmath.nint(4 * x))
    return Fraction(q, 4), float(abs(4 * x - q))


def _square_root(K: BiquadField, z, max_bits: int, start_bits: int):
    """Exact square root of a totally positive z in K, or None if there is none."""
    bits = start_bits
    while bits <= max_bits:
        with mpmath.workprec(bits):
            sm, sn, sk = mpmath.sqrt(K.m), mpmath.sqrt(K.n), mpmath.sqrt(K.k)
            zf = tuple(mpmath.mpf(c.numerator) / c.denominator for c in z)
            vals = [K.embed(zf, s1, s2, sm, sn, sk) for s1, s2 in SIGNS]
            if any(v <= 0 for v in vals):
                return None
            roots = [mpmath.sqrt(v) for v in vals]
            scale = max(abs(v) for v in roots)
            # absolute error of the recovered coordinates is ~ scale * 2^-bits
            err = float(mpmath.log(scale, 2)) - bits + 16
            ambiguous = False
            for t in itertools.product((1, -1), repeat=3):
                y = [roots[0], t[0] * roots[1], t[1] * roots[2], t[2] * roots[3]]
                coords = []
                worst = 0.0
                for j, div in enumerate((1, sm, sn, sk)):
                    acc = 0
                    for (s1, s2), yv in zip(SIGNS, y):
                        sign = (1, s1, s2, s1 * s2)[j]
                        acc += sign * yv
                    c, dist = _nearest_quarter(acc / (4 * div))
                    coords.append(c)
                    worst = max(worst, dist)
                if worst < 2.0**-20:
                    cand = tuple(coords)
                    if K.mul(cand, cand) == tuple(Fraction(c) for c in z):
                        return cand
                    ambiguous = True
                elif err > -40:
                    ambiguous = True
            if not ambiguous:
                return None
        bits *= 2
    raise OracleError(f"precision ladder exhausted at {max_bits} bits")


def unit_index(
    K: BiquadField,
    units: tuple[FundamentalUnit, FundamentalUnit, FundamentalUnit] | None = None,
    max_bits: int = MAX_PRECISION_BITS,
) -> UnitIndexResult:
    """Q = [E_K : <-1, eps1, eps2, eps3>] by testing subset products for squares."""
    if units is None:
        units = tuple(fundamental_unit(quadratic_discriminant(d)) for d in K.radicands)  # type: ignore[assignment]
    coords = [unit_coordinates(K, d, u) for d, u in zip(K.radicands, units)]
    bitlen = max(abs(c.numerator).bit_length() for u in coords for c in u)
    start = 64 + 4 * bitlen
    result = UnitIndexResult(Q=1, precision_bits=start)
    for size in (1, 2, 3):
        for subset in itertools.combinations(range(3), size):
            z = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
            for i in subset:
                z = K.mul(z, coords[i])
            signs = {_embedding_sign(K, z, s1, s2, start) for s1, s2 in SIGNS}
            if len(signs) != 1:
                continue  # mixed signs: neither +z nor -z is a square
            sign = signs.pop()
            if sign < 0:
                z = tuple(-c for c in z)
            root = _square_root(K, z, max_bits, start)
            if root is not None:
                if K.mul(root, root) != z:  # pragma: no cover
                    raise ArithmeticError("square-root witness failed exact check")
                result.witnesses.append((subset, sign, root))
    result.Q = 1 + len(result.witnesses)
    if result.Q not in (1, 2, 4, 8):  # pragma: no cover - subgroup property
        raise ArithmeticError(f"unit index {result.Q} is not a subgroup size")
    return result


def _embedding_sign(K: BiquadField, z, s1: int, s2: int, bits: int) -> int:
    with mpmath.workprec(bits):
        sm, sn, sk = mpmath.sqrt(K.m), mpmath.sqrt(K.n), mpmath.sqrt(K.k)
        zf = tuple(mpmath.mpf(c.numerator) / c.denominator for c in z)
        v = K.embed(zf, s1, s2, sm, sn, sk)
    return 1 if v > 0 else -1


@dataclass
class KurodaResult:
    h: int
    h_2part: int
    Q: int
    subfield_class_numbers: tuple[int, int, int]
    unit_index: UnitIndexResult


def two_part(n: int) -> int:
    return n & -n


def kuroda_class_number(K: BiquadField, bound: int | None = None) -> KurodaResult:
    hs = tuple(class_number(quadratic_discriminant(d), bound) for d in K.radicands)
    ui = unit_index(K)
    num = ui.Q * math.prod(hs)
    if num % 4:
        raise ArithmeticError(f"Q*h1*h2*h3 = {num} is not divisible by 4 for {K}")
    h = num // 4
    return KurodaResult(h, two_part(h), ui.Q, hs, ui)  # type: ignore[arg-type]


def _quadratic_behaviour(ell: int, D: int) -> str:
    if D % ell == 0:
        return "ramified"
    if ell == 2:
        return "split" if D % 8 == 1 else "inert"
    return "split" if legendre(D, ell) == 1 else "inert"


def prime_decomposition(K: BiquadField, ell: int) -> tuple[int, int, int]:
    """(e, f, g) of a rational prime ell in K."""
    beh = [_quadratic_behaviour(ell, quadratic_discriminant(d)) for d in K.radicands]
    nram = beh.count("ramified")
    if nram == 3:
        return 4, 1, 1
    if nram == 2:
        unram = next(b for b in beh if b != "ramified")
        return (2, 1, 2) if unram == "split" else (2, 2, 1)
    if nram == 0:
        nsplit = beh.count("split")
        return (1, 1, 4) if nsplit == 3 else (1, 2, 2)
    raise ArithmeticError(f"impossible decomposition of {ell} in {K}")  # pragma: no cover


def minkowski_class_number(K: BiquadField, height: int = 6) -> int:
    """Class number certified by principal generators of all small primes.

    Every class contains an ideal of norm at most the Minkowski bound, so the
    class group is generated by primes of norm <= bound.  K is Galois, so a
    prime of norm ell^f is principal iff some integer has |norm| = ell^f.
    Only class number one can be certified; anything else raises.
    """
    bound = K.minkowski_bound()
    if bound > MINKOWSKI_LIMIT:
        raise OracleError(f"Minkowski bound {bound:.2f} of {K} exceeds {MINKOWSKI_LIMIT}")
    targets = {}
    for ell in primes_up_to(int(bound)):
        e, f, g = prime_decomposition(K, ell)
        if ell**f <= bound:
            targets[ell**f] = ell
    if not targets:
        return 1
    basis = K.integral_basis
    emb = []
    sm, sn, sk = math.sqrt(K.m), math.sqrt(K.n), math.sqrt(K.k)
    for s1, s2 in SIGNS:
        emb.append([float(K.embed(w, s1, s2, sm, sn, sk)) for w in basis])
    found: dict[int, tuple[int, ...]] = {}
    rng = range(-height, height + 1)
    for x in itertools.product(rng, repeat=4):
        nv = 1.0
        for row in emb:
            nv *= row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3]
        key = round(abs(nv))
        if key in targets and key not in found and abs(abs(nv) - key) < 1e-6:
            elem = tuple(sum(xi * w[j] for xi, w in zip(x, basis)) for j in range(4))
            if abs(K.norm(elem)) == key:
                found[key] = x
                if len(found) == len(targets):
                    return 1
    missing = sorted(targets[k] for k in targets if k not in found)
    raise OracleError(f"no principal generator found for primes {missing} in {K}")
