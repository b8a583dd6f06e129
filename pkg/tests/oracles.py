"""Brute-force reference implementations used only by the tests.

Each oracle reaches its answer by a route that shares no code with the
package: exhaustive search, the analytic class number formula, or sympy.
"""
from __future__ import annotations

import itertools
import math
import warnings
from functools import lru_cache

import numpy as np
import sympy


def naive_is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


@lru_cache(maxsize=None)
def squares_mod(p: int) -> frozenset:
    return frozenset(x * x % p for x in range(p))


def naive_legendre(a: int, p: int) -> int:
    if a % p == 0:
        return 0
    return 1 if a % p in squares_mod(p) else -1


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for a discriminant D and n >= 1, by factoring n."""
    out = 1
    for ell, e in sympy.factorint(n).items():
        if ell == 2:
            v = 0 if D % 2 == 0 else (1 if D % 8 in (1, 7) else -1)
        else:
            v = naive_legendre(D, ell)
        out *= v**e
    return out


def kronecker_table(D: int) -> np.ndarray:
    """chi(a) = (D/a) for 0 <= a < D, built multiplicatively from prime values."""
    spf = list(range(D))
    for i in range(2, math.isqrt(D) + 1):
        if spf[i] == i:
            for j in range(i * i, D, i):
                if spf[j] == j:
                    spf[j] = i
    chi = np.zeros(D)
    if D > 1:
        chi[1] = 1
    for a in range(2, D):
        p = spf[a]
        if p == a:
            chi[a] = kronecker(D, p)
        else:
            chi[a] = chi[p] * chi[a // p]
    return chi


def analytic_h_times_regulator(D: int) -> float:
    """h * log(eps) = -1/2 sum_{a<D} chi(a) log sin(pi a / D) for real fields."""
    a = np.arange(1, D)
    chi = kronecker_table(D)[1:]
    return float(-0.5 * np.sum(chi * np.log(np.sin(np.pi * a / D))))


def brute_fundamental_unit(D: int, y_max: int | None = None) -> tuple[int, int, int] | None:
    """Smallest (x, y) > 0 with x^2 - D y^2 = +-4, preferring norm -1 on ties.

    Returns None when no solution has y <= y_max.
    """
    y = 1
    while y_max is None or y <= y_max:
        for s in (-4, 4):
            x2 = D * y * y + s
            if x2 > 0:
                x = math.isqrt(x2)
                if x * x == x2:
                    return x, y, s // 4
        y += 1
    return None


def brute_hilbert_Q(a: int, b: int, p) -> int:
    """Quadratic Hilbert symbol over Q_p by searching primitive zeros of ax^2+by^2-z^2."""
    if p == "inf":
        return -1 if a < 0 and b < 0 else 1
    va = sympy.multiplicity(p, a)
    vb = sympy.multiplicity(p, b)
    N = va + vb + (5 if p == 2 else 2)
    m = p**N
    sq_all = {z * z % m for z in range(m)}
    sq_unit = {z * z % m for z in range(m) if z % p}
    for x in range(m):
        ax = a * x * x
        for y in range(m):
            val = (ax + b * y * y) % m
            if x % p or y % p:
                if val in sq_all:
                    return 1
            elif val in sq_unit:
                return 1
    return -1


def cyclotomic_real_minpoly(n: int):
    """Minimal polynomial of 2 cos(2 pi / 2^(n+2)) via c_{n+1}^2 = 2 + c_n."""
    x = sympy.Symbol("x")
    f = x
    for _ in range(n):
        f = sympy.expand(f.subs(x, x**2 - 2))
    return sympy.Poly(f, x)


def brute_splitting_Qn(p: int, n: int) -> tuple[int, int]:
    """(g, f) of p in Q_n by factoring the minimal polynomial mod p."""
    poly = cyclotomic_real_minpoly(n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, factors = sympy.factor_list(poly.as_expr(), modulus=p)
    degs = [sympy.degree(f) * e for f, e in factors]
    if any(e > 1 for _, e in factors):
        raise ValueError("ramified")
    assert len(set(degs)) == 1
    return len(degs), degs[0]


def brute_tp_associate(a: int, b: int) -> tuple[int, int]:
    """Canonical totally positive associate by walking +-(1+sqrt2)^k, |k| <= 60."""
    best = None
    ea, eb = 1, 0  # (1+sqrt2)^k for k >= 0
    ia, ib = 1, 0  # (1+sqrt2)^-k = (-1+sqrt2)^k
    cands = []
    for _ in range(61):
        for ua, ub in ((ea, eb), (ia, ib)):
            for s in (1, -1):
                x, y = s * (a * ua + 2 * b * ub), s * (a * ub + b * ua)
                if x > 0 and x * x > 2 * y * y:
                    cands.append((x, y))
        ea, eb = ea + 2 * eb, ea + eb
        ia, ib = -ia + 2 * ib, ia - ib
    for c in cands:
        if best is None or (c[0], -c[1]) < (best[0], -best[1]):
            best = c
    return best


def brute_norm_solutions(p: int) -> list[tuple[int, int]]:
    """All (a, b), b >= 0, with a^2 - 2 b^2 = +-p and |a|, b bounded by sqrt(2p)+1."""
    out = []
    lim = math.isqrt(2 * p) + 2
    for a in range(-lim, lim + 1):
        for b in range(0, lim + 1):
            if abs(a * a - 2 * b * b) == p:
                out.append((a, b))
    return out


def brute_is_norm_Q1(alpha: tuple[int, int], d: int, height: int = 6, denominators=(1, 2, 3)) -> bool:
    """Search x, y in (1/N)Z[sqrt2] with x^2 - d y^2 = alpha inside a small box."""
    aa, ab = alpha
    rng = range(-height, height + 1)
    for N in denominators:
        ta, tb = aa * N * N, ab * N * N
        for y1 in rng:
            for y2 in rng:
                # d (y1 + y2 sqrt2)^2
                dy_a = d * (y1 * y1 + 2 * y2 * y2)
                dy_b = d * 2 * y1 * y2
                for x1 in rng:
                    for x2 in rng:
                        if x1 * x1 + 2 * x2 * x2 - dy_a == ta and 2 * x1 * x2 - dy_b == tb:
                            return True
    return False


def naive_scan(p_max: int, q_max: int, r_max: int) -> list[tuple[int, int, int]]:
    out = []
    for p in range(3, p_max + 1, 2):
        if not naive_is_prime(p) or p % 16 != 9 or pow(2, (p - 1) // 4, p) != p - 1:
            continue
        for q in range(3, q_max + 1, 2):
            if not naive_is_prime(q) or q % 8 != 3:
                continue
            for r in range(q + 2, r_max + 1, 2):
                if naive_is_prime(r) and r % 8 == 3 and naive_legendre(q * r, p) == -1:
                    out.append((p, q, r))
    return out


def sympy_unit_index(m: int, n: int) -> int:
    """Unit index of Q(sqrt m, sqrt n) by asking sympy whether sqrt(+-unit product) lies in the field."""
    from sympy.polys.numberfields import to_number_field
    from sympy.polys.polyerrors import IsomorphismFailed

    g = math.gcd(m, n)
    units = []
    for d in (m, n, m * n // (g * g)):
        # smallest (x, y) with x^2 - d y^2 = +-1 or, for d = 1 mod 4, +-4
        D = d if d % 4 == 1 else 4 * d
        x, y, _ = brute_fundamental_unit(D)
        units.append((sympy.Integer(x) + y * sympy.sqrt(D)) / 2)
    theta = sympy.sqrt(m) + sympy.sqrt(n)
    count = 1
    for size in (1, 2, 3):
        for subset in itertools.combinations(units, size):
            z = sympy.prod(subset)
            for s in (1, -1):
                try:
                    to_number_field(sympy.sqrt(s * z), theta)
                    count += 1
                except IsomorphismFailed:
                    pass
    return count


def _residues_of_squares():
    # Z[sqrt2]/<4 sqrt2> has representatives a mod 8, b mod 4
    mod4sqrt2, mod4 = set(), set()
    for a in range(8):
        for b in range(4):
            x2a, x2b = a * a + 2 * b * b, 2 * a * b
            mod4sqrt2.add((x2a % 8, x2b % 4))
            mod4.add((x2a % 4, x2b % 4))
    return mod4sqrt2, mod4


def brute_dyadic_behaviour(a: int, b: int) -> str:
    """Behaviour of <sqrt2> in Q(sqrt2)(sqrt(a + b sqrt2)) for odd a, by listing squares."""
    if a % 2 == 0:
        raise ValueError("even rational part")
    sq8, sq4 = _residues_of_squares()
    if (a % 8, b % 4) in sq8:
        return "split"
    if (a % 4, b % 4) in sq4:
        return "inert"
    return "ramified"
