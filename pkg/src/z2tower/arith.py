"""Integer primitives and the residue symbols that gate a prime triple."""
from __future__ import annotations

from dataclasses import dataclass, asdict

# Deterministic for n < 3.3e24 (first 13 primes as Miller-Rabin witnesses).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3_317_044_064_679_887_385_961_981


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    if n >= _MR_LIMIT:
        raise ValueError(f"{n} exceeds the deterministic Miller-Rabin range")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def _symbol_from_power(x: int, p: int) -> int:
    if x == 0:
        return 0
    if x == 1:
        return 1
    if x == p - 1:
        return -1
    raise ArithmeticError(f"power residue {x} mod {p} is not 0 or +-1")


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) by Euler's criterion."""
    if p < 3 or p % 2 == 0:
        raise ValueError(f"legendre needs an odd prime, got {p}")
    return _symbol_from_power(pow(a % p, (p - 1) // 2, p), p)


def quartic_symbol_of_two(p: int) -> int:
    """(2/p)_4 = 2^((p-1)/4) mod p, defined for p = 1 (mod 8)."""
    if p % 8 != 1:
        raise ValueError(f"quartic symbol of 2 needs p = 1 mod 8, got {p}")
    return _symbol_from_power(pow(2, (p - 1) // 4, p), p)


def sqrt_mod_prime(a: int, p: int) -> int:
    """A square root of a modulo an odd prime p (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| (n != 0)."""
    from sympy import factorint

    if n == 0:
        raise ValueError("cannot factor 0")
    return {int(p): int(e) for p, e in factorint(abs(n)).items()}


def squarefree_part(n: int) -> int:
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorize(n).items():
        if e % 2:
            out *= p
    return sign * out


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factorize(n).values())


@dataclass(frozen=True)
class ConditionReport:
    p: int
    q: int
    r: int
    p_mod16: bool
    q_mod8: bool
    r_mod8: bool
    legendre_qr_p: bool
    quartic_two_p: bool

    @property
    def passes(self) -> bool:
        return (
            self.p_mod16
            and self.q_mod8
            and self.r_mod8
            and self.legendre_qr_p
            and self.quartic_two_p
        )

    def failed_clauses(self) -> list[str]:
        names = ("p_mod16", "q_mod8", "r_mod8", "legendre_qr_p", "quartic_two_p")
        return [n for n in names if not getattr(self, n)]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passes"] = self.passes
        return d


def check_condition1(p: int, q: int, r: int) -> ConditionReport:
    """Evaluate the five defining congruence/symbol clauses for (p, q, r)."""
    for x in (p, q, r):
        if x % 2 == 0 or not is_prime(x):
            raise ValueError(f"{x} is not an odd prime")
    if len({p, q, r}) != 3:
        raise ValueError(f"primes must be distinct: {(p, q, r)}")
    quartic = p % 8 == 1 and quartic_symbol_of_two(p) == -1
    return ConditionReport(
        p, q, r,
        p_mod16=p % 16 == 9,
        q_mod8=q % 8 == 3,
        r_mod8=r % 8 == 3,
        legendre_qr_p=legendre(q * r, p) == -1,
        quartic_two_p=quartic,
    )
