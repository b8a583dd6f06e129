"""Genus fields, ambiguous class numbers and splitting in the layers Q_n."""
from __future__ import annotations

from dataclasses import dataclass
from math import prod

from .arith import factorize, is_squarefree
from .hilbert import hilbert_places_Q, hilbert_symbol_Q, is_global_norm
from .quadform import quadratic_discriminant
from .zsqrt2 import EPSILON, Zsqrt2


def prime_discriminant_radicand(p: int) -> int:
    """p* = p if p = 1 (mod 4) else -p."""
    return p if p % 4 == 1 else -p


def _vector(n: int, primes: list[int]) -> tuple[int, ...]:
    f = factorize(n)
    return (int(n < 0),) + tuple(f.get(p, 0) % 2 for p in primes)


def _from_vector(v: tuple[int, ...], primes: list[int]) -> int:
    sign = -1 if v[0] else 1
    return sign * prod(p for p, e in zip(primes, v[1:]) if e)


def _rref(vectors: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Reduced row echelon basis over F_2 (sign bit is the first column)."""
    rows = [list(v) for v in vectors]
    ncols = len(rows[0]) if rows else 0
    basis: list[list[int]] = []
    for col in range(ncols):
        pivot = next((r for r in rows if r[col] and all(r is not b for b in basis)), None)
        if pivot is None:
            continue
        for other in rows:
            if other is not pivot and other[col]:
                for c in range(ncols):
                    other[c] ^= pivot[c]
        basis.append(pivot)
    return [tuple(b) for b in basis if any(b)]


@dataclass(frozen=True)
class GenusFieldDescription:
    base_d: int
    discriminant: int
    # radicands generating the narrow genus field Q(sqrt D, sqrt p1*, ...)
    narrow_generators: tuple[int, ...]
    # radicands generating the genus field itself (maximal real subfield for real L)
    generators: tuple[int, ...]
    # radicands generating the genus field over Q(sqrt d)
    relative_generators: tuple[int, ...]
    real_subfield_flag: bool
    ramified_primes: tuple[int, ...]

    @property
    def narrow_relative_rank(self) -> int:
        return len(self.narrow_generators) - 1

    def equals_base_adjoin(self, x: int) -> bool:
        """Whether the genus field is Q(sqrt d, sqrt x)."""
        if len(self.relative_generators) != 1:
            return False
        primes = sorted(set(factorize(abs(self.base_d * x))) | set(self.ramified_primes))
        vx = _vector(x, primes)
        base = _vector(self.base_d, primes)
        rel = _vector(self.relative_generators[0], primes)
        both = tuple(a ^ b for a, b in zip(base, rel))
        return vx in (rel, both)

    def describe(self) -> str:
        return "Q(" + ", ".join(f"sqrt({g})" for g in self.generators) + ")"


def genus_field(d: int) -> GenusFieldDescription:
    """Genus field of Q(sqrt d) for squarefree d != 1."""
    if d == 1 or not is_squarefree(d):
        raise ValueError(f"{d} is not a squarefree radicand")
    D = quadratic_discriminant(d)
    odd = sorted(p for p in factorize(D) if p != 2)
    ramified = tuple(sorted(factorize(D)))
    primes = sorted(set(factorize(D)) | set(odd))
    gens = [d] + [prime_discriminant_radicand(p) for p in odd]
    narrow = [_from_vector(v, primes) for v in _rref([_vector(g, primes) for g in gens])]
    real = d > 0
    if real:
        # keep the subgroup of positive radicands (kernel of the sign bit)
        vecs = _rref([_vector(g, primes) for g in gens])
        signed = [v for v in vecs if v[0]]
        positive = [v for v in vecs if not v[0]]
        if signed:
            first = signed[0]
            positive += [tuple(a ^ b for a, b in zip(first, v)) for v in signed[1:]]
        full = [_from_vector(v, primes) for v in _rref(positive)] if positive else []
    else:
        full = narrow
    base_vec = _vector(d, primes)
    relative = []
    span = [tuple([0] * len(base_vec)), base_vec]
    for g in sorted(full, key=abs):
        v = _vector(g, primes)
        if v in span:
            continue
        relative.append(g)
        span = span + [tuple(a ^ b for a, b in zip(s, v)) for s in span]
    return GenusFieldDescription(
        base_d=d,
        discriminant=D,
        narrow_generators=tuple(sorted(narrow, key=abs)),
        generators=tuple(sorted(full, key=abs)),
        relative_generators=tuple(relative),
        real_subfield_flag=real,
        ramified_primes=ramified,
    )


@dataclass(frozen=True)
class GenusRankInput:
    t: int  # primes ramified in L/K
    unit_norm_index_log: int  # e with [E(K) : E(K) cap N L^x] = 2^e
    base_class_order: int = 1  # #A(K)


def ambiguous_order(inp: GenusRankInput) -> int:
    """#A(L)^G from the ambiguous class number formula for a quadratic L/K."""
    if inp.t < 1 or inp.unit_norm_index_log < 0 or inp.base_class_order < 1:
        raise ValueError(f"invalid genus input {inp}")
    num = inp.base_class_order * 2 ** (inp.t - 1)
    den = 2**inp.unit_norm_index_log
    if num % den:
        raise ValueError(f"inconsistent genus input {inp}: non-integral ambiguous order")
    return num // den


def rank_from_ambiguous_order(order: int) -> int:
    """With trivial base 2-class group, #A(L)^G = 2^rank."""
    r = order.bit_length() - 1
    if 1 << r != order:
        raise ValueError(f"{order} is not a power of two")
    return r


def norm_index_over_Q(d: int) -> int:
    """log2 [ {+-1} : {+-1} cap N Q(sqrt d)^x ]."""
    if d == 1 or not is_squarefree(d):
        raise ValueError(f"{d} is not a squarefree radicand")
    ok = all(hilbert_symbol_Q(-1, d, v) == 1 for v in hilbert_places_Q(-1, d))
    return 0 if ok else 1


def unit_norm_facts_Q1(d: int) -> dict[str, tuple]:
    """Global-norm status of -1, 1+sqrt2 and -(1+sqrt2) in Q1(sqrt d)/Q1."""
    out = {}
    for name, u in (("-1", Zsqrt2(-1)), ("1+sqrt2", EPSILON), ("-(1+sqrt2)", -EPSILON)):
        out[name] = is_global_norm(u, d)
    return out


def norm_index_over_Q1(d: int, facts: dict[str, tuple] | None = None) -> int:
    """log2 [E(Q1) : E(Q1) cap N k1^x] for k1 = Q1(sqrt d)."""
    if d % 2 == 0 or not is_squarefree(d):
        raise ValueError(f"{d} must be odd and squarefree")
    facts = facts if facts is not None else unit_norm_facts_Q1(d)
    # E/E^2 = {1, -1, eps, -eps}; the norm classes form a subgroup of it
    size = 1 + sum(1 for ok, _ in facts.values() if ok)
    if size not in (1, 2, 4):  # pragma: no cover - subgroup property
        raise ArithmeticError(f"unit norm classes do not form a subgroup: {size}")
    return {1: 2, 2: 1, 4: 0}[size]


def splitting_in_Qn(p: int, n: int) -> tuple[int, int]:
    """(g, f) for an odd prime p in Q_n, the real subfield of Q(zeta_{2^(n+2)})."""
    if p % 2 == 0:
        raise ValueError("odd primes only")
    if not 0 <= n <= 4:
        raise ValueError("level must be in 0..4")
    m = 2 ** (n + 2)
    x, f = p % m, 1
    while x not in (1, m - 1):
        x = x * p % m
        f += 1
    return 2**n // f, f


def ramified_count_kn_over_Qn(p: int, q: int, r: int, n: int) -> int:
    """Primes of Q_n ramified in k_n = Q_n(sqrt(pqr)); the dyadic prime splits."""
    if not 0 <= n <= 2:
        raise ValueError("level must be in 0..2")
    if (p * q * r) % 8 != 1:
        raise ValueError("pqr must be 1 mod 8 for the dyadic prime to split")
    return sum(splitting_in_Qn(x, n)[0] for x in (p, q, r))


def two_splits_completely_in_genus_field(p: int, q: int, r: int) -> bool:
    return p % 8 == 1 and (q * r) % 8 == 1
