"""Pure-Python reduced-form kernels (fallback for the compiled core).

Both backends return the same thing: ``forms``, a list of ``(a, b)`` pairs
for every reduced form of discriminant D (c is implied), ordered by
(b, |a|, sign), and ``labels``, the cycle index of each form under the
reduction operator.
"""
from math import isqrt

BACKEND = "python"


def _small_primes(n):
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i in range(n + 1) if sieve[i]]


def _divisors_in(n, lo, hi, primes):
    fac = []
    m = n
    for p in primes:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            fac.append((p, e))
    if m > 1:
        fac.append((m, 1))
    divs = [1]
    for p, e in fac:
        divs = [d * p**k for d in divs for k in range(e + 1) if d * p**k <= hi]
    return sorted(d for d in divs if d >= lo)


def reduced_forms(D):
    s = isqrt(D)
    primes = _small_primes(isqrt(D // 4) + 1)
    out = []
    for b in range(2 - D % 2, s + 1, 2):
        n = (D - b * b) // 4
        lo = (s - b + 2) // 2
        hi = (s + b) // 2
        for a in _divisors_in(n, lo, hi, primes):
            out.append((a, b))
            out.append((-a, b))
    return out


def cycle_labels(D, forms):
    s = isqrt(D)
    index = {f: i for i, f in enumerate(forms)}
    labels = [-1] * len(forms)
    ncycles = 0
    for start in range(len(forms)):
        if labels[start] >= 0:
            continue
        a, b = forms[start]
        i = start
        while labels[i] < 0:
            labels[i] = ncycles
            c = (b * b - D) // (4 * a)
            two_c = 2 * abs(c)
            b = s - (s + b) % two_c
            a = c
            i = index[(a, b)]
        if i != start:
            raise ArithmeticError(f"reduction walk from {forms[start]} did not close")
        ncycles += 1
    return labels, ncycles
