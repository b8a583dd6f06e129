"""Quick cross-validation of the independent routes, used by ``z2tower selftest``."""
from __future__ import annotations

import random
import time
from typing import Callable

from . import _kernels_py, kernels
from .arith import factorize, primes_up_to, quartic_symbol_of_two
from .biquad import BiquadField, kuroda_class_number, minkowski_class_number
from .hilbert import dyadic_symbol_Q1
from .quadform import class_group, fundamental_unit, is_fundamental_discriminant
from .tower import verify_triple
from .zsqrt2 import (
    PRIME_GENERATOR_CLASSES,
    Zsqrt2,
    classify_sqrt2_behavior,
    factor_rational_prime,
    residue_class_mod_4sqrt2,
    totally_positive_associate,
)


def _kuroda_vs_minkowski() -> str:
    for m, n in ((2, 3), (2, 5), (3, 5)):
        K = BiquadField(m, n)
        hk, hm = kuroda_class_number(K).h, minkowski_class_number(K)
        if hk != hm:
            raise AssertionError(f"{K}: Kuroda {hk} != Minkowski {hm}")
    return "3 fields agree"


def _class_groups(limit: int = 1000) -> str:
    count = 0
    for D in range(5, limit):
        if not is_fundamental_discriminant(D):
            continue
        cg = class_group(D)
        st = cg.narrow_structure()
        t = len(factorize(D))
        if st.order != cg.narrow_order or st.rank(2) != t - 1:
            raise AssertionError(f"D={D}: structure {st} vs {cg.narrow_order} cycles, t={t}")
        count += 1
    return f"{count} discriminants"


def _pell(limit: int = 2000) -> str:
    count = 0
    for D in range(5, limit):
        if is_fundamental_discriminant(D):
            if not fundamental_unit(D).pell_holds():
                raise AssertionError(f"Pell fails for D={D}")
            count += 1
    return f"{count} units"


def _random_zsqrt2(rng: random.Random, size: int) -> Zsqrt2:
    while True:
        z = Zsqrt2(rng.randint(-size, size), rng.randint(-size, size))
        if z:
            return z


def _dyadic_invariance(n: int = 100) -> str:
    rng = random.Random(20240601)
    for _ in range(n):
        a, b, g = (_random_zsqrt2(rng, 300) for _ in range(3))
        if dyadic_symbol_Q1(a, b) != dyadic_symbol_Q1(a * g * g, b):
            raise AssertionError(f"dyadic symbol not square-invariant at {a}, {b}, {g}")
    return f"{n} pairs"


def _prime_generator_classes(limit: int = 2000) -> str:
    count = 0
    for p in primes_up_to(limit):
        if p % 16 != 9:
            continue
        for pi in factor_rational_prime(p).factors:
            tp = totally_positive_associate(pi)
            if residue_class_mod_4sqrt2(tp) not in PRIME_GENERATOR_CLASSES:
                raise AssertionError(f"{tp} above {p} outside the expected classes")
            if quartic_symbol_of_two(p) == -1 and classify_sqrt2_behavior(tp) != "inert":
                raise AssertionError(f"sqrt2 not inert in Q1(sqrt({tp}))")
        count += 1
    return f"{count} primes"


def _backends() -> str:
    if kernels.BACKEND == "python":
        return "compiled backend unavailable; fallback only"
    for D in (5, 8, 12, 40, 136, 5289, 42312, 1000005):
        f1 = kernels.reduced_forms(D)
        f2 = _kernels_py.reduced_forms(D)
        if f1 != f2 or kernels.cycle_labels(D, f1) != _kernels_py.cycle_labels(D, f2):
            raise AssertionError(f"backends disagree at D={D}")
    return f"{kernels.BACKEND} matches python"


def _worked_triple() -> str:
    rep = verify_triple(41, 3, 43)
    if not rep.passed:
        raise AssertionError(f"worked triple fails at {rep.first_failure()}")
    return "(41, 3, 43) passes"


CHECKS: list[tuple[str, Callable[[], str]]] = [
    ("kuroda-vs-minkowski", _kuroda_vs_minkowski),
    ("class-group-structure", _class_groups),
    ("pell-identities", _pell),
    ("dyadic-square-invariance", _dyadic_invariance),
    ("prime-generator-classes", _prime_generator_classes),
    ("kernel-backends", _backends),
    ("worked-triple", _worked_triple),
]


def run_selftests() -> list[tuple[str, bool, str]]:
    out = []
    for name, fn in CHECKS:
        start = time.perf_counter()
        try:
            detail, ok = fn(), True
        except Exception as exc:  # report every failure, keep going
            detail, ok = f"{type(exc).__name__}: {exc}", False
        out.append((name, ok, f"{detail} ({time.perf_counter() - start:.2f}s)"))
    return out
