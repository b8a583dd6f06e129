import math
import random
from collections import Counter

import pytest
import sympy
from hypothesis import given, strategies as st

from z2tower.arith import factorize
from z2tower.quadform import (
    MAX_GROUP_ORDER,
    AbelianGroupStructure,
    BinaryQuadForm,
    ClassGroup,
    FiniteAbelianGroup,
    ResourceError,
    class_group,
    class_number,
    compose,
    fundamental_unit,
    ideal_class_order,
    is_fundamental_discriminant,
    is_reduced,
    narrow_class_group,
    prime_form,
    principal_form,
    quadratic_discriminant,
    reduce,
    reduced_cycles,
    rho,
    wide_class_group,
    wide_class_group_2part,
)
from oracles import analytic_h_times_regulator, brute_fundamental_unit

FUNDAMENTAL = [D for D in range(5, 5000) if is_fundamental_discriminant(D)]


def transform(f: BinaryQuadForm, m) -> BinaryQuadForm:
    """f(alpha x + beta y, gamma x + delta y) for m = (alpha, beta, gamma, delta) in SL2(Z)."""
    a, b, c = f
    al, be, ga, de = m
    return BinaryQuadForm(
        a * al * al + b * al * ga + c * ga * ga,
        2 * a * al * be + b * (al * de + be * ga) + 2 * c * ga * de,
        a * be * be + b * be * de + c * de * de,
    )


def random_sl2(rng: random.Random):
    # product of elementary matrices
    m = (1, 0, 0, 1)
    for _ in range(rng.randint(1, 6)):
        k = rng.randint(-4, 4)
        e = (1, k, 0, 1) if rng.random() < 0.5 else (1, 0, k, 1)
        a, b, c, d = m
        m = (a * e[0] + b * e[2], a * e[1] + b * e[3], c * e[0] + d * e[2], c * e[1] + d * e[3])
    return m


def test_fundamental_discriminants():
    assert [D for D in range(1, 30) if is_fundamental_discriminant(D)] == [5, 8, 12, 13, 17, 21, 24, 28, 29]
    assert quadratic_discriminant(5289) == 5289
    assert quadratic_discriminant(10578) == 42312


def test_reduce_examples():
    f = reduce(BinaryQuadForm(1, 2, -1))
    assert f.a == 1 and is_reduced(f)
    g = BinaryQuadForm(1, 71, (71 * 71 - 5289) // 4)
    assert is_reduced(g) and reduce(g) == g
    assert principal_form(5289) == g


def test_reduce_rejects_bad_forms():
    with pytest.raises(ValueError):
        reduce(BinaryQuadForm(2, 2, -2))
    with pytest.raises(ValueError):
        reduce(BinaryQuadForm(0, 3, 1))
    with pytest.raises(ValueError):
        reduce(BinaryQuadForm(1, 2, 1))


def test_rho_walks_the_cycle():
    for D in (40, 136, 5289, 42312):
        for cyc in reduced_cycles(D):
            f = cyc[0]
            seen = [f]
            g = rho(f)
            while g != f:
                assert is_reduced(g) and g in cyc
                seen.append(g)
                g = rho(g)
            assert sorted(seen) == sorted(cyc)


def test_equivalent_forms_reduce_into_the_same_cycle():
    rng = random.Random(17)
    for D in [40, 136, 1996, 5289, 42312]:
        cg = class_group(D)
        for cyc in reduced_cycles(D):
            f = cyc[0]
            for _ in range(25):
                g = transform(f, random_sl2(rng))
                if g.a == 0:
                    continue
                assert g.discriminant == D
                assert cg.class_of(g) == cg.class_of(f)


def test_composition_is_well_defined_on_classes():
    rng = random.Random(23)
    for D in [136, 1996, 5289, 42312, 3 * 11 * 41 * 4]:
        if not is_fundamental_discriminant(D):
            continue
        cg = class_group(D)
        reps = cg.representatives
        for _ in range(40):
            i, j = rng.randrange(len(reps)), rng.randrange(len(reps))
            target = cg._mul(i, j)
            for _ in range(3):
                f, g = transform(reps[i], random_sl2(rng)), transform(reps[j], random_sl2(rng))
                if f.a > 0 and g.a > 0:
                    assert cg.class_of(compose(f, g)) == target


def test_compose_checks_input():
    with pytest.raises(ValueError):
        compose(principal_form(5), principal_form(8))
    with pytest.raises(ValueError):
        compose(BinaryQuadForm(-1, 1, 1), principal_form(5))


def test_group_examples():
    assert narrow_class_group(5).order == 1
    st5289 = narrow_class_group(5289)
    assert st5289.sylow(2).order == 4 and st5289.rank(2) == 2
    assert narrow_class_group(42312).sylow(2).rank(2) == 3
    assert wide_class_group_2part(5289).cyclic_orders == (2,)
    assert wide_class_group_2part(42312).cyclic_orders == (2, 2)
    assert wide_class_group_2part(8).cyclic_orders == ()
    assert narrow_class_group(136).cyclic_orders == (4,)
    assert wide_class_group(1996).cyclic_orders == (5,)


@pytest.mark.parametrize("ell,D,expected", [(2, 5289, 1), (3, 42312, 2), (41, 42312, 2), (43, 42312, 2)])
def test_ideal_class_order_examples(ell, D, expected):
    assert ideal_class_order(ell, D) == expected


def test_ideal_class_order_rejects_inert():
    with pytest.raises(ValueError):
        ideal_class_order(13, 5289)  # 5289 = 11 mod 13, a non-residue
    with pytest.raises(ValueError):
        prime_form(7, 5)


def test_prime_form_norms():
    for D in (5289, 42312, 40, 12):
        for ell in (2, 3, 5, 7, 11, 13, 41, 43):
            try:
                f = prime_form(ell, D)
            except ValueError:
                assert sympy.jacobi_symbol(D % ell, ell) == -1 if ell != 2 else D % 8 == 5
                continue
            assert f.a == ell and f.discriminant == D


@pytest.mark.parametrize("D,x,y,norm", [(8, 2, 1, -1), (12, 4, 1, 1), (40, 6, 1, -1), (5, 1, 1, -1)])
def test_fundamental_unit_examples(D, x, y, norm):
    u = fundamental_unit(D)
    assert (u.x, u.y, u.unit_norm) == (x, y, norm)
    assert u.pell_holds()


def test_fundamental_unit_matches_brute_force():
    y_max = 20000
    for D in FUNDAMENTAL[:300]:
        u = fundamental_unit(D)
        brute = brute_fundamental_unit(D, y_max)
        if brute is None:
            assert u.y > y_max
        else:
            assert (u.x, u.y, u.unit_norm) == brute


def test_pell_identity_large():
    for D in range(10**5, 10**5 + 3000):
        if is_fundamental_discriminant(D):
            u = fundamental_unit(D)
            assert u.pell_holds() and u.x > 0 and u.y > 0


def test_class_number_matches_analytic_formula():
    for D in FUNDAMENTAL:
        if D > 3000:
            break
        u = fundamental_unit(D)
        reg = math.log((u.x + u.y * math.sqrt(D)) / 2)
        h = analytic_h_times_regulator(D) / reg
        assert abs(h - class_number(D)) < 1e-6, D


def test_narrow_structure_consistency_and_genus_rank():
    for D in FUNDAMENTAL:
        cg = class_group(D)
        st_ = cg.narrow_structure()
        assert st_.order == cg.narrow_order == len(reduced_cycles(D))
        assert st_.rank(2) == len(factorize(D)) - 1
        ds = st_.cyclic_orders
        assert all(ds[i + 1] % ds[i] == 0 for i in range(len(ds) - 1))


def _principal_cycle_has_minus_one(D):
    pf = principal_form(D)
    for cyc in reduced_cycles(D):
        if pf in cyc:
            return any(f.a == -1 for f in cyc)
    raise AssertionError


def test_wide_versus_narrow():
    for D in FUNDAMENTAL:
        cg = class_group(D)
        u = fundamental_unit(D)
        ratio = cg.narrow_order // cg.wide_order
        assert cg.narrow_order % cg.wide_order == 0
        assert ratio == (2 if u.unit_norm == 1 else 1)
        # brute force: a generator of negative norm is equivalent to the identity
        assert _principal_cycle_has_minus_one(D) == (u.unit_norm == -1)
        # the kernel class is the class of <sqrt d>, the product of primes over d
        d = D if D % 4 == 1 else D // 4
        f = principal_form(D)
        for ell in factorize(d):
            f = reduce(compose(f, prime_form(ell, D))) if f.a > 0 else f
            if f.a < 0:
                f = next(g for cyc in reduced_cycles(D) for g in cyc
                         if cg.class_of(g) == cg.class_of(f) and g.a > 0)
        assert cg.class_of(f) == cg.negative_principal


def test_bound_and_input_errors():
    with pytest.raises(ResourceError):
        ClassGroup(5289, bound=1000)
    with pytest.raises(ValueError):
        ClassGroup(20)  # not fundamental
    with pytest.raises(ValueError):
        ClassGroup(16)


def _invariant_factors(orders):
    """Invariant factors of a product of cyclic groups, from prime powers."""
    powers = {}
    for n in orders:
        for p, e in sympy.factorint(n).items():
            powers.setdefault(p, []).append(p**e)
    width = max((len(v) for v in powers.values()), default=0)
    cols = [sorted(v, reverse=True) + [1] * (width - len(v)) for v in powers.values()]
    return tuple(sorted(math.prod(c[i] for c in cols) for i in range(width)))


@given(st.lists(st.integers(min_value=2, max_value=12), min_size=0, max_size=3))
def test_group_structure_of_products_of_cyclic_groups(orders):
    n = math.prod(orders)
    if n > MAX_GROUP_ORDER:
        return

    def decode(x):
        out = []
        for m in orders:
            out.append(x % m)
            x //= m
        return out

    def encode(v):
        x = 0
        for m, c in zip(reversed(orders), reversed(v)):
            x = x * m + c
        return x

    def mul(x, y):
        return encode([(a + b) % m for a, b, m in zip(decode(x), decode(y), orders)])

    g = FiniteAbelianGroup(n, mul, 0)
    factors, gens = g.structure()
    assert factors == _invariant_factors(orders)
    assert [g.order_of(x) for x in gens] == list(factors)
    s = AbelianGroupStructure(factors)
    assert s.order == n


def test_structure_refuses_huge_groups():
    g = FiniteAbelianGroup(MAX_GROUP_ORDER + 1, lambda x, y: (x + y) % (MAX_GROUP_ORDER + 1), 0)
    with pytest.raises(ResourceError):
        g.structure()


def test_quotient_group():
    g = FiniteAbelianGroup(8, lambda x, y: (x + y) % 8, 0)
    q, labels = g.quotient([0, 4])
    assert q.n == 4 and q.structure()[0] == (4,)
    assert labels[1] == labels[5]


def test_structure_string():
    assert str(AbelianGroupStructure((2, 2))) == "Z/2Z + Z/2Z"
    assert str(AbelianGroupStructure(())) == "1"
    assert AbelianGroupStructure((2, 12)).sylow(2).cyclic_orders == (2, 4)
    assert AbelianGroupStructure((2, 12)).sylow(3).cyclic_orders == (3,)
