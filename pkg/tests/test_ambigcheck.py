"""Both routes to the ambiguous ray-class count, checked against each other
and against independent oracles: brute-force (Z/m)^* / {+-1} arithmetic for
the rational ray group, and the genus-theory closed form 2^(t-1) / 2^(t-2)
for the m = 1 quadratic cases."""
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raycap.ambigcheck import (
    AmbigReport,
    ambig_case,
    ambig_sweep,
    ambiguous_count_direct,
    ambiguous_count_formula,
    fundamental_field_params,
    norm_index_units,
    rayclass_Q,
    rayclass_Q_generators,
    unit_dlog,
)
from raycap.biquad import biquad_field, class_number
from raycap.errors import BudgetError, InputError
from raycap.exactmath import factor
from raycap.quadfield import (
    QElt,
    class_group,
    fundamental_unit,
    modulus_from_rational,
    quadratic_field,
    ray_class_group,
)


# ---------------------------------------------------------------------------
# brute-force oracle for (Z/m)^* modulo {+-1}


def _cls(a: int, m: int) -> int:
    a %= m
    return min(a, (m - a) % m)


def brute_classes(m: int) -> set[int]:
    if m <= 2:
        return {1 % m}
    return {_cls(a, m) for a in range(1, m) if math.gcd(a, m) == 1}


def brute_order(a: int, m: int) -> int:
    k, x = 1, a % m
    while _cls(x, m) != _cls(1, m):
        x = x * a % m
        k += 1
    return k


def brute_closure(gens, m: int) -> set[int]:
    seen = {_cls(1, m)}
    frontier = [1]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g % m
            if _cls(y, m) not in seen:
                seen.add(_cls(y, m))
                frontier.append(y)
    return seen


SQUAREFREE_M = [m for m in range(1, 101) if all(k == 1 for k in factor(m).values())]


class TestRayclassQ:
    def test_trivial_moduli(self):
        assert rayclass_Q(1).order() == 1
        assert rayclass_Q(2).order() == 1
        assert rayclass_Q_generators(2) == ()

    def test_mod_five(self):
        assert rayclass_Q(5).invariants == (2,)

    def test_mod_twelve(self):
        # (Z/12)^* is a Klein group and -1 folds one factor away
        assert rayclass_Q(12).invariants == (2,)
        assert rayclass_Q_generators(12) == (7, 5)

    @pytest.mark.parametrize("m", SQUAREFREE_M)
    def test_matches_brute_squarefree(self, m):
        self._check_against_brute(m)

    @pytest.mark.parametrize("m", [4, 8, 9, 12, 16, 45, 99, 100])
    def test_matches_brute_prime_powers(self, m):
        # squarefree is all the callers need, but the construction is general
        self._check_against_brute(m)

    def _check_against_brute(self, m):
        group = rayclass_Q(m)
        classes = brute_classes(m)
        assert group.order() == len(classes)
        # same number of solutions of x^e = 1 for every divisor e: fixes the
        # isomorphism class without picking a generator set
        for e in range(1, group.order() + 1):
            if group.order() % e:
                continue
            brute_killed = sum(1 for a in classes if _cls(pow(a, e, m) if m > 1 else 0, m) == _cls(1, m))
            group_killed = math.prod(math.gcd(e, n) for n in group.invariants)
            assert brute_killed == group_killed
        gens = rayclass_Q_generators(m)
        assert all(math.gcd(g, m) == 1 for g in gens)
        assert brute_closure(gens, m) == classes
        # the i-th residue is the i-th ambient basis vector of the group
        for i, g in enumerate(gens):
            e_i = [1 if j == i else 0 for j in range(len(gens))]
            assert group.element_order(group.dlog_ambient(e_i)) == brute_order(g, m)

    def test_rejects_nonpositive(self):
        with pytest.raises(InputError):
            rayclass_Q(0)


# ---------------------------------------------------------------------------
# exact unit discrete logs


class TestUnitDlog:
    @settings(max_examples=60)
    @given(
        d=st.sampled_from([2, 3, 5, 13, 34]),
        a=st.integers(min_value=-50, max_value=50),
        s=st.booleans(),
    )
    def test_roundtrip(self, d, a, s):
        field = quadratic_field(d)
        eps = fundamental_unit(field)
        base = eps if a >= 0 else eps.conj() * eps.norm()
        w = base ** abs(a)
        if s:
            w = -w
        assert unit_dlog(field, w) == (int(s), a)

    def test_huge_exponent_is_exact(self):
        field = quadratic_field(5)
        eps = fundamental_unit(field)
        assert unit_dlog(field, eps**2000) == (0, 2000)

    def test_rejects_non_units(self):
        field = quadratic_field(2)
        with pytest.raises(InputError):
            unit_dlog(field, QElt(field, 2, 0))

    def test_rejects_imaginary_field(self):
        field = quadratic_field(-1)
        with pytest.raises(InputError):
            unit_dlog(field, QElt(field, -1, 0))


# ---------------------------------------------------------------------------
# the unit norm index


class TestNormIndexUnits:
    def test_norm_minus_one_unit_gives_index_one(self):
        assert norm_index_units(quadratic_field(2), None, 1) == 1

    def test_norm_plus_one_unit_gives_index_two(self):
        assert norm_index_units(quadratic_field(3), None, 1) == 2

    def test_gaussian_mod_five(self):
        # E^5_Q is trivial, so nothing to measure
        assert norm_index_units(quadratic_field(-1), None, 5) == 1

    @pytest.mark.parametrize("d", [2, 3, 5, 6, 7, 10, 11, 13, 15, 34])
    def test_trivial_modulus_reads_off_the_unit_norm(self, d):
        field = quadratic_field(d)
        want = 1 if fundamental_unit(field).norm() == -1 else 2
        assert norm_index_units(field, None, 1) == want

    @pytest.mark.parametrize("d", [-1, -2, -3, -5, -6, -7])
    def test_imaginary_trivial_modulus_is_two(self, d):
        # norms of roots of unity are +1, and E^1_Q = {+-1}
        assert norm_index_units(quadratic_field(d), None, 1) == 2

    def test_biquad_values(self):
        # pinned by the count identity on class-number-one fields
        L = biquad_field(2, 5)
        assert norm_index_units(L, L.k1, modulus_from_rational(L.k1, 1)) == 1
        L = biquad_field(6, 5)
        assert norm_index_units(L, L.k1, modulus_from_rational(L.k1, 1)) == 2

    def test_shape_errors(self):
        L = biquad_field(2, 5)
        other = quadratic_field(7)
        with pytest.raises(InputError):
            norm_index_units(L, other, modulus_from_rational(other, 1))
        with pytest.raises(InputError):
            norm_index_units(L, L.k1, modulus_from_rational(L.k2, 1))
        with pytest.raises(InputError):
            norm_index_units(quadratic_field(2), quadratic_field(2), 1)
        with pytest.raises(InputError):
            norm_index_units("Q", None, 1)


# ---------------------------------------------------------------------------
# the two counts


def genus_expected(d: int) -> int:
    """Classical closed form for the ambiguous-ideal count at m = 1."""
    field = quadratic_field(d)
    t = len(factor(abs(field.D)))
    if d < 0:
        return 2 ** (t - 1)
    if fundamental_unit(field).norm() == -1:
        return 2 ** (t - 1)
    return 2 ** (t - 2)


class TestAmbiguousCounts:
    def test_formula_real_split(self):
        assert ambiguous_count_formula(quadratic_field(2), None, 1) == 1

    def test_formula_gaussian_mod_five(self):
        assert ambiguous_count_formula(quadratic_field(-1), None, 5) == 4

    def test_direct_real_split(self):
        assert ambiguous_count_direct(quadratic_field(2), None, 1) == 1

    def test_direct_gaussian_mod_five(self):
        assert ambiguous_count_direct(quadratic_field(-1), None, 5) == 4

    def test_genus_sanity_minus_five(self):
        field = quadratic_field(-5)
        assert ambiguous_count_formula(field, None, 1) == 2
        assert ambiguous_count_direct(field, None, 1) == 2

    def test_degenerate_rational(self):
        assert ambiguous_count_formula(None, None, 7) == rayclass_Q(7).order() == 3
        assert ambiguous_count_direct(None, None, 7) == 3

    def test_degenerate_quadratic(self):
        K = quadratic_field(-5)
        m = modulus_from_rational(K, 3)
        want = ray_class_group(K, m).group.order()
        assert ambiguous_count_formula(K, K, m) == want
        assert ambiguous_count_direct(K, K, m) == want

    def test_ambiguous_ideals_versus_ambiguous_classes(self):
        # h(Q(sqrt 34)) = 2, yet both ramified primes are principal
        # (6 + sqrt34 and 17 + 3 sqrt34 have norms 2 and -17), so the
        # count of classes of ambiguous ideals is 1, not 2
        field = quadratic_field(34)
        assert class_group(field).h == 2
        assert ambiguous_count_formula(field, None, 1) == 1
        assert ambiguous_count_direct(field, None, 1) == 1

    @pytest.mark.parametrize("d", fundamental_field_params(120))
    def test_trivial_modulus_matches_genus_theory(self, d):
        field = quadratic_field(d)
        want = genus_expected(d)
        assert ambiguous_count_formula(field, None, 1) == want
        assert ambiguous_count_direct(field, None, 1) == want

    @pytest.mark.parametrize(
        "d,m",
        [(-5, 5), (-5, 15), (10, 5), (34, 17), (15, 15), (21, 7), (-21, 21),
         (-35, 35), (2, 7), (-6, 35), (13, 3), (-13, 11)],
    )
    def test_formula_equals_direct_with_modulus(self, d, m):
        field = quadratic_field(d)
        formula = ambiguous_count_formula(field, None, m)
        assert formula == ambiguous_count_direct(field, None, m)
        assert formula >= 1

    @pytest.mark.parametrize(
        "case",
        [
            ("biquad", 2, 5, 1, ()),
            ("biquad", 6, 5, 1, ()),
            ("biquad", 3, 5, 1, (7,)),
            ("biquad", 2, 5, 1, (11,)),
            ("biquad", 2, 13, 2, ()),
            ("biquad", 2, 13, 3, (7,)),
            ("biquad", 3, 5, 2, (11,)),
            ("biquad", 7, 5, 3, ()),
            ("biquad", 2, 5, 1, (5,)),
        ],
    )
    def test_biquad_formula_equals_direct(self, case):
        report = ambig_case(case)
        assert report.equal, report.as_dict()
        assert report.degree == 2
        assert report.formula >= 1

    def test_nonprincipal_biquad_is_a_budget_error(self):
        L = biquad_field(5, 29)
        assert class_number(L) != 1
        with pytest.raises(BudgetError):
            ambiguous_count_direct(L, L.k1, modulus_from_rational(L.k1, 1))

    def test_even_modulus_rejected(self):
        with pytest.raises(InputError):
            ambiguous_count_formula(quadratic_field(2), None, 2)
        with pytest.raises(InputError):
            ambiguous_count_direct(quadratic_field(5), None, 6)
        L = biquad_field(3, 5)
        with pytest.raises(InputError):
            ambiguous_count_formula(L, L.k1, modulus_from_rational(L.k1, 2))

    def test_shape_errors(self):
        with pytest.raises(InputError):
            ambiguous_count_formula(quadratic_field(2), quadratic_field(3), 1)
        with pytest.raises(InputError):
            ambiguous_count_direct([], None, 1)

    @settings(max_examples=40, deadline=None)
    @given(
        d=st.sampled_from(fundamental_field_params(80)),
        m=st.sampled_from([1, 3, 5, 7, 11, 13, 15, 21, 33, 35]),
    )
    def test_identity_holds_on_random_cases(self, d, m):
        field = quadratic_field(d)
        assert ambiguous_count_formula(field, None, m) == ambiguous_count_direct(
            field, None, m
        )


# ---------------------------------------------------------------------------
# sweep plumbing


class TestSweep:
    def test_order_and_params_preserved(self):
        cases = [("quad", -5, 1), ("quad", 2, 7), ("biquad", 2, 5, 1, (11,))]
        reports = ambig_sweep(cases)
        assert [r.params for r in reports] == [
            ("quad", -5, 1),
            ("quad", 2, 7),
            ("biquad", 2, 5, 1, (11,)),
        ]
        assert all(r.equal for r in reports)

    def test_reports_are_deterministic(self):
        a = ambig_sweep([("quad", -21, 21)])[0]
        b = ambig_sweep([("quad", -21, 21)])[0]
        assert a == b
        assert json.dumps(a.as_dict(), sort_keys=True) == json.dumps(
            b.as_dict(), sort_keys=True
        )

    def test_report_contents(self):
        r = ambig_case(("quad", -1, 5))
        assert isinstance(r, AmbigReport)
        assert r.extension == "Q(sqrt(-1))/Q"
        assert r.base_ray_order == 2
        assert r.local_degrees == (2,)
        assert r.ramified_e == (2,)
        assert r.norm_index == 1
        assert r.formula == r.direct == 4
        d = r.as_dict()
        assert d["equal"] is True and d["params"] == ["quad", -1, 5]

    def test_unknown_kind(self):
        with pytest.raises(InputError):
            ambig_case(("cubic", 2, 3))


class TestFundamentalParams:
    def test_small_bound_exact(self):
        assert fundamental_field_params(40) == [
            -3, -1, 5, -7, 2, -2, -11, 3, 13, -15, 17, -19, -5, 21, -23,
            6, -6, 7, 29, -31, 33, -35, 37, -39, 10, -10,
        ]

    def test_matches_brute_enumeration(self):
        brute = set()
        for d in range(-200, 201):
            if d in (0, 1):
                continue
            if any(k > 1 for k in factor(abs(d)).values()):
                continue
            D = d if d % 4 == 1 else 4 * d
            if abs(D) <= 200:
                brute.add(d)
        got = fundamental_field_params(200)
        assert set(got) == brute
        assert len(got) == len(brute)
        discs = [abs(d if d % 4 == 1 else 4 * d) for d in got]
        assert discs == sorted(discs)
