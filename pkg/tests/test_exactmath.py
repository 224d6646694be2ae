import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from raycap.exactmath import (
    PRIMALITY_LIMIT,
    PolyModP,
    PrimalityRangeError,
    crt,
    divisors,
    factor,
    is_prime,
    kronecker,
    multiplicative_order,
    primes_in_progression,
    primes_up_to,
    roots_mod_p,
    splitting_degree,
    sqrt_mod,
    squarefree_part,
    valuation,
)


def brute_primes(limit):
    flags = [True] * (limit + 1)
    flags[0:2] = [False, False]
    for i in range(2, int(limit**0.5) + 1):
        if flags[i]:
            for j in range(i * i, limit + 1, i):
                flags[j] = False
    return [i for i in range(limit + 1) if flags[i]]


class TestIsPrime:
    def test_against_sieve(self):
        want = set(brute_primes(20000))
        for n in range(20000):
            assert is_prime(n) == (n in want)

    def test_known_large_primes(self):
        assert is_prime(2**61 - 1)
        assert is_prime(10**18 + 9)
        assert not is_prime((2**31 - 1) * (2**31 - 1))

    def test_range_guard(self):
        with pytest.raises(PrimalityRangeError):
            is_prime(PRIMALITY_LIMIT)
        assert not is_prime(PRIMALITY_LIMIT - 1)  # 2**64 - 1 = 3*5*17*257*641*...


class TestFactor:
    def test_small(self):
        assert factor(360) == {2: 3, 3: 2, 5: 1}
        assert factor(1) == {}
        assert factor(97) == {97: 1}

    def test_large_semiprime(self):
        p, q = 2147483647, 2147483629
        assert factor(p * q) == {q: 1, p: 1}

    def test_prime_power(self):
        assert factor(3**20) == {3: 20}

    @given(st.integers(min_value=1, max_value=10**9))
    def test_reconstruction(self, n):
        f = factor(n)
        assert math.prod(p**k for p, k in f.items()) == n
        assert all(is_prime(p) for p in f)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            factor(0)


def test_valuation():
    assert valuation(360, 2) == 3
    assert valuation(360, 5) == 1
    assert valuation(7, 2) == 0


def test_squarefree_part():
    assert squarefree_part(12) == 3
    assert squarefree_part(-8) == -2
    assert squarefree_part(30) == 30


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert divisors(1) == [1]


class TestPrimesInProgression:
    def test_one_mod_four(self):
        gen = primes_in_progression(1, 4)
        assert list(itertools.takewhile(lambda p: p < 30, gen)) == [5, 13, 17, 29]

    def test_one_mod_eight(self):
        gen = primes_in_progression(1, 8)
        assert list(itertools.takewhile(lambda p: p < 100, gen)) == [17, 41, 73, 89, 97]

    def test_start_offset(self):
        assert next(primes_in_progression(1, 4, start=14)) == 17

    def test_matches_sieve(self):
        want = [p for p in brute_primes(2000) if p % 7 == 3]
        got = list(itertools.takewhile(lambda p: p <= 2000, primes_in_progression(3, 7)))
        assert got == want


class TestKronecker:
    def test_euler_criterion(self):
        for p in [3, 5, 7, 11, 13, 101, 3001]:
            for a in range(1, 50):
                if a % p == 0:
                    assert kronecker(a, p) == 0
                else:
                    e = pow(a, (p - 1) // 2, p)
                    assert kronecker(a, p) == (1 if e == 1 else -1)

    def test_at_two(self):
        # (a/2) depends on a mod 8 only
        assert [kronecker(a, 2) for a in range(8)] == [0, 1, 0, -1, 0, -1, 0, 1]

    def test_negative_bottom(self):
        assert kronecker(-1, -1) == -1
        assert kronecker(1, -1) == 1
        assert kronecker(5, -3) == kronecker(5, 3)

    @given(st.integers(-200, 200), st.integers(-200, 200), st.integers(1, 120))
    def test_multiplicative_in_top(self, a, b, n):
        assert kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n)

    @given(st.integers(-200, 200), st.integers(1, 120), st.integers(1, 120))
    def test_multiplicative_in_bottom(self, a, m, n):
        assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


class TestSqrtMod:
    @given(st.sampled_from([3, 5, 7, 13, 17, 101, 577, 3001, 65537]), st.integers(0, 10**6))
    def test_roundtrip(self, p, a):
        r = sqrt_mod(a, p)
        if kronecker(a, p) == -1:
            assert r is None
        else:
            assert r is not None
            assert (r * r - a) % p == 0

    def test_deterministic(self):
        assert sqrt_mod(2, 7) == sqrt_mod(2, 7)
        assert sqrt_mod(0, 13) == 0


class TestCrt:
    def test_basic(self):
        x, m = crt([2, 3], [3, 5])
        assert m == 15 and x == 8

    @given(st.integers(0, 1000), st.integers(0, 1000))
    def test_consistency(self, r1, r2):
        x, m = crt([r1, r2], [49, 100])
        assert m == 4900
        assert x % 49 == r1 % 49
        assert x % 100 == r2 % 100

    def test_rejects_common_factor(self):
        with pytest.raises(ValueError):
            crt([1, 2], [6, 10])


class TestMultiplicativeOrder:
    def test_known(self):
        assert multiplicative_order(2, 7) == 3
        assert multiplicative_order(3, 7) == 6
        assert multiplicative_order(7, 16) == 2

    @given(st.sampled_from([5, 7, 11, 13, 101]), st.integers(1, 10**4))
    def test_minimality(self, p, a):
        if a % p == 0:
            return
        d = multiplicative_order(a, p, group_exponent=p - 1)
        assert pow(a, d, p) == 1
        assert all(pow(a, e, p) != 1 for e in divisors(d)[:-1])


class TestPolyModP:
    def test_divmod(self):
        p = 13
        f = PolyModP.make([1, 0, 0, 1], p)  # x^3 + 1
        g = PolyModP.make([1, 1], p)  # x + 1
        q, r = f.divmod(g)
        assert r.is_zero()
        assert q * g == f

    def test_gcd(self):
        p = 7
        f = PolyModP.make([-1, 0, 1], p)  # x^2 - 1
        g = PolyModP.make([1, 1], p)
        assert f.gcd(g) == g.monic()

    @given(
        st.lists(st.integers(0, 12), min_size=1, max_size=6),
        st.lists(st.integers(0, 12), min_size=2, max_size=5),
    )
    def test_divmod_identity(self, a, b):
        p = 13
        f, g = PolyModP.make(a, p), PolyModP.make(b, p)
        if g.is_zero():
            return
        q, r = f.divmod(g)
        assert q * g + r == f
        assert r.degree < g.degree


class TestRootsModP:
    def test_known(self):
        assert roots_mod_p([1, 0, 1], 5) == [2, 3]  # x^2 + 1
        assert roots_mod_p([1, 0, 1], 7) == []

    def test_constructed_roots_large_p(self):
        # product of known linear factors times an irreducible quadratic,
        # so the answer is forced without a brute oracle
        p = 10007
        want = [3, 17, 2024]
        coeffs = [1]
        for r in want:
            coeffs = [
                (c1 - r * c0) % p
                for c0, c1 in zip(coeffs + [0], [0] + coeffs)
            ]
        nonres = next(a for a in range(2, p) if kronecker(a, p) == -1)
        quad = [(-nonres) % p, 0, 1]
        prod = [0] * (len(coeffs) + 2)
        for i, c in enumerate(coeffs):
            for j, d in enumerate(quad):
                prod[i + j] = (prod[i + j] + c * d) % p
        assert roots_mod_p(prod, p) == sorted(want)

    def test_brute_agreement_midsize_p(self):
        p = 3001  # still on the brute path
        f = [1, 5, 0, 2, 1]
        got = roots_mod_p(f, p)
        want = [x for x in range(p) if (((x + 2) * x * x + 5) * x + 1) % p == 0]
        assert got == want


class TestSplittingDegree:
    def test_quadratics(self):
        assert splitting_degree([1, 0, 1], 5) == 1
        assert splitting_degree([1, 0, 1], 7) == 2

    def test_cyclotomic_order_law(self):
        # x^(l-1) + ... + 1 mod q factors into factors of degree ord_l(q)
        for ell in [5, 7, 11, 13]:
            for q in [2, 3, 19, 23, 101]:
                if q % ell == 0:
                    continue
                coeffs = [1] * ell
                assert splitting_degree(coeffs, q) == multiplicative_order(q, ell)

    def test_rejects_non_squarefree(self):
        with pytest.raises(ValueError):
            splitting_degree([1, 2, 1], 7)  # (x+1)^2

    def test_rejects_nonuniform(self):
        # (x)(x^2+1) mod 7: degrees 1 and 2
        with pytest.raises(ValueError):
            splitting_degree([0, 1, 0, 1], 7)


def test_primes_up_to():
    assert list(primes_up_to(30)) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_up_to(1) == ()
