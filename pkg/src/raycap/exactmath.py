"""Exact integer, modular, and polynomial arithmetic over prime fields.

Everything here is deterministic: primality is decided by a fixed
Miller-Rabin witness set that is exact below 2**64, and inputs outside
that range are rejected instead of being answered probabilistically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

PRIMALITY_LIMIT = 1 << 64

# Exact for all n < 2**64 (Sorenson-Webster verified witness set).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class PrimalityRangeError(ValueError):
    """Raised for primality queries at or above 2**64."""


def is_prime(n: int) -> bool:
    """Deterministic primality test for 0 <= n < 2**64."""
    if n >= PRIMALITY_LIMIT:
        raise PrimalityRangeError(f"primality test limited to n < 2**64, got {n}")
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
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


def _pollard_rho(n: int) -> int:
    """Some nontrivial factor of composite n. Deterministic: the Brent cycle
    walk is retried with c = 1, 2, 3, ... until a factor splits off."""
    if n % 2 == 0:
        return 2
    for c in range(1, n):
        y, m = 2, 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed on {n}")  # unreachable for composite n


def factor(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1 as {p: multiplicity}, primes ascending."""
    if n < 1:
        raise ValueError(f"factor wants n >= 1, got {n}")
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _pollard_rho(m)
        stack += [d, m // d]
    return dict(sorted(out.items()))


def valuation(n: int, p: int) -> int:
    """Largest k with p**k | n. Requires n != 0."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def squarefree_part(n: int) -> int:
    """The unique squarefree d with n = d * (square), sign preserved."""
    if n == 0:
        raise ValueError("0 has no squarefree part")
    s = -1 if n < 0 else 1
    d = 1
    for p, k in factor(abs(n)).items():
        if k % 2:
            d *= p
    return s * d


def divisors(n: int) -> list[int]:
    """All positive divisors of n >= 1, ascending."""
    out = [1]
    for p, k in factor(n).items():
        out = [d * p**i for d in out for i in range(k + 1)]
    return sorted(out)


@lru_cache(maxsize=None)
def _sieve(limit: int) -> tuple[int, ...]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytes(len(flags[i * i :: i]))
    return tuple(i for i in range(limit + 1) if flags[i])


def primes_up_to(limit: int) -> tuple[int, ...]:
    """All primes <= limit. Cached; round the limit up to keep the cache warm."""
    if limit < 2:
        return ()
    return tuple(p for p in _sieve(max(limit, 1 << 10)) if p <= limit)


def primes_in_progression(a: int, mod: int, start: int = 2) -> Iterator[int]:
    """Primes p ≡ a (mod mod) with p >= start, ascending. Requires gcd(a, mod) = 1
    (otherwise at most one prime exists and we still find it)."""
    if mod < 1:
        raise ValueError(f"modulus must be positive, got {mod}")
    a %= mod
    p = max(start, 2)
    # align p with the residue class, then step by mod
    p += (a - p) % mod
    while True:
        if is_prime(p):
            yield p
        p += mod


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), defined for all integers n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    t = valuation(n, 2) if n % 2 == 0 else 0
    n >>= t
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    # now (a/n) for odd n via quadratic reciprocity
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of a modulo an odd prime p, or None if a is a nonresidue.
    Tonelli-Shanks with the first nonresidue found by linear scan, so the
    answer is deterministic. Returns r with 0 <= r < p."""
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    c = pow(z, q, p)
    x = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        x = x * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return x


def crt(residues: Sequence[int], moduli: Sequence[int]) -> tuple[int, int]:
    """Solve x ≡ r_i (mod m_i) for pairwise coprime moduli.
    Returns (x, M) with 0 <= x < M = prod(m_i)."""
    x, m = 0, 1
    for r, mi in zip(residues, moduli, strict=True):
        g = math.gcd(m, mi)
        if g != 1:
            raise ValueError(f"moduli not coprime: gcd={g}")
        # x + m*t ≡ r (mod mi)
        t = (r - x) * pow(m, -1, mi) % mi
        x += m * t
        m *= mi
    return x % m, m


def multiplicative_order(a: int, m: int, group_exponent: int | None = None) -> int:
    """Order of a in (Z/m)^*. If the caller knows a multiple of the order
    (e.g. p - 1 for prime p) passing it avoids factoring m."""
    a %= m
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} is not a unit mod {m}")
    if group_exponent is None:
        group_exponent = _carmichael(m)
    e = group_exponent
    if pow(a, e, m) != 1:
        raise ValueError("group_exponent is not a multiple of the order")
    for p in factor(e):
        while e % p == 0 and pow(a, e // p, m) == 1:
            e //= p
    return e


def _carmichael(m: int) -> int:
    lam = 1
    for p, k in factor(m).items():
        if p == 2:
            piece = 2 ** max(k - 2, 1) if k > 1 else 1
        else:
            piece = p ** (k - 1) * (p - 1)
        lam = lam * piece // math.gcd(lam, piece)
    return lam


# ---------------------------------------------------------------------------
# univariate polynomials over F_p


def _trim(coeffs: Sequence[int], p: int) -> tuple[int, ...]:
    c = [x % p for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class PolyModP:
    """Dense polynomial over F_p, coefficients low to high, no leading zeros."""

    coeffs: tuple[int, ...]
    p: int

    @staticmethod
    def make(coeffs: Sequence[int], p: int) -> "PolyModP":
        return PolyModP(_trim(coeffs, p), p)

    @staticmethod
    def x(p: int) -> "PolyModP":
        return PolyModP((0, 1), p)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "PolyModP") -> "PolyModP":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = (out[i] + c) % self.p
        return PolyModP(_trim(out, self.p), self.p)

    def __sub__(self, other: "PolyModP") -> "PolyModP":
        out = list(self.coeffs) + [0] * max(0, len(other.coeffs) - len(self.coeffs))
        for i, c in enumerate(other.coeffs):
            out[i] = (out[i] - c) % self.p
        return PolyModP(_trim(out, self.p), self.p)

    def __mul__(self, other: "PolyModP") -> "PolyModP":
        a, b, p = self.coeffs, other.coeffs, self.p
        if not a or not b:
            return PolyModP((), p)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return PolyModP(_trim(out, p), p)

    def scale(self, k: int) -> "PolyModP":
        return PolyModP(_trim([c * k for c in self.coeffs], self.p), self.p)

    def divmod(self, other: "PolyModP") -> tuple["PolyModP", "PolyModP"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        d = other.coeffs
        inv_lead = pow(d[-1], -1, p)
        q = [0] * max(0, len(r) - len(d) + 1)
        for i in range(len(r) - len(d), -1, -1):
            c = r[i + len(d) - 1] * inv_lead % p
            if c:
                q[i] = c
                for j, dj in enumerate(d):
                    r[i + j] = (r[i + j] - c * dj) % p
        return PolyModP(_trim(q, p), p), PolyModP(_trim(r[: len(d) - 1], p), p)

    def __mod__(self, other: "PolyModP") -> "PolyModP":
        return self.divmod(other)[1]

    def monic(self) -> "PolyModP":
        if self.is_zero() or self.coeffs[-1] == 1:
            return self
        return self.scale(pow(self.coeffs[-1], -1, self.p))

    def gcd(self, other: "PolyModP") -> "PolyModP":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def pow_mod(self, e: int, modulus: "PolyModP") -> "PolyModP":
        base = self % modulus
        out = PolyModP((1,), self.p)
        while e:
            if e & 1:
                out = (out * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return out

    def derivative(self) -> "PolyModP":
        return PolyModP(
            _trim([i * c for i, c in enumerate(self.coeffs)][1:], self.p), self.p
        )

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc


def roots_mod_p(coeffs: Sequence[int], p: int) -> list[int]:
    """All roots in F_p of the integer polynomial with the given coefficients
    (low to high), sorted ascending. Deterministic equal-degree splitting."""
    f = PolyModP.make(coeffs, p)
    if f.is_zero():
        raise ValueError("zero polynomial has every root")
    if p <= 3000 or f.degree <= 1:
        return [x for x in range(p) if f(x) == 0]
    x = PolyModP.x(p)
    # isolate the split part: gcd(x^p - x, f)
    g = (x.pow_mod(p, f) - (x % f)).gcd(f)
    roots: list[int] = []
    # peel off a possible root at 0, then split by gcd with (x+a)^((p-1)/2) - 1
    if g(0) == 0:
        roots.append(0)
        g = g.divmod(PolyModP.make((0, 1), p))[0]
    stack = [g]
    shift = 0
    one = PolyModP((1,), p)
    while stack:
        h = stack.pop()
        if h.degree == 0:
            continue
        if h.degree == 1:
            roots.append(-h.coeffs[0] * pow(h.coeffs[1], -1, p) % p)
            continue
        while True:
            base = PolyModP.make((shift, 1), p)
            shift += 1
            w = base.pow_mod((p - 1) // 2, h) - one
            d = w.gcd(h)
            if 0 < d.degree < h.degree:
                stack.append(d)
                stack.append(h.divmod(d)[0])
                break
    return sorted(roots)


def splitting_degree(coeffs: Sequence[int], q: int) -> int:
    """Common degree of the irreducible factors of f mod q, for squarefree f
    mod q whose factors all share one degree (the Frobenius orbit length).
    Computed as the least j >= 1 with x^(q^j) ≡ x (mod f, q)."""
    f = PolyModP.make(coeffs, q).monic()
    if f.degree < 1:
        raise ValueError("need a nonconstant polynomial")
    if f.gcd(f.derivative()).degree != 0:
        raise ValueError(f"polynomial is not squarefree mod {q}")
    xr = PolyModP.x(q) % f
    w = xr
    for j in range(1, f.degree + 1):
        w = w.pow_mod(q, f)
        g = (w - xr).gcd(f)
        if g.degree == f.degree:
            return j
        if g.degree > 0:
            # some factor has degree exactly j while another does not
            raise ValueError(f"factor degrees are not uniform mod {q}")
    raise ArithmeticError("Frobenius order exceeded the degree")  # unreachable
