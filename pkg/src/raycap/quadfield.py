"""Quadratic fields: ideals, class groups, units, and tame ray class groups.

Elements live in the basis (1, w) with w = sqrt(d) or (1+sqrt(d))/2 per
d mod 4, so w^2 = t*w + u with t = D mod 2 and u = (D - t)/4. Ideals are
kept in standard form g*[a, b + w]. Reduction theory runs on the pair
(a, B) with B = 2b + t, entirely in integers; the real case walks
rho-cycles, the imaginary case lands on the unique reduced form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .abgroup import FiniteAbelianGroup, group_from_relations, hnf_rows
from .errors import InputError
from .exactmath import (
    crt,
    factor,
    is_prime,
    kronecker,
    primes_in_progression,
    primes_up_to,
    roots_mod_p,
    squarefree_part,
)


@dataclass(frozen=True)
class QuadField:
    d: int

    @property
    def D(self) -> int:
        return self.d if self.d % 4 == 1 else 4 * self.d

    @property
    def t(self) -> int:
        # w^2 = t*w + u
        return self.D % 2

    @property
    def u(self) -> int:
        return (self.D - self.t) // 4

    @property
    def is_real(self) -> bool:
        return self.d > 0

    def elt(self, a: int, b: int = 0) -> "QElt":
        return QElt(self, a, b)

    def omega_str(self) -> str:
        return f"(1+sqrt({self.d}))/2" if self.d % 4 == 1 else f"sqrt({self.d})"

    def __repr__(self) -> str:
        return f"Q(sqrt({self.d}))"


def quadratic_field(d: int) -> QuadField:
    if d in (0, 1):
        raise InputError(f"d = {d} does not define a quadratic field")
    if squarefree_part(d) != d:
        raise InputError(f"d = {d} is not squarefree")
    return QuadField(d)


def _sign_plus_root(x: int, y: int, d: int) -> int:
    """Sign of x + y*sqrt(d) for d > 0 nonsquare."""
    if x >= 0 and y >= 0:
        return 0 if x == y == 0 else 1
    if x <= 0 and y <= 0:
        return -_sign_plus_root(-x, -y, d)
    if x > 0:  # y < 0
        return 1 if x * x > y * y * d else -1
    return -1 if x * x > y * y * d else 1


@dataclass(frozen=True)
class QElt:
    """x + y*w in O_K."""

    field: QuadField
    x: int
    y: int

    def __add__(self, o: "QElt") -> "QElt":
        return QElt(self.field, self.x + o.x, self.y + o.y)

    def __sub__(self, o: "QElt") -> "QElt":
        return QElt(self.field, self.x - o.x, self.y - o.y)

    def __neg__(self) -> "QElt":
        return QElt(self.field, -self.x, -self.y)

    def __mul__(self, o: "QElt | int") -> "QElt":
        if isinstance(o, int):
            return QElt(self.field, self.x * o, self.y * o)
        t, u = self.field.t, self.field.u
        yy = self.y * o.y
        return QElt(
            self.field,
            self.x * o.x + yy * u,
            self.x * o.y + self.y * o.x + yy * t,
        )

    __rmul__ = __mul__

    def conj(self) -> "QElt":
        return QElt(self.field, self.x + self.y * self.field.t, -self.y)

    def norm(self) -> int:
        t, u = self.field.t, self.field.u
        return self.x * self.x + self.x * self.y * t - self.y * self.y * u

    def trace(self) -> int:
        return 2 * self.x + self.y * self.field.t

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def sign_real(self) -> int:
        """Sign under x + y*w -> x + y*(t + sqrt(d))/2, real fields only."""
        if not self.field.is_real:
            raise ValueError("sign is only defined for real fields")
        return _sign_plus_root(2 * self.x + self.y * self.field.t, self.y, self.field.d)

    def __gt__(self, o: "QElt") -> bool:
        return (self - o).sign_real() > 0

    def exact_div(self, o: "QElt") -> "QElt | None":
        """self / o when the quotient lies in O_K, else None."""
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError
        w = self * o.conj()
        if w.x % n or w.y % n:
            return None
        return QElt(self.field, w.x // n, w.y // n)

    def __pow__(self, e: int) -> "QElt":
        if e < 0:
            raise ValueError("negative powers leave O_K")
        out = QElt(self.field, 1, 0)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __repr__(self) -> str:
        return f"({self.x} + {self.y}*w | d={self.field.d})"


@dataclass(frozen=True)
class QIdeal:
    """g * [a, b + w]: the lattice Z*(g*a) + Z*(g*(b+w)). Norm g^2*a."""

    field: QuadField
    g: int
    a: int
    b: int

    def __post_init__(self):
        f = self.field
        if self.g < 1 or self.a < 1 or not 0 <= self.b < self.a:
            raise ValueError("ideal not in normal form")
        if QElt(f, self.b, 1).norm() % self.a != 0:
            raise ValueError("lattice is not an ideal (a must divide N(b+w))")

    @staticmethod
    def unit_ideal(field: QuadField) -> "QIdeal":
        return QIdeal(field, 1, 1, 0)

    @staticmethod
    def from_generators(field: QuadField, gens: Sequence[QElt]) -> "QIdeal":
        t, u = field.t, field.u
        rows = []
        for z in gens:
            # rows are (coefficient of w, coefficient of 1) so the HNF pivot
            # structure is [[p, q], [0, r]] with r the least rational integer
            rows.append([z.y, z.x])
            rows.append([z.x + z.y * t, z.y * u])  # z * w
        return _ideal_from_rows(field, rows)

    @staticmethod
    def principal(z: QElt) -> "QIdeal":
        if z.is_zero():
            raise ValueError("zero element generates no ideal")
        return QIdeal.from_generators(z.field, [z])

    def norm(self) -> int:
        return self.g * self.g * self.a

    def gen_pair(self) -> tuple[QElt, QElt]:
        f = self.field
        return QElt(f, self.g * self.a, 0), QElt(f, self.g * self.b, self.g)

    def conj(self) -> "QIdeal":
        bb = (-self.b - self.field.t) % self.a
        return QIdeal(self.field, self.g, self.a, bb)

    def __mul__(self, o: "QIdeal") -> "QIdeal":
        a1, b1 = self.gen_pair()
        a2, b2 = o.gen_pair()
        return QIdeal.from_generators(self.field, [a1 * a2, a1 * b2, b1 * a2, b1 * b2])

    def scale(self, n: int) -> "QIdeal":
        if n < 1:
            raise ValueError("scale wants a positive integer")
        return QIdeal(self.field, self.g * n, self.a, self.b)

    def __pow__(self, e: int) -> "QIdeal":
        if e < 0:
            raise ValueError("negative ideal powers not supported")
        out = QIdeal.unit_ideal(self.field)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def contains(self, z: QElt) -> bool:
        if z.x % self.g or z.y % self.g:
            return False
        x, y = z.x // self.g, z.y // self.g
        return (x - y * self.b) % self.a == 0

    def divide_exact(self, o: "QIdeal") -> "QIdeal":
        """self / o when o divides self."""
        prod = self * o.conj()
        n = o.norm()
        if prod.g % n:
            raise ValueError("ideal does not divide")
        return QIdeal(self.field, prod.g // n, prod.a, prod.b)

    def is_coprime_to(self, n: int) -> bool:
        return math.gcd(self.norm(), n) == 1

    def primitive_part(self) -> "QIdeal":
        return QIdeal(self.field, 1, self.a, self.b)

    def key(self) -> tuple[int, int, int]:
        return (self.g, self.a, self.b)

    def __repr__(self) -> str:
        return f"{self.g}*[{self.a}, {self.b}+w | d={self.field.d}]"


def _ideal_from_rows(field: QuadField, rows) -> QIdeal:
    """QIdeal from a spanning set of (coef_w, coef_1) lattice rows. The span
    must already be multiplication-stable."""
    h = hnf_rows(rows)
    if len(h) != 2:
        raise ValueError("generators span a rank-deficient lattice")
    p, q = h[0]
    r = h[1][1]
    if r % p or q % p:
        raise ValueError("generated lattice is not an ideal")
    g, a = p, r // p
    return QIdeal(field, g, a, (q // p) % a)


def is_prime_ideal(I: QIdeal) -> bool:
    # [p, b+w] with p prime is always maximal (index-p ideal lattice);
    # p*O_K is prime exactly when p is inert
    if I.g == 1 and is_prime(I.a):
        return True
    if I.a == 1 and is_prime(I.g):
        return kronecker(I.field.D, I.g) == -1
    return False


def factor_prime(field: QuadField, p: int) -> tuple[str, list[tuple[QIdeal, int, int]]]:
    """Splitting of p*O_K: ("split"|"inert"|"ramified", [(prime, e, f), ...])."""
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    k = kronecker(field.D, p)
    if k == -1:
        return "inert", [(QIdeal(field, p, 1, 0), 1, 2)]
    roots = roots_mod_p([-field.u, -field.t, 1], p)  # w^2 - t w - u
    if k == 1:
        ideals = [QIdeal(field, 1, p, (-r) % p) for r in roots]
        return "split", [(I, 1, 1) for I in ideals]
    r = roots[0]  # double root at a ramified prime
    return "ramified", [(QIdeal(field, 1, p, (-r) % p), 2, 1)]


# ---------------------------------------------------------------------------
# reduction theory on (a, B) pairs, B = 2b + t


def _B_near_sqrt(field: QuadField, a: int, b: int) -> int:
    """The representative of B mod 2a in (s - 2a, s], s = floor(sqrt(D))."""
    s = math.isqrt(field.D)
    B0 = 2 * b + field.t
    return s - ((s - B0) % (2 * a))


def _is_reduced_real(field: QuadField, a: int, b: int) -> bool:
    B = _B_near_sqrt(field, a, b)
    if B <= 0:
        return False
    return 2 * a <= B or (2 * a - B) ** 2 < field.D


class _Mult:
    """A running multiplier num/den with num in O_K, den a positive integer."""

    __slots__ = ("num", "den")

    def __init__(self, num: QElt, den: int):
        self.num, self.den = num, den
        self._reduce()

    def _reduce(self):
        g = math.gcd(math.gcd(abs(self.num.x), abs(self.num.y)), self.den)
        if g > 1:
            self.num = QElt(self.num.field, self.num.x // g, self.num.y // g)
            self.den //= g

    def times(self, num: QElt, den: int) -> "_Mult":
        return _Mult(self.num * num, self.den * den)

    def inverse_elt(self) -> QElt | None:
        """den/num as an element of O_K, if integral."""
        n = self.num.norm()
        w = self.num.conj() * self.den
        if n == 0 or w.x % n or w.y % n:
            return None
        return QElt(self.num.field, w.x // n, w.y // n)


def _rho(field: QuadField, a: int, b: int) -> tuple[int, int, QElt, int]:
    """One reduction step on the primitive ideal [a, b+w] (real case).
    Returns (a', b', gamma_num, gamma_den) with [a',b'+w] = (num/den)*[a,b+w].
    Far from the reduced strip (a > sqrt(D)) the centered residue of B makes
    the norms shrink; near it the window (s-2a, s] drives the cycle.
    """
    D, t = field.D, field.t
    s = math.isqrt(D)
    B0 = 2 * b + t
    B = _B_centered(a, B0) if a > s else s - ((s - B0) % (2 * a))
    c = (D - B * B) // (4 * a)
    assert c != 0
    a2 = abs(c)
    b2 = ((-B - t) // 2) % a2
    # multiplier (B - sqrt(D)) / (2a) = ((B + t) - 2w) / (2a)
    return a2, b2, QElt(field, B + t, -2), 2 * a


def _B_centered(a: int, B0: int) -> int:
    """The representative of B0 mod 2a in (-a, a]."""
    return B0 - 2 * a * ((B0 + a - 1) // (2 * a))


def _reduce_primitive(field: QuadField, a: int, b: int) -> tuple[int, int, _Mult]:
    """Reduce [a, b+w]; returns (a*, b*, mult) with [a*,b*+w] = mult * [a,b+w]."""
    mult = _Mult(QElt(field, 1, 0), 1)
    guard_limit = 64 + 4 * (a.bit_length() + abs(field.D).bit_length())
    if field.is_real:
        guard = 0
        while not _is_reduced_real(field, a, b):
            a, b, num, den = _rho(field, a, b)
            mult = mult.times(num, den)
            guard += 1
            if guard > guard_limit:
                raise ArithmeticError("reduction failed to terminate")
        return a, b, mult
    D, t = field.D, field.t
    guard = 0
    while True:
        B = _B_centered(a, 2 * b + t)
        c = (B * B - D) // (4 * a)
        if a < c or (a == c and B >= 0):
            return a, b, mult
        if a == c:  # B < 0: pass to the conjugate lattice, same class
            mult = mult.times(QElt(field, (B + t) // 2, -1), a)
            b = (-b - t) % a
            continue
        # a > c: descend to the neighbour form
        mult = mult.times(QElt(field, B + t, -2), 2 * a)
        a, b = c, ((-B - t) // 2) % c
        guard += 1
        if guard > guard_limit:
            raise ArithmeticError("reduction failed to terminate")


def _real_cycle(field: QuadField, a: int, b: int) -> list[tuple[int, int]]:
    """The rho-cycle of a reduced real ideal, as (a, B_near) pairs."""
    out = []
    a0, b0 = a, b
    guard = 0
    while True:
        out.append((a, _B_near_sqrt(field, a, b)))
        a, b, _, _ = _rho(field, a, b)
        guard += 1
        if (a, b) == (a0, b0):
            return out
        if guard > 10**6:
            raise ArithmeticError("rho cycle failed to close")


def class_key(I: QIdeal) -> tuple[int, int]:
    """Canonical key for the (wide) ideal class of I."""
    f = I.field
    a, b, _ = _reduce_primitive(f, I.a, I.b)
    if f.is_real:
        return min(_real_cycle(f, a, b))
    return (a, _B_centered(a, 2 * b + f.t))


def is_principal_with_generator(I: QIdeal) -> QElt | None:
    """A generator of I when I is principal (wide sense), else None."""
    f = I.field
    a, b, mult = _reduce_primitive(f, I.a, I.b)
    target_hit = a == 1
    if f.is_real and not target_hit:
        a0, b0 = a, b
        guard = 0
        while True:
            a, b, num, den = _rho(f, a, b)
            mult = mult.times(num, den)
            if a == 1:
                target_hit = True
                break
            if (a, b) == (a0, b0):
                break
            guard += 1
            if guard > 10**6:
                raise ArithmeticError("principality walk failed to close")
    if not target_hit:
        return None
    gen = mult.inverse_elt()
    assert gen is not None, "unit-ideal multiplier must invert integrally"
    gen = gen * I.g
    assert QIdeal.principal(gen).key() == I.key()
    return gen


# ---------------------------------------------------------------------------
# fundamental unit and class group


@lru_cache(maxsize=None)
def fundamental_unit(field: QuadField) -> QElt:
    """Smallest unit > 1 of a real quadratic field."""
    if not field.is_real:
        raise InputError("fundamental unit requires a real field")
    a, b = 1, 0
    a, b, _ = _reduce_primitive(field, a, b)
    mult = _Mult(QElt(field, 1, 0), 1)
    a0, b0 = a, b
    while True:
        a, b, num, den = _rho(field, a, b)
        mult = mult.times(num, den)
        if (a, b) == (a0, b0):
            break
    assert mult.den == 1, "cycle multiplier must be integral up to reduction"
    eps = mult.num
    # |eps| < 1 along the contraction; the fundamental unit is a signed inverse
    inv = QElt.exact_div(QElt(field, 1, 0), eps)
    assert inv is not None
    eps = inv if inv.sign_real() > 0 else -inv
    assert abs(eps.norm()) == 1 and eps > QElt(field, 1, 0)
    return eps


def torsion_unit(field: QuadField) -> tuple[QElt, int]:
    """A generator of the roots of unity and its order."""
    if field.d == -1:
        return QElt(field, 0, 1), 4
    if field.d == -3:
        return QElt(field, 0, 1), 6
    return QElt(field, -1, 0), 2


def unit_gens(field: QuadField) -> list[QElt]:
    """Generators of the full unit group O_K^*."""
    if field.is_real:
        return [QElt(field, -1, 0), fundamental_unit(field)]
    return [torsion_unit(field)[0]]


@dataclass(frozen=True)
class ClassGroupData:
    field: QuadField
    group: FiniteAbelianGroup
    gens: tuple[QIdeal, ...]
    table: dict  # class_key -> ambient exponent vector over gens

    @property
    def h(self) -> int:
        return self.group.order()

    def ambient_vector(self, I: QIdeal) -> tuple[int, ...]:
        return self.table[class_key(I)]

    def dlog(self, I: QIdeal) -> tuple[int, ...]:
        return self.group.dlog_ambient(self.ambient_vector(I))


def _candidate_primes(field: QuadField, skip: frozenset[int]) -> Iterator[QIdeal]:
    """Non-inert primes in ascending rational order, one per split pair.
    The bound comfortably dominates the Minkowski constant."""
    if field.is_real:
        bound = math.isqrt(field.D) // 2 + 2
    else:
        bound = math.isqrt(abs(field.D)) + 2
    for p in primes_up_to(bound):
        if p in skip:
            continue
        kind, data = factor_prime(field, p)
        if kind == "inert":
            continue
        yield data[0][0]


def _bfs_closure(
    field: QuadField, gens: Sequence[QIdeal]
) -> tuple[dict, list[list[int]]]:
    """Breadth-first closure of the subgroup generated by the given prime
    classes. Returns (table: key -> exponent vector, relation rows)."""
    r = len(gens)
    ident = QIdeal.unit_ideal(field)
    start = class_key(ident)
    table = {start: (0,) * r}
    reps = {start: ident}
    frontier = [start]
    relations: list[list[int]] = []
    while frontier:
        key = frontier.pop(0)
        vec, rep = table[key], reps[key]
        for i, P in enumerate(gens):
            J = rep * P
            jk = class_key(J)
            nvec = list(vec)
            nvec[i] += 1
            if jk in table:
                rel = [a - b for a, b in zip(nvec, table[jk])]
                if any(rel):
                    relations.append(rel)
            else:
                table[jk] = tuple(nvec)
                reps[jk] = J.primitive_part()
                frontier.append(jk)
    return table, relations


@lru_cache(maxsize=None)
def class_group(field: QuadField) -> ClassGroupData:
    """Wide ideal class group via prime classes below the Minkowski bound."""
    gens = tuple(_candidate_primes(field, frozenset()))
    table, relations = _bfs_closure(field, gens)
    labels = tuple(f"P{P.a if P.g == 1 else P.g}_{P.b}" for P in gens)
    if not gens:
        group = group_from_relations([], ())
    else:
        group = group_from_relations(relations, labels)
    assert group.order() == len(table)
    return ClassGroupData(field, group, gens, table)


# ---------------------------------------------------------------------------
# moduli and residue systems


@dataclass(frozen=True)
class Modulus:
    field: QuadField
    primes: tuple[QIdeal, ...]

    def __post_init__(self):
        seen = set()
        for q in self.primes:
            if not is_prime_ideal(q):
                raise InputError(f"modulus component {q} is not prime")
            if q.key() in seen:
                raise InputError("modulus must be squarefree (distinct primes)")
            seen.add(q.key())

    @staticmethod
    def trivial(field: QuadField) -> "Modulus":
        return Modulus(field, ())

    def norm(self) -> int:
        return math.prod(q.norm() for q in self.primes)

    def is_trivial(self) -> bool:
        return not self.primes

    def residue_chars(self) -> set[int]:
        return {q.a if q.g == 1 else q.g for q in self.primes}

    def is_conj_stable(self) -> bool:
        keys = {q.key() for q in self.primes}
        return all(q.conj().key() in keys for q in self.primes)

    def coprime_to(self, I: QIdeal) -> bool:
        return math.gcd(I.norm(), self.norm()) == 1

    def descriptor(self) -> list[dict]:
        return [
            {"p": (q.a if q.g == 1 else q.g), "a": q.a, "b": q.b, "g": q.g}
            for q in self.primes
        ]


def modulus_from_rational(field: QuadField, m: int) -> Modulus:
    """All primes of K above each prime divisor of the squarefree m >= 1."""
    if m < 1:
        raise InputError("modulus integer must be positive")
    primes: list[QIdeal] = []
    for p, k in factor(m).items():
        if k > 1:
            raise InputError(f"modulus {m} is not squarefree")
        _, data = factor_prime(field, p)
        primes.extend(I for I, _, _ in data)
    primes.sort(key=lambda q: q.key())
    return Modulus(field, tuple(primes))


class _Fp2:
    """Tiny F_{p^2} = F_p[w]/(w^2 - t w - u) helper for inert residue fields."""

    def __init__(self, p: int, t: int, u: int):
        self.p, self.t, self.u = p, t % p, u % p

    def mul(self, A, B):
        (a, b), (c, e) = A, B
        p, t, u = self.p, self.t, self.u
        be = b * e
        return ((a * c + be * u) % p, (a * e + b * c + be * t) % p)

    def pow(self, A, k):
        out = (1, 0)
        while k:
            if k & 1:
                out = self.mul(out, A)
            A = self.mul(A, A)
            k >>= 1
        return out


def _dlog_bsgs(mul, ident, base, target, order: int) -> int | None:
    m = math.isqrt(order) + 1
    table = {}
    cur = ident
    for j in range(m):
        table.setdefault(cur, j)
        cur = mul(cur, base)
    # giant^-1 = base^(order - m) since base^order = ident
    ginv = ident
    b = base
    k = order - m
    while k:
        if k & 1:
            ginv = mul(ginv, b)
        b = mul(b, b)
        k >>= 1
    cur = target
    for i in range(m + 1):
        if cur in table:
            val = (i * m + table[cur]) % order
            return val
        cur = mul(cur, ginv)
    return None


def _primitive_root(p: int) -> int:
    if p == 2:
        return 1
    fs = list(factor(p - 1))
    g = 2
    while True:
        if all(pow(g, (p - 1) // q, p) != 1 for q in fs):
            return g
        g += 1


class ResidueFactor:
    """One cyclic factor of (O/m)^*, for a single prime ideal q."""

    def __init__(self, field: QuadField, q: QIdeal):
        self.field = field
        self.q = q
        if q.g == 1:
            self.p = q.a
            self.f = 1
            self.order = self.p - 1
            self.gen_residue = _primitive_root(self.p) % self.p
        else:
            self.p = q.g
            self.f = 2
            self.order = self.p * self.p - 1
            self.fp2 = _Fp2(self.p, field.t, field.u)
            self.gen_residue = self._find_generator()

    def _find_generator(self):
        fs = list(factor(self.order))
        for ypart in range(1, self.p):
            for xpart in range(self.p):
                cand = (xpart, ypart)
                if all(
                    self.fp2.pow(cand, self.order // r) != (1, 0) for r in fs
                ):
                    return cand
        raise ArithmeticError("no generator found in F_p^2")

    def residue(self, z: QElt):
        if self.f == 1:
            return (z.x - z.y * self.q.b) % self.p
        return (z.x % self.p, z.y % self.p)

    def is_unit_residue(self, z: QElt) -> bool:
        r = self.residue(z)
        return r != 0 if self.f == 1 else r != (0, 0)

    def dlog(self, z: QElt) -> int:
        r = self.residue(z)
        if self.f == 1:
            if r == 0:
                raise ValueError("element is not coprime to the modulus")
            if self.order == 1:
                return 0
            out = _dlog_bsgs(
                lambda A, B: A * B % self.p, 1, self.gen_residue, r, self.order
            )
        else:
            if r == (0, 0):
                raise ValueError("element is not coprime to the modulus")
            out = _dlog_bsgs(self.fp2.mul, (1, 0), self.gen_residue, r, self.order)
        if out is None:
            raise ValueError("element is not coprime to the modulus")
        return out

    def lift_power(self, k: int) -> tuple[int, int]:
        """Coordinates (x, y) of a lift of gen^k to O_K, reduced mod p."""
        if self.f == 1:
            v = pow(self.gen_residue, k, self.p)
            # pick x with x - y*b = v, y = 0
            return (v % self.p, 0)
        xy = self.fp2.pow(self.gen_residue, k)
        return xy


class ResidueSystem:
    """(O/m)^* as a product of cyclic factors with discrete logs."""

    def __init__(self, field: QuadField, modulus: Modulus):
        self.field = field
        self.modulus = modulus
        self.factors = [ResidueFactor(field, q) for q in modulus.primes]
        self.orders = tuple(f.order for f in self.factors)

    def order(self) -> int:
        return math.prod(self.orders)

    def dlog(self, z: QElt) -> tuple[int, ...]:
        return tuple(f.dlog(z) for f in self.factors)

    def dlog_int(self, n: int) -> tuple[int, ...]:
        return self.dlog(QElt(self.field, n, 0))

    def is_unit(self, z: QElt) -> bool:
        return all(f.is_unit_residue(z) for f in self.factors)

    def group(self) -> FiniteAbelianGroup:
        rows = [
            [self.orders[i] if i == j else 0 for j in range(len(self.orders))]
            for i in range(len(self.orders))
        ]
        return group_from_relations(rows, tuple(f"r{i}" for i in range(len(rows))))

    def crt_lift(self, exps: Sequence[int]) -> QElt:
        """An element of O_K congruent to gen_i^exps[i] at factor i, for all i."""
        by_p: dict[int, list[tuple[ResidueFactor, int]]] = {}
        for f, e in zip(self.factors, exps, strict=True):
            by_p.setdefault(f.p, []).append((f, e))
        xs, ys, mods = [], [], []
        for p, items in sorted(by_p.items()):
            if items[0][0].f == 2:
                (f, e), = items
                x, y = f.lift_power(e)
            elif len(items) == 1:
                f, e = items[0]
                v = pow(f.gen_residue, e, p)
                x, y = v, 0
            else:
                (f1, e1), (f2, e2) = items
                v1 = pow(f1.gen_residue, e1, p)
                v2 = pow(f2.gen_residue, e2, p)
                b1, b2 = f1.q.b, f2.q.b
                inv = pow(b2 - b1, -1, p)
                y = (v1 - v2) * inv % p
                x = (v1 + y * b1) % p
            xs.append(x)
            ys.append(y)
            mods.append(p)
        if not mods:
            return QElt(self.field, 1, 0)
        x, _ = crt(xs, mods)
        y, _ = crt(ys, mods)
        z = QElt(self.field, x, y)
        assert self.is_unit(z)
        return z


# ---------------------------------------------------------------------------
# ray class groups


@dataclass(frozen=True)
class RayClassData:
    field: QuadField
    modulus: Modulus
    group: FiniteAbelianGroup
    cl: ClassGroupData
    ideal_gens: tuple[QIdeal, ...]
    residue: ResidueSystem
    ray_table: dict  # class_key -> exponent vector over ideal_gens
    unit_image_order: int

    @property
    def n_ideal(self) -> int:
        return len(self.ideal_gens)

    def ambient_vector(self, I: QIdeal) -> tuple[int, ...]:
        """Exponents over (ideal gens | residue factor gens) for [I]."""
        if not self.modulus.coprime_to(I):
            raise InputError("ideal is not coprime to the modulus")
        v = list(self.ray_table[class_key(I)])
        acc = I
        for P, e in zip(self.ideal_gens, v):
            acc = acc * (P.conj() ** e)
        y = is_principal_with_generator(acc)
        assert y is not None, "class vector lookup must leave a principal ideal"
        res = list(self.residue.dlog(y))
        for P, e in zip(self.ideal_gens, v):
            if e:
                nrm = self.residue.dlog_int(P.norm())
                res = [r - e * s for r, s in zip(res, nrm)]
        return tuple(v + res)

    def dlog(self, I: QIdeal) -> tuple[int, ...]:
        return self.group.dlog_ambient(self.ambient_vector(I))

    def class_of_principal(self, z: QElt) -> tuple[int, ...]:
        """Ray class of the principal ideal (z), z coprime to m."""
        vec = (0,) * self.n_ideal + self.residue.dlog(z)
        return self.group.dlog_ambient(vec)

    def is_ray_principal(self, I: QIdeal) -> QElt | None:
        """A generator x of I with x = 1 mod^x m, when the class is trivial."""
        if any(self.dlog(I)):
            return None
        # a trivial ray class is principal outright, so the table vector is 0
        v = self.ray_table[class_key(I)]
        assert not any(v)
        y = is_principal_with_generator(I)
        assert y is not None
        # adjust y by a unit to reach residue 1
        if self.modulus.is_trivial():
            return y
        res_group = self.residue.group()
        ug = unit_gens(self.field)
        gvecs = [res_group.dlog_ambient(self.residue.dlog(u)) for u in ug]
        target = res_group.dlog_ambient(
            [(-r) % o for r, o in zip(self.residue.dlog(y), self.residue.orders)]
        )
        coeffs = res_group.express(gvecs, target)
        if coeffs is None:
            return None
        out = y
        for u, c in zip(ug, coeffs):
            out = out * (u ** (c % _unit_residue_order(self, u)))
        assert all(f.dlog(out) == 0 for f in self.residue.factors)
        assert QIdeal.principal(out).key() == I.key()
        return out


def _unit_residue_order(ray: RayClassData, u: QElt) -> int:
    res_group = ray.residue.group()
    return res_group.element_order(res_group.dlog_ambient(ray.residue.dlog(u)))


def _ray_ideal_gens(field: QuadField, modulus: Modulus, cl: ClassGroupData):
    """Prime-ideal generators of Cl avoiding the modulus support."""
    if cl.h == 1:
        return (), {class_key(QIdeal.unit_ideal(field)): ()}, []
    skip = frozenset(modulus.residue_chars())
    gens: list[QIdeal] = []
    limit = 1000 * max(abs(field.D), 100)
    for p in primes_in_progression(1, 1, start=2):
        if p > limit:
            break
        if p in skip:
            continue
        kind, data = factor_prime(field, p)
        if kind == "inert":
            continue
        gens.append(data[0][0])
        table, relations = _bfs_closure(field, gens)
        if len(table) == cl.h:
            return tuple(gens), table, relations
    raise ArithmeticError("failed to generate the class group away from m")


@lru_cache(maxsize=None)
def ray_class_group(field: QuadField, modulus: Modulus) -> RayClassData:
    """Cl^m_K presented over prime-ideal generators and residue generators."""
    cl = class_group(field)
    ideal_gens, table, cl_relations = _ray_ideal_gens(field, modulus, cl)
    residue = ResidueSystem(field, modulus)
    r, s = len(ideal_gens), len(residue.factors)
    labels = tuple(f"P{i}" for i in range(r)) + tuple(f"U{i}" for i in range(s))
    rows: list[list[int]] = []
    for rel in cl_relations:
        pos = [max(e, 0) for e in rel]
        neg = [max(-e, 0) for e in rel]
        Jp = QIdeal.unit_ideal(field)
        Jm = QIdeal.unit_ideal(field)
        for P, ep, em in zip(ideal_gens, pos, neg):
            Jp = Jp * (P**ep)
            Jm = Jm * (P**em)
        alpha = is_principal_with_generator(Jp * Jm.conj())
        assert alpha is not None, "harvested relation must be principal"
        res = list(residue.dlog(alpha))
        nm = residue.dlog_int(Jm.norm())
        res = [a - b for a, b in zip(res, nm)]
        rows.append(list(rel) + [-c for c in res])
    for u in unit_gens(field):
        rows.append([0] * r + list(residue.dlog(u)))
    for i, o in enumerate(residue.orders):
        rows.append([0] * r + [o if j == i else 0 for j in range(s)])
    if r + s == 0:
        rows = []
    group = group_from_relations(rows, labels)
    # unit image inside (O/m)^*, for the exact-sequence order identity
    res_group = residue.group()
    uvecs = [res_group.dlog_ambient(residue.dlog(u)) for u in unit_gens(field)]
    unit_image = res_group.subgroup_order(uvecs) if s else 1
    data = RayClassData(
        field, modulus, group, cl, ideal_gens, residue, table, unit_image
    )
    expected = cl.h * residue.order() // unit_image
    assert group.order() == expected, "exact-sequence order identity failed"
    return data


def aug_unit_data(field: QuadField, modulus: Modulus) -> tuple[QElt, int]:
    """(eps, k) with eps = u^k the smallest power of the fundamental unit
    that has norm +1 and is 1 mod^x m. Conjugation then inverts eps."""
    if not field.is_real:
        raise InputError("augmentation unit requires a real field")
    u = fundamental_unit(field)
    k0 = 1 if u.norm() == 1 else 2
    base = u**k0
    if modulus.is_trivial():
        return base, k0
    residue = ResidueSystem(field, modulus)
    res_group = residue.group()
    e = res_group.element_order(res_group.dlog_ambient(residue.dlog(base)))
    return base**e, k0 * e


def aug_unit_mod_m(field: QuadField, modulus: Modulus) -> QElt:
    return aug_unit_data(field, modulus)[0]
