"""Integer matrix normal forms and finitely generated abelian groups.

Groups are presented by relation matrices over Z. The Smith normal form
carries all the structure we need: invariant factors, discrete logs of
ambient elements, and generator representatives for each cyclic factor.
Everything is exact; unimodular transforms are tracked incrementally so
no rational arithmetic ever appears.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .exactmath import valuation

Matrix = list[list[int]]


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("shape mismatch")
    bt = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def vec_mat(v: Sequence[int], m: Sequence[Sequence[int]]) -> list[int]:
    if len(v) != len(m):
        raise ValueError("shape mismatch")
    cols = len(m[0]) if m else 0
    return [sum(v[i] * m[i][j] for i in range(len(v))) for j in range(cols)]


def det_bareiss(m: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix, fraction-free."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


@dataclass(frozen=True)
class SNF:
    """U @ M @ V == diag(diag), with U, V unimodular and diag[i] | diag[i+1]."""

    diag: tuple[int, ...]
    U: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]
    Vinv: tuple[tuple[int, ...], ...]
    nrows: int
    ncols: int

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d != 0)


def snf(m: Sequence[Sequence[int]]) -> SNF:
    """Smith normal form with transforms. Pivots are chosen as the smallest
    nonzero magnitude in the remaining block, which keeps entries tame at
    the sizes this library meets."""
    nr = len(m)
    nc = len(m[0]) if nr else 0
    a = [list(row) for row in m]
    if any(len(row) != nc for row in a):
        raise ValueError("ragged matrix")
    u = _identity(nr)
    v = _identity(nc)
    vinv = _identity(nc)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def add_row(src, dst, k):
        # row dst += k * row src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):
        # col dst += k * col src; inverse acts on rows of vinv
        for row in a:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]
        vinv[src] = [x - k * y for x, y in zip(vinv[src], vinv[dst])]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(nr, nc):
        # locate smallest nonzero entry in the trailing block
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] != 0 and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            # clear the pivot column, then the pivot row
            dirty = False
            for i in range(nr):
                if i != t and a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    add_row(t, i, -q)
                    if a[i][t] != 0:
                        swap_rows(t, i)
                    dirty = True
            for j in range(nc):
                if j != t and a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    add_col(t, j, -q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                    dirty = True
            if not dirty:
                # pivot must divide the whole trailing block
                bad = None
                for i in range(t + 1, nr):
                    for j in range(t + 1, nc):
                        if a[i][j] % a[t][t] != 0:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(bad, t, 1)
        if a[t][t] < 0:
            negate_row(t)
        t += 1
    diag = tuple(a[i][i] for i in range(min(nr, nc)))
    return SNF(
        diag,
        tuple(map(tuple, u)),
        tuple(map(tuple, v)),
        tuple(map(tuple, vinv)),
        nr,
        nc,
    )


def kernel_right(m: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of {x : M @ x = 0}, as column vectors (returned as lists)."""
    s = snf(m)
    return [[s.V[i][j] for i in range(s.ncols)] for j in range(s.rank, s.ncols)]


def kernel_left(m: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of the row kernel {y : y @ M = 0}."""
    s = snf(m)
    return [list(s.U[i]) for i in range(s.rank, s.nrows)]


def solve_left(m: Sequence[Sequence[int]], target: Sequence[int]) -> list[int] | None:
    """An integer row x with x @ M = target, or None."""
    s = snf(m)
    u = vec_mat(list(target), [list(r) for r in s.V])
    w = [0] * s.nrows
    for j in range(s.ncols):
        d = s.diag[j] if j < len(s.diag) else 0
        if d != 0:
            if u[j] % d != 0:
                return None
            if j < s.nrows:
                w[j] = u[j] // d
        elif u[j] != 0:
            return None
    return vec_mat(w, [list(r) for r in s.U])


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with g = ax + by and g >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def hnf_rows(m: Sequence[Sequence[int]]) -> list[list[int]]:
    """Hermite normal form of the row space: echelon, positive pivots,
    entries above each pivot reduced into [0, pivot). Canonical for the
    row lattice, so two bases agree iff their HNFs are equal."""
    h = [list(row) for row in m]
    row = 0
    nc = len(h[0]) if h else 0
    for col in range(nc):
        piv = next((i for i in range(row, len(h)) if h[i][col] != 0), None)
        if piv is None:
            continue
        h[row], h[piv] = h[piv], h[row]
        for i in range(row + 1, len(h)):
            if h[i][col] == 0:
                continue
            a, b = h[row][col], h[i][col]
            g, x, y = _xgcd(a, b)
            r0 = [x * p + y * q for p, q in zip(h[row], h[i])]
            r1 = [(a // g) * q - (b // g) * p for p, q in zip(h[row], h[i])]
            h[row], h[i] = r0, r1
        if h[row][col] < 0:
            h[row] = [-x for x in h[row]]
        for i in range(row):
            q = h[i][col] // h[row][col]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[row])]
        row += 1
    return h[:row]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Finite abelian group in invariant-factor coordinates.

    invariants: d_1 | d_2 | ... | d_k, all > 1. Elements are int tuples of
    length k, component i taken mod d_i. `to_canonical` maps an exponent
    vector on the ambient generators to coordinates; `gen_vectors` expresses
    each cyclic factor generator back as an ambient exponent vector.
    """

    invariants: tuple[int, ...]
    labels: tuple[str, ...]
    to_canonical: tuple[tuple[int, ...], ...]  # len(labels) x k
    gen_vectors: tuple[tuple[int, ...], ...]  # k x len(labels)

    @staticmethod
    def from_invariants(ds: Sequence[int]) -> "FiniteAbelianGroup":
        """Synthetic group with the given invariants as its own ambient."""
        ds = tuple(int(d) for d in ds if d != 1)
        if any(d < 1 for d in ds):
            raise ValueError("invariants must be positive")
        for a, b in zip(ds, ds[1:]):
            if b % a != 0:
                raise ValueError("invariants must form a divisibility chain")
        k = len(ds)
        eye = tuple(tuple(int(i == j) for j in range(k)) for i in range(k))
        labels = tuple(f"g{i}" for i in range(k))
        return FiniteAbelianGroup(ds, labels, eye, eye)

    @property
    def rank(self) -> int:
        return len(self.invariants)

    def order(self) -> int:
        return math.prod(self.invariants)

    def reduce(self, y: Sequence[int]) -> tuple[int, ...]:
        return tuple(c % d for c, d in zip(y, self.invariants, strict=True))

    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def add(self, y1: Sequence[int], y2: Sequence[int]) -> tuple[int, ...]:
        return self.reduce([a + b for a, b in zip(y1, y2, strict=True)])

    def scale(self, k: int, y: Sequence[int]) -> tuple[int, ...]:
        return self.reduce([k * c for c in y])

    def dlog_ambient(self, exponents: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of prod(gen_i ^ exponents_i)."""
        if len(exponents) != len(self.labels):
            raise ValueError("exponent vector has the wrong length")
        return self.reduce(vec_mat(list(exponents), [list(r) for r in self.to_canonical]))

    def element_order(self, y: Sequence[int]) -> int:
        out = 1
        for c, d in zip(self.reduce(y), self.invariants):
            out = math.lcm(out, d // math.gcd(c, d))
        return out

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.invariants))

    def contains_power(self, k: int, y: Sequence[int]) -> bool:
        """Whether y lies in the subgroup of k-th powers."""
        return all(c % math.gcd(k, d) == 0 for c, d in zip(self.reduce(y), self.invariants))

    def _stacked(self, gens: Sequence[Sequence[int]]) -> Matrix:
        rows = [list(self.reduce(g)) for g in gens]
        rows += [
            [d if i == j else 0 for j in range(self.rank)]
            for i, d in enumerate(self.invariants)
        ]
        return rows

    def subgroup_order(self, gens: Sequence[Sequence[int]]) -> int:
        """Order of the subgroup generated by the given elements."""
        if self.rank == 0:
            return 1
        quotient = math.prod(snf(self._stacked(gens)).diag)
        return self.order() // quotient

    def express(
        self, gens: Sequence[Sequence[int]], y: Sequence[int]
    ) -> list[int] | None:
        """Coefficients c with sum c_j gens_j == y, or None when y is not in
        the span. Coefficients are not unique; any valid witness is fine."""
        if self.rank == 0:
            return [0] * len(gens)
        x = solve_left(self._stacked(gens), list(self.reduce(y)))
        if x is None:
            return None
        return x[: len(gens)]


def group_from_relations(
    relations: Iterable[Sequence[int]], labels: Sequence[str]
) -> FiniteAbelianGroup:
    """Z^n modulo the row span of `relations`. Raises if the quotient is
    infinite, since everything downstream expects finite groups."""
    labels = tuple(labels)
    n = len(labels)
    rows = [list(r) for r in relations]
    if any(len(r) != n for r in rows):
        raise ValueError("relation width disagrees with generator count")
    if not rows:
        rows = [[0] * n]
    s = snf(rows)
    diag = list(s.diag) + [0] * (n - len(s.diag))
    if any(d == 0 for d in diag):
        raise ValueError("presented group is infinite")
    kept = [i for i in range(n) if diag[i] != 1]
    invariants = tuple(diag[i] for i in kept)
    to_canon = tuple(tuple(s.V[i][j] % diag[j] for j in kept) for i in range(n))
    gen_vecs = tuple(tuple(s.Vinv[j]) for j in kept)
    return FiniteAbelianGroup(invariants, labels, to_canon, gen_vecs)


def cyclic_complement(
    invariants: Sequence[int], c: Sequence[int], ell: int
) -> tuple[int, list[tuple[int, ...]]]:
    """For an ell-group A = prod Z/d_i and an element c, pick the coordinate
    i0 where d_i/gcd(c_i, d_i) peaks and return (i0, basis of B) where
    B = <e_i : i != i0>. Then A/B is cyclic and c keeps its full order in
    the quotient; dropping any other coordinate can shrink the image order.
    """
    k = len(invariants)
    if k == 0:
        raise ValueError("trivial group has no distinguished coordinate")
    if len(c) != k:
        raise ValueError("element length disagrees with the group rank")
    n = []
    for d in invariants:
        v = valuation(d, ell)
        if ell**v != d:
            raise ValueError(f"invariant {d} is not a power of {ell}")
        n.append(v)
    gaps = []
    for ci, di, ni in zip(c, invariants, n):
        ci %= di
        gaps.append(0 if ci == 0 else ni - min(valuation(ci, ell), ni))
    best = max(gaps)
    i0 = gaps.index(best)
    basis = [tuple(int(i == j) for j in range(k)) for i in range(k) if i != i0]
    return i0, basis
