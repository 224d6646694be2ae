"""Two independent computations of the ambiguous ray-class count.

For a quadratic step L/K (either L quadratic over K = Q, or L biquadratic
over one of its quadratic subfields K) the classes of Gal(L/K)-stable ideals
inside Cl^m(L) form a subgroup whose order has a closed formula:

    |Cl^m_K| * prod d_inf * prod e_P / ([L:K] * (E^m_K : N(E^{m_L}_L)))

with d_inf the local degrees at the infinite places of K, e_P the
ramification indices at finite primes of K coprime to m, and the denominator
index taken on unit groups of elements that are 1 mod the respective moduli.
`ambiguous_count_formula` evaluates that expression factor by factor;
`ambiguous_count_direct` computes the order of the subgroup of Cl^m(L)
generated by ramified primes and extended K-ideals, with no shared code
between the two routes.  Agreement across a corpus is the regression signal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from raycap.abgroup import FiniteAbelianGroup, group_from_relations, kernel_left
from raycap.biquad import (
    BiquadField,
    LResidueSystem,
    class_number,
    embed,
    extend_ideal,
    extend_modulus,
    intersect_subfield,
    is_principal,
    primes_above,
    unit_group,
)
from raycap.errors import BudgetError, InputError
from raycap.exactmath import factor, is_prime
from raycap.quadfield import (
    Modulus,
    QElt,
    QuadField,
    QIdeal,
    ResidueSystem,
    _primitive_root,
    factor_prime,
    fundamental_unit,
    modulus_from_rational,
    ray_class_group,
    unit_gens,
)

__all__ = [
    "AmbigReport",
    "ambig_case",
    "ambig_sweep",
    "ambiguous_count_direct",
    "ambiguous_count_formula",
    "fundamental_field_params",
    "norm_index_units",
    "rayclass_Q",
    "rayclass_Q_generators",
    "unit_dlog",
]


# ---------------------------------------------------------------------------
# ray class group of Q


def _rational_ray_data(m: int) -> tuple[FiniteAbelianGroup, tuple[int, ...]]:
    """((Z/m)^* mod <-1>, generator residues coprime to m)."""
    if m < 1:
        raise InputError("modulus integer must be positive")
    if m <= 2:
        return group_from_relations([], ()), ()
    # (generator mod q, its order, exponent of -1 over it, q) per factor
    local: list[tuple[int, int, int, int]] = []
    for p, k in sorted(factor(m).items()):
        q = p**k
        if p == 2:
            if k == 1:
                continue
            if k == 2:
                local.append((3, 2, 1, q))
            else:
                local.append((5, q // 4, 0, q))
                local.append((q - 1, 2, 1, q))
            continue
        g = _primitive_root(p)
        if k > 1 and pow(g, p - 1, p * p) == 1:
            g += p
        phi = q // p * (p - 1)
        local.append((g, phi, phi // 2, q))
    orders = [o for _, o, _, _ in local]
    minus = [e for _, _, e, _ in local]
    lifted = [
        g % m if m == q else _crt(g, q, 1, m // q) for g, _, _, q in local
    ]
    n = len(local)
    rows = [[orders[i] if j == i else 0 for j in range(n)] for i in range(n)]
    rows.append(list(minus))
    group = group_from_relations(rows, tuple(f"g{i}" for i in range(n)))
    return group, tuple(lifted)


def _crt(a: int, m1: int, b: int, m2: int) -> int:
    g, x = _egcd(m1, m2)
    assert g == 1
    return (a + (b - a) * x % m2 * m1) % (m1 * m2)


def _egcd(a: int, b: int) -> tuple[int, int]:
    """(gcd, inverse of a mod b) for coprime a, b."""
    r0, r1, s0, s1 = a, b, 1, 0
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return r0, s0 % b


@lru_cache(maxsize=None)
def rayclass_Q(m: int) -> FiniteAbelianGroup:
    """Ray class group of Q for conductor m: (Z/m)^* modulo {+-1}."""
    return _rational_ray_data(m)[0]


@lru_cache(maxsize=None)
def rayclass_Q_generators(m: int) -> tuple[int, ...]:
    """Positive residues whose ideal classes generate rayclass_Q(m).

    The i-th residue maps to the i-th ambient basis vector of the group.
    """
    return _rational_ray_data(m)[1]


# ---------------------------------------------------------------------------
# exact discrete logs in real quadratic unit groups


def _sign_root_comb(s1: int, s2: int, D: int) -> int:
    """Exact sign of s1 + s2*sqrt(D) for nonsquare D > 0."""
    if s1 >= 0 and s2 >= 0:
        return 1 if (s1 or s2) else 0
    if s1 <= 0 and s2 <= 0:
        return -1 if (s1 or s2) else 0
    big = s1 * s1 > D * s2 * s2
    if s1 > 0:
        return 1 if big else -1
    return -1 if big else 1


def _embed_sign(z: QElt) -> int:
    # sign at the embedding sending omega to (t + sqrt(D))/2
    return _sign_root_comb(2 * z.x + z.y * z.field.t, z.y, z.field.D)


def _embed_ge(a: QElt, b: QElt) -> bool:
    return _embed_sign(a - b) >= 0


def unit_dlog(field: QuadField, w: QElt) -> tuple[int, int]:
    """(s, a) with w = (-1)^s * eps^a for the fundamental unit eps.

    All comparisons are exact integer arithmetic, so arbitrarily large unit
    powers are handled without any floating-point log.
    """
    if not field.is_real:
        raise InputError("unit discrete log needs a real field")
    if w.field is not field and w.field != field:
        raise InputError("element from the wrong field")
    if abs(w.norm()) != 1:
        raise InputError("not a unit")
    one = QElt(field, 1, 0)
    if w == one:
        return 0, 0
    if w == -one:
        return 1, 0
    eps = fundamental_unit(field)
    s = 0
    if _embed_sign(w) < 0:
        s, w = 1, -w
    inv = False
    if not _embed_ge(w, one):  # 0 < w < 1: flip to w^-1 = conj(w)*N(w)
        inv = True
        w = w.conj() * w.norm()
        if _embed_sign(w) < 0:
            w = -w  # N(w) = -1 flips the sign back
            s ^= 1
    # binary ladder: largest power of eps not exceeding w, then descend
    powers = [eps]
    while _embed_ge(w, powers[-1] * powers[-1]):
        powers.append(powers[-1] * powers[-1])
    a, cur = 0, one
    for k in range(len(powers) - 1, -1, -1):
        step = cur * powers[k]
        if _embed_ge(w, step):
            cur = step
            a += 1 << k
    if cur != w:
        raise InputError("element is not in <-1, eps>")
    if inv:
        a = -a
    return s, a


# ---------------------------------------------------------------------------
# congruence-unit lattices and the norm index


def _kernel_exponents(gvecs: list[tuple[int, ...]], group: FiniteAbelianGroup):
    """Basis of {a : sum a_i * g_i = 0 in group}, as rows over Z^len(gvecs)."""
    r = len(gvecs)
    if r == 0:
        return []
    k = len(group.invariants)
    if k == 0:
        return [[1 if j == i else 0 for j in range(r)] for i in range(r)]
    stacked = [list(v) for v in gvecs]
    for i, d in enumerate(group.invariants):
        stacked.append([d if j == i else 0 for j in range(k)])
    rows = [list(v[:r]) for v in kernel_left(stacked)]
    rows = [v for v in rows if any(v)]
    assert len(rows) == r, "unit images have finite order, kernel is full rank"
    return rows


def _unit_sublattice_mod(field: QuadField, m: Modulus) -> list[list[int]]:
    """Exponent lattice of E^m over unit_gens(field)."""
    ug = unit_gens(field)
    if not m.primes:
        return [[1 if j == i else 0 for j in range(len(ug))] for i in range(len(ug))]
    res = ResidueSystem(field, m)
    G = res.group()
    gvecs = [G.dlog_ambient(res.dlog(u)) for u in ug]
    return _kernel_exponents(gvecs, G)


def _quotient_order_rank1(sub_rows: list[list[int]]) -> int:
    """|E_Q / H| for H spanned by 1-column parity rows; E_Q = Z/2."""
    rows = [[2]] + [list(r) for r in sub_rows]
    return group_from_relations(rows, ("m",)).order()


def _quotient_order_rank2(sub_rows: list[list[int]]) -> int:
    """|E_K / H| for real quadratic K, H given over the basis (-1, eps)."""
    rows = [[2, 0]] + [list(r) for r in sub_rows]
    return group_from_relations(rows, ("m", "e")).order()


def _norm_index_quadratic(L: QuadField, m: int) -> int:
    """(E^m_Q : N_{L/Q}(E^{m_L}_L)) with m_L the extension of m to L."""
    m_L = modulus_from_rational(L, m)
    lattice = _unit_sublattice_mod(L, m_L)
    ug = unit_gens(L)
    # every unit norm down to Q is +-1; torsion norms are +1
    parities = [1 if (u.norm() == -1 and L.is_real) else 0 for u in ug]
    norm_rows = [[sum(a * p for a, p in zip(row, parities)) % 2] for row in lattice]
    over_norms = _quotient_order_rank1(norm_rows)
    over_em = 1 if m <= 2 else 2
    assert over_norms % over_em == 0, "norm subgroup must sit inside E^m_Q"
    return over_norms // over_em


def _norm_index_biquad(L: BiquadField, K: QuadField, m: Modulus) -> int:
    j = _subfield_index(L, K)
    if not isinstance(m, Modulus) or m.field != K:
        raise InputError("modulus lives over the wrong base field")
    U = unit_group(L)
    lgens = [-L.one()] + list(U.units)
    m_L = extend_modulus(L, m)
    if not m_L:
        lattice = [[1 if c == i else 0 for c in range(4)] for i in range(4)]
    else:
        R = LResidueSystem(m_L)
        G = R.group()
        gvecs = [G.dlog_ambient(R.dlog(u)) for u in lgens]
        lattice = _kernel_exponents(gvecs, G)
    # relative norms of the generators, expressed over (-1, eps_K)
    norm_dlogs = [(0, 0)] + [unit_dlog(K, v.rel_norm(j)) for v in U.units]
    norm_rows = [
        [
            sum(a * s for a, (s, _) in zip(row, norm_dlogs)) % 2,
            sum(a * e for a, (_, e) in zip(row, norm_dlogs)),
        ]
        for row in lattice
    ]
    over_norms = _quotient_order_rank2(norm_rows)
    over_em = _quotient_order_rank2(_unit_sublattice_mod(K, m))
    assert over_norms % over_em == 0, "norm subgroup must sit inside E^m_K"
    return over_norms // over_em


def norm_index_units(L, K, m) -> int:
    """Index (E^m_K : N_{L/K}(E^{m_L}_L)) for a degree-2 step L/K.

    Shapes: L quadratic with K None (meaning Q) and m a squarefree integer,
    or L biquadratic with K one of its quadratic subfields and m a Modulus.
    """
    if isinstance(L, QuadField):
        if K is not None:
            raise InputError("a quadratic L sits over K = Q (pass None)")
        return _norm_index_quadratic(L, int(m))
    if isinstance(L, BiquadField):
        if not isinstance(K, QuadField) or not isinstance(m, Modulus):
            raise InputError("biquadratic L needs a quadratic K and a Modulus")
        return _norm_index_biquad(L, K, m)
    raise InputError("unsupported extension shape")


# ---------------------------------------------------------------------------
# ramification bookkeeping


def _subfield_index(L: BiquadField, K: QuadField) -> int:
    for j, k in ((1, L.k1), (2, L.k2), (3, L.k3)):
        if K == k:
            return j
    raise InputError("K is not a quadratic subfield of L")


def _ramified_quad(L: QuadField, m: int) -> list[int]:
    """Rational primes ramified in L/Q and coprime to m, ascending."""
    return [p for p in sorted(factor(abs(L.D))) if m % p != 0]


def _ramified_biquad(L: BiquadField, K: QuadField, m: Modulus):
    """(P, Q, e_rel) for K-primes P coprime to m with e_P(L/K) = 2."""
    j = _subfield_index(L, K)
    out = []
    for p0 in sorted(factor(L.k3.D)):
        facs_L = primes_above(L, p0)
        _, facs_K = factor_prime(K, p0)
        for P, eK, _ in facs_K:
            above = [
                (Q, e)
                for Q, e, _ in facs_L
                if intersect_subfield(Q, j).key() == P.key()
            ]
            assert above, "every K-prime has a prime of L over it"
            e_rel = above[0][1] // eK
            assert all(e // eK == e_rel for _, e in above)
            assert above[0][1] % eK == 0 and e_rel in (1, 2)
            if e_rel == 2 and m.coprime_to(P):
                out.append((P, above[0][0], e_rel))
    return out


# ---------------------------------------------------------------------------
# the two sides


@dataclass(frozen=True)
class AmbigReport:
    """One checked case of the ambiguous-count identity."""

    extension: str
    params: tuple
    base_ray_order: int
    local_degrees: tuple[int, ...]
    ramified_e: tuple[int, ...]
    degree: int
    norm_index: int
    formula: int
    direct: int

    @property
    def equal(self) -> bool:
        return self.formula == self.direct

    def as_dict(self) -> dict:
        return {
            "extension": self.extension,
            "params": list(self.params),
            "base_ray_order": self.base_ray_order,
            "local_degrees": list(self.local_degrees),
            "ramified_e": list(self.ramified_e),
            "degree": self.degree,
            "norm_index": self.norm_index,
            "formula": self.formula,
            "direct": self.direct,
            "equal": self.equal,
        }


def _formula_parts_quadratic(L: QuadField, m: int):
    h = rayclass_Q(m).order()
    d_inf = (1,) if L.is_real else (2,)
    es = tuple(2 for _ in _ramified_quad(L, m))
    idx = _norm_index_quadratic(L, m)
    return h, d_inf, es, idx


def _formula_parts_biquad(L: BiquadField, K: QuadField, m: Modulus):
    h = ray_class_group(K, m).group.order()
    d_inf = (1, 1)  # K real, L totally real: both places stay real
    es = tuple(e for _, _, e in _ramified_biquad(L, K, m))
    idx = _norm_index_biquad(L, K, m)
    return h, d_inf, es, idx


def _assemble(h: int, d_inf, es, idx: int) -> int:
    num = h * math.prod(d_inf) * math.prod(es)
    den = 2 * idx
    if num % den:
        raise ArithmeticError(
            f"ambiguous count {num}/{den} is not integral; factor bug"
        )
    value = num // den
    assert value > 0
    return value


def _require_odd(n: int) -> None:
    # the degree-2 step has ell = 2; the count identity needs m away from 2
    if n % 2 == 0:
        raise InputError("modulus must have odd norm for a quadratic step")


def ambiguous_count_formula(L, K, m) -> int:
    """Closed-form order of the ambiguous-ideal class subgroup of Cl^m_L."""
    if _degenerate(L, K):
        return _base_ray_order(K, m)
    if isinstance(L, QuadField) and K is None:
        _require_odd(int(m))
        return _assemble(*_formula_parts_quadratic(L, int(m)))
    if isinstance(L, BiquadField) and isinstance(K, QuadField):
        _require_odd(m.norm())
        return _assemble(*_formula_parts_biquad(L, K, m))
    raise InputError("unsupported extension shape")


def _degenerate(L, K) -> bool:
    if L is None and K is None:
        return True
    return isinstance(L, QuadField) and isinstance(K, QuadField) and L == K


def _base_ray_order(K, m) -> int:
    if K is None:
        return rayclass_Q(int(m)).order()
    return ray_class_group(K, m).group.order()


def _direct_quadratic(L: QuadField, m: int) -> int:
    m_L = modulus_from_rational(L, m)
    ray = ray_class_group(L, m_L)
    vecs = []
    for p0 in _ramified_quad(L, m):
        kind, data = factor_prime(L, p0)
        assert kind == "ramified"
        vecs.append(ray.dlog(data[0][0]))
    for a in rayclass_Q_generators(m):
        vecs.append(ray.class_of_principal(QElt(L, a, 0)))
    return ray.group.subgroup_order(vecs)


def _direct_biquad(L: BiquadField, K: QuadField, m: Modulus) -> int:
    if class_number(L) != 1:
        raise BudgetError(
            "direct ambiguous count needs a principal biquadratic field"
        )
    m_L = extend_modulus(L, m)
    R = LResidueSystem(m_L)
    k = len(R.factors)
    rows = [[R.orders[i] if c == i else 0 for c in range(k)] for i in range(k)]
    for u in [-L.one()] + list(unit_group(L).units):
        rows.append(list(R.dlog(u)))
    quo = group_from_relations(rows, tuple(f"r{i}" for i in range(k)))

    def class_vec(gamma):
        return quo.dlog_ambient(R.dlog(gamma))

    vecs = []
    for _, Q, _ in _ramified_biquad(L, K, m):
        gamma = is_principal(Q)
        assert gamma is not None, "class number one"
        vecs.append(class_vec(gamma))
    ray_K = ray_class_group(K, m)
    for P in ray_K.ideal_gens:
        gamma = is_principal(extend_ideal(L, P))
        assert gamma is not None, "class number one"
        vecs.append(class_vec(gamma))
    for i in range(len(ray_K.residue.factors)):
        e_i = [1 if c == i else 0 for c in range(len(ray_K.residue.factors))]
        z = ray_K.residue.crt_lift(e_i)
        vecs.append(class_vec(embed(L, z)))
    return quo.subgroup_order(vecs)


def ambiguous_count_direct(L, K, m) -> int:
    """Order of the subgroup of Cl^m_L generated by ambiguous ideals.

    Generators: ramified primes of L/K coprime to m, plus extensions of
    ideals representing every class of Cl^m_K.
    """
    if _degenerate(L, K):
        return _base_ray_order(K, m)
    if isinstance(L, QuadField) and K is None:
        _require_odd(int(m))
        return _direct_quadratic(L, int(m))
    if isinstance(L, BiquadField) and isinstance(K, QuadField):
        _require_odd(m.norm())
        return _direct_biquad(L, K, m)
    raise InputError("unsupported extension shape")


# ---------------------------------------------------------------------------
# cases and sweeps


def _case_quadratic(d: int, m: int) -> AmbigReport:
    from raycap.quadfield import quadratic_field

    L = quadratic_field(d)
    h, d_inf, es, idx = _formula_parts_quadratic(L, m)
    formula = _assemble(h, d_inf, es, idx)
    direct = _direct_quadratic(L, m)
    return AmbigReport(
        extension=f"Q(sqrt({d}))/Q",
        params=("quad", d, m),
        base_ray_order=h,
        local_degrees=d_inf,
        ramified_e=es,
        degree=2,
        norm_index=idx,
        formula=formula,
        direct=direct,
    )


def _case_biquad(d: int, p: int, j: int, mod_primes: tuple[int, ...]) -> AmbigReport:
    from raycap.biquad import biquad_field

    L = biquad_field(d, p)
    K = {1: L.k1, 2: L.k2, 3: L.k3}[j]
    m = modulus_from_rational(K, math.prod(mod_primes) if mod_primes else 1)
    h, d_inf, es, idx = _formula_parts_biquad(L, K, m)
    formula = _assemble(h, d_inf, es, idx)
    direct = _direct_biquad(L, K, m)
    return AmbigReport(
        extension=f"Q(sqrt({d}),sqrt({p}))/Q(sqrt({K.d}))",
        params=("biquad", d, p, j, tuple(sorted(mod_primes))),
        base_ray_order=h,
        local_degrees=d_inf,
        ramified_e=es,
        degree=2,
        norm_index=idx,
        formula=formula,
        direct=direct,
    )


def ambig_case(case: tuple) -> AmbigReport:
    """One identity check.  ("quad", d, m) or ("biquad", d, p, j, (q, ...))."""
    kind = case[0]
    if kind == "quad":
        _, d, m = case
        return _case_quadratic(int(d), int(m))
    if kind == "biquad":
        _, d, p, j, mod_primes = case
        return _case_biquad(int(d), int(p), int(j), tuple(mod_primes))
    raise InputError(f"unknown case kind {kind!r}")


def ambig_sweep(cases) -> list[AmbigReport]:
    """Reports for each case, in input order.  Callers check .equal."""
    return [ambig_case(tuple(c)) for c in cases]


def fundamental_field_params(disc_bound: int) -> list[int]:
    """All squarefree d != 1 with fundamental |disc| <= disc_bound, sorted
    by |disc| then sign."""
    out = []
    for d in range(-disc_bound, disc_bound + 1):
        if d in (0, 1) or not _squarefree(d):
            continue
        D = d if d % 4 == 1 else 4 * d
        if abs(D) <= disc_bound:
            out.append((abs(D), -(D > 0), d))
    return [d for _, _, d in sorted(out)]


def _squarefree(n: int) -> bool:
    n = abs(n)
    return all(k == 1 for k in factor(n).values()) if n > 1 else n == 1
