"""Splitting criteria for principalization primes.

A candidate prime p must split in the right Kummer-type extensions; at desk
scale every criterion collapses to congruences on p and to residue characters
chi(x) = x^((p-1)/ell^n) computed through a chosen square root of D mod p.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import InputError
from .exactmath import is_prime, kronecker, sqrt_mod, squarefree_part, valuation
from .quadfield import (
    Modulus,
    QElt,
    QIdeal,
    RayClassData,
    aug_unit_data,
    ray_class_group,
)


def is_split_cyclotomic(p: int, ell: int, n: int, includes_sqrt_units: bool) -> bool:
    """Whether p splits completely in Q(zeta_{ell^n}), optionally extended by
    ell^n-th roots of -1 (the rational unit radical). Splitting is the
    congruence p = 1 mod ell^n; adjoining sqrt[ell^n]{-1} sharpens the 2-part
    to p = 1 mod 2^(n+1)."""
    if not is_prime(p) or p == ell:
        return False
    if (p - 1) % ell**n:
        return False
    if includes_sqrt_units and ell == 2 and (p - 1) % 2 ** (n + 1):
        return False
    return True


def disc_root_pair(D: int, p: int) -> tuple[int, int]:
    """The two square roots of D mod p as (smaller, larger), requiring that
    p split: kronecker(D, p) = 1."""
    r = sqrt_mod(D % p, p)
    if r is None or r == 0:
        raise InputError(f"{p} does not split (D = {D} is not a unit square)")
    return min(r, p - r), max(r, p - r)


def prime_above_from_root(field, p: int, root: int) -> QIdeal:
    """The degree-one prime over p on which w maps to (t + root)/2 mod p."""
    inv2 = pow(2, -1, p)
    phi_w = (field.t + root) * inv2 % p
    return QIdeal(field, 1, p, (-phi_w) % p)


def residue_character(
    eta: QElt, p: int, ell: int, n: int, root: int
) -> tuple[int, int]:
    """chi(eta) = phi(eta)^((p-1)/ell^n) mod p and its exact order (an ell
    power), where phi sends w to (t + root)/2."""
    if (p - 1) % ell**n:
        raise InputError("p does not satisfy the cyclotomic congruence")
    inv2 = pow(2, -1, p)
    phi_w = (eta.field.t + root) * inv2 % p
    val = (eta.x + eta.y * phi_w) % p
    if val == 0:
        raise InputError("eta is not coprime to p")
    c = pow(val, (p - 1) // ell**n, p)
    order = 1
    cur = c
    while cur != 1:
        cur = pow(cur, ell, p)
        order *= ell
        if order > ell**n * ell:
            raise ArithmeticError("character order escaped its ell-part")
    return c, order


def h_K_constant(field, ell: int) -> dict:
    """v_ell of the constant ell^{h_K}: the ell-part of the roots of unity
    times the first cyclotomic-layer overlap of the Hilbert class field.
    Only the first layer can be unramified over K, so the overlap exponent
    is 0 or 1."""
    if not is_prime(ell):
        raise InputError("ell must be prime")
    d = field.d
    mu_exp = 0
    if ell == 2:
        mu_exp = 2 if d == -1 else 1
    elif ell == 3 and d == -3:
        mu_exp = 1
    layer_exp = 0
    if ell == 2 and d != 2:
        # K(sqrt 2)/K is unramified everywhere iff the biquadratic field
        # Q(sqrt d, sqrt 2) has discriminant D_d^2
        e = squarefree_part(2 * d)
        D_e = e if e % 4 == 1 else 4 * e
        if 8 * D_e == field.D:
            layer_exp = 1
    return {
        "ell": ell,
        "mu_exponent": mu_exp,
        "layer_exponent": layer_exp,
        "h_K": mu_exp + layer_exp,
    }


@dataclass(frozen=True)
class SearchParams:
    ell: int
    n: int
    h: int | None = None  # None: min(h_K, n - 1)
    bound: int = 10**6

    def __post_init__(self):
        if not is_prime(self.ell):
            raise InputError("ell must be prime")
        if self.n < 1:
            raise InputError("n must be at least 1")
        if self.h is not None and not 0 <= self.h < self.n:
            raise InputError("need 0 <= h < n")
        if self.bound < 3:
            raise InputError("search bound is too small")

    def effective_h(self, h_K: int) -> int:
        return min(h_K, self.n - 1) if self.h is None else self.h


@dataclass
class ConditionReport:
    p: int
    root: int | None
    ok: bool
    failed_at: str | None  # "i" | "ii" | "iii" | "iv" | None
    checks: dict = dc_field(default_factory=dict)


class ConditionChecker:
    """Evaluates conditions (i')-(iv) for candidate primes against a fixed
    field, modulus, and target ray class."""

    def __init__(
        self,
        field,
        modulus: Modulus,
        target: tuple[int, ...],
        params: SearchParams,
    ):
        if not field.is_real:
            raise InputError("principalization search requires a real field")
        if not modulus.is_conj_stable():
            raise InputError("modulus must be stable under conjugation")
        if any(p == params.ell for p in modulus.residue_chars()):
            raise InputError("modulus must avoid the residue characteristic ell")
        self.field = field
        self.modulus = modulus
        self.params = params
        self.ray: RayClassData = ray_class_group(field, modulus)
        self.target = self.ray.group.reduce(target)
        t_order = self.ray.group.element_order(self.target)
        lv = valuation(t_order, params.ell) if t_order > 1 else 0
        if params.ell**lv != t_order:
            raise InputError("target class must have ell-power order")
        self.h_K = h_K_constant(field, params.ell)["h_K"]
        self.h = params.effective_h(self.h_K)
        self.eps, self.eps_unit_exponent = aug_unit_data(field, modulus)
        # (iv): the target must be an ell^h-th power in the ray class group
        self.iv_ok = self.ray.group.contains_power(params.ell**self.h, self.target)
        # eps = u^k: chi(eps) factors through an ell^{v_ell(k)}-th power, so
        # its order never exceeds ell^{n - v_ell(k)} at any p; (iii) needs
        # order ell^{n-h}, which is attainable only when h >= v_ell(k)
        self.iii_attainable = self.h >= valuation(self.eps_unit_exponent, params.ell)

    def forbidden(self, p: int) -> bool:
        """Primes excluded by the preconditions: p | 2 * ell * D * N(m)."""
        return (
            p < 3
            or p == self.params.ell
            or self.field.D % p == 0
            or self.modulus.norm() % p == 0
        )

    def check(self, p: int) -> ConditionReport:
        if self.forbidden(p):
            raise InputError(f"candidate {p} violates the coprimality precondition")
        params = self.params
        rep = ConditionReport(p=p, root=None, ok=False, failed_at=None)
        rep.checks["iv"] = self.iv_ok
        # (i'): split in the cyclotomic-with-unit-radical field and in K
        if not is_split_cyclotomic(p, params.ell, params.n, True) or (
            kronecker(self.field.D, p) != 1
        ):
            rep.failed_at = "i"
            rep.checks["i"] = False
            return rep
        rep.checks["i"] = True
        root, _ = disc_root_pair(self.field.D, p)
        rep.root = root
        # (ii): the prime above p sits in the target ray class
        p_K = prime_above_from_root(self.field, p, root)
        rep.checks["ii"] = self.ray.dlog(p_K) == self.target
        if not rep.checks["ii"]:
            rep.failed_at = "ii"
            return rep
        # (iii): the eps-character has exact order ell^(n-h)
        c_eps, ord_eps = residue_character(self.eps, p, params.ell, params.n, root)
        rep.checks["eps_character"] = {"value": c_eps, "order": ord_eps}
        c_m1, ord_m1 = residue_character(
            self.field.elt(-1, 0), p, params.ell, params.n, root
        )
        rep.checks["minus_one_character"] = {"value": c_m1, "order": ord_m1}
        rep.checks["iii"] = ord_eps == params.ell ** (params.n - self.h)
        if not rep.checks["iii"]:
            rep.failed_at = "iii"
            return rep
        if not self.iv_ok:
            rep.failed_at = "iv"
            return rep
        rep.ok = True
        return rep


def check_conditions(
    field,
    modulus: Modulus,
    target: tuple[int, ...],
    p: int,
    params: SearchParams,
) -> ConditionReport:
    return ConditionChecker(field, modulus, target, params).check(p)
