"""Search for principalization primes and build the cyclic companion field.

The companion field F of degree ell^n and conductor p is presented by the
minimal polynomial of the Gaussian period eta = Tr(zeta_p) down to F. The
polynomial is assembled by CRT across auxiliary primes Q = 1 mod p, where the
periods become explicit sums of p-th roots of unity in F_Q.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

from .errors import InputError
from .exactmath import is_prime, primes_in_progression
from .kummerfrob import ConditionChecker, SearchParams
from .quadfield import Modulus, QuadField, _primitive_root, quadratic_field


def gaussian_period_min_poly(p: int, m: int) -> tuple[int, ...]:
    """Coefficients (low to high, monic) of the minimal polynomial of the
    degree-m Gaussian period for the prime p, with m dividing p - 1."""
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    if m < 1 or (p - 1) % m:
        raise InputError(f"degree {m} does not divide p - 1 = {p - 1}")
    if m == 1:
        return (1, 1)  # eta = -1
    R = (p - 1) // m
    bound = (1 + R) ** m  # every |e_k(eta_0..eta_{m-1})| is below this
    g = _primitive_root(p)
    # exponent classes: cosets of <g^m> in (Z/p)^*
    cosets = []
    for j in range(m):
        cosets.append([pow(g, j + i * m, p) for i in range(R)])
    residues: list[list[int]] = []
    moduli: list[int] = []
    prod = 1
    for Q in primes_in_progression(1, p, start=max(p + 1, 100)):
        w = pow(_primitive_root(Q), (Q - 1) // p, Q)
        periods = [sum(pow(w, a, Q) for a in coset) % Q for coset in cosets]
        # poly = prod (T - eta_j) mod Q, low-to-high coefficients
        poly = [1]
        for eta in periods:
            nxt = [0] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] = (nxt[i + 1] + c) % Q
                nxt[i] = (nxt[i] - c * eta) % Q
            poly = nxt
        residues.append(poly)
        moduli.append(Q)
        prod *= Q
        if prod > 2 * bound:
            break
    from .exactmath import crt

    coeffs = []
    for k in range(m + 1):
        c, M = crt([r[k] for r in residues], moduli)
        if c > M // 2:
            c -= M
        coeffs.append(c)
    assert coeffs[m] == 1, "period polynomial must be monic"
    assert coeffs[m - 1] == 1, "periods must sum to -1"
    return tuple(coeffs)


@dataclass(frozen=True)
class CyclicFieldDesc:
    """The totally real cyclic field F of conductor p and degree ell^n."""

    p: int
    degree: int
    min_poly: tuple[int, ...]  # low-to-high, monic

    @property
    def disc(self) -> int:
        return self.p ** (self.degree - 1)

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "degree": self.degree,
            "min_poly": list(self.min_poly),
            "disc": self.disc,
        }


def power_adjustment_hint(field: QuadField, ell: int, h: int) -> dict:
    """What to adjoin when the target misses the ell^h-th powers: the degree
    ell^h real cyclotomic layer, and the congruence auxiliary primes must
    satisfy to split in it."""
    conductor = 4 * 2**h if ell == 2 else ell ** (h + 1)
    return {
        "ell": ell,
        "h": h,
        "conductor": conductor,
        "degree": ell**h,
        "field": f"real cyclotomic subfield of conductor {conductor}",
        "prime_condition": f"q = 1 mod {conductor}",
    }


@dataclass(frozen=True)
class CandidateCertificate:
    d: int
    modulus: tuple  # descriptor tuples (p, a, b, g)
    target: tuple[int, ...]
    ell: int
    n: int
    h: int
    h_K: int
    p: int
    root: int
    eps_character: dict
    minus_one_character: dict
    bound: int
    cyclic_field: CyclicFieldDesc

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "modulus": [list(t) for t in self.modulus],
            "target": list(self.target),
            "ell": self.ell,
            "n": self.n,
            "h": self.h,
            "h_K": self.h_K,
            "p": self.p,
            "root": self.root,
            "eps_character": self.eps_character,
            "minus_one_character": self.minus_one_character,
            "bound": self.bound,
            "cyclic_field": self.cyclic_field.as_dict(),
        }


@dataclass
class SearchResult:
    status: str  # "found" | "not_found" | "power_blocked"
    certificate: CandidateCertificate | None = None
    stats: dict = dc_field(default_factory=dict)
    hint: dict | None = None
    params: SearchParams | None = None

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "certificate": self.certificate.as_dict() if self.certificate else None,
            "stats": self.stats,
            "hint": self.hint,
            "n": self.params.n if self.params else None,
        }


def _modulus_descriptor(modulus: Modulus) -> tuple:
    return tuple((d["p"], d["a"], d["b"], d["g"]) for d in modulus.descriptor())


def _candidate_stream(checker: ConditionChecker, lo: int, hi: int):
    params = checker.params
    step = 2 ** (params.n + 1) if params.ell == 2 else params.ell**params.n
    for p in primes_in_progression(1, step, start=max(lo, 3)):
        if p > hi:
            return
        if checker.forbidden(p):
            continue
        yield p


def _scan_range(checker: ConditionChecker, lo: int, hi: int):
    """First passing prime in [lo, hi] plus rejection statistics."""
    stats = {"scanned": 0, "rejected_i": 0, "rejected_ii": 0, "rejected_iii": 0}
    for p in _candidate_stream(checker, lo, hi):
        stats["scanned"] += 1
        rep = checker.check(p)
        if rep.ok:
            return p, rep, stats
        key = f"rejected_{rep.failed_at}"
        stats[key] = stats.get(key, 0) + 1
    return None, None, stats


def _chunk_worker(args) -> tuple[int | None, dict]:
    d, mod_desc, target, ell, n, h, bound, lo, hi = args
    checker = _checker_cached(d, mod_desc, target, ell, n, h, bound)
    p, _, stats = _scan_range(checker, lo, hi)
    return p, stats


_CHECKER_CACHE: dict = {}


def _checker_cached(d, mod_desc, target, ell, n, h, bound) -> ConditionChecker:
    key = (d, mod_desc, target, ell, n, h)
    if key not in _CHECKER_CACHE:
        field = quadratic_field(d)
        from .quadfield import QIdeal

        primes = tuple(QIdeal(field, g, a, b) for (p0, a, b, g) in mod_desc)
        _CHECKER_CACHE[key] = ConditionChecker(
            field, Modulus(field, primes), target, SearchParams(ell, n, h, bound)
        )
    return _CHECKER_CACHE[key]


def find_principalizing_prime(
    field: QuadField,
    modulus: Modulus,
    target: tuple[int, ...],
    params: SearchParams,
    jobs: int = 1,
) -> SearchResult:
    """Scan primes p <= params.bound for conditions (i')-(iv); the first hit
    becomes a certificate carrying the cyclic companion field."""
    checker = ConditionChecker(field, modulus, target, params)
    if not checker.iv_ok:
        return SearchResult(
            status="power_blocked",
            hint=power_adjustment_hint(field, params.ell, checker.h),
            stats={"reason": f"target is not an ell^{checker.h}-th power"},
            params=params,
        )
    if not checker.iii_attainable:
        return SearchResult(
            status="not_found",
            stats={
                "reason": "character order unattainable: eps is an "
                f"ell^{params.ell}-power beyond the height h = {checker.h}",
                "eps_unit_exponent": checker.eps_unit_exponent,
            },
            params=params,
        )
    if jobs > 1:
        found_p, stats = _parallel_scan(field, modulus, target, params, jobs, checker)
        rep = checker.check(found_p) if found_p else None
    else:
        found_p, rep, stats = _scan_range(checker, 3, params.bound)
    if found_p is None:
        stats["reason"] = f"no prime below {params.bound} passed all conditions"
        return SearchResult(status="not_found", stats=stats, params=params)
    degree = params.ell**params.n
    cert = CandidateCertificate(
        d=field.d,
        modulus=_modulus_descriptor(modulus),
        target=checker.target,
        ell=params.ell,
        n=params.n,
        h=checker.h,
        h_K=checker.h_K,
        p=found_p,
        root=rep.root,
        eps_character=rep.checks["eps_character"],
        minus_one_character=rep.checks["minus_one_character"],
        bound=params.bound,
        cyclic_field=CyclicFieldDesc(
            found_p, degree, gaussian_period_min_poly(found_p, degree)
        ),
    )
    return SearchResult(status="found", certificate=cert, stats=stats, params=params)


def _parallel_scan(field, modulus, target, params, jobs, checker):
    """Deterministic chunked scan: ranges are examined in ascending order and
    the first hit in the earliest hitting chunk wins."""
    mod_desc = _modulus_descriptor(modulus)
    chunk = max(20000, params.bound // (8 * jobs))
    ranges = [
        (lo, min(lo + chunk - 1, params.bound))
        for lo in range(3, params.bound + 1, chunk)
    ]
    args = [
        (field.d, mod_desc, tuple(checker.target), params.ell, params.n,
         params.h, params.bound, lo, hi)
        for lo, hi in ranges
    ]
    total = {"scanned": 0, "rejected_i": 0, "rejected_ii": 0, "rejected_iii": 0}
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for (p, stats) in pool.map(_chunk_worker, args):
            for k, v in stats.items():
                total[k] = total.get(k, 0) + v
            if p is not None:
                return p, total
    return None, total


def search_with_escalation(
    field: QuadField,
    modulus: Modulus,
    target: tuple[int, ...],
    params: SearchParams,
    n_max: int | None = None,
    jobs: int = 1,
) -> list[SearchResult]:
    """Run the search at params.n, escalating n upward until a certificate
    appears or n_max is passed. Every attempt is kept in the record."""
    n_max = n_max if n_max is not None else params.n + 1
    attempts: list[SearchResult] = []
    n = params.n
    while n <= n_max:
        pn = SearchParams(params.ell, n, params.h, params.bound)
        res = find_principalizing_prime(field, modulus, target, pn, jobs=jobs)
        attempts.append(res)
        if res.status == "found":
            break
        n += 1
    return attempts
