"""Constructive quadratic families producing triples n, n+h, n+k of sums of
two squares with n = a mod q.

Pipeline: solve the base congruence x0^2 + y0^2 = a mod q, find a shift
(u, v) with (x0+u)^2 + (y0+v)^2 = a+h mod q, set T = q / (2 gcd(u, v)),
solve an integer linear equation for (r0, s0), and expand

    n(t) = (x0 + T(r0 + (v/g) t))^2 + (y0 + T(s0 - (u/g) t))^2

into F(t) = A t^2 + B t + (C + k) with n(t) = F(t) - k. By construction
n(t) and n(t)+h are sums of two squares and n(t) = a mod q for every t;
scanning t for F(t) itself a sum of two squares yields certificate triples.

The base and shift must satisfy prime-by-prime valuation patterns (four
cases: primes away from q, primes 1 mod 4, primes 3 mod 4, and 2). Local
solutions are enumerated in a fixed order and combined by CRT; a candidate
is accepted only after the assembled family verifies exactly, which absorbs
the parity subtleties at 2 where the divisibility bookkeeping alone is not
sufficient. First verified candidate wins, so families are reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .admissibility import class_exponent, is_admissible_value
from .arith import (
    DEFAULT_BUDGET,
    FactorBudget,
    FactoredInteger,
    ResidueClass,
    crt_combine,
    ext_gcd,
    factorize,
    is_sum_two_squares,
    represent_two_squares,
    sqrt_mod_prime_power,
    valuation,
)
from .errors import (
    BudgetExceeded,
    HypothesisViolation,
    InternalInconsistency,
    ObstructionFound,
    SearchExhausted,
)

# Bounded-search knobs: residue scans per prime power, local candidates kept
# per prime, CRT combinations tried, and base points tried by the pipeline.
LOCAL_SCAN_CAP = 1 << 20
LOCAL_CANDIDATES = 48
COMBO_CAP = 20000
BASE_CAP = 12


@dataclass(frozen=True)
class HypothesisVerdict:
    ok: bool
    failed_clause: str | None = None
    detail: str = ""


@dataclass(frozen=True)
class BaseSolution:
    """A point with x0^2 + y0^2 = a mod q and the prescribed gcd valuations."""

    x0: int
    y0: int
    a: ResidueClass
    q: FactoredInteger
    per_prime_valuations: dict[int, int]


@dataclass(frozen=True)
class ShiftPair:
    """(u, v) moving the base point to the class a + h mod q."""

    u: int
    v: int
    gcd_uv: int
    h: int


@dataclass
class WitnessFamily:
    q: FactoredInteger
    a: int
    h: int
    k: int
    x0: int
    y0: int
    u: int
    v: int
    T: int
    r0: int
    s0: int
    A: int
    B: int
    C: int

    @property
    def g(self) -> int:
        return math.gcd(self.u, self.v)

    @property
    def eta(self) -> int:
        d = self.B * self.B - 4 * self.A * self.C
        return math.isqrt(-d)

    def x_of(self, t: int) -> int:
        return self.x0 + self.T * (self.r0 + (self.v // self.g) * t)

    def y_of(self, t: int) -> int:
        return self.y0 + self.T * (self.s0 - (self.u // self.g) * t)

    def F(self, t: int) -> int:
        return self.A * t * t + self.B * t + self.C + self.k

    def n_value(self, t: int) -> int:
        return self.F(t) - self.k

    def rep_n(self, t: int) -> tuple[int, int]:
        return _canon_pair(self.x_of(t), self.y_of(t))

    def rep_n_plus_h(self, t: int) -> tuple[int, int]:
        return _canon_pair(self.x_of(t) + self.u, self.y_of(t) + self.v)

    def verify(self) -> None:
        """Exact verification of every family invariant; raises on failure."""
        q = self.q.value
        g = self.g
        if g == 0 or q % (2 * g) != 0 or self.T != q // (2 * g):
            raise InternalInconsistency("T != q / (2 gcd(u, v))")
        if (self.T * self.T) % q != 0:
            raise InternalInconsistency("q does not divide T^2")
        if self.A <= 0:
            raise InternalInconsistency("leading coefficient not positive")
        if self.A % q != 0 or self.B % q != 0 or self.C % q != self.a % q:
            raise InternalInconsistency("F(t) - k is not constantly a mod q")
        for t in (0, 1, 2):
            n = self.n_value(t)
            if n != self.x_of(t) ** 2 + self.y_of(t) ** 2:
                raise InternalInconsistency(f"n(t) identity fails at t={t}")
            if n + self.h != (self.x_of(t) + self.u) ** 2 + (self.y_of(t) + self.v) ** 2:
                raise InternalInconsistency(f"n(t)+h identity fails at t={t}")
        d0 = self.B * self.B - 4 * self.A * self.C
        if d0 > 0 or self.eta * self.eta != -d0:
            raise InternalInconsistency("B^2 - 4AC is not minus a perfect square")
        if self.disc() > 0:
            raise InternalInconsistency("positive discriminant")

    def disc(self) -> int:
        return self.B * self.B - 4 * self.A * (self.C + self.k)


@dataclass(frozen=True)
class TripleCertificate:
    """Self-verifying record of a triple of sums of two squares.

    reps carry explicit (x, y) with x^2+y^2 equal to n, n+h, n+k in order.
    When `consecutive` is set, evidence lists one witness (m, p) per integer
    m strictly between n and n+k (other than n+h): p = 3 mod 4 divides m to
    an odd power, so m is not a sum of two squares.
    """

    n: int
    q: int
    a: int
    h: int
    k: int
    t: int | None
    reps: tuple[tuple[int, int], tuple[int, int], tuple[int, int]]
    consecutive: bool | None = None
    evidence: tuple[tuple[int, int], ...] = ()

    def verify(self) -> bool:
        targets = (self.n, self.n + self.h, self.n + self.k)
        for (x, y), m in zip(self.reps, targets):
            if x * x + y * y != m:
                return False
        if self.n % self.q != self.a % self.q:
            return False
        if self.consecutive:
            needed = set(range(self.n + 1, self.n + self.k)) - {self.n + self.h}
            covered = set()
            for m, p in self.evidence:
                if p % 4 != 3 or m <= 0 or valuation(m, p) % 2 == 0:
                    return False
                covered.add(m)
            if covered != needed:
                return False
        return True

    def to_json_dict(self) -> dict:
        """Wire form: one JSON object per certificate, integers as decimal strings."""
        out = {
            "n": str(self.n),
            "q": str(self.q),
            "a": str(self.a),
            "h": str(self.h),
            "k": str(self.k),
            "t": None if self.t is None else str(self.t),
            "reps": [[str(x), str(y)] for x, y in self.reps],
            "consecutive": self.consecutive,
        }
        if self.consecutive:
            out["evidence"] = [[str(m), str(p)] for m, p in self.evidence]
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "TripleCertificate":
        reps = tuple((int(x), int(y)) for x, y in data["reps"])
        if len(reps) != 3:
            raise ValueError("certificate needs exactly three representations")
        return cls(
            n=int(data["n"]),
            q=int(data["q"]),
            a=int(data["a"]),
            h=int(data["h"]),
            k=int(data["k"]),
            t=None if data.get("t") is None else int(data["t"]),
            reps=reps,
            consecutive=data.get("consecutive"),
            evidence=tuple((int(m), int(p)) for m, p in data.get("evidence", [])),
        )


@dataclass
class ScanResult:
    certificates: list[TripleCertificate]
    skipped_t: list[int]
    t_max: int


@dataclass
class ObstructionReport:
    odd_prime: list[tuple[int, int, bool]] = field(default_factory=list)
    two_adic: list[tuple[int, bool]] = field(default_factory=list)
    nonzero_mod_small: list[tuple[int, bool]] = field(default_factory=list)
    disc_is_neg_square: bool = False
    clear: bool = True


def _canon_pair(x: int, y: int) -> tuple[int, int]:
    x, y = abs(x), abs(y)
    return (x, y) if x <= y else (y, x)


def _res_val(x: int, p: int, e: int) -> int:
    """Valuation of a residue x mod p^e, capped at e (0 counts as e)."""
    if x % p**e == 0:
        return e
    return valuation(x % p**e, p)


def check_hypotheses(q: FactoredInteger, a: int, h: int, k: int) -> HypothesisVerdict:
    """Verify the preconditions of the family construction, clause by clause.

    Requires: h, k >= 1; even valuation at every prime 3 mod 4; valuation of
    2 even and at least 2; a, a+h, a+k admissible mod q and not 0 mod
    2^(v2 - 1). Returns the first violated clause.
    """
    if h < 1 or k < 1:
        return HypothesisVerdict(False, "offsets_positive", f"h={h}, k={k}")
    for p, e in sorted(q.factors.items()):
        if p % 4 == 3 and e % 2 == 1:
            return HypothesisVerdict(False, "odd_prime_valuation", f"nu_{p} = {e} is odd")
    nu2 = q.exponent(2)
    if nu2 % 2 == 1 or nu2 < 2:
        return HypothesisVerdict(
            False, "two_adic_valuation", f"nu_2 = {nu2} (needs to be even and >= 2)"
        )
    qv = q.value
    for label, value in (("a", a), ("a+h", a + h), ("a+k", a + k)):
        if not is_admissible_value(value % qv, q):
            return HypothesisVerdict(False, f"admissible_{label}", f"{label} = {value % qv} mod {qv}")
    half = 1 << (nu2 - 1)
    for label, value in (("a", a), ("a+h", a + h), ("a+k", a + k)):
        if value % half == 0:
            return HypothesisVerdict(
                False, "two_adic_nonvanishing", f"{label} = 0 mod 2^{nu2 - 1}"
            )
    return HypothesisVerdict(True)


def _base_target(c: int, p: int, e: int) -> int:
    """Required exact valuation of gcd(x0, y0) at p for the base congruence."""
    if p % 4 == 1:
        return 0
    beta = class_exponent(c % p**e, p, e)
    return beta // 2


def _iter_xy_local(c: int, p: int, e: int, target: int, scan_cap: int = LOCAL_SCAN_CAP):
    """(x, y) mod p^e with x^2 + y^2 = c and min valuation exactly `target`.

    Scans y ascending and resolves x by modular square roots, so output is
    lexicographic in (y, x).
    """
    mod = p**e
    c %= mod
    for y in range(min(mod, scan_cap)):
        vy = _res_val(y, p, e)
        if vy < target:
            continue
        for x in sqrt_mod_prime_power(c - y * y, p, e):
            vx = _res_val(x, p, e)
            if min(vx, vy) == target:
                yield x, y


def iter_base_solutions(
    a: int,
    q: FactoredInteger,
    local_candidates: int = LOCAL_CANDIDATES,
    combo_cap: int = COMBO_CAP,
):
    """Base solutions in deterministic order (per-prime (y, x)-lex, CRT-combined)."""
    qv = q.value
    a %= qv
    if qv == 1:
        yield BaseSolution(0, 0, ResidueClass(0, 1), q, {})
        return
    primes = q.primes()
    locals_: list[list[tuple[int, int]]] = []
    for p in primes:
        e = q.factors[p]
        target = _base_target(a, p, e)
        cands = list(itertools.islice(_iter_xy_local(a, p, e, target), local_candidates))
        if not cands:
            raise SearchExhausted(f"no base solution for a={a} at prime power {p}^{e}")
        locals_.append(cands)
    moduli = [p ** q.factors[p] for p in primes]
    count = 0
    for combo in itertools.product(*locals_):
        if count >= combo_cap:
            return
        count += 1
        x0 = crt_combine([ResidueClass(xy[0], m) for xy, m in zip(combo, moduli)]).value
        y0 = crt_combine([ResidueClass(xy[1], m) for xy, m in zip(combo, moduli)]).value
        if x0 == 0 and y0 == 0:
            continue
        g0 = math.gcd(x0, y0)
        vals = {p: valuation(g0, p) for p in primes}
        yield BaseSolution(x0, y0, ResidueClass(a, qv), q, vals)


def solve_base(a: int, q: FactoredInteger) -> BaseSolution:
    """First base solution in canonical order.

    Raises SearchExhausted when the bounded scan finds nothing (a budget
    signal, not a mathematical failure when a is admissible).
    """
    if not is_admissible_value(a % q.value, q):
        raise HypothesisViolation(f"{a} mod {q.value} is not admissible")
    for base in iter_base_solutions(a, q):
        return base
    raise SearchExhausted(f"base search exhausted for a={a} mod {q.value}")


def _shift_target(a: int, h: int, p: int, e: int) -> int:
    """Required exact valuation of gcd(u, v) at p."""
    if p % 4 == 1:
        return 0
    mod = p**e
    beta = class_exponent(a % mod, p, e)
    if p == 2:
        gamma = class_exponent((a + h) % mod, p, e)
        if gamma < beta:
            return gamma // 2
        if gamma > beta:
            return beta // 2
        return beta // 2 if beta % 2 == 0 else (beta + 1) // 2
    alpha = min(valuation(h, p), e)
    return min(alpha, beta) // 2


def _iter_uv_local(
    x0: int, y0: int, c: int, p: int, e: int, target: int, scan_cap: int = LOCAL_SCAN_CAP
):
    """(u, v) mod p^e with (x0+u)^2 + (y0+v)^2 = c, min valuation exactly `target`."""
    mod = p**e
    c %= mod
    for v in range(min(mod, scan_cap)):
        vv = _res_val(v, p, e)
        if vv < target:
            continue
        yv = (y0 + v) % mod
        xs = sqrt_mod_prime_power(c - yv * yv, p, e)
        for u in sorted((x - x0) % mod for x in xs):
            vu = _res_val(u, p, e)
            if min(vu, vv) == target:
                yield u, v


def _q_smooth_part(n: int, primes: list[int]) -> int:
    s = 1
    for p in primes:
        while n % p == 0:
            n //= p
            s *= p
    return s


def _strip_stray_primes(u: int, v: int, qv: int, primes: list[int]) -> tuple[int, int] | None:
    """Adjust u by multiples of q until gcd(u, v) has no factor outside q.

    If p divides both u and v but not q, then u + q is not divisible by p,
    so one bump clears every current stray at once; iteration handles strays
    introduced by the bump itself.
    """
    for _ in range(64):
        g = math.gcd(u, v)
        if g == 0:
            return None
        if g // _q_smooth_part(g, primes) == 1:
            return u, v
        if v == 0:
            return None
        u += qv
    return None


def _gcd_bound(q: FactoredInteger) -> int:
    """The divisor of q that gcd(u, v) must divide: 2^(v2/2 - 1) * prod p^(vp/2)."""
    nu2 = q.exponent(2)
    bound = 1 << max(nu2 // 2 - 1, 0)
    for p, e in q.factors.items():
        if p % 4 == 3:
            bound *= p ** (e // 2)
    return bound


def iter_shift_pairs(
    base: BaseSolution,
    h: int,
    local_candidates: int = LOCAL_CANDIDATES,
    combo_cap: int = COMBO_CAP,
):
    """Locally valid shift pairs in deterministic order.

    Yields integer pairs satisfying the congruence to a+h and both gcd
    divisibility constraints; global family compatibility is checked by the
    caller on assembly.
    """
    q = base.q
    qv = q.value
    a = base.a.value
    target_cls = (a + h) % qv
    if not is_admissible_value(target_cls, q):
        raise HypothesisViolation(f"a+h = {target_cls} mod {qv} is not admissible")
    primes = q.primes()
    locals_: list[list[tuple[int, int]]] = []
    for p in primes:
        e = q.factors[p]
        target = _shift_target(a, h, p, e)
        cands = list(
            itertools.islice(
                _iter_uv_local(base.x0, base.y0, a + h, p, e, target), local_candidates
            )
        )
        if not cands:
            raise SearchExhausted(f"no shift solution for h={h} at prime power {p}^{e}")
        locals_.append(cands)
    moduli = [p ** q.factors[p] for p in primes]
    gbound = _gcd_bound(q)
    g0_twice = 2 * math.gcd(base.x0, base.y0)
    count = 0
    for combo in itertools.product(*locals_):
        if count >= combo_cap:
            return
        count += 1
        u0 = crt_combine([ResidueClass(uv[0], m) for uv, m in zip(combo, moduli)]).value
        v0 = crt_combine([ResidueClass(uv[1], m) for uv, m in zip(combo, moduli)]).value
        for du, dv in ((0, 0), (0, -1), (-1, 0), (-1, -1)):
            u, v = u0 + du * qv, v0 + dv * qv
            if u == 0 and v == 0:
                continue
            stripped = _strip_stray_primes(u, v, qv, primes)
            if stripped is None:
                continue
            u, v = stripped
            g = math.gcd(u, v)
            if gbound % g != 0 or g0_twice % g != 0:
                continue
            if ((base.x0 + u) ** 2 + (base.y0 + v) ** 2 - a - h) % qv != 0:
                continue
            yield ShiftPair(u, v, g, h)


def construct_shift(base: BaseSolution, h: int) -> ShiftPair:
    """First locally valid shift pair in canonical order."""
    for pair in iter_shift_pairs(base, h):
        return pair
    raise SearchExhausted(f"shift search exhausted for h={h}")


def build_family(base: BaseSolution, shift: ShiftPair, k: int) -> WitnessFamily:
    """Assemble and fully verify the quadratic family for offsets (h, k).

    Solves (u/g) r0 + (v/g) s0 = (h - u^2 - v^2 - 2(u x0 + v y0)) / q exactly
    and expands the coefficients. Raises InternalInconsistency when the
    right-hand side is not an integer or any family invariant fails.
    """
    q = base.q.value
    u, v, g, h = shift.u, shift.v, shift.gcd_uv, shift.h
    if g == 0 or q % (2 * g) != 0:
        raise InternalInconsistency("2 gcd(u, v) does not divide q")
    T = q // (2 * g)
    rhs_num = h - u * u - v * v - 2 * (u * base.x0 + v * base.y0)
    if rhs_num % q != 0:
        raise InternalInconsistency("linear equation right-hand side is not integral")
    R = rhs_num // q
    ub, vb = u // g, v // g
    d, sx, sy = ext_gcd(ub, vb)
    if d != 1:
        raise InternalInconsistency("u/g and v/g are not coprime")
    r0, s0 = sx * R, sy * R
    X0 = base.x0 + T * r0
    Y0 = base.y0 + T * s0
    A = T * T * (ub * ub + vb * vb)
    B = 2 * T * (X0 * vb - Y0 * ub)
    C = X0 * X0 + Y0 * Y0
    family = WitnessFamily(
        q=base.q, a=base.a.value, h=h, k=k,
        x0=base.x0, y0=base.y0, u=u, v=v,
        T=T, r0=r0, s0=s0, A=A, B=B, C=C,
    )
    family.verify()
    return family


def build_witness_family(
    q: FactoredInteger,
    a: int,
    h: int,
    k: int,
    base_cap: int = BASE_CAP,
) -> WitnessFamily:
    """End-to-end construction: hypotheses, base, shift, verified family.

    Candidate (base, shift) pairs are tried in canonical order until one
    assembles into a family passing full verification. The verification
    step is what rules out shift pairs whose linear-equation solutions land
    in the wrong parity class at 2.
    """
    verdict = check_hypotheses(q, a, h, k)
    if not verdict.ok:
        raise HypothesisViolation(f"{verdict.failed_clause}: {verdict.detail}")
    for base in itertools.islice(iter_base_solutions(a, q), base_cap):
        for shift in iter_shift_pairs(base, h):
            try:
                return build_family(base, shift, k)
            except InternalInconsistency:
                continue
    raise SearchExhausted(f"no verified family for (q, a, h, k) = ({q.value}, {a}, {h}, {k})")


def check_local_obstructions(family: WitnessFamily) -> ObstructionReport:
    """Confirm F(t) has no local obstruction to representing sums of two squares.

    At each prime power p^e || q with p = 3 mod 4 the values sit in the class
    k + a, which must be admissible. At powers of 2 the only obstruction shape
    is F(t) constantly 3 * 2^(alpha-2) mod 2^alpha; powers up to 2^(v2+2) are
    checked exhaustively. Also reports whether disc(F) = -eta^2, in which
    case every single value is a sum of two squares.
    """
    report = ObstructionReport()
    q = family.q
    for p in q.primes():
        if p % 4 != 3:
            continue
        e = q.factors[p]
        ok = is_admissible_value((family.a + family.k) % p**e, FactoredInteger.from_factors({p: e}))
        report.odd_prime.append((p, e, ok))
        if not ok:
            report.clear = False
    nu2 = q.exponent(2)
    for alpha in range(2, nu2 + 3):
        mod = 1 << alpha
        shape = 3 << (alpha - 2)
        obstructed = all(family.F(t) % mod == shape for t in range(mod))
        report.two_adic.append((alpha, obstructed))
        if obstructed:
            report.clear = False
    for p in (3, 7, 11, 19, 23, 31, 43, 47):
        if q.value % p == 0:
            continue
        nonzero = any(c % p != 0 for c in (family.A, family.B, family.C + family.k))
        report.nonzero_mod_small.append((p, nonzero))
        if not nonzero:
            report.clear = False
    d = family.disc()
    root = math.isqrt(-d) if d <= 0 else 0
    report.disc_is_neg_square = d <= 0 and root * root == -d
    if not report.clear:
        raise ObstructionFound(f"local obstruction for family {family}")
    return report


def scan_family(
    family: WitnessFamily,
    t_max: int,
    budget: FactorBudget = DEFAULT_BUDGET,
    stop_after: int | None = None,
) -> ScanResult:
    """Scan t = 0..t_max and certify every t with F(t) a sum of two squares.

    Values whose factorization exceeds the budget are skipped and recorded,
    never errors. With stop_after set, the scan ends early once that many
    certificates have been collected.
    """
    certs: list[TripleCertificate] = []
    skipped: list[int] = []
    for t in range(t_max + 1):
        value = family.F(t)
        try:
            fact = factorize(value, budget)
        except BudgetExceeded:
            skipped.append(t)
            continue
        if not is_sum_two_squares(fact):
            continue
        rep_k = represent_two_squares(fact)
        assert rep_k is not None
        certs.append(
            TripleCertificate(
                n=family.n_value(t),
                q=family.q.value,
                a=family.a,
                h=family.h,
                k=family.k,
                t=t,
                reps=(family.rep_n(t), family.rep_n_plus_h(t), rep_k),
            )
        )
        if stop_after is not None and len(certs) >= stop_after:
            break
    return ScanResult(certs, skipped, t_max)
