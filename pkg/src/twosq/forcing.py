"""CRT blocking constructions that force consecutiveness, plus the
two-class tuple scaffolding (bin plans and greedy offset selection).

A blocking system for a target pattern [a, b, c] mod q lifts the classes to
a modulus 4q^2, fixes offsets h < k realizing the pattern, and attaches one
prime p_i = 3 mod 4 to every intermediate offset i so that a_T + i is
divisible by p_i exactly once modulo p_i^2. Any n = a_T mod T_blk with
n, n+h, n+k all sums of two squares then gives three *consecutive* sums of
two squares in the pattern. Witnesses inside the progression are
astronomically large, so the desk-scale companion locates actual triples by
census scan instead; the blocking system itself is verified structurally
with exact arithmetic (its factorization is known by construction, nothing
is ever factored).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .admissibility import admissibility_reason, is_admissible_value, lift_admissible
from .arith import FactoredInteger, ResidueClass, crt_combine, factorize, is_prime, represent_two_squares
from .census import Occurrence, PatternSpec, match_pattern
from .errors import (
    DomainError,
    HypothesisViolation,
    InternalInconsistency,
    NoAdmissibleLift,
    NoneFoundWithinBudget,
    SearchExhausted,
)
from .sieve import DEFAULT_SEGMENT_LEN
from .witness import TripleCertificate, check_hypotheses

DELTA_COEFF_NUM = math.sqrt(2.0) * (math.pi + 2.0)
DELTA_COEFF_DEN = 32.0 * math.pi


def delta_constant(theta1: float, theta2: float) -> float:
    """The bin-size constant sqrt(2)(pi+2)/(32 pi) * (1+theta1)/sqrt(theta1 theta2).

    Domain: theta1, theta2 > 0 with theta1 + theta2 < 1/18 (strict).
    """
    if not (theta1 > 0 and theta2 > 0 and theta1 + theta2 < 1.0 / 18.0):
        raise DomainError(f"need 0 < theta1 + theta2 < 1/18, got {theta1}, {theta2}")
    return DELTA_COEFF_NUM / DELTA_COEFF_DEN * (1.0 + theta1) / math.sqrt(theta1 * theta2)


def bin_plan(M: int, theta1: float, theta2: float) -> list[int]:
    """Minimal bin sizes: first at least 2*Delta^3, then strictly above 2^(7i)."""
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    delta = delta_constant(theta1, theta2)
    sizes = [math.ceil(2.0 * delta**3)]
    for i in range(2, M + 1):
        sizes.append(2 ** (7 * i) + 1)
    return sizes


@dataclass
class TupleDesign:
    """Offsets h_1 < ... < h_k realizing a constant-then-constant class pattern."""

    q: int
    a: int
    b: int
    j: int
    bins: list[int]
    offsets: list[int]
    theta1: float | None = None
    theta2: float | None = None

    @property
    def M(self) -> int:
        return len(self.bins)

    @property
    def transition_index(self) -> int:
        """Offsets up to (not including) this index are in class a, the rest in b."""
        return sum(self.bins[: self.j])

    def target_class(self, index: int) -> int:
        return self.a if index < self.transition_index else self.b

    def form_admissibility_witnesses(self, prime_bound: int | None = None) -> dict[int, int]:
        """For each prime p up to the tuple length, an n mod p avoiding every
        root of prod (q n + h_i); raises when some prime has no such n."""
        k = len(self.offsets)
        witnesses: dict[int, int] = {}
        for p in _primes_upto(prime_bound if prime_bound is not None else k):
            forbidden = set()
            if self.q % p == 0:
                if any(h % p == 0 for h in self.offsets):
                    raise InternalInconsistency(f"forms vanish identically mod {p}")
            else:
                qinv = pow(self.q, -1, p)
                forbidden = {(-h * qinv) % p for h in self.offsets}
            for n in range(p):
                if n not in forbidden:
                    witnesses[p] = n
                    break
            else:
                raise InternalInconsistency(f"no admissible residue mod {p}")
        return witnesses


def _primes_upto(bound: int) -> list[int]:
    return [p for p in range(2, bound + 1) if is_prime(p)]


def construct_two_class_tuple(
    q: FactoredInteger,
    a: int,
    b: int,
    j: int,
    sizes: list[int],
    offset_cap: int = 10_000_000,
) -> TupleDesign:
    """Greedy ascending offsets: h_i = 1 mod 4, h_i in class a for the first j
    bins and class b afterwards, keeping the forms {q n + h_i} admissible.

    Admissibility is tracked per prime p <= k as a growing set of forbidden
    residues; a candidate is accepted only if every prime still has a free
    residue afterwards. q must be odd.
    """
    qv = q.value
    if qv % 2 == 0:
        raise HypothesisViolation("tuple construction needs odd q")
    if not 1 <= j <= len(sizes):
        raise DomainError(f"transition bin j={j} outside 1..{len(sizes)}")
    for cls, label in ((a, "a"), (b, "b")):
        if not is_admissible_value(cls % qv, q):
            raise HypothesisViolation(f"class {label} = {cls} is not admissible mod {qv}")
    k = sum(sizes)
    primes = _primes_upto(k)
    roots: dict[int, set[int]] = {p: set() for p in primes}
    qinv = {p: pow(qv, -1, p) for p in primes if qv % p != 0}
    transition = sum(sizes[:j])
    offsets: list[int] = []
    h = 0
    for index in range(k):
        cls = a if index < transition else b
        # Candidates run in the progression determined by h = 1 mod 4 and
        # h = cls mod q (q odd, so the two conditions combine mod 4q).
        start = crt_combine([ResidueClass(1, 4), ResidueClass(cls % qv, qv)]).value
        if start == 0:
            start = 4 * qv
        cand = start
        while cand <= h:
            cand += 4 * qv
        while True:
            if cand > offset_cap:
                raise SearchExhausted(f"offset cap {offset_cap} hit at index {index}")
            ok = True
            for p in primes:
                if qv % p == 0:
                    if cand % p == 0:
                        ok = False
                        break
                else:
                    root = (-cand * qinv[p]) % p
                    if root not in roots[p] and len(roots[p]) + 1 >= p:
                        ok = False
                        break
            if ok:
                break
            cand += 4 * qv
        for p in primes:
            if qv % p != 0:
                roots[p].add((-cand * qinv[p]) % p)
        offsets.append(cand)
        h = cand
    design = TupleDesign(q=qv, a=a % qv, b=b % qv, j=j, bins=list(sizes), offsets=offsets)
    design.form_admissibility_witnesses()
    return design


def _iter_primes_3mod4():
    n = 3
    while True:
        if is_prime(n):
            yield n
        n += 4


def _primes_3mod4_above(bound: int, avoid_divisors_of: int):
    """Ascending primes p = 3 mod 4 with p > bound not dividing the given integer."""
    n = bound + 1
    n += (3 - n) % 4
    while True:
        if is_prime(n) and avoid_divisors_of % n != 0:
            yield n
        n += 4


def gap_blocking(g: int, offsets: list[int]) -> tuple[FactoredInteger, int]:
    """Block every integer strictly between the first and last offset.

    For each t in that open interval not itself an offset, a distinct prime
    q_t = 3 mod 4 is chosen with t not congruent to any offset mod q_t, and
    a is built by CRT so that g*a + t = q_t mod q_t^2: then g*a + t is
    divisible by q_t exactly once, hence not a sum of two squares, while no
    g*a + h_j is divisible by any q_t. Returns (Q = prod q_t^2, a).
    """
    if g < 1 or g % 2 == 0:
        raise HypothesisViolation(f"g must be odd and positive, got {g}")
    if any(y <= x for x, y in zip(offsets, offsets[1:])) or not offsets:
        raise ValueError("offsets must be strictly increasing and nonempty")
    gaps = [t for t in range(offsets[0] + 1, offsets[-1]) if t not in set(offsets)]
    if not gaps:
        return FactoredInteger(1), 0
    assignments: dict[int, int] = {}
    used: set[int] = set()
    for t in gaps:
        for p in _iter_primes_3mod4():
            if p in used or g % p == 0:
                continue
            if any((t - h) % p == 0 for h in offsets):
                continue
            assignments[t] = p
            used.add(p)
            break
    congruences = []
    for t, p in assignments.items():
        p2 = p * p
        ginv = pow(g, -1, p2)
        congruences.append(ResidueClass((p - t) * ginv % p2, p2))
    a = crt_combine(congruences).value
    Q = FactoredInteger.from_factors({p: 2 for p in assignments.values()})
    for t, p in assignments.items():
        if (g * a + t - p) % (p * p) != 0:
            raise InternalInconsistency(f"blocking congruence failed at t={t}")
        for h in offsets:
            if (g * a + h) % p == 0:
                raise InternalInconsistency(f"offset {h} blocked by q_{t}={p}")
    return Q, a


@dataclass
class BlockingSystem:
    """The full data of a verified consecutiveness-forcing construction."""

    q: FactoredInteger
    a: int
    b: int
    c: int
    a3: int
    b3: int
    c3: int
    h: int
    k: int
    blocking_primes: dict[int, int]
    T_blk: FactoredInteger
    a_T: ResidueClass
    lift_window_widened: bool = False

    def verify(self) -> None:
        """Recheck every invariant with exact arithmetic; raises on failure.

        Admissibility checks run against the retained factorization of T_blk
        with per-prime residues precomputed once, so no big factorizations
        happen here.
        """
        q2_4 = 4 * self.q.value**2
        if (self.a3 + self.h - self.b3) % q2_4 != 0 or (self.a3 + self.k - self.c3) % q2_4 != 0:
            raise InternalInconsistency("offset congruences fail")
        if not 0 < self.h < self.k:
            raise InternalInconsistency("need 0 < h < k")
        primes = list(self.blocking_primes.values())
        if len(set(primes)) != len(primes):
            raise InternalInconsistency("blocking primes are not distinct")
        for i, p in self.blocking_primes.items():
            if p % 4 != 3 or p <= self.k or self.q.value % p == 0:
                raise InternalInconsistency(f"prime p_{i} = {p} violates side conditions")
            if (self.a_T.value - (p - i)) % (p * p) != 0:
                raise InternalInconsistency(f"a_T wrong mod p_{i}^2")
        if (self.a_T.value - self.a3) % q2_4 != 0:
            raise InternalInconsistency("a_T wrong mod 4q^2")
        if sorted(self.blocking_primes) != [i for i in range(1, self.k) if i != self.h]:
            raise InternalInconsistency("blocking index set is not 1..k-1 minus h")
        # Residues of a_T at every prime power of T_blk, computed once.
        residues = {p: self.a_T.value % p**e for p, e in self.T_blk.factors.items()}
        for i in range(0, self.k + 1):
            value_admissible = self._shifted_admissible(residues, i)
            if i in (0, self.h, self.k):
                if not value_admissible:
                    raise InternalInconsistency(f"a_T + {i} should be admissible")
            elif value_admissible:
                raise InternalInconsistency(f"a_T + {i} should not be admissible")
        verdict = check_hypotheses(self.T_blk, self.a_T.value, self.h, self.k)
        if not verdict.ok:
            raise InternalInconsistency(
                f"constructed system violates {verdict.failed_clause}: {verdict.detail}"
            )

    def _shifted_admissible(self, residues: dict[int, int], i: int) -> bool:
        for p, e in self.T_blk.factors.items():
            pe = p**e
            if admissibility_reason((residues[p] + i) % pe, {p: e}) is not None:
                return False
        return True

    def to_json_dict(self) -> dict:
        return {
            "q": str(self.q.value),
            "pattern": [str(self.a), str(self.b), str(self.c)],
            "lifts": [str(self.a3), str(self.b3), str(self.c3)],
            "h": str(self.h),
            "k": str(self.k),
            "blocking_primes": {str(i): str(p) for i, p in sorted(self.blocking_primes.items())},
            "T_blk": str(self.T_blk.value),
            "T_blk_factors": {str(p): str(e) for p, e in sorted(self.T_blk.factors.items())},
            "a_T": str(self.a_T.value),
            "lift_window_widened": self.lift_window_widened,
        }


def build_blocking_system(q: FactoredInteger, a: int, b: int, c: int) -> BlockingSystem:
    """Construct and verify the blocking system for the pattern [a, b, c] mod q.

    Lifts each class to the window (0, q^2] admissibly mod 4q^2 (also keeping
    it away from 0 mod 2^(v2-1), which the downstream hypotheses need); falls
    back to the window (0, 4q^2] and records that. Offsets h < k are the
    least positive solutions, with 4q^2 added to restore order or break a
    tie. Blocking primes are the smallest valid choices in ascending index
    order, so the whole construction is deterministic.
    """
    qv = q.value
    for cls, label in ((a, "a"), (b, "b"), (c, "c")):
        if not is_admissible_value(cls % qv, q):
            raise HypothesisViolation(f"class {label} = {cls} is not admissible mod {qv}")
    factors = {p: 2 * e for p, e in q.factors.items()}
    factors[2] = factors.get(2, 0) + 2
    four_q2 = FactoredInteger.from_factors(factors)
    half = 1 << (four_q2.exponent(2) - 1)

    def not_half_zero(m: int) -> bool:
        return m % half != 0

    widened = False

    def window_lift(cls: int) -> int:
        nonlocal widened
        base_cls = ResidueClass(cls % qv, qv)
        try:
            lifted = lift_admissible(base_cls, four_q2, window=(0, qv * qv), require=not_half_zero)
        except NoAdmissibleLift:
            widened = True
            lifted = lift_admissible(
                base_cls, four_q2, window=(0, 4 * qv * qv), require=not_half_zero
            )
        return lifted.value if lifted.value != 0 else four_q2.value

    a3 = window_lift(a)
    b3 = window_lift(b)
    c3 = window_lift(c)
    mod4q2 = four_q2.value
    h = (b3 - a3) % mod4q2 or mod4q2
    k = (c3 - a3) % mod4q2 or mod4q2
    if h == k:
        k += mod4q2
    elif h > k:
        k += mod4q2
    # Greedy smallest-unused choice in ascending i consumes one ascending
    # stream of valid primes, so a single pass suffices.
    stream = _primes_3mod4_above(k, qv)
    blocking = {i: next(stream) for i in range(1, k) if i != h}
    congruences = [ResidueClass(a3 % mod4q2, mod4q2)]
    congruences += [ResidueClass((p - i) % (p * p), p * p) for i, p in blocking.items()]
    a_T = crt_combine(congruences)
    T_blk = FactoredInteger.from_factors(
        dict(four_q2.factors) | {p: 2 for p in blocking.values()}
    )
    if a_T.modulus != T_blk.value:
        raise InternalInconsistency("CRT modulus mismatch with T_blk")
    system = BlockingSystem(
        q=q, a=a % qv, b=b % qv, c=c % qv,
        a3=a3, b3=b3, c3=c3, h=h, k=k,
        blocking_primes=blocking, T_blk=T_blk,
        a_T=ResidueClass(a_T.value, T_blk.value),
        lift_window_widened=widened,
    )
    system.verify()
    return system


@dataclass
class TripleSearchReport:
    """Blocking system plus desk-scale census evidence for one pattern."""

    q: int
    pattern: tuple[int, int, int]
    x_budget: int
    blocking: BlockingSystem
    count: int
    occurrences: tuple[Occurrence, ...]
    certificates: list[TripleCertificate] = field(default_factory=list)


def _consecutive_certificate(q: int, a: int, values: tuple[int, ...]) -> TripleCertificate:
    """Certificate for three consecutive members, with exclusion evidence."""
    v1, v2, v3 = values
    reps = []
    for m in values:
        rep = represent_two_squares(factorize(m))
        if rep is None:
            raise InternalInconsistency(f"census member {m} is not a sum of two squares")
        reps.append(rep)
    evidence = []
    for m in range(v1 + 1, v3):
        if m == v2:
            continue
        fact = factorize(m)
        witness = None
        for p, e in fact.factors.items():
            if p % 4 == 3 and e % 2 == 1:
                witness = (m, p)
                break
        if witness is None:
            raise InternalInconsistency(f"{m} between census members is a sum of two squares")
        evidence.append(witness)
    return TripleCertificate(
        n=v1, q=q, a=a % q, h=v2 - v1, k=v3 - v1, t=None,
        reps=(reps[0], reps[1], reps[2]),
        consecutive=True, evidence=tuple(evidence),
    )


def end_to_end_triple(
    q: FactoredInteger,
    a: int,
    b: int,
    c: int,
    x_budget: int = 10_000_000,
    max_certificates: int = 3,
    segment_len: int = DEFAULT_SEGMENT_LEN,
    cache_dir: str | None = None,
) -> TripleSearchReport:
    """Build the blocking system, then find actual consecutive triples by
    census scan up to x_budget and certify the first few.

    Raises NoneFoundWithinBudget when the census finds no occurrence (a
    budget statement, not a refutation).
    """
    blocking = build_blocking_system(q, a, b, c)
    spec = PatternSpec(q, (a % q.value, b % q.value, c % q.value))
    result = match_pattern(spec, x_budget, segment_len=segment_len, cache_dir=cache_dir)
    if result.count == 0:
        raise NoneFoundWithinBudget(
            f"pattern {spec.classes} mod {q.value} not seen below {x_budget}"
        )
    certs = [
        _consecutive_certificate(q.value, a, occ.values)
        for occ in result.occurrences[:max_certificates]
    ]
    for cert in certs:
        if not cert.verify():
            raise InternalInconsistency("certificate failed self-verification")
    return TripleSearchReport(
        q=q.value,
        pattern=(a % q.value, b % q.value, c % q.value),
        x_budget=x_budget,
        blocking=blocking,
        count=result.count,
        occurrences=result.occurrences,
        certificates=certs,
    )
