"""Exact integer and modular arithmetic: factorization, valuations, CRT,
modular square roots, and explicit two-square representations.

Everything here is deterministic: factoring retries, nonresidue scans and
tie-breaking all follow fixed orders, so identical inputs give identical
outputs across runs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, DegenerateInput, NonCoprimeModuli

# Bases giving a deterministic Miller-Rabin test for n < 3.3 * 10^24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIME_CACHE: dict[int, list[int]] = {}


@dataclass
class FactorBudget:
    """Effort limits for `factorize`.

    trial_bound: largest prime attempted by trial division.
    rho_rounds: number of Pollard-Brent parameter retries per composite.
    rho_iterations: iteration cap per rho round.
    """

    trial_bound: int = 1_000_000
    rho_rounds: int = 24
    rho_iterations: int = 1 << 18


DEFAULT_BUDGET = FactorBudget()


@dataclass(frozen=True)
class ResidueClass:
    """An element of Z/mZ with its canonical representative in [0, m)."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        if not 0 <= self.value < self.modulus:
            object.__setattr__(self, "value", self.value % self.modulus)

    def reduce(self, d: int) -> "ResidueClass":
        """Reduction mod d, well defined whenever d divides the modulus."""
        if d < 1 or self.modulus % d != 0:
            raise ValueError(f"{d} does not divide modulus {self.modulus}")
        return ResidueClass(self.value % d, d)

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return f"{self.value} mod {self.modulus}"


@dataclass
class FactoredInteger:
    """A nonnegative integer carried together with its full factorization.

    `factors` maps each prime to its positive exponent; the empty map
    represents 1, and 0 is represented by value 0 with an empty map.
    """

    value: int
    factors: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("FactoredInteger is nonnegative")
        if self.value == 0:
            if self.factors:
                raise ValueError("zero carries an empty factor map")
            return
        prod = 1
        for p, e in self.factors.items():
            if e < 1:
                raise ValueError(f"exponent of {p} must be >= 1")
            if not is_prime(p):
                raise ValueError(f"factor {p} is not prime")
            prod *= p**e
        if prod != self.value:
            raise ValueError(f"factors multiply to {prod}, not {self.value}")

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    def exponent(self, p: int) -> int:
        return self.factors.get(p, 0)

    def primes(self) -> list[int]:
        return sorted(self.factors)

    @classmethod
    def from_value(cls, n: int, budget: FactorBudget = DEFAULT_BUDGET) -> "FactoredInteger":
        return factorize(n, budget)

    @classmethod
    def from_factors(cls, factors: dict[int, int]) -> "FactoredInteger":
        value = 1
        for p, e in factors.items():
            value *= p**e
        return cls(value, dict(sorted(factors.items())))

    def __mul__(self, other: "FactoredInteger") -> "FactoredInteger":
        if self.is_zero or other.is_zero:
            return FactoredInteger(0)
        merged = dict(self.factors)
        for p, e in other.factors.items():
            merged[p] = merged.get(p, 0) + e
        return FactoredInteger.from_factors(merged)

    def __int__(self) -> int:
        return self.value


def small_primes(bound: int) -> list[int]:
    """All primes <= bound, cached per bound bucket."""
    bucket = 1 << max(bound.bit_length(), 4)
    if bucket not in _SMALL_PRIME_CACHE:
        sieve = np.ones(bucket + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, math.isqrt(bucket) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        _SMALL_PRIME_CACHE[bucket] = [int(p) for p in np.flatnonzero(sieve)]
    primes = _SMALL_PRIME_CACHE[bucket]
    if primes and primes[-1] <= bound:
        return primes
    lo, hi = 0, len(primes)
    while lo < hi:
        mid = (lo + hi) // 2
        if primes[mid] <= bound:
            lo = mid + 1
        else:
            hi = mid
    return primes[:lo]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact below 3.3e24, extremely reliable above)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _rho_brent(n: int, c: int, max_iters: int) -> int | None:
    """One Pollard-Brent round with increment c; returns a nontrivial factor or None."""
    if n % 2 == 0:
        return 2
    y, m, g, r, q = 2, 128, 1, 1, 1
    x = ys = y
    iters = 0
    while g == 1 and iters < max_iters:
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
        iters += r
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    if 1 < g < n:
        return g
    return None


def factorize(n: int, budget: FactorBudget = DEFAULT_BUDGET) -> FactoredInteger:
    """Complete factorization of n >= 0.

    Trial division up to budget.trial_bound, then deterministic Miller-Rabin
    plus Pollard-Brent rho with a fixed retry schedule. Raises BudgetExceeded
    when a cofactor survives every rho round.
    """
    if n < 0:
        raise ValueError("factorize expects n >= 0")
    if n == 0:
        return FactoredInteger(0)
    factors: dict[int, int] = {}
    m = n
    bound = min(budget.trial_bound, math.isqrt(m))
    for p in small_primes(max(bound, 2)):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors[p] = e
    if m > 1:
        _factor_hard(m, factors, budget)
    return FactoredInteger(n, dict(sorted(factors.items())))


def _factor_hard(m: int, factors: dict[int, int], budget: FactorBudget) -> None:
    """Factor a trial-division survivor into `factors` (recursive rho splitting)."""
    stack = [m]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        root = math.isqrt(m)
        if root * root == m and is_prime(root):
            factors[root] = factors.get(root, 0) + 2
            continue
        if m < budget.trial_bound * budget.trial_bound or is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        d = None
        for c in range(1, budget.rho_rounds + 1):
            d = _rho_brent(m, c, budget.rho_iterations)
            if d is not None:
                break
        if d is None:
            raise BudgetExceeded(f"could not split composite {m}")
        stack.append(d)
        stack.append(m // d)


def valuation(n: int, p: int) -> int:
    """Largest k with p^k dividing n (n >= 1)."""
    if n < 1:
        raise ValueError("valuation expects n >= 1")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: returns (g, x, y) with a*x + b*y = g = gcd(a, b) > 0."""
    if a == 0 and b == 0:
        raise DegenerateInput("ext_gcd(0, 0) is undefined")
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def crt_combine(congruences: list[ResidueClass]) -> ResidueClass:
    """Combine congruences with pairwise coprime moduli into one class.

    Raises NonCoprimeModuli naming an offending pair.
    """
    x, m = 0, 1
    seen: list[int] = []
    for cls in congruences:
        g = math.gcd(m, cls.modulus)
        if g != 1:
            for prev in seen:
                if math.gcd(prev, cls.modulus) != 1:
                    raise NonCoprimeModuli(prev, cls.modulus)
            raise NonCoprimeModuli(m, cls.modulus)
        _, inv_m, _ = ext_gcd(m % cls.modulus if cls.modulus > 1 else 0, cls.modulus)
        if cls.modulus > 1:
            t = (cls.value - x) * inv_m % cls.modulus
        else:
            t = 0
        x = x + m * t
        m *= cls.modulus
        seen.append(cls.modulus)
    return ResidueClass(x % m, m)


def is_sum_two_squares(n: FactoredInteger) -> bool:
    """Membership in E = {x^2 + y^2}: every prime = 3 mod 4 to an even power.

    0 counts as a member (0 = 0^2 + 0^2).
    """
    if n.is_zero:
        return True
    for p, e in n.factors.items():
        if p % 4 == 3 and e % 2 == 1:
            return False
    return True


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """One square root of a mod an odd prime p (Tonelli-Shanks), or None."""
    a %= p
    if a == 0:
        return 0
    if _legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while _legendre(z, p) != -1:
        z += 1
    c = pow(z, q, p)
    r = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        i, x = 0, t
        while x != 1:
            x = x * x % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        r = r * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return r


def _sqrt_unit_odd(a: int, p: int, e: int) -> list[int]:
    """Roots of x^2 = a mod p^e for odd p and a a unit; [] when a is a nonresidue."""
    r = sqrt_mod_prime(a, p)
    if r is None:
        return []
    pk, mod = p, p**e
    while pk < mod:
        # Hensel step doubles the precision: r <- r - (r^2 - a) / (2r).
        pk_next = min(pk * pk, mod)
        inv = pow(2 * r % pk_next, -1, pk_next)
        r = (r - (r * r - a) * inv) % pk_next
        pk = pk_next
    return sorted({r, mod - r}) if r != 0 else [0]


def _sqrt_unit_two(a: int, e: int) -> list[int]:
    """Roots of x^2 = a mod 2^e for odd a."""
    mod = 1 << e
    a %= mod
    if e == 1:
        return [1]
    if e == 2:
        return [1, 3] if a % 4 == 1 else []
    if a % 8 != 1:
        return []
    x = 1
    for k in range(3, e):
        if (x * x - a) % (1 << (k + 1)) != 0:
            x += 1 << (k - 1)
    return sorted({x % mod, (mod - x) % mod, (x + mod // 2) % mod, (mod - x + mod // 2) % mod})


def sqrt_mod_prime_power(a: int, p: int, e: int) -> list[int]:
    """Complete list of x in [0, p^e) with x^2 = a mod p^e (possibly empty).

    Handles zero and non-unit a by splitting off the even part of its
    valuation; the returned list is sorted. The list has size O(p^(v/2))
    when p^v exactly divides a, so callers keep moduli modest.
    """
    if e < 1:
        raise ValueError("exponent must be >= 1")
    mod = p**e
    a %= mod
    if a == 0:
        step = p ** ((e + 1) // 2)
        return list(range(0, mod, step))
    v = valuation(a, p)
    if v % 2 == 1:
        return []
    a1 = a // p**v
    if p == 2:
        base = _sqrt_unit_two(a1, e - v)
    else:
        base = _sqrt_unit_odd(a1, p, e - v)
    if not base:
        return []
    half = p ** (v // 2)
    sub = p ** (e - v)
    out = set()
    for x1 in base:
        for t in range(half):
            out.add(half * (x1 + t * sub) % mod)
    return sorted(out)


def _cornacchia_prime(p: int) -> tuple[int, int]:
    """(x, y) with x^2 + y^2 = p for a prime p = 1 mod 4."""
    t = sqrt_mod_prime(p - 1, p)
    assert t is not None and t * t % p == p - 1
    t = max(t, p - t)
    a, b = p, t
    limit = math.isqrt(p)
    while b > limit:
        a, b = b, a % b
    y2 = p - b * b
    y = math.isqrt(y2)
    assert y * y == y2
    return b, y


def _gauss_mul(r1: tuple[int, int], r2: tuple[int, int]) -> tuple[int, int]:
    a, b = r1
    c, d = r2
    return a * c - b * d, a * d + b * c


def represent_two_squares(
    n: FactoredInteger, combo_cap: int = 4096
) -> tuple[int, int] | None:
    """A representation (x, y) with x^2 + y^2 = n and 0 <= x <= y, or None.

    Built multiplicatively: Cornacchia at each prime = 1 mod 4, (1, 1) for 2,
    and scalar p^(e/2) for primes = 3 mod 4, composed via the Gaussian norm
    identity. Every representation of n arises from a conjugation choice at
    each prime = 1 mod 4; those combinations are enumerated (up to combo_cap)
    and the lexicographically smallest pair is returned, so e.g. 25 gives
    (0, 5) rather than (3, 4). Deterministic for fixed n.
    """
    if n.is_zero:
        return (0, 0)
    if not is_sum_two_squares(n):
        return None
    scalar = 1
    two_odd = False
    split: list[tuple[tuple[int, int], int]] = []
    for p in n.primes():
        e = n.factors[p]
        if p == 2:
            scalar <<= e // 2
            two_odd = e % 2 == 1
        elif p % 4 == 3:
            scalar *= p ** (e // 2)
        else:
            split.append((_cornacchia_prime(p), e))
    total = 1
    for _, e in split:
        total *= e + 1
    choice_space: list[range] = [range(e + 1) for _, e in split]
    if total > combo_cap:
        choice_space = [range(e, e + 1) for _, e in split]
    powers = []
    for (a, b), e in split:
        pw = [(1, 0)]
        for _ in range(e):
            pw.append(_gauss_mul(pw[-1], (a, b)))
        conj = [(x, -y) for x, y in pw]
        powers.append((pw, conj, e))
    best: tuple[int, int] | None = None
    for choice in itertools.product(*choice_space):
        rep = (1, 0)
        for (pw, conj, e), j in zip(powers, choice):
            rep = _gauss_mul(rep, _gauss_mul(pw[j], conj[e - j]))
        if two_odd:
            rep = _gauss_mul(rep, (1, 1))
        x, y = abs(rep[0]) * scalar, abs(rep[1]) * scalar
        cand = (x, y) if x <= y else (y, x)
        if best is None or cand < best:
            best = cand
    return best
