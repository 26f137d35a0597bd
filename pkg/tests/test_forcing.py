import itertools
import math

import pytest

from twosq.admissibility import admissible_classes, is_admissible_value
from twosq.arith import FactoredInteger, factorize, valuation
from twosq.errors import DomainError, HypothesisViolation, NoneFoundWithinBudget, SearchExhausted
from twosq.forcing import (
    bin_plan,
    build_blocking_system,
    construct_two_class_tuple,
    delta_constant,
    end_to_end_triple,
    gap_blocking,
)
from twosq.witness import check_hypotheses


def test_delta_examples():
    assert delta_constant(1 / 40, 1 / 40) == pytest.approx(2.9656, abs=1e-3)
    # symmetric thetas reduce the surd to (1 + theta) / theta
    c = math.sqrt(2) * (math.pi + 2) / (32 * math.pi)
    for theta in (0.01, 0.02, 1 / 40):
        assert delta_constant(theta, theta) == pytest.approx(c * (1 + theta) / theta)
    with pytest.raises(DomainError):
        delta_constant(1 / 18, 1 / 18)
    with pytest.raises(DomainError):
        delta_constant(-0.01, 0.02)


def test_bin_plan_examples():
    assert bin_plan(2, 1 / 40, 1 / 40) == [53, 16385]
    assert bin_plan(1, 1 / 40, 1 / 40) == [53]
    assert bin_plan(3, 1 / 40, 1 / 40)[2] == 2097153
    with pytest.raises(DomainError):
        bin_plan(0, 1 / 40, 1 / 40)


def test_bin_plan_minimality():
    delta = delta_constant(1 / 40, 1 / 40)
    sizes = bin_plan(4, 1 / 40, 1 / 40)
    assert sizes[0] >= 2 * delta**3 > sizes[0] - 1
    for i, size in enumerate(sizes[1:], start=2):
        assert size > 2 ** (7 * i) >= size - 1


def test_tuple_example():
    design = construct_two_class_tuple(factorize(5), 1, 2, 1, [2, 3])
    assert len(design.offsets) == 5
    assert all(h % 4 == 1 for h in design.offsets)
    assert [h % 5 for h in design.offsets[:2]] == [1, 1]
    assert [h % 5 for h in design.offsets[2:]] == [2, 2, 2]
    assert all(a < b for a, b in zip(design.offsets, design.offsets[1:]))
    # forms admissibility at p = 3, exhaustively
    assert any(
        all((5 * n + h) % 3 != 0 for h in design.offsets) for n in range(3)
    )
    witnesses = design.form_admissibility_witnesses()
    for p, n in witnesses.items():
        assert all((5 * n + h) % p != 0 for h in design.offsets)


def test_tuple_single_transition():
    design = construct_two_class_tuple(factorize(5), 1, 2, 1, [2, 3])
    pattern = [h % 5 for h in design.offsets]
    changes = sum(1 for x, y in zip(pattern, pattern[1:]) if x != y)
    assert changes == 1


def test_tuple_degenerate_transition():
    design = construct_two_class_tuple(factorize(5), 1, 2, 2, [2, 3])
    assert [h % 5 for h in design.offsets] == [1] * 5
    assert design.transition_index == 5


def test_tuple_requires_odd_q():
    with pytest.raises(HypothesisViolation):
        construct_two_class_tuple(factorize(4), 1, 2, 1, [2, 3])


def test_tuple_search_exhausted():
    with pytest.raises(SearchExhausted):
        construct_two_class_tuple(factorize(5), 1, 2, 1, [2, 3], offset_cap=10)


def test_gap_blocking_example():
    Q, a = gap_blocking(1, [4, 8])
    primes = sorted(Q.factors)
    assert all(Q.factors[p] == 2 and p % 4 == 3 for p in primes)
    for t in (5, 6, 7):
        owners = [p for p in primes if (a + t) % p == 0]
        assert len(owners) == 1
        assert valuation(a + t, owners[0]) == 1
    for h in (4, 8):
        assert all((a + h) % p != 0 for p in primes)


def test_gap_blocking_contiguous():
    Q, a = gap_blocking(1, [3, 4, 5])
    assert Q.value == 1 and a == 0


def test_gap_blocking_odd_g():
    g = 15
    Q, a = gap_blocking(g, [4, 12])
    for t in range(5, 12):
        owners = [p for p in sorted(Q.factors) if (g * a + t) % p == 0]
        assert len(owners) >= 1 and valuation(g * a + t, owners[0]) == 1
    with pytest.raises(HypothesisViolation):
        gap_blocking(2, [4, 8])


def test_blocking_system_q1_fixture():
    bs = build_blocking_system(factorize(1), 0, 0, 0)
    assert (bs.a3, bs.b3, bs.c3) == (1, 1, 1)
    assert (bs.h, bs.k) == (4, 8)
    assert bs.blocking_primes == {1: 11, 2: 19, 3: 23, 5: 31, 6: 43, 7: 47}
    assert not bs.lift_window_widened
    assert bs.T_blk.value == 4 * (11 * 19 * 23 * 31 * 43 * 47) ** 2


def test_blocking_system_invariants_spot():
    bs = build_blocking_system(factorize(5), 2, 0, 3)
    # blocked offsets carry exactly one factor of their prime
    for i, p in bs.blocking_primes.items():
        assert (bs.a_T.value + i) % p == 0
        assert (bs.a_T.value + i) % (p * p) == p
    nu2 = bs.T_blk.exponent(2)
    assert nu2 % 2 == 0
    assert check_hypotheses(bs.T_blk, bs.a_T.value, bs.h, bs.k).ok
    bs.verify()


def test_blocking_rejects_inadmissible():
    with pytest.raises(HypothesisViolation):
        build_blocking_system(factorize(4), 3, 0, 0)


def test_blocking_battery_q3_q4():
    for qv in (3, 4):
        fq = factorize(qv)
        adm = [c.value for c in admissible_classes(fq)]
        for a, b, c in itertools.product(adm, repeat=3):
            build_blocking_system(fq, a, b, c)  # verify() runs inside


def test_end_to_end_example():
    rep = end_to_end_triple(factorize(4), 1, 2, 0, x_budget=100)
    assert rep.occurrences[0].n == 2
    assert rep.occurrences[0].values == (1, 2, 4)
    assert rep.certificates and all(c.verify() for c in rep.certificates)
    assert all(c.consecutive for c in rep.certificates)


def test_end_to_end_budget_miss():
    # pattern [3, ...] is inadmissible mod 4 -> hypothesis violation, not a miss
    with pytest.raises(HypothesisViolation):
        end_to_end_triple(factorize(4), 3, 0, 0, x_budget=100)
    # admissible but absent below a tiny bound
    with pytest.raises(NoneFoundWithinBudget):
        end_to_end_triple(factorize(5), 3, 3, 3, x_budget=10)
