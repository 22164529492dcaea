"""Families, codes, thresholds, and the analytic bounds around them."""

import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cis import (
    DomainError,
    SpaceTooLarge,
    arithmetic_progressions,
    block_lower_bound,
    completion_lower,
    continuous_runs,
    entropy_binom_check,
    enumerate_words,
    expectation_upper,
    factorial_threshold,
    greedy_code,
    gv_size_bound,
    hamming,
    inverse_gamma,
    l_max,
    lower_cont_asymptotic,
    tail_bound,
)


def test_family_size_caps():
    runs = continuous_runs(6)
    assert runs.size_at(0) == 1
    assert runs.size_at(1) == 6
    assert runs.size_at(6) == 6
    assert runs.size_at(7) == 0
    aps = arithmetic_progressions(5)
    assert aps.size_at(0) == 1
    assert aps.size_at(3) == 25
    assert aps.size_at(6) == 0


def test_tail_bound_values():
    assert tail_bound(continuous_runs(10), 1, 6) == Fraction(10, 720)
    assert tail_bound(continuous_runs(6), 2, 4) == 1  # clipped at a probability
    assert tail_bound(arithmetic_progressions(4), 1, 4) == Fraction(16, 24)


def test_hamming():
    assert hamming((1, 2, 3), (1, 2, 3)) == 0
    assert hamming((1, 2, 3), (3, 2, 1)) == 2
    with pytest.raises(DomainError):
        hamming((1, 2), (1, 2, 3))


def test_gv_size_bound_value():
    assert gv_size_bound(2, 8, 2) == Fraction(256, 56)


def test_greedy_code_delta1_is_everything():
    code = greedy_code(3, 2, 1)
    assert code.size == 9
    assert set(code.words) == {(a, b) for a in (1, 2, 3) for b in (1, 2, 3)}


@pytest.mark.parametrize("m,n,delta", [(2, 4, 2), (2, 6, 3), (3, 4, 2), (2, 8, 2), (4, 3, 1)])
def test_greedy_code_distance_and_gv(m, n, delta):
    code = greedy_code(m, n, delta)
    assert Fraction(code.size) >= gv_size_bound(m, n, delta)
    for x, y in combinations(code.words, 2):
        assert hamming(x, y) >= delta
    # greedy maximality: every word of the space is within delta-1 of the code
    if m**n <= 300:
        from itertools import product

        for w in product(range(1, m + 1), repeat=n):
            assert any(hamming(w, c) < delta for c in code.words)


def test_greedy_code_known_small_instance():
    # distance-2 codes in [2]^4 top out at 8 words; the sieve finds all 8
    assert greedy_code(2, 4, 2).size == 8


def test_greedy_code_validation():
    with pytest.raises(DomainError):
        greedy_code(1, 4, 1)
    with pytest.raises(DomainError):
        greedy_code(2, 4, 0)
    with pytest.raises(DomainError):
        greedy_code(2, 4, 3)  # delta > n/2
    with pytest.raises(SpaceTooLarge):
        greedy_code(3, 20, 2)


def test_inverse_gamma_round_trip():
    for x in [2.0, 2.5, 3.0, 5.0, 9.5, 17.0, 25.0, 40.0]:
        assert inverse_gamma(math.gamma(x)) == pytest.approx(x, abs=1e-9)
    assert inverse_gamma(1.0) == 2.0
    assert inverse_gamma(24.0) == pytest.approx(5.0, abs=1e-10)
    g = inverse_gamma(1e5)
    assert 9 < g < 10
    assert math.lgamma(g) == pytest.approx(math.log(1e5), abs=1e-9)
    with pytest.raises(DomainError):
        inverse_gamma(0.5)
    with pytest.raises(DomainError):
        inverse_gamma(float("nan"))


def test_factorial_threshold_examples():
    ft = factorial_threshold(2, 2048, 0.1)
    assert ft.k == 2067
    assert ft.lower_ok
    assert ft.upper_asserted
    assert ft.upper_ok is True
    assert ft.c_adjusted >= 0.1

    small = factorial_threshold(3, 10, 2.0)
    assert small.k == 20
    assert small.lower_ok
    assert not small.upper_asserted
    assert small.upper_ok is None

    unit = factorial_threshold(1, 7, 0.3)
    assert unit.k == 7
    assert unit.c_adjusted == 0.3
    assert unit.lower_ok


@settings(max_examples=60, deadline=None)
@given(m=st.integers(2, 6), t=st.integers(3, 60), c=st.floats(0.01, 3.0))
def test_factorial_threshold_lower_always_holds(m, t, c):
    # after the minimal upward adjustment of C the lower inequality is exact
    ft = factorial_threshold(m, t, c)
    assert ft.k > t
    assert math.factorial(ft.k) >= math.factorial(t) * t ** (ft.k - t)
    assert ft.lower_ok


def test_expectation_upper_small_case():
    eb = expectation_upper(2, 7)
    assert eb.t == 4  # least t with t! >= 7
    assert eb.k == 8
    assert eb.value == pytest.approx(4 + 2 * math.log(2) / math.log(4) * 4 + 2)
    assert eb.in_regime
    with pytest.raises(DomainError):
        expectation_upper(2, 1)


def test_completion_lower_values():
    assert completion_lower(2, 5, 2, 2) == Fraction(1, 120)
    assert completion_lower(2, 4, 8, 2) == 0  # pair term swamps the mean term
    assert completion_lower(3, 3, 1, 1) == Fraction(1, 6)


def test_lower_cont_asymptotic():
    al = lower_cont_asymptotic(2, 10)
    expected = 10 * math.log(2 / 1.03) - math.log(20) - math.lgamma(11)
    assert al.log_value == pytest.approx(expected, rel=1e-12)
    assert al.value == pytest.approx(math.exp(expected), rel=1e-12)
    assert al.domain_ok
    assert not lower_cont_asymptotic(1, 10).domain_ok
    assert lower_cont_asymptotic(10**300, 2).value == math.inf


def test_entropy_binom_check():
    for delta in range(0, 21):
        assert entropy_binom_check(20, delta).holds
    mid = entropy_binom_check(10, 5)
    assert mid.binomial == 252
    assert mid.entropy_exponent == pytest.approx(10.0)
    with pytest.raises(DomainError):
        entropy_binom_check(10, 11)


def test_block_lower_bound_values():
    # ten values in five blocks of two, each completing with prob 5/6
    v = block_lower_bound(2, 10, 2)
    assert v == pytest.approx(1 - (1 / 6) ** 5, rel=1e-12)
    assert block_lower_bound(3, 7, 1) == 1.0
    assert block_lower_bound(2, 12, 2) >= block_lower_bound(2, 10, 2)
    with pytest.raises(DomainError):
        block_lower_bound(2, 5, 6)


def test_block_lower_bound_is_a_lower_bound():
    # exhaustive check against the exact tail Pr[maximal run >= k]
    for m, n, k in [(2, 4, 2), (2, 4, 4), (3, 2, 1), (1, 6, 2), (2, 3, 3), (2, 5, 2)]:
        words = list(enumerate_words(m, n))
        tail = sum(l_max(w) >= k for w in words) / len(words)
        assert block_lower_bound(m, n, k) <= tail + 1e-12
