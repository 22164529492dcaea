"""Card game traces, closed-form scorers, and expected-score estimates."""

from fractions import Fraction

import pytest

from cis import DomainError, GameTrace, enumerate_words, expected_score, l1, make_word, play
from cis.cardgame import _safe_score, _shifting_score
from cis.montecarlo import _occ_matrix, _sample_letters
from cis.rng import substream

_DECK = make_word([2, 1, 1, 3, 2, 3], 2, 3)


def test_trivial_trace():
    trace = play(_DECK, "trivial")
    assert trace.guesses == (1, 1, 1, 1, 1, 1)
    assert trace.feedback == (False, True, True, False, False, False)
    assert trace.score == 2


def test_safe_trace():
    trace = play(_DECK, "safe")
    assert trace.guesses == (1, 1, 1, 2, 2, 2)
    assert trace.feedback == (False, True, True, False, True, False)
    assert trace.score == 3


def test_shifting_trace():
    trace = play(_DECK, "shifting")
    assert trace.guesses == (1, 1, 2, 2, 2, 3)
    assert trace.feedback == (False, True, False, False, True, True)
    assert trace.score == 3


def test_trace_invariants():
    for trial in range(40):
        gen = substream(2024, trial)
        m, n = 1 + trial % 3, 2 + trial % 5
        letters = _sample_letters(gen, m, n).tolist()
        word = make_word(letters, m, n)
        for strategy in ("trivial", "safe", "shifting"):
            trace = play(word, strategy)
            assert isinstance(trace, GameTrace)
            assert len(trace.guesses) == m * n
            assert len(trace.feedback) == m * n
            assert trace.score == sum(trace.feedback)
            assert all(1 <= g <= n for g in trace.guesses)
            # guessed type never decreases
            assert all(a <= b for a, b in zip(trace.guesses, trace.guesses[1:]))


def test_closed_scorers_match_play():
    for trial in range(300):
        gen = substream(31337, trial)
        m, n = 1 + trial % 4, 1 + trial % 6
        letters = _sample_letters(gen, m, n)
        word = make_word(letters.tolist(), m, n)
        occ = _occ_matrix(letters, m, n)
        assert _safe_score(occ, m, n) == play(word, "safe").score
        assert _shifting_score(occ, m, n) == play(word, "shifting").score
        assert play(word, "trivial").score == m


def test_shifting_scores_at_least_l1():
    for trial in range(200):
        gen = substream(555, trial)
        m, n = 1 + trial % 3, 1 + trial % 7
        letters = _sample_letters(gen, m, n).tolist()
        word = make_word(letters, m, n)
        trace = play(word, "shifting")
        assert trace.score >= l1(word)
        if trace.guesses[-1] < n or not trace.feedback[-1]:
            # chain never camped on the top type with cards to spare
            assert trace.score >= l1(word)


def test_trivial_expected_score_is_exactly_m():
    est = expected_score(3, 5, "trivial", trials=500, seed=1)
    assert est.mean == 3.0
    assert est.std_error == 0.0


def test_safe_expected_score_small_deck():
    # exact average over all of S_{2,4}
    scores = [play(w, "safe").score for w in enumerate_words(2, 4)]
    exact = Fraction(sum(scores), len(scores))
    assert exact == Fraction(862, 315)
    est = expected_score(2, 4, "safe", trials=40000, seed=8080)
    assert abs(est.mean - float(exact)) < 5 * est.std_error


def test_shifting_expected_score_long_deck():
    # for long decks the shifting mean sits near the limiting l1 mean
    est = expected_score(2, 100, "shifting", trials=20000, seed=9090)
    assert abs(est.mean - 2.75) < 4 * est.std_error + 0.02


def test_validation():
    with pytest.raises(DomainError):
        play(_DECK, "greedy")
    with pytest.raises(DomainError):
        expected_score(2, 2, "greedy", trials=10, seed=0)
    with pytest.raises(DomainError):
        expected_score(0, 2, "trivial", trials=10, seed=0)
