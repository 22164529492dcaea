"""Card guessing with partial feedback: trivial, safe and shifting players.

A deck is a word from S_{m,n} (n card types, m copies each).  Before every
card the player announces a type and afterwards learns only whether the
guess was right.  The score is the number of correct guesses.

* trivial guesses type 1 forever and scores exactly m.
* safe guesses type v until all m copies of v have been confirmed, then
  moves to v+1 (staying on n forever).  Copies of v+1 that passed earlier
  are lost, so the player can get stuck waiting.  For m = 2 the exact
  mean score is 8/3 on two-type decks and climbs with deck length to
  about 2.7366, strictly above m + 1 - 1/(m+1).
* shifting moves on after a single correct guess, tracking the greedy
  increasing chain, so its score is at least l1 of the deck, with equality
  unless it correctly guesses type n and keeps collecting the remaining
  copies.  Long-run expectation approaches the limiting mean of l1, close
  to m + 1 - 1/(m+2).

play() walks a single deck card by card and returns the full trace;
expected_score() Monte Carlos the mean over uniform decks using closed
scorers on the occurrence matrix that are step-for-step equivalent to
play() (the test suite checks the equivalence).
"""

from __future__ import annotations

import numpy as np

from dataclasses import dataclass

from .errors import DomainError
from .montecarlo import Estimate, _collect, _occ_matrix, _sample_letters
from .words import Word

STRATEGIES = ("trivial", "safe", "shifting")


@dataclass(frozen=True)
class GameTrace:
    """Everything observable in one play-through of a deck."""

    word: Word
    strategy: str
    guesses: tuple[int, ...]
    feedback: tuple[bool, ...]
    score: int


def play(word: Word, strategy: str) -> GameTrace:
    """Simulate one game and record guesses, feedback and score."""
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    m, n = word.m, word.n
    guesses: list[int] = []
    feedback: list[bool] = []
    v = 1
    confirmed = 0  # correct guesses of the current type (safe strategy)
    for card in word.letters:
        guesses.append(v)
        hit = card == v
        feedback.append(hit)
        if not hit:
            continue
        if strategy == "trivial":
            continue
        if strategy == "safe":
            confirmed += 1
            if confirmed == m and v < n:
                v += 1
                confirmed = 0
        elif v < n:  # shifting: move on after one hit, camp on n
            v += 1
    return GameTrace(
        word=word,
        strategy=strategy,
        guesses=tuple(guesses),
        feedback=tuple(feedback),
        score=sum(feedback),
    )


def _safe_score(occ: np.ndarray, m: int, n: int) -> int:
    # all copies of 1 are always caught; from then on type v only counts
    # its copies after the position where type v-1 was completed
    score = m
    pos = int(occ[0, m - 1])
    for v in range(1, n):
        row = occ[v]
        j = int(np.searchsorted(row, pos, side="right"))
        if j > 0:
            return score + (m - j)  # some copies already gone: stuck here
        score += m
        pos = int(row[m - 1])
    return score


def _shifting_score(occ: np.ndarray, m: int, n: int) -> int:
    score = 0
    pos = -1
    for v in range(n):
        row = occ[v]
        j = int(np.searchsorted(row, pos, side="right"))
        if j == m:
            break
        score += 1
        pos = int(row[j])
        if v == n - 1:
            score += m - 1 - j  # remaining copies of n, all caught
    return score


def expected_score(m: int, n: int, strategy: str, trials: int, seed: int) -> Estimate:
    """Monte Carlo mean score of a strategy over uniform decks."""
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if m < 1 or n < 1:
        raise DomainError(f"need m >= 1 and n >= 1, got m={m}, n={n}")

    if strategy == "trivial":

        def kernel(gen):
            letters = _sample_letters(gen, m, n)
            return int(np.count_nonzero(letters == 1))

    elif strategy == "safe":

        def kernel(gen):
            letters = _sample_letters(gen, m, n)
            return _safe_score(_occ_matrix(letters, m, n), m, n)

    else:

        def kernel(gen):
            letters = _sample_letters(gen, m, n)
            return _shifting_score(_occ_matrix(letters, m, n), m, n)

    return Estimate.from_values(_collect(trials, seed, kernel), seed)
