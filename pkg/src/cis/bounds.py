"""Inequalities for run statistics: packing codes, tail and expectation caps.

Everything here is a certified bound rather than an exact value.  The upper
bounds come from first-moment counting over prefix-closed word families
(tail_bound, expectation_upper, factorial_threshold); the lower bounds come
from packing arguments (greedy_code feeding completion_lower) and from
splitting a word into independent blocks (block_lower_bound).  inverse_gamma
locates the main term of E[L_{m,n}]: the largest k with k! near n.

Bounds marked asymptotic hold for n large in terms of m with unspecified
onset; those report a flag instead of raising when outside the proven
regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Optional

from .errors import DomainError, SpaceTooLarge
from .exact import complete_prob

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class WordFamily:
    """Prefix-closed family of strictly increasing patterns inside [1..n].

    size_at(k) returns the certified uniform cap on the number of length-k
    members (the N of the counting bound), not the sharp count: n for
    consecutive runs a, a+1, ..., a+k-1 and n^2 for arithmetic
    progressions.  Prefixes of runs are runs and prefixes of progressions
    are progressions, so both built-ins are prefix closed by construction.
    """

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("continuous", "arithmetic"):
            raise DomainError(f"unknown family kind {self.kind!r}")
        if self.n < 1:
            raise DomainError(f"need n >= 1, got n={self.n}")

    def size_at(self, k: int) -> int:
        if k < 0:
            raise DomainError(f"need k >= 0, got k={k}")
        if k == 0:
            return 1
        if k > self.n:
            return 0  # no increasing pattern of length k fits in [1..n]
        return self.n if self.kind == "continuous" else self.n * self.n


def continuous_runs(n: int) -> WordFamily:
    """Family of consecutive runs; its run statistic is l_max."""
    return WordFamily("continuous", n)


def arithmetic_progressions(n: int) -> WordFamily:
    """Family of increasing arithmetic progressions inside [1..n]."""
    return WordFamily("arithmetic", n)


def hamming(x: tuple[int, ...], y: tuple[int, ...]) -> int:
    """Number of coordinates where two equal-length tuples differ."""
    if len(x) != len(y):
        raise DomainError(f"length mismatch: {len(x)} vs {len(y)}")
    return sum(a != b for a, b in zip(x, y))


@dataclass(frozen=True)
class CodeBook:
    """Words in [1..m]^n, pairwise Hamming distance >= min_distance."""

    m: int
    n: int
    min_distance: int
    words: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.words)


def gv_size_bound(m: int, n: int, delta: int) -> Fraction:
    """Packing guarantee m^n / (delta * C(n,delta) * (m-1)^delta)."""
    return Fraction(m**n, delta * math.comb(n, delta) * (m - 1) ** delta)


def greedy_code(m: int, n: int, delta: int, cap: int = 10**6) -> CodeBook:
    """Maximal packing with minimum distance delta, in lexicographic order.

    Admits a word iff it is at distance >= delta from everything admitted
    before it.  Implemented as a sieve: each admission kills every word in
    its radius-(delta - 1) ball, and every survivor of the left-to-right
    sweep is admitted; the two formulations pick the same code.  The size
    always meets gv_size_bound when delta <= n/2.
    """
    if m < 2:
        raise DomainError(f"need m >= 2, got m={m}")
    if not 1 <= delta or 2 * delta > n:
        raise DomainError(f"need 1 <= delta <= n/2, got delta={delta}, n={n}")
    space = m**n
    if space > cap:
        raise SpaceTooLarge(f"m^n = {space} exceeds cap {cap}")

    if delta == 1:
        # distinct words always differ somewhere; the whole space packs
        return CodeBook(m, n, 1, tuple(product(range(1, m + 1), repeat=n)))

    place = [m ** (n - 1 - j) for j in range(n)]
    dead = bytearray(space)
    admitted: list[tuple[int, ...]] = []
    for idx in range(space):
        if dead[idx]:
            continue
        digits = []
        rem = idx
        for p in place:
            d, rem = divmod(rem, p)
            digits.append(d)
        admitted.append(tuple(d + 1 for d in digits))
        for dist in range(1, delta):
            for pos in combinations(range(n), dist):
                moves = [
                    [(alt - digits[j]) * place[j] for alt in range(m) if alt != digits[j]]
                    for j in pos
                ]
                for offsets in product(*moves):
                    dead[idx + sum(offsets)] = 1
    return CodeBook(m, n, delta, tuple(admitted))


def inverse_gamma(y: float) -> float:
    """Inverse of the gamma function on its increasing branch [2, inf).

    The branch with Gamma(t+1) = t!; gamma dips below 1 between 1 and 2,
    so values y >= 1 determine a unique x >= 2.  Bisection on log-gamma,
    relative error well under 1e-10.
    """
    y = float(y)
    if math.isnan(y) or y < 1.0:
        raise DomainError(f"need y >= 1, got y={y}")
    if y == 1.0:
        return 2.0
    target = math.log(y)
    lo, hi = 2.0, 4.0
    while math.lgamma(hi) < target:
        lo, hi = hi, hi * 2.0
    while hi - lo > 1e-13 * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if math.lgamma(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class FactorialThreshold:
    """Verdict on k! >= t! m^(Ct) and its conditional converse."""

    m: int
    t: int
    c_requested: float
    c_adjusted: float
    k: int
    lower_ok: bool
    upper_asserted: bool        # whether t >= m^(10C) held, enabling the cap
    upper_ok: Optional[bool]    # None when not asserted


def factorial_threshold(m: int, t: int, c: float) -> FactorialThreshold:
    """Check the factorial growth inequalities at k = t + (C log m/log t) t.

    C is nudged minimally upward so k is an integer (the adjusted value is
    reported).  Both inequalities are decided in exact integer arithmetic:
    with the adjusted C, m^(Ct) equals t^(k-t), and the upper comparison
    k! <= t! (1.1)^k m^(Ct) is scaled by 10^k to clear the decimals.  The
    upper bound is only claimed for t >= m^(10C), which likewise reduces
    to the integer test t >= 10(k - t).
    """
    if m < 1:
        raise DomainError(f"need m >= 1, got m={m}")
    if t < 2:
        raise DomainError(f"need t >= 2, got t={t}")
    if not c > 0:
        raise DomainError(f"need C > 0, got C={c}")
    if m == 1:
        k = t
        c_adj = float(c)
    else:
        k0 = t + c * t * math.log(m) / math.log(t)
        k = max(math.ceil(k0 - 1e-9), t + 1)
        c_adj = (k - t) * math.log(t) / (t * math.log(m))
    lower_ok = math.factorial(k) >= math.factorial(t) * t ** (k - t)
    upper_asserted = t >= 10 * (k - t)
    upper_ok = None
    if upper_asserted:
        upper_ok = 10**k * math.factorial(k) <= 11**k * math.factorial(t) * t ** (k - t)
    return FactorialThreshold(m, t, float(c), c_adj, k, lower_ok, upper_asserted, upper_ok)


def tail_bound(family: WordFamily, m: int, k: int) -> Fraction:
    """First-moment cap min(1, |W_k| m^k / k!) on Pr[run length >= k].

    |W_k| is the family's certified member cap at length k; the expected
    number of members appearing as a subsequence of a uniform word is at
    most |W_k| m^k / k!, and a probability never exceeds 1.
    """
    if m < 1:
        raise DomainError(f"need m >= 1, got m={m}")
    if k < 1:
        raise DomainError(f"need k >= 1, got k={k}")
    return min(_ONE, Fraction(family.size_at(k) * m**k, math.factorial(k)))


@dataclass(frozen=True)
class ExpectationBound:
    """Cap t + (2 log m/log t) t + 2 on E[run length], with regime flag."""

    m: int
    size_cap: int
    t: int                  # (t-1)! < size_cap <= t!
    k: int                  # rounded split point of the underlying proof
    value: float
    in_regime: bool         # 2m <= k <= 2t, the range the proof assumes


def expectation_upper(m: int, size_cap: int) -> ExpectationBound:
    """Expectation cap for any prefix-closed family with |W_k| <= size_cap.

    Follows the counting recipe: pick t with (t-1)! < size_cap <= t!, set
    k = ceil(t + (2 log m / log t) t), and the expectation is at most
    k + 2 <= t + (2 log m/log t) t + 2.  When size_cap is too small for
    2m <= k <= 2t the value is still reported but flagged out of regime.
    """
    if m < 1:
        raise DomainError(f"need m >= 1, got m={m}")
    if size_cap < 2:
        raise DomainError(f"need size cap >= 2, got {size_cap}")
    t, f = 2, 2
    while f < size_cap:
        t += 1
        f *= t
    stretch = 2.0 * math.log(m) / math.log(t)
    k = math.ceil(t + stretch * t - 1e-9)
    return ExpectationBound(
        m=m,
        size_cap=size_cap,
        t=t,
        k=k,
        value=t + stretch * t + 2.0,
        in_regime=2 * m <= k <= 2 * t,
    )


def completion_lower(m: int, n: int, t_size: int, delta: int) -> Fraction:
    """Inclusion-exclusion floor on Pr[word contains 1,2,...,n in order].

    Given a code T of t_size words with pairwise distance >= delta, each
    code word is a complete pattern with probability 1/n! and any ordered
    pair of distinct code words coincides with probability at most
    1/(delta! n!), so the union bound from below is
    t_size/n! - t_size(t_size - 1)/(delta! n!), clamped at 0.
    """
    if m < 1 or n < 1:
        raise DomainError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    if t_size < 1:
        raise DomainError(f"need t_size >= 1, got {t_size}")
    if delta < 1:
        raise DomainError(f"need delta >= 1, got {delta}")
    nf = math.factorial(n)
    val = Fraction(t_size, nf) - Fraction(t_size * (t_size - 1), math.factorial(delta) * nf)
    return max(_ZERO, val)


@dataclass(frozen=True)
class AsymptoticLower:
    """Log-space value of (m/1.03)^n / (2n n!); asymptotic in n."""

    m: int
    n: int
    log_value: float
    value: float            # exp(log_value); 0.0 or inf when out of range
    domain_ok: bool         # the bound is only claimed for m >= 2


def lower_cont_asymptotic(m: int, n: int) -> AsymptoticLower:
    """Completion-probability floor (m/1.03)^n / (2n n!) in log space.

    Astronomically small for interesting n, hence the log form.  Proven
    only for m >= 2 and n sufficiently large in terms of m; m = 1 is
    reported with domain_ok False rather than raising.
    """
    if m < 1 or n < 1:
        raise DomainError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    log_value = n * math.log(m / 1.03) - math.log(2 * n) - math.lgamma(n + 1)
    value = math.exp(log_value) if log_value < 709.0 else math.inf
    return AsymptoticLower(m=m, n=n, log_value=log_value, value=value, domain_ok=m >= 2)


@dataclass(frozen=True)
class EntropyCheck:
    """C(n, delta) against the binary-entropy cap 2^(H(delta/n) n)."""

    n: int
    delta: int
    binomial: int
    entropy_exponent: float     # H(delta/n) * n, base-2 entropy
    bound: float                # 2 ** entropy_exponent, inf on overflow
    holds: bool


def entropy_binom_check(n: int, delta: int) -> EntropyCheck:
    """Verify C(n, delta) <= 2^(H(delta/n) n), H the binary entropy."""
    if n < 1:
        raise DomainError(f"need n >= 1, got n={n}")
    if not 0 <= delta <= n:
        raise DomainError(f"need 0 <= delta <= n, got delta={delta}")
    p = delta / n
    if p in (0.0, 1.0):
        h = 0.0
    else:
        h = -p * math.log2(p) - (1 - p) * math.log2(1 - p)
    exponent = h * n
    binom = math.comb(n, delta)
    # compare in log space; 1e-9 absorbs rounding at the equality edges
    holds = math.log2(binom) <= exponent + 1e-9
    bound = 2.0**exponent if exponent < 1024 else math.inf
    return EntropyCheck(n=n, delta=delta, binomial=binom, entropy_exponent=exponent, bound=bound, holds=holds)


def block_lower_bound(m: int, n: int, k: int) -> float:
    """Floor 1 - (1 - p_k)^floor(n/k) on Pr[run length >= k].

    Splits the alphabet into floor(n/k) disjoint value blocks; each block
    independently of the others contains a full increasing run of its k
    values with probability p_k, and one success suffices.  p_k is taken exactly from the completion probability, which
    only strengthens the direction of the bound.
    """
    if m < 1:
        raise DomainError(f"need m >= 1, got m={m}")
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    p = complete_prob(m, k)
    if p == 1:
        return 1.0
    return -math.expm1((n // k) * math.log1p(-float(p)))
