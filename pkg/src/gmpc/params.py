"""Model constants and thresholds derived from (n, kappa, alpha).

alpha is handled as an exact Fraction so that "at least" and "more than"
comparisons at the thresholds are exact.
"""
from __future__ import annotations

import math
from fractions import Fraction


def as_fraction(alpha) -> Fraction:
    return alpha if isinstance(alpha, Fraction) else Fraction(str(alpha))


def log2_ceil(n: int) -> int:
    return max(1, math.ceil(math.log2(n)))


def slack(alpha) -> Fraction:
    """Setup slack epsilon = 1/6 - alpha."""
    return Fraction(1, 6) - as_fraction(alpha)


def flood_rounds(n: int, kappa: int) -> int:
    """Alive iterations ell + 1 = ceil(log(n/4) / log(kappa/4)) + 1."""
    if kappa <= 4 or n <= 4:
        return 1
    return math.ceil(math.log(n / 4) / math.log(kappa / 4)) + 1


def lemma_ell(n: int, degree: int) -> float:
    """ell = log_{d/4}(n/3), the value inside the diameter tail bound."""
    return math.log(n / 3) / math.log(degree / 4)


def coin_bits(n: int, kappa: int) -> int:
    """Length of each side's committee string: two chunks per member, so
    rejected chunks are usually replaced from the string itself."""
    return 2 * kappa * log2_ceil(n)


def default_delta(n: int, kappa: int, constant: int = 1) -> int:
    return constant * kappa * log2_ceil(n) ** 2


def crosscheck_min(alpha, kappa: int) -> Fraction:
    """Consistent responses a user needs: (1 - 2 alpha - eps/2) kappa."""
    a = as_fraction(alpha)
    return (1 - 2 * a - slack(a) / 2) * kappa


def silent_max(alpha, kappa: int) -> Fraction:
    """A PC is inactive when more than (alpha + eps/2) kappa members are silent."""
    a = as_fraction(alpha)
    return (a + slack(a) / 2) * kappa


def pc_share_threshold(alpha, kappa: int) -> Fraction:
    a = as_fraction(alpha)
    return (1 - a - slack(a) / 2) * kappa


def committee_share_threshold(beta, alpha, kappa: int) -> Fraction:
    return (1 - as_fraction(beta) - slack(alpha) / 2) * kappa


def survivors_min(alpha, n: int) -> Fraction:
    """(1 - 2 alpha - eps) n = (5/6 - alpha) n."""
    return (Fraction(5, 6) - as_fraction(alpha)) * n


def many_alive_min(alpha, n: int) -> Fraction:
    a = as_fraction(alpha)
    return (1 - a - slack(a) / 2) * n


def pk_accept_min(alpha, committee_size: int) -> Fraction:
    return (Fraction(2, 3) + slack(alpha) / 2) * committee_size


def input_min(alpha, n: int) -> Fraction:
    return (1 - as_fraction(alpha)) * n


def broadcast_slack(alpha) -> Fraction:
    return Fraction(1, 2) - 3 * as_fraction(alpha)


def query_count(n: int, kappa: int, exponent: int = 1) -> int:
    """|S| = min(n + 1, kappa * ceil(log2 4n)^d)."""
    return min(n + 1, kappa * log2_ceil(4 * n) ** exponent)
