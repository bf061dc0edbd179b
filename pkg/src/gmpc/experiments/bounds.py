"""Empirical failure rates against closed-form bounds.

A bound passes when the measured rate is at most bound + 3 sigma, with sigma
the binomial standard deviation at the bound. Exact Clopper-Pearson
intervals are reported alongside.
"""
from __future__ import annotations

import math
from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass
from itertools import permutations

from scipy import stats as sps

from ..committees import diameter_bound, feige_err
from .scenario import Scenario


@dataclass(frozen=True)
class BoundReport:
    name: str
    trials: int
    events: int
    rate: float
    bound: float
    sigma: float
    ci_low: float
    ci_high: float
    passed: bool
    note: str


def _feige(records, scenario: Scenario) -> float:
    return feige_err(scenario.n, scenario.kappa_value, scenario.alpha, 1 / 3)


def _diameter(records, scenario: Scenario) -> float:
    return diameter_bound(scenario.n, scenario.kappa_value)


def _encoding(records, scenario: Scenario) -> float:
    """(1 - |D| / (n + 1))^|S| from the damage and row counts the trials saw."""
    sample = next((r.stats for r in records if r.stats.get("corrupted_slices") is not None
                   and r.stats.get("rows")), None)
    if sample is None:
        return 1.0
    return (1 - sample["corrupted_slices"] / sample["holders"]) ** sample["rows"]


def _zero(records, scenario: Scenario) -> float:
    return 0.0


BOUNDS: dict[str, Callable] = {"feige": _feige, "diameter": _diameter, "encoding": _encoding, "zero": _zero}


def compare_bounds(records, bound: str, scenario: Scenario) -> BoundReport:
    if bound not in BOUNDS:
        raise KeyError(f"unknown bound {bound!r}; known: {sorted(BOUNDS)}")
    relevant = [r for r in records if r.event is not None]
    trials = len(relevant)
    events = sum(bool(r.event) for r in relevant)
    value = BOUNDS[bound](relevant, scenario)
    p = min(1.0, max(0.0, value))
    sigma = math.sqrt(p * (1 - p) / trials) if trials else 0.0
    rate = events / trials if trials else 0.0
    if trials:
        ci = sps.binomtest(events, trials).proportion_ci(0.95, method="exact")
        low, high = float(ci.low), float(ci.high)
    else:
        low, high = 0.0, 1.0
    note = "vacuous bound (>= 1): parameters too small for the bound to say anything" if value >= 1 else ""
    return BoundReport(bound, trials, events, rate, value, sigma, low, high, rate <= value + 3 * sigma, note)


@dataclass(frozen=True)
class UniformityReport:
    categories: int
    trials: int
    statistic: float
    p_value: float
    passed: bool


def permutation_uniformity(orders: list[list[int]], size: int, level: float = 0.01) -> UniformityReport:
    """Chi-square test that observed output orders are uniform over all size! orders."""
    counts = Counter(tuple(o) for o in orders)
    observed = [counts.get(p, 0) for p in permutations(range(size))]
    test = sps.chisquare(observed)
    return UniformityReport(len(observed), len(orders), float(test.statistic), float(test.pvalue),
                            bool(test.pvalue > level))
