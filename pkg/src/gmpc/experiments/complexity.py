"""Growth fits for per-user and server costs across n."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GrowthFit:
    metric: str
    ns: tuple[int, ...]
    values: tuple[float, ...]
    model: str            # "polylog": a * log2(n)^b, "power": a * n^b
    exponent: float
    coefficient: float
    residual: float       # largest |log residual|
    cap: float | None
    passed: bool | None


def _fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.abs(y - (slope * x + intercept)).max())
    return float(slope), float(math.exp(intercept)), residual


def fit_polylog(metric: str, ns, values, cap: float = 4.0, tolerance: float = 0.5) -> GrowthFit:
    """Least squares of ln y on ln log2 n; passes iff b <= cap and the fit is tight."""
    ns, values = tuple(int(v) for v in ns), tuple(float(v) for v in values)
    b, a, residual = _fit(np.log(np.log2(ns)), np.log(values))
    return GrowthFit(metric, ns, values, "polylog", b, a, residual, cap, b <= cap and residual <= tolerance)


def fit_power(metric: str, ns, values) -> GrowthFit:
    """Least squares of ln y on ln n (informative)."""
    ns, values = tuple(int(v) for v in ns), tuple(float(v) for v in values)
    b, a, residual = _fit(np.log(ns), np.log(values))
    return GrowthFit(metric, ns, values, "power", b, a, residual, None, None)


def complexity_report(records, metric: str = "net_max_user_msgs", cap: float = 4.0) -> dict[str, GrowthFit]:
    """Per-user metric (max over trials at each n) fitted as polylog; server
    totals fitted as a power of n."""
    by_n: dict[int, list] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r)
    ns = sorted(by_n)
    if len(ns) < 2:
        return {}

    def worst(key: str) -> list[float]:
        return [max(max(r.stats.get(key, 0) for r in by_n[n]), 1) for n in ns]

    return {
        "user": fit_polylog(metric, ns, worst(metric), cap),
        "user_ops": fit_polylog("net_max_user_ops", ns, worst("net_max_user_ops"), cap),
        "server_bytes": fit_power("net_server_bytes", ns, worst("net_server_bytes")),
    }
