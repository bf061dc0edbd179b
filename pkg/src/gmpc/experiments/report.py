"""Reports computed only from record files and the scenario."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict

from .bounds import compare_bounds, permutation_uniformity
from .complexity import complexity_report
from .scenario import Scenario


def _variant_summary(records) -> dict:
    numeric: dict[str, list[float]] = {}
    for r in records:
        for k, v in r.stats.items():
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                numeric.setdefault(k, []).append(float(v))
    legal = [r.legal for r in records if r.legal is not None]
    events = [r.event for r in records if r.event is not None]
    return {
        "trials": len(records),
        "outputs": sum(r.outcome == "output" for r in records),
        "aborts": sum(r.outcome == "abort" for r in records),
        "legal_rate": sum(legal) / len(legal) if legal else None,
        "event_rate": sum(events) / len(events) if events else None,
        "reasons": dict(sorted(Counter(r.reason for r in records).items())),
        "mean": {k: sum(v) / len(v) for k, v in sorted(numeric.items())},
        "max": {k: max(v) for k, v in sorted(numeric.items())},
    }


def build_report(records, scenario: Scenario) -> dict:
    variants: dict[tuple[int, int], list] = {}
    for r in records:
        variants.setdefault((r.n, r.kappa), []).append(r)
    report: dict = {"scenario": scenario.name, "protocol": scenario.protocol, "attack": scenario.attack,
                    "variants": []}
    by_point = {(v.n, v.kappa_value): v for v in scenario.variants()}
    for (n, kappa), group in sorted(variants.items()):
        entry = {"n": n, "kappa": kappa, **_variant_summary(group)}
        variant = by_point.get((n, kappa), scenario)
        if scenario.bound:
            entry["bound"] = asdict(compare_bounds(group, scenario.bound, variant))
        orders = [r.stats["permutation"] for r in group if r.stats.get("permutation") is not None]
        if orders and n <= 6:
            entry["uniformity"] = asdict(permutation_uniformity(orders, n))
        report["variants"].append(entry)
    fits = complexity_report(records)
    if fits:
        report["complexity"] = {k: asdict(v) for k, v in fits.items()}
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def report_text(report: dict) -> str:
    lines = [f"scenario {report['scenario']}: protocol {report['protocol']}, attack {report['attack'] or 'none'}"]
    for v in report["variants"]:
        legal = "n/a" if v["legal_rate"] is None else f"{v['legal_rate']:.4f}"
        lines.append(f"n={v['n']} kappa={v['kappa']}: {v['trials']} trials, {v['outputs']} outputs, "
                     f"{v['aborts']} aborts, legal rate {legal}")
        if "bound" in v:
            b = v["bound"]
            verdict = "PASS" if b["passed"] else "FAIL"
            lines.append(f"  bound {b['name']}: {b['events']}/{b['trials']} = {b['rate']:.6g} vs "
                         f"{b['bound']:.6g} + 3 sigma ({b['sigma']:.3g}) -> {verdict}"
                         + (f" [{b['note']}]" if b["note"] else ""))
        if "uniformity" in v:
            u = v["uniformity"]
            lines.append(f"  uniformity: chi2 {u['statistic']:.3f} over {u['categories']} orders, "
                         f"p = {u['p_value']:.4f} -> {'PASS' if u['passed'] else 'FAIL'}")
    for name, fit in sorted(report.get("complexity", {}).items()):
        verdict = "" if fit["passed"] is None else (" -> PASS" if fit["passed"] else " -> FAIL")
        shape = "log2(n)^b" if fit["model"] == "polylog" else "n^b"
        lines.append(f"complexity {fit['metric']}: {fit['coefficient']:.4g} * {shape}, b = {fit['exponent']:.3f}, "
                     f"residual {fit['residual']:.3f}{verdict}")
    return "\n".join(lines) + "\n"
