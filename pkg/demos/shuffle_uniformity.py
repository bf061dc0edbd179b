"""Shuffle four inputs many times and test the output order for uniformity."""
from collections import Counter

from gmpc.experiments import Scenario, permutation_uniformity, run_scenario

records = run_scenario(Scenario("shuffle-demo", "shuffle", 4, 4, trials=2400, seed=11, record="off"))
orders = [tuple(r.stats["permutation"]) for r in records]
report = permutation_uniformity([list(o) for o in orders], 4)
print(f"{report.trials} shuffles of 4 inputs, all multisets conserved: {all(r.legal for r in records)}")
for order, count in sorted(Counter(orders).items()):
    print(f"  {order}: {'#' * (count // 4)} {count}")
print(f"chi2 = {report.statistic:.2f} over {report.categories} orders, p = {report.p_value:.3f}")
