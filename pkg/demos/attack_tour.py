"""Run every shipped attack at small scale and show that each ends in an abort
or an outcome the ideal world allows."""
from gmpc.experiments import ATTACKS, Scenario, run_scenario

SMALL = {
    "election": dict(n=256, kappa=16),
    "setup": dict(n=256, kappa=16),
    "many": dict(n=256, kappa=16),
    "main": dict(n=128, kappa=14),
    "general": dict(n=63, kappa=12),
}
EXTRA = {
    "wrong-evaluation": {"function": "sort", "attack_params": {"substitute": "concatenation"}},
    "input-blocking": {"attack_params": {"fraction": 1.0}},
    "flood": {"delta": 2, "function": "bit-sum"},
}

for name, attack in sorted(ATTACKS.items()):
    s = Scenario(f"tour-{name}", attack.protocol, attack=name, trials=2, seed=3, record="off",
                 **SMALL[attack.protocol], **EXTRA.get(name, {}))
    print(f"{name} ({attack.protocol}): {attack.description}")
    for r in run_scenario(s):
        verdict = "abort" if r.outcome == "abort" else ("legal output" if r.legal else "ILLEGAL output")
        print(f"  trial {r.trial}: {verdict}, stage {r.stage}, reason {r.reason}")
