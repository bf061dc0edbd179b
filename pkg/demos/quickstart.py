"""Run the main protocol with an honest server at n=64 and print what happened."""
from dataclasses import replace
from pathlib import Path

from gmpc.experiments import build_report, load_scenario, report_text, run_scenario

scenario = replace(load_scenario(Path(__file__).parent.parent / "scenarios" / "quickstart.json"), trials=3)
print(f"{scenario.n} users sort their inputs through an untrusted server (kappa={scenario.kappa_value})")
records = run_scenario(scenario)
for r in records:
    print(f"trial {r.trial}: {r.outcome} ({r.reason}), exact={not r.event}, "
          f"proof checked before decryption={r.stats['ordered']}, "
          f"max messages per user={r.stats['net_max_user_msgs']}")
print()
print(report_text(build_report(records, scenario)), end="")
