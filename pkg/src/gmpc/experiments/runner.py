"""Trial execution: one deterministic record per trial.

Every trial gets its own generator from (scenario seed, trial index), so a
scenario re-run reproduces each record and each transcript exactly.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .. import params
from ..committees import (
    diameter,
    elect_committee,
    graph_sample,
    ideal_many_committees,
    many_committees,
    pcsg_check,
    setup_run,
)
from ..netsim import AdversarySpec, Network, Strategy
from ..proofsys import UserTransport
from ..protocols import (
    DirectParties,
    general_protocol_run,
    get_function,
    ideal_world,
    legal_outcome,
    main_protocol_run,
    random_inputs,
    shuffle_run,
)
from .attacks import ATTACKS, Flood, InputBlocking, make_attack
from .scenario import Scenario, trial_seed


@dataclass
class TrialRecord:
    scenario: str
    protocol: str
    n: int
    kappa: int
    trial: int
    seed: int
    attack: str | None
    outcome: str                   # "output" or "abort"
    stage: str
    reason: str
    output_digest: str | None
    legal: bool | None             # ideal-world legal (None when not applicable)
    event: bool | None             # the failure event a bound speaks about
    stats: dict = field(default_factory=dict)
    transcript_digest: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "TrialRecord":
        return cls(**json.loads(line))


@dataclass
class TrialContext:
    scenario: Scenario
    trial: int
    seed: int
    rng: np.random.Generator
    net: Network
    strategy: Strategy | None


def _digest(data: bytes | None) -> str | None:
    return None if data is None else hashlib.sha256(data).hexdigest()[:32]


def _adversary(scenario: Scenario, n: int, rng: np.random.Generator) -> tuple[AdversarySpec, Strategy | None]:
    count = scenario.options.get("corrupted")
    if scenario.attack is None:
        return AdversarySpec.sample(n, scenario.alpha, rng, count=count), None
    attack, strategy = make_attack(scenario.attack, **scenario.attack_params)
    spec = AdversarySpec.sample(n, scenario.alpha, rng, server_corrupted=attack.server_corrupted,
                                strategy=strategy, count=count)
    strategy.attach(spec.corrupted_users, rng)
    return spec, strategy


def _network_size(scenario: Scenario) -> int:
    # the general protocol's parties 0..n are network users 1..n + 1
    return scenario.n + 1 if scenario.protocol == "general" else scenario.n


def run_trial(scenario: Scenario, trial: int) -> tuple[TrialRecord, Network]:
    seed = trial_seed(scenario.seed, trial)
    rng = np.random.default_rng(seed)
    size = _network_size(scenario)
    spec, strategy = _adversary(scenario, size, rng)
    net = Network(size, spec, delta=scenario.delta, record=scenario.record)
    ctx = TrialContext(scenario, trial, seed, rng, net, strategy)
    fields = TRIALS[scenario.protocol](ctx)
    stats = dict(fields.pop("stats", {}))
    stats.update({f"net_{k}": v for k, v in net.metrics.summary().items()})
    record = TrialRecord(scenario.name, scenario.protocol, scenario.n, scenario.kappa_value, trial, seed,
                         scenario.attack, stats=stats, transcript_digest=net.transcript.digest(), **fields)
    return record, net


def run_scenario(scenario: Scenario, transcripts: Path | None = None) -> list[TrialRecord]:
    """All trials of every sweep variant, ordered by (variant, trial)."""
    records = []
    for variant in scenario.variants():
        for trial in range(variant.trials):
            record, net = run_trial(variant, trial)
            records.append(record)
            if transcripts is not None:
                transcripts.mkdir(parents=True, exist_ok=True)
                net.transcript.write(transcripts / f"{variant.protocol}-n{variant.n}-k{variant.kappa_value}"
                                                  f"-t{trial:05d}.tsv")
    return records


# -- per-protocol trials -------------------------------------------------------------


def _outcome(output: bytes | None, stage: str, reason: str, legal=None, event=None, **stats) -> dict:
    return {"outcome": "abort" if output is None else "output", "stage": stage, "reason": reason,
            "output_digest": _digest(output), "legal": legal, "event": event, "stats": stats}


def _diameter_trial(ctx: TrialContext) -> dict:
    s = ctx.scenario
    n, d = s.n, s.kappa_value
    bad_fraction = s.options.get("bad_fraction", 0.3)
    bad = ctx.rng.choice(n, size=int(bad_fraction * n), replace=False)
    graph = graph_sample(n, d, set(bad.tolist()), ctx.rng)
    good = np.setdiff1d(np.arange(n), bad)
    value = diameter(graph, good)
    limit = params.flood_rounds(n, d)
    return _outcome(b"diameter", "done", "ok", event=bool(value > limit),
                    diameter=None if math.isinf(value) else int(value), limit=limit,
                    lemma_ell=params.lemma_ell(n, d))


def _setup_trial(ctx: TrialContext) -> dict:
    s = ctx.scenario
    witness, run = setup_run(s.n, s.kappa_value, ctx.net, ctx.rng)
    check = pcsg_check(witness, ctx.net.adversary)
    honest_pc = witness.alive & ~run.steadfast
    honest_pc[0] = False
    if ctx.net.adversary.server_corrupted:
        # a corrupted server may cause aborts; what must never happen is a
        # surviving honest PC that disagrees with its neighbours
        legal = bool(witness.agreement[honest_pc].all())
    else:
        legal = None
    output = b"setup" if witness.alive[1:].any() else None
    return _outcome(output, "setup", "ok" if check.holds else ",".join(check.violated), legal=legal,
                    event=not check.holds, alive=int(witness.alive[1:].sum()),
                    min_honest_members=check.details["min_honest_members"],
                    pcs_below_definition_bar=check.details["pcs_below_definition_bar"],
                    diameter=None if math.isinf(witness.diameter) else witness.diameter,
                    iterations=witness.iterations)


def _election(ctx: TrialContext):
    s = ctx.scenario
    witness, run = setup_run(s.n, s.kappa_value, ctx.net, ctx.rng)
    check = pcsg_check(witness, ctx.net.adversary)  # before the election touches the witness
    return witness, run, check, elect_committee(witness, ctx.net, ctx.rng, run.steadfast)


def _election_trial(ctx: TrialContext) -> dict:
    s = ctx.scenario
    witness, run, check, out = _election(ctx)
    honest_pc = witness.alive & ~run.steadfast
    honest_pc[0] = False
    stats = {"iterations": out.iterations, "alive_before": int(honest_pc.sum()), "pcsg": check.holds,
             "min_honest_members": check.details["min_honest_members"]}
    if out.result is None:
        in_time = bool(out.abort_round[honest_pc & ~out.alive].max(initial=-1) <= out.iterations + 1)
        all_abort = not out.alive[honest_pc].any()
        stats.update(honest_aborted_in_time=in_time, all_honest_aborted=all_abort)
        legal = all_abort if ctx.net.adversary.server_corrupted else False
        return _outcome(None, "election", "abort", legal=legal, event=None, **stats)
    committee = out.result.committee
    stats.update(committee_size=len(committee), honest_fraction=out.honest_fraction)
    # the lightest of ceil(n / kappa) bins never holds more than kappa PCs
    return _outcome(repr(committee).encode(), "done", "ok", legal=len(committee) <= s.kappa_value,
                    event=bool(out.honest_fraction <= 2 / 3), **stats)


def _many_trial(ctx: TrialContext) -> dict:
    s = ctx.scenario
    witness, run, _, election = _election(ctx)
    if election.result is None:
        return _outcome(None, "election", "abort", legal=ctx.net.adversary.server_corrupted)
    many = many_committees(election.result.committee, witness, ctx.net, ctx.rng, run.steadfast)
    stats = {"forged_accepted": many.forged_accepted, "total_alive": many.total_alive}
    if many.aborted or many.tree is None:
        return _outcome(None, "many", "abort", legal=ctx.net.adversary.server_corrupted, **stats)
    tree = many.tree
    sizes = [len(c) for c in tree.committees]
    stats.update(max_committee=max(sizes), min_committee=min(sizes))
    # the tree must carry the key C_0 generated, never a substitute
    legal = many.forged_accepted == 0 and bool(many.pk_accepted.any())
    return _outcome(tree.pk, "done", "ok", legal=legal, **stats)


def _general_trial(ctx: TrialContext) -> dict:
    s = ctx.scenario
    function = get_function(s.function, s.block_bytes)
    inputs = random_inputs(s.n, s.block_bytes, ctx.rng)
    parties = DirectParties(s.n + 1)
    parties.load(range(1, s.n + 1), inputs[1:])
    spec = ctx.net.adversary
    out = general_protocol_run(function, inputs[0], parties, UserTransport(ctx.net), ctx.net, ctx.rng,
                               s.kappa_value, server=spec.server)
    expected = function.server_output(inputs)
    proof = out.proof
    stats = {"decrypted": out.decrypted}
    if proof is not None:
        stats.update(rows=int(proof.plan.rows.size) if proof.plan is not None else None, proof_stage=proof.stage)
    damaged = getattr(ctx.strategy, "damaged", None)
    if damaged is not None:
        stats["corrupted_slices"] = int(len(damaged))
        stats["holders"] = s.n + 1
    accepted = bool(proof is not None and proof.accepted)
    cheating = spec.server_corrupted
    legal = legal_outcome(ideal_world(function, inputs, (), s.alpha), out.server_output)
    if not cheating:
        legal = legal and out.server_output is not None
    return _outcome(out.server_output, out.stage, out.reason, legal=legal,
                    event=accepted if cheating else out.server_output != expected, **stats)


def _main_trial(ctx: TrialContext) -> dict:
    s = ctx.scenario
    function = get_function(s.function, s.block_bytes)
    inputs = random_inputs(s.n, s.block_bytes, ctx.rng)
    stats = {}
    if isinstance(ctx.strategy, InputBlocking):
        stats["targeted"] = len(ctx.strategy.choose(s.n, ctx.net.adversary.alpha))
    if isinstance(ctx.strategy, Flood):
        victim = min(set(range(1, s.n + 1)) - ctx.strategy.corrupted)
        stats["flood_blocked"] = int(ctx.strategy.launch(ctx.net, victim).size)
    out = main_protocol_run(function, inputs, ctx.net, ctx.rng, s.kappa_value, committees=s.committees)
    ideal = ideal_world(function, inputs, out.blocked, s.alpha)
    legal = legal_outcome(ideal, out.output)
    if not ctx.net.adversary.server_corrupted:
        # an honest server must always get the output
        legal = legal and out.output is not None
    kinds = [r[1] for r in ctx.net.transcript.records()] if ctx.net.transcript.mode == "full" else []
    ordered = ("decrypt-share" not in kinds or
               ("proof-verdict" in kinds and kinds.index("proof-verdict") < kinds.index("decrypt-share")))
    stats.update(blocked=len(out.blocked), ordered=ordered)
    return _outcome(out.output, out.stage, out.reason, legal=legal, event=out.output != ideal.output, **stats)


def _shuffle_trial(ctx: TrialContext) -> dict:
    s = ctx.scenario
    width = max(1, (s.n.bit_length() + 7) // 8)
    inputs = [k.to_bytes(width, "big") for k in range(s.n)]
    alive = np.ones(s.n + 1, dtype=bool)
    tree = ideal_many_committees(s.n, min(s.n, s.kappa_value), alive, ctx.rng)
    out = shuffle_run(inputs, tree, ctx.net, ctx.rng, s.kappa_value)
    if out.output is None:
        return _outcome(None, out.circuit.stage, out.circuit.reason, legal=ctx.net.adversary.server_corrupted)
    order = [int.from_bytes(v, "big") for v in out.output]
    conserved = sorted(out.output) == sorted(inputs)
    return _outcome(b"".join(out.output), "done", "ok", legal=conserved, event=not conserved,
                    permutation=order if s.n <= 8 else None, attempts=out.attempts)


TRIALS: dict[str, Callable[[TrialContext], dict]] = {
    "diameter": _diameter_trial,
    "setup": _setup_trial,
    "election": _election_trial,
    "many": _many_trial,
    "general": _general_trial,
    "main": _main_trial,
    "shuffle": _shuffle_trial,
}


# -- record files -------------------------------------------------------------------

CSV_FIELDS = ("scenario", "protocol", "n", "kappa", "trial", "seed", "attack", "outcome", "stage", "reason",
              "output_digest", "legal", "event", "transcript_digest")


def records_csv(records: list[TrialRecord]) -> str:
    stat_keys = sorted({k for r in records for k in r.stats})
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(CSV_FIELDS) + stat_keys)
    for r in records:
        row = asdict(r)
        writer.writerow([_cell(row[f]) for f in CSV_FIELDS] + [_cell(r.stats.get(k)) for k in stat_keys])
    return buffer.getvalue()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True, separators=(",", ":"))
    return str(value)


def write_records(records: list[TrialRecord], out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "records.jsonl").write_text("".join(r.to_json() + "\n" for r in records))
    (out / "records.csv").write_text(records_csv(records))


def read_records(out: Path) -> list[TrialRecord]:
    path = out / "records.jsonl"
    return [TrialRecord.from_json(line) for line in path.read_text().splitlines() if line]


def attack_table() -> list[dict]:
    return [{"name": a.name, "protocol": a.protocol, "server_corrupted": a.server_corrupted,
             "description": a.description} for a in ATTACKS.values()]
