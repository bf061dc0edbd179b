"""Personal committees, the committee graph, election and the committee tree."""
from .election import ElectionOutcome, ElectionResult, elect_committee, feige_err, lightest_bin
from .flood import PcGraph, alive_iterations, charge_virtual, committee_user_exchange, virtual_exchange
from .graph import DirectedGraph, diameter, diameter_bound, diameter_from_edges, graph_sample
from .many import CommitteeTree, ManyOutcome, ideal_many_committees, many_committees, sample_tree
from .personal import (
    CoinToss,
    PersonalCommittee,
    PersonalCommitteeRun,
    pc_coin_toss,
    pc_crosscheck,
    pc_finalize,
    run_personal_committees,
)
from .setup import CommitteeSetupRun, NeighborSet, PcsgCheck, PcsgWitness, pcsg_check, setup_run
from .subsets import sample_distinct, subset_from_string

__all__ = [
    "PersonalCommittee", "CoinToss", "PersonalCommitteeRun", "pc_coin_toss", "pc_crosscheck", "pc_finalize",
    "run_personal_committees", "subset_from_string", "sample_distinct",
    "DirectedGraph", "graph_sample", "diameter", "diameter_from_edges", "diameter_bound",
    "PcGraph", "virtual_exchange", "charge_virtual", "committee_user_exchange", "alive_iterations",
    "NeighborSet", "PcsgWitness", "PcsgCheck", "pcsg_check", "CommitteeSetupRun", "setup_run",
    "ElectionResult", "ElectionOutcome", "elect_committee", "feige_err", "lightest_bin",
    "CommitteeTree", "ManyOutcome", "many_committees", "sample_tree", "ideal_many_committees",
]
