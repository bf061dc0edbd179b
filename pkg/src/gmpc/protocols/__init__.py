"""Computations on top of the committees: broadcast, the NxtMsg oracle, the
general and main protocols, committee circuits, sorting and shuffling."""
from .broadcast import BroadcastOutcome, abort_threshold, committee_broadcast, echo_threshold
from .circuits import (
    CircuitOutcome,
    CircuitSpec,
    Gate,
    circuit_committees_run,
    format_circuit,
    parse_circuit,
    sorting_circuit,
)
from .functions import FUNCTIONS, BlockCircuit, GmpcFunction, get_function, random_inputs
from .general import GeneralOutcome, general_protocol_run
from .ideal import IdealResult, ideal_world, legal_outcome
from .main import MainOutcome, establish_committees, main_protocol_run
from .nxtmsg import (
    CommitteeParties,
    DirectParties,
    NxtMsgCall,
    NxtMsgResult,
    SharedState,
    nxtmsg_oracle,
    open_states,
    share_states,
)
from .shuffle import ShuffleOutcome, shuffle_run
from .sorting import SortNetwork, bitonic_network

__all__ = [
    "BroadcastOutcome", "committee_broadcast", "echo_threshold", "abort_threshold",
    "SharedState", "NxtMsgCall", "NxtMsgResult", "nxtmsg_oracle", "share_states", "open_states",
    "DirectParties", "CommitteeParties",
    "GmpcFunction", "BlockCircuit", "FUNCTIONS", "get_function", "random_inputs",
    "GeneralOutcome", "general_protocol_run", "MainOutcome", "main_protocol_run", "establish_committees",
    "IdealResult", "ideal_world", "legal_outcome",
    "Gate", "CircuitSpec", "CircuitOutcome", "parse_circuit", "format_circuit", "sorting_circuit",
    "circuit_committees_run", "SortNetwork", "bitonic_network", "ShuffleOutcome", "shuffle_run",
]
