"""Round-based network simulation with a blocking server."""
from .adversary import HONEST, Strategy
from .metrics import Metrics
from .network import Network, ddos_guard, ddos_guard_arrays
from .star import Board, BoardRecord, StarNetwork, UserKeys, board_get, board_register, open_envelope, secure_envelope
from .transcript import Transcript
from .types import SERVER, AdversarySpec, Envelope, EnvelopeBatch, PartyId

__all__ = [
    "SERVER", "PartyId", "Envelope", "EnvelopeBatch", "AdversarySpec", "Strategy", "HONEST",
    "Metrics", "Transcript", "Network", "ddos_guard", "ddos_guard_arrays",
    "Board", "BoardRecord", "UserKeys", "StarNetwork", "board_register", "board_get",
    "secure_envelope", "open_envelope",
]
