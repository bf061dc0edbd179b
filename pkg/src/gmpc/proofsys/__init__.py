"""Multi-verifier proofs of correct server computation."""
from .backend import (
    EvalStatement,
    PcppBackend,
    ProofHandle,
    ProverProof,
    QueryPlan,
    SpotCheckBackend,
    Verdict,
    build_statement,
    decode_block,
    encode_block,
    evaluate_output,
    statement_holds,
)
from .lecc import LeccParams, lecc_decode, lecc_encode, lecc_params, lecc_row, lecc_rows, pack_blocks, slices_of
from .multiverifier import ProofOutcome, multiverifier_proof_run
from .tree import (
    PROVER,
    CommitteeTransport,
    EncodingCheck,
    HelperTree,
    PerfectTransport,
    Transport,
    UserTransport,
    aggregate_rows,
    sample_rows,
    tree_encoding_check,
)

__all__ = [
    "LeccParams", "lecc_params", "lecc_encode", "lecc_decode", "lecc_row", "lecc_rows", "slices_of", "pack_blocks",
    "HelperTree", "Transport", "PerfectTransport", "UserTransport", "CommitteeTransport", "PROVER",
    "EncodingCheck", "tree_encoding_check", "aggregate_rows", "sample_rows",
    "EvalStatement", "PcppBackend", "SpotCheckBackend", "ProofHandle", "ProverProof", "QueryPlan", "Verdict",
    "build_statement", "encode_block", "decode_block", "evaluate_output", "statement_holds",
    "ProofOutcome", "multiverifier_proof_run",
]
