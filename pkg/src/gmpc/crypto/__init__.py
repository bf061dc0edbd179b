"""Field arithmetic, sharing, commitments, signatures, PRG and FHE interfaces."""
from .commit import hiding_commit, hiding_verify
from .encoding import frame, unframe
from .fhe import FheHandle, FheScheme, TransparentFHE, fhe_dec, fhe_enc, fhe_eval, fhe_gen
from .field import P
from .merkle import MerkleCommitment, MerkleTree, Opening, VcParams, vc_commit, vc_open, vc_setup, vc_verify
from .pke import EncKeypair, pke_dec, pke_enc, pke_gen
from .prg import prg_block, prg_expand
from .sharing import (
    DecodingError,
    InsufficientShares,
    ShareVector,
    ecss_recon,
    ecss_share,
    shamir_recon,
    shamir_share,
)
from .sig import SigKeypair, sig_gen, sig_sign, sig_verify

__all__ = [
    "P", "ShareVector", "InsufficientShares", "DecodingError",
    "shamir_share", "shamir_recon", "ecss_share", "ecss_recon",
    "VcParams", "MerkleCommitment", "MerkleTree", "Opening", "vc_setup", "vc_commit", "vc_open", "vc_verify",
    "hiding_commit", "hiding_verify", "SigKeypair", "sig_gen", "sig_sign", "sig_verify",
    "EncKeypair", "pke_gen", "pke_enc", "pke_dec", "prg_expand", "prg_block",
    "FheHandle", "FheScheme", "TransparentFHE", "fhe_gen", "fhe_enc", "fhe_dec", "fhe_eval",
    "frame", "unframe",
]
