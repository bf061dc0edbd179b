"""Scheme-agnostic FHE interface and a transparent reference scheme.

TransparentFHE keeps the plaintext inside the ciphertext next to a tag bound
to the public key. It has no secrecy; it exists so protocols can be tested for
correctness and determinism. Eval applies the circuit to the decoded inputs
and derives the output nonce from rho, making it a pure function of
(pk, circuit, inputs, rho).
"""
from __future__ import annotations

import hashlib
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Protocol

import numpy as np

_MAGIC = b"TF1"
_FP, _NONCE, _TAG = 8, 16, 16


class Circuit(Protocol):
    identifier: bytes
    dependencies: tuple[int, ...]

    def __call__(self, inputs: Mapping[int, bytes]) -> bytes: ...


class FheScheme(Protocol):
    scheme_id: str

    def gen(self, rng: np.random.Generator) -> "FheHandle": ...
    def enc(self, pk: bytes, message: bytes, rng: np.random.Generator) -> bytes: ...
    def dec(self, sk: bytes, ciphertext: bytes) -> bytes | None: ...
    def eval(self, pk: bytes, circuit: Circuit, ciphertexts: Mapping[int, bytes] | Sequence[bytes], rho: bytes) -> bytes: ...


@dataclass(frozen=True)
class FheHandle:
    scheme_id: str
    pk: bytes
    sk: bytes


def _h(*parts: bytes) -> bytes:
    h = hashlib.sha256()
    for part in parts:
        h.update(len(part).to_bytes(4, "little"))
        h.update(part)
    return h.digest()


class TransparentFHE:
    scheme_id = "transparent-v1"
    overhead = len(_MAGIC) + _FP + _NONCE + 4 + _TAG

    def gen(self, rng: np.random.Generator) -> FheHandle:
        sk = rng.bytes(32)
        return FheHandle(self.scheme_id, self.public_key(sk), sk)

    @staticmethod
    def public_key(sk: bytes) -> bytes:
        return _h(b"fhe/pk", sk)

    def enc(self, pk: bytes, message: bytes, rng: np.random.Generator) -> bytes:
        return self._seal(pk, rng.bytes(_NONCE), message)

    def dec(self, sk: bytes, ciphertext: bytes) -> bytes | None:
        return self._open(self.public_key(sk), ciphertext)

    def eval(self, pk: bytes, circuit: Circuit, ciphertexts, rho: bytes) -> bytes:
        if not isinstance(ciphertexts, Mapping):
            ciphertexts = dict(enumerate(ciphertexts))
        plaintexts, digest = {}, hashlib.sha256()
        valid = True
        for index in circuit.dependencies:
            ct = ciphertexts.get(index)
            plain = None if ct is None else self._open(pk, ct)
            if plain is None:
                valid = False
                break
            plaintexts[index] = plain
            digest.update(_h(ct))
        nonce = _h(b"fhe/eval", pk, circuit.identifier, rho, digest.digest())[:_NONCE]
        if not valid:
            return _MAGIC + _fingerprint(pk) + nonce + (0).to_bytes(4, "little") + bytes(_TAG)
        return self._seal(pk, nonce, circuit(plaintexts))

    def _seal(self, pk: bytes, nonce: bytes, message: bytes) -> bytes:
        header = _MAGIC + _fingerprint(pk) + nonce + len(message).to_bytes(4, "little")
        return header + message + _h(b"fhe/tag", pk, header, message)[:_TAG]

    def _open(self, pk: bytes, ciphertext: bytes) -> bytes | None:
        head = len(_MAGIC) + _FP + _NONCE + 4
        if len(ciphertext) < head + _TAG or not ciphertext.startswith(_MAGIC):
            return None
        if ciphertext[len(_MAGIC):len(_MAGIC) + _FP] != _fingerprint(pk):
            return None
        size = int.from_bytes(ciphertext[head - 4:head], "little")
        if len(ciphertext) != head + size + _TAG:
            return None
        header, message, tag = ciphertext[:head], ciphertext[head:head + size], ciphertext[head + size:]
        if tag != _h(b"fhe/tag", pk, header, message)[:_TAG]:
            return None
        return message


def _fingerprint(pk: bytes) -> bytes:
    return _h(b"fhe/fp", pk)[:_FP]


DEFAULT_SCHEME = TransparentFHE()


def fhe_gen(rng: np.random.Generator, scheme: FheScheme = DEFAULT_SCHEME) -> FheHandle:
    return scheme.gen(rng)


def fhe_enc(pk: bytes, message: bytes, rng: np.random.Generator, scheme: FheScheme = DEFAULT_SCHEME) -> bytes:
    return scheme.enc(pk, message, rng)


def fhe_dec(sk: bytes, ciphertext: bytes, scheme: FheScheme = DEFAULT_SCHEME) -> bytes | None:
    return scheme.dec(sk, ciphertext)


def fhe_eval(pk: bytes, circuit: Circuit, ciphertexts, rho: bytes, scheme: FheScheme = DEFAULT_SCHEME) -> bytes:
    return scheme.eval(pk, circuit, ciphertexts, rho)
