import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from gmpc.crypto import (
    TransparentFHE,
    fhe_dec,
    fhe_enc,
    fhe_eval,
    fhe_gen,
    hiding_commit,
    hiding_verify,
    pke_dec,
    pke_enc,
    pke_gen,
    prg_block,
    prg_expand,
    sig_gen,
    sig_sign,
    sig_verify,
    vc_commit,
    vc_open,
    vc_setup,
    vc_verify,
)
from gmpc.crypto.encoding import frame, unframe
from gmpc.crypto.merkle import Opening
from gmpc.crypto.prg import pack_bits


def _values(m):
    return [f"value-{i}".encode() for i in range(m)]


class TestVectorCommitment:
    """Merkle commitments open and bind per position."""

    def test_open_single(self):
        pp = vc_setup(32, 8, b"t")
        values = _values(8)
        tree, c = vc_commit(pp, values)
        opening = vc_open(pp, values, c, [3], tree)
        assert vc_verify(pp, c, [values[3]], [3], opening)

    def test_perturbed_value_rejected(self):
        pp = vc_setup(32, 8, b"t")
        values = _values(8)
        tree, c = vc_commit(pp, values)
        opening = vc_open(pp, values, c, [3], tree)
        assert not vc_verify(pp, c, [b"value-4"], [3], opening)

    def test_multi_opening_size(self):
        pp = vc_setup(32, 8, b"t")
        values = _values(8)
        tree, c = vc_commit(pp, values)
        opening = vc_open(pp, values, c, [1, 4, 7], tree)
        assert vc_verify(pp, c, [values[1], values[4], values[7]], [1, 4, 7], opening)
        assert opening.digest_count <= 3 * math.ceil(math.log2(8))

    def test_malformed_path_rejected(self):
        pp = vc_setup(32, 8, b"t")
        values = _values(8)
        tree, c = vc_commit(pp, values)
        good = vc_open(pp, values, c, [2], tree)
        short = Opening(good.positions, (good.paths[0][:-1],))
        assert not vc_verify(pp, c, [values[2]], [2], short)

    def test_out_of_range_open(self):
        pp = vc_setup(32, 5)
        values = _values(5)
        tree, c = vc_commit(pp, values)
        with pytest.raises(IndexError):
            vc_open(pp, values, c, [5], tree)

    @settings(max_examples=25)
    @given(st.integers(min_value=1, max_value=40), st.data())
    def test_any_size_any_position(self, m, data):
        pp = vc_setup(32, m, b"h")
        values = _values(m)
        tree, c = vc_commit(pp, values)
        pos = data.draw(st.integers(min_value=0, max_value=m - 1))
        opening = vc_open(pp, values, c, [pos], tree)
        assert vc_verify(pp, c, [values[pos]], [pos], opening)
        assert len(opening.paths[0]) == max(0, (m - 1).bit_length())
        other = (pos + 1) % m
        if other != pos:
            assert not vc_verify(pp, c, [values[other]], [pos], opening)

    def test_domain_separation(self):
        values = _values(4)
        _, c1 = vc_commit(vc_setup(32, 4, b"a"), values)
        _, c2 = vc_commit(vc_setup(32, 4, b"b"), values)
        assert c1.root != c2.root


class TestHidingCommitment:
    """Hash commitments for coin tossing."""

    def test_open(self, rng):
        com, decom = hiding_commit(b"coin", rng)
        assert hiding_verify(com, b"coin", decom)

    def test_wrong_message(self, rng):
        com, decom = hiding_commit(b"coin", rng)
        assert not hiding_verify(com, b"coim", decom)
        assert not hiding_verify(com, b"coin", decom[:-1])

    def test_commitment_bits_independent_of_message(self):
        rng = np.random.default_rng(3)
        counts = np.zeros((2, 2), dtype=int)
        for bit in (0, 1):
            for _ in range(4000):
                com, _ = hiding_commit(bytes([bit]), rng)
                counts[bit, com[0] & 1] += 1
        _, p_value, _, _ = stats.chi2_contingency(counts)
        assert p_value > 0.01


class TestSignatures:
    """Ed25519 wrapper."""

    def test_sign_verify(self, rng):
        keys = sig_gen(64, rng)
        assert sig_verify(keys.pk, b"msg", sig_sign(keys.sk, b"msg"))

    def test_flipped_bit(self, rng):
        keys = sig_gen(64, rng)
        sigma = sig_sign(keys.sk, b"msg")
        assert not sig_verify(keys.pk, b"msh", sigma)

    def test_wrong_key(self, rng):
        keys, other = sig_gen(64, rng), sig_gen(64, rng)
        assert not sig_verify(other.pk, b"msg", sig_sign(keys.sk, b"msg"))

    def test_key_length_and_limit(self, rng):
        assert len(sig_gen(128, rng).pk) * 8 >= 128
        with pytest.raises(ValueError):
            sig_gen(512, rng)

    def test_deterministic_from_rng(self):
        assert sig_gen(64, np.random.default_rng(5)) == sig_gen(64, np.random.default_rng(5))


class TestPublicKeyEncryption:
    """Star-mode sealing."""

    def test_roundtrip(self, rng):
        keys = pke_gen(rng)
        assert pke_dec(keys.sk, pke_enc(keys.pk, b"payload", rng)) == b"payload"

    def test_wrong_key_and_tamper(self, rng):
        keys, other = pke_gen(rng), pke_gen(rng)
        ct = pke_enc(keys.pk, b"payload", rng)
        assert pke_dec(other.sk, ct) is None
        assert pke_dec(keys.sk, ct[:-1] + bytes([ct[-1] ^ 1])) is None
        assert pke_dec(keys.sk, b"short") is None


class TestPrg:
    """Seed-split generator."""

    def test_deterministic(self):
        assert prg_expand([1, 0, 1], 100) == prg_expand([1, 0, 1], 100)

    def test_seeds_differ(self):
        assert prg_expand([1, 0, 1], 64) != prg_expand([1, 1, 1], 64)

    def test_block_depends_on_seed_and_index_only(self):
        blocks = prg_expand([0, 1, 1, 0], 61)
        seed = pack_bits([0, 1, 1, 0])
        assert all(blocks[i] == prg_block(seed, i, 61) for i in range(4))
        assert len(blocks[0]) == 8 and blocks[0][-1] < 32

    def test_length_prefix_distinguishes_seeds(self):
        assert pack_bits([0]) != pack_bits([0, 0])


class Identity:
    identifier = b"id"

    def __init__(self, index):
        self.dependencies = (index,)
        self.index = index

    def __call__(self, inputs):
        return inputs[self.index]


class Concat:
    identifier = b"concat"
    dependencies = (0, 1, 2)

    def __call__(self, inputs):
        return b"".join(inputs[i] for i in self.dependencies)


class TestTransparentFhe:
    """Correctness and determinism of the reference scheme."""

    def test_roundtrip(self, rng):
        keys = fhe_gen(rng)
        assert fhe_dec(keys.sk, fhe_enc(keys.pk, b"secret", rng)) == b"secret"

    def test_eval_identity(self, rng):
        keys = fhe_gen(rng)
        cts = [fhe_enc(keys.pk, m, rng) for m in (b"a", b"bb", b"c")]
        out = fhe_eval(keys.pk, Identity(1), cts, b"rho")
        assert fhe_dec(keys.sk, out) == b"bb"
        assert fhe_dec(keys.sk, fhe_eval(keys.pk, Concat(), cts, b"rho")) == b"abbc"

    def test_eval_determinism(self, rng):
        keys = fhe_gen(rng)
        cts = [fhe_enc(keys.pk, m, rng) for m in (b"a", b"bb", b"c")]
        assert fhe_eval(keys.pk, Concat(), cts, b"r1") == fhe_eval(keys.pk, Concat(), cts, b"r1")
        assert fhe_eval(keys.pk, Concat(), cts, b"r1") != fhe_eval(keys.pk, Concat(), cts, b"r2")

    def test_wrong_key_is_failure(self, rng):
        keys, other = fhe_gen(rng), fhe_gen(rng)
        ct = fhe_enc(keys.pk, b"m", rng)
        assert fhe_dec(other.sk, ct) is None
        foreign = [fhe_enc(other.pk, b"x", rng)] * 3
        assert fhe_dec(keys.sk, fhe_eval(keys.pk, Concat(), foreign, b"r")) is None

    def test_tampered_ciphertext(self, rng):
        keys = fhe_gen(rng)
        ct = bytearray(fhe_enc(keys.pk, b"m", rng))
        ct[-20] ^= 1
        assert fhe_dec(keys.sk, bytes(ct)) is None

    def test_overhead_constant(self, rng):
        keys = fhe_gen(rng)
        assert len(fhe_enc(keys.pk, b"12345", rng)) == 5 + TransparentFHE.overhead


class TestFraming:
    """Length-prefixed encoding."""

    @given(st.lists(st.binary(max_size=20), max_size=6))
    def test_roundtrip(self, parts):
        assert unframe(frame(parts)) == parts

    def test_truncated(self):
        with pytest.raises(ValueError):
            unframe(frame([b"abc"])[:-1])
