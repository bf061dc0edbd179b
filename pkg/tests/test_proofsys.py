import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmpc import params
from gmpc.crypto import field
from gmpc.crypto.fhe import DEFAULT_SCHEME
from gmpc.crypto.field import P
from gmpc.netsim import AdversarySpec, Network, Strategy
from gmpc.proofsys import (
    HelperTree,
    PerfectTransport,
    SpotCheckBackend,
    UserTransport,
    aggregate_rows,
    build_statement,
    lecc_decode,
    lecc_encode,
    lecc_params,
    lecc_row,
    lecc_rows,
    multiverifier_proof_run,
    pack_blocks,
    sample_rows,
    slices_of,
    statement_holds,
    tree_encoding_check,
)
from gmpc.proofsys.lecc import slice_rows
from gmpc.protocols.functions import get_function, random_inputs


def make_statement(n, rng, name="concatenation", evaluated=None):
    function = get_function(name, 8)
    keys = DEFAULT_SCHEME.gen(rng)
    x_hat = [DEFAULT_SCHEME.enc(keys.pk, x, rng) for x in random_inputs(n, 8, rng)]
    bits = [int(b) for b in rng.integers(0, 2, n + 1)]
    wrong = get_function(evaluated, 8) if evaluated else None
    pub, blocks = build_statement(keys.pk, function, x_hat, bits, evaluated=wrong)
    return pub, blocks, bits


class DropTransport(PerfectTransport):
    """Drops every message of one kind sent by one party."""

    def __init__(self, kind, party):
        self.kind, self.party = kind, party

    def send(self, kind, src, dst, length):
        src, dst = np.broadcast_arrays(np.asarray(src), np.asarray(dst))
        return ~((kind == self.kind) & (src.ravel() == self.party))


class CorruptSlices(Strategy):
    def __init__(self, holders):
        super().__init__()
        self.holders = np.asarray(holders)

    def corrupt_codeword(self, slices):
        slices = slices.copy()
        slices[self.holders, 0, 0] = field.vadd(slices[self.holders, 0, 0], np.uint64(1))
        return slices


class AbortAt(Strategy):
    def __init__(self, stage):
        super().__init__()
        self.stage = stage

    def abort_proof(self, stage):
        return stage == self.stage


class FlipBit(Strategy):
    def statement_bits(self, bits):
        bits = list(bits)
        bits[5] ^= 1
        return bits


class TestLecc:
    """Systematic Reed-Solomon code and its closed-form generator."""

    @pytest.mark.parametrize("k", [4, 8])
    def test_rows_match_frozen_lagrange(self, k, frozen):
        code = lecc_params(k)
        table = frozen[f"lecc_rows_k{k}"]
        got = lecc_rows(code, np.arange(code.length))
        for j, row in table.items():
            assert got[int(j)].tolist() == [int(v) for v in row]

    @given(st.integers(1, 40), st.data())
    @settings(max_examples=40, deadline=None)
    def test_systematic_rows_are_indicators(self, k, data):
        j = data.draw(st.integers(0, k - 1))
        row = lecc_rows(lecc_params(k), [j])[0]
        assert row.tolist() == [int(i == j) for i in range(k)]

    def test_row_entries_match_full_encode(self, rng):
        code = lecc_params(8)
        message = rng.integers(0, P, 8, dtype=np.uint64)
        word = lecc_encode(code, message)
        for j in range(code.length):
            assert sum(lecc_row(code, j, i) * int(message[i]) for i in range(8)) % P == int(word[j])

    def test_zero_message_gives_zero_codeword(self):
        assert not lecc_encode(lecc_params(6), np.zeros(6, dtype=np.uint64)).any()

    @given(st.lists(st.integers(0, P - 1), min_size=5, max_size=5),
           st.lists(st.integers(0, P - 1), min_size=5, max_size=5))
    @settings(max_examples=40, deadline=None)
    def test_linearity(self, x, y):
        code = lecc_params(5)
        total = field.vadd(np.array(x, dtype=np.uint64), np.array(y, dtype=np.uint64))
        assert np.array_equal(lecc_encode(code, total),
                              field.vadd(lecc_encode(code, x), lecc_encode(code, y)))

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_distance_exhaustive_small(self, k):
        code = lecc_params(k)
        alphabet = [0, 1, 2, P - 1]
        # linear code: the distance is the minimum weight of a nonzero codeword
        for message in itertools.product(alphabet, repeat=k):
            if any(message):
                assert np.count_nonzero(lecc_encode(code, np.array(message, dtype=np.uint64))) >= 2 * k + 1

    def test_distance_sampled(self, rng):
        for k in (4, 8, 12, 16):
            code = lecc_params(k)
            for _ in range(40):
                a = rng.integers(0, P, k, dtype=np.uint64)
                b = a.copy()
                b[rng.choice(k, size=rng.integers(1, k + 1), replace=False)] ^= np.uint64(1)
                assert np.count_nonzero(lecc_encode(code, a) != lecc_encode(code, b)) >= code.distance

    def test_decode_corrects_k_errors(self, rng):
        code = lecc_params(4)
        message = rng.integers(0, P, (4, 2), dtype=np.uint64)
        word = lecc_encode(code, message)
        bad = word.copy()
        spots = rng.choice(code.length, size=code.k, replace=False)
        bad[spots] = rng.integers(0, P, (code.k, 2), dtype=np.uint64)
        assert code.max_errors == code.k
        assert np.array_equal(lecc_decode(code, bad), message)

    def test_pack_blocks_rejects_overlong(self):
        with pytest.raises(ValueError):
            pack_blocks([b"abc"], 2)


class TestTreeCheck:
    """Random-row encoding check aggregated up the helper tree."""

    @given(st.integers(1, 70), st.integers(1, 3), st.integers(0, 2**32))
    @settings(max_examples=40, deadline=None)
    def test_tree_sum_equals_flat_sum(self, n, width, seed):
        rng = np.random.default_rng(seed)
        code = lecc_params(n + 1)
        inputs = rng.integers(0, P, (n + 1, width), dtype=np.uint64)
        rows = sample_rows(n, 5, rng)
        flat = field.vmatmul(lecc_rows(code, slice_rows(rows).ravel()), inputs)
        assert np.array_equal(aggregate_rows(code, HelperTree(n), inputs, rows).reshape(flat.shape), flat)

    def test_tree_shape(self):
        tree = HelperTree(10)
        assert tree.children(0) == (1, 2)
        assert tree.children(4) == (9, 10)
        assert tree.children(5) == ()
        assert [lv.tolist() for lv in tree.levels()] == [[0], [1, 2], [3, 4, 5, 6], [7, 8, 9, 10]]
        assert tree.width == 16

    def test_honest_accepts(self, rng):
        n = 63
        code = lecc_params(n + 1)
        inputs = rng.integers(0, P, (n + 1, 2), dtype=np.uint64)
        check = tree_encoding_check(code, inputs, slices_of(lecc_encode(code, inputs)), sample_rows(n, 20, rng))
        assert check.accepted and check.reason == "ok"

    def test_one_bad_position_with_full_rows_rejects(self, rng):
        n = 31
        code = lecc_params(n + 1)
        inputs = rng.integers(0, P, (n + 1, 1), dtype=np.uint64)
        slices = slices_of(lecc_encode(code, inputs)).copy()
        slices[17, 2, 0] = field.vadd(slices[17, 2, 0], np.uint64(1))
        check = tree_encoding_check(code, inputs, slices, np.arange(n + 1))
        assert not check.accepted
        assert check.mismatched.tolist() == [17]

    def test_missing_child_contribution_rejects(self, rng):
        n = 15
        code = lecc_params(n + 1)
        inputs = rng.integers(0, P, (n + 1, 1), dtype=np.uint64)
        slices = slices_of(lecc_encode(code, inputs))
        check = tree_encoding_check(code, inputs, slices, np.arange(n + 1), DropTransport("lecc-sum", 9))
        assert check.reason == "missing-contribution"

    def test_corrupted_encoding_matches_hypergeometric(self, rng):
        n, bad, size, trials = 31, 4, 8, 400
        code = lecc_params(n + 1)
        inputs = rng.integers(0, P, (n + 1, 1), dtype=np.uint64)
        slices = slices_of(lecc_encode(code, inputs)).copy()
        damaged = rng.choice(n + 1, size=bad, replace=False)
        slices[damaged, 1, 0] = field.vadd(slices[damaged, 1, 0], np.uint64(3))
        accepted = sum(tree_encoding_check(code, inputs, slices, sample_rows(n, size, rng)).accepted
                       for _ in range(trials))
        exact = math.comb(n + 1 - bad, size) / math.comb(n + 1, size)
        assert exact <= (1 - bad / (n + 1)) ** size
        sigma = math.sqrt(exact * (1 - exact) / trials)
        assert abs(accepted / trials - exact) <= 3 * sigma

    def test_soundness_non_increasing_in_rows(self, rng):
        n, bad, trials = 31, 3, 300
        code = lecc_params(n + 1)
        inputs = rng.integers(0, P, (n + 1, 1), dtype=np.uint64)
        slices = slices_of(lecc_encode(code, inputs)).copy()
        slices[rng.choice(n + 1, size=bad, replace=False), 0, 0] ^= np.uint64(1)
        rates = []
        for size in (1, 4, 8, 16):
            rates.append(np.mean([tree_encoding_check(code, inputs, slices, sample_rows(n, size, rng)).accepted
                                  for _ in range(trials)]))
        slack = 3 * math.sqrt(0.25 / trials)
        assert all(later <= earlier + slack for earlier, later in zip(rates, rates[1:]))
        assert rates[-1] < rates[0]


class TestSpotCheckBackend:
    """Commitment-backed spot checks of the evaluation statement."""

    def _verify(self, pub, proof, held, rng):
        backend = SpotCheckBackend(16)
        limbs = pack_blocks(held, pub.width)
        return backend.verify(pub, proof.commitment, lambda blocks: limbs[blocks],
                              lambda positions: proof.open(positions), rng)

    def test_honest_accepts(self, rng):
        pub, blocks, bits = make_statement(63, rng)
        assert statement_holds(pub, blocks)
        proof = SpotCheckBackend(16).prove(pub, blocks, bits)
        assert self._verify(pub, proof, blocks, rng).accepted

    def test_query_count(self, frozen):
        assert params.query_count(255, 16) == frozen["query_count_255_16"]

    def test_truncated_proof_rejects(self, rng):
        pub, blocks, bits = make_statement(31, rng)
        short = SpotCheckBackend(16).prove(pub, blocks[:-1], bits)
        assert self._verify(pub, short, blocks, rng).reason == "proof-length"

    def test_out_of_range_opening_rejects(self, rng):
        pub, blocks, bits = make_statement(31, rng)
        proof = SpotCheckBackend(16).prove(pub, blocks, bits)
        assert proof.open((len(blocks) + 5,)) is None
        backend = SpotCheckBackend(16)
        limbs = pack_blocks(blocks, pub.width)
        shifted = backend.verify(pub, proof.commitment, lambda b: limbs[b],
                                 lambda positions: proof.open(tuple(p + 1 for p in positions)), rng)
        assert not shifted.accepted

    def test_committed_block_differs_from_held_block(self, rng):
        pub, blocks, bits = make_statement(31, rng)
        forged = list(blocks)
        forged[3] = blocks[4]
        proof = SpotCheckBackend(16).prove(pub, forged, bits)
        # 16 * 6 queries cover all 32 blocks, so block 3 is always opened
        assert self._verify(pub, proof, blocks, rng).reason == "input-mismatch"

    def test_one_falsified_output_against_bound(self, rng):
        n, trials = 255, 300
        pub, blocks, bits = make_statement(n, rng)
        target = 100
        held = list(blocks)
        held[target] = held[target - 1]  # a well-formed block whose output is wrong for index target
        assert not statement_holds(pub, held)
        proof = SpotCheckBackend(16).prove(pub, held, bits)
        q = params.query_count(n, 16)
        accepted = sum(self._verify(pub, proof, held, rng).accepted for _ in range(trials))
        exact = 1 - q / (n + 1)
        bound = (1 - 1 / (n + 1)) ** q
        assert exact <= bound
        assert accepted / trials <= bound + 3 * math.sqrt(bound * (1 - bound) / trials)
        assert abs(accepted / trials - exact) <= 3 * math.sqrt(exact * (1 - exact) / trials)

    def test_global_function_reads_every_block(self, rng):
        pub, blocks, bits = make_statement(15, rng, "bit-sum")
        sampled, needed = SpotCheckBackend(16).plan(pub, rng)
        assert 0 in sampled.tolist()
        assert needed == tuple(range(16))


class TestMultiverifier:
    """End-to-end multi-verifier proof orchestration."""

    def test_honest_accepts_and_informs_everyone(self, rng):
        pub, blocks, bits = make_statement(255, rng)
        outcome = multiverifier_proof_run(pub, blocks, bits, 16, rng)
        assert outcome.accepted and outcome.stage == "done"
        assert outcome.informed.all()
        assert len(outcome.plan.rows) == params.query_count(255, 16)

    def test_wrong_function_rejected(self, rng):
        for _ in range(20):
            pub, blocks, bits = make_statement(255, rng, "concatenation", evaluated="identity")
            outcome = multiverifier_proof_run(pub, blocks, bits, 16, rng)
            assert not outcome.accepted and outcome.reason == "evaluation"

    @pytest.mark.parametrize("stage", ["codeword", "commit", "open"])
    def test_prover_abort_rejects(self, stage, rng):
        pub, blocks, bits = make_statement(63, rng)
        outcome = multiverifier_proof_run(pub, blocks, bits, 16, rng, prover=AbortAt(stage))
        assert not outcome.accepted
        assert outcome.informed.all()

    def test_flipped_seed_bit_rejects(self, rng):
        for _ in range(10):
            pub, blocks, bits = make_statement(63, rng)
            assert not multiverifier_proof_run(pub, blocks, bits, 16, rng, prover=FlipBit()).accepted

    def test_corrupted_codeword_rejected_when_rows_hit(self, rng):
        pub, blocks, bits = make_statement(63, rng)
        outcome = multiverifier_proof_run(pub, blocks, bits, 16, rng, prover=CorruptSlices(np.arange(64)))
        assert outcome.stage == "encoding" and outcome.reason == "mismatch"

    def test_network_costs_are_polylog(self, rng):
        n, kappa = 255, 16
        pub, blocks, bits = make_statement(n, rng)
        net = Network(n + 1, AdversarySpec(), record="off")
        outcome = multiverifier_proof_run(pub, blocks, bits, kappa, rng, transport=UserTransport(net))
        assert outcome.accepted
        users = slice(1, None)
        log_n = math.log2(n + 1)
        msgs = net.metrics.messages_sent[users] + net.metrics.messages_received[users]
        # every helper handles O(|S| log n) routed messages, |S| = kappa log 4n
        assert msgs.max() <= 4 * kappa * (log_n + 2) * log_n
        assert net.metrics.compute_ops[users].max() <= 64 * kappa * (log_n + 2) * pub.width
