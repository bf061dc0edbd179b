import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmpc.committees import ideal_many_committees
from gmpc.experiments.attacks import Flood, InputBlocking, WrongEvaluation
from gmpc.netsim import AdversarySpec, Network, Strategy
from gmpc.proofsys import PerfectTransport, UserTransport
from gmpc.protocols import (
    FUNCTIONS,
    CircuitSpec,
    DirectParties,
    Gate,
    NxtMsgCall,
    bitonic_network,
    circuit_committees_run,
    committee_broadcast,
    format_circuit,
    general_protocol_run,
    get_function,
    ideal_world,
    legal_outcome,
    main_protocol_run,
    nxtmsg_oracle,
    open_states,
    parse_circuit,
    random_inputs,
    share_states,
    shuffle_run,
    sorting_circuit,
)


def honest_net(n, record="full"):
    return Network(n, AdversarySpec(), record=record)


def corrupted_net(n, strategy, rng, count=0, alpha=0.1, record="full"):
    spec = AdversarySpec.sample(n, alpha, rng, server_corrupted=True, strategy=strategy, count=count)
    strategy.attach(spec.corrupted_users, rng)
    return Network(n, spec, record=record)


def direct_run(function, inputs, rng, kappa=8, net=None, server=None):
    parties = DirectParties(len(inputs))
    parties.load(range(1, len(inputs)), inputs[1:])
    # tree party i is network user i + 1
    transport = UserTransport(net) if net is not None else PerfectTransport()
    kwargs = {} if server is None else {"server": server}
    return general_protocol_run(function, inputs[0], parties, transport, net, rng, kappa, **kwargs)


def kinds(net):
    return [kind for _, kind, *_ in net.transcript.records()]


class SplitRelay(Strategy):
    def __init__(self, altered):
        super().__init__()
        self.altered = frozenset(altered)

    def relay_broadcast(self, member, value):
        return value + b"!" if member in self.altered else value


class TestBroadcast:
    """Committee broadcast through the server."""

    def test_honest_unanimous(self):
        net = honest_net(20)
        out = committee_broadcast(net, 1, b"value", range(2, 18))
        assert set(out.outputs.values()) == {b"value"}
        assert not any(out.aborted.values()) and not out.sender_aborted

    def test_corrupted_sender_honest_server(self, rng):
        spec = AdversarySpec(frozenset({1}), False, Strategy(), 0.1)
        net = Network(20, spec)
        out = committee_broadcast(net, 1, b"equivocal", range(2, 18))
        assert out.honest_outputs(spec.corrupted_users) == {b"equivocal"}

    def test_split_server_all_abort(self, rng):
        members = list(range(2, 18))
        net = corrupted_net(20, SplitRelay(members[:8]), rng)
        out = committee_broadcast(net, 1, b"v", members)
        assert out.all_aborted
        assert all(net.aborted[m] for m in members)

    @settings(max_examples=60, deadline=None)
    @given(st.sets(st.integers(2, 17)))
    def test_agreement(self, altered):
        rng = np.random.default_rng(len(altered))
        net = corrupted_net(20, SplitRelay(altered), rng)
        out = committee_broadcast(net, 1, b"v", range(2, 18))
        assert len({v for v in out.outputs.values() if v is not None}) <= 1


class TestNxtMsg:
    """Shared next-message oracle."""

    def call(self, rng, present_count, threshold=6, size=8):
        state = share_states([b"state-a", b"b"], size, 2, rng)
        present = np.zeros((2, size), dtype=bool)
        present[:, :present_count] = True
        return NxtMsgCall(np.array([3, 4]), state, present, "step", threshold)

    def test_full_shares(self, rng):
        result = nxtmsg_oracle(self.call(rng, 8), lambda c, s: (s + b"+", s[::-1] + bytes([c])), rng)
        assert result.messages == [b"a-etats\x03", b"b\x04"]
        assert not result.bottom.any()
        assert open_states(result.state, np.ones((2, 8), dtype=bool)) == [b"state-a+", b"b+"]

    def test_threshold_minus_one_bottom(self, rng):
        result = nxtmsg_oracle(self.call(rng, 5), lambda c, s: (s, s), rng)
        assert result.bottom.all()
        assert result.messages == [None, None]

    def test_dictated(self, rng):
        result = nxtmsg_oracle(self.call(rng, 8), lambda c, s: (s, s), rng, dictated={4: (b"x", b"chosen")})
        assert result.messages == [b"state-a", b"chosen"]


class TestFunctions:
    """Function registry."""

    def test_registry_names(self):
        assert set(FUNCTIONS) == {"identity", "concatenation", "bit-sum", "sort"}
        assert get_function("concat").name == "concatenation"
        with pytest.raises(KeyError):
            get_function("median")

    def test_semantics(self):
        inputs = [b"\x09" * 2, b"\x03\x00", b"\x01\x00", b"\xff\xff"]
        assert get_function("identity", 2).evaluate(inputs)[0] == inputs[0]
        assert get_function("concatenation", 2).server_output(inputs) == b"".join(inputs)
        bits = 2 + 1 + 16
        assert get_function("bit-sum", 2).server_output(inputs) == bits.to_bytes(8, "little")
        assert get_function("sort", 2).server_output(inputs) == b"".join(sorted(inputs[1:]))

    @given(st.lists(st.binary(min_size=4, max_size=4), min_size=2, max_size=12))
    def test_sort_is_permutation(self, blocks):
        out = get_function("sort", 4).evaluate([b""] + blocks)
        assert sorted(out[1:]) == sorted(blocks) and out[1:] == sorted(out[1:])

    def test_default_input(self):
        assert get_function("sort", 8).default_input() == bytes(8)


class TestGeneral:
    """General protocol with the parties as single processes."""

    def test_honest_concat(self, rng):
        inputs = random_inputs(31, 8, rng)
        out = direct_run(get_function("concatenation"), inputs, rng)
        assert out.server_output == b"".join(inputs)
        assert out.proof.accepted and out.decrypted

    def test_wrong_function_rejected_before_decryption(self, rng):
        net = corrupted_net(32, WrongEvaluation("identity"), rng)
        inputs = random_inputs(31, 8, rng)
        out = direct_run(get_function("concatenation"), inputs, rng, net=net, server=net.adversary.server)
        assert out.aborted and out.stage == "proof" and not out.decrypted
        assert "decrypt-share" not in kinds(net)

    def test_flipped_bit_rejected(self, rng):
        class FlipSeed(Strategy):
            def statement_bits(self, bits):
                return [bits[0] ^ 1] + list(bits[1:])

        inputs = random_inputs(15, 8, rng)
        out = direct_run(get_function("bit-sum"), inputs, rng, kappa=16, server=FlipSeed())
        assert out.aborted and out.stage == "proof"

    def test_verdict_precedes_decryption(self, rng):
        net = honest_net(16)
        direct_run(get_function("sort"), random_inputs(15, 8, rng), rng, net=net)
        seen = kinds(net)
        assert seen.index("proof-verdict") < seen.index("decrypt-share")


class TestMain:
    """Committee-emulated end-to-end protocol."""

    n, kappa = 512, 32

    def test_honest_sort(self, rng):
        inputs = random_inputs(self.n, 8, rng)
        out = main_protocol_run(get_function("sort"), inputs, honest_net(self.n, "summary"), rng, self.kappa)
        assert out.output == b"".join(sorted(inputs[1:]))
        assert out.general.proof.accepted

    def test_blocking_alpha_n_matches_ideal(self, rng):
        attack = InputBlocking(count=math.floor(0.1 * self.n))
        net = corrupted_net(self.n, attack, rng, record="summary")
        blocked = attack.choose(self.n, net.adversary.alpha)
        function = get_function("concatenation")
        inputs = random_inputs(self.n, 8, rng)
        out = main_protocol_run(function, inputs, net, rng, self.kappa)
        assert out.blocked == blocked
        ideal = ideal_world(function, inputs, blocked, net.adversary.alpha)
        assert out.output == ideal.output and legal_outcome(ideal, out.output)

    @pytest.mark.parametrize("count", [52, 51 + 52 + 1])
    def test_blocking_beyond_tolerance_aborts(self, rng, count):
        attack = InputBlocking(count=count)
        net = corrupted_net(self.n, attack, rng, record="summary")
        attack.choose(self.n, net.adversary.alpha)
        out = main_protocol_run(get_function("sort"), random_inputs(self.n, 8, rng), net, rng, self.kappa)
        assert out.aborted and out.reason == "too-few-inputs"
        assert net.aborted[1:].all()

    def test_flooders_blocked_output_legal(self, rng):
        n = 128
        attack = Flood()
        spec = AdversarySpec.sample(n, 0.1, rng, strategy=attack)
        attack.attach(spec.corrupted_users, rng)
        net = Network(n, spec, delta=2, record="summary")
        victim = min(set(range(1, n + 1)) - spec.corrupted_users)
        blocked = attack.launch(net, victim)
        assert set(blocked.tolist()) == set(spec.corrupted_users)
        inputs = random_inputs(n, 8, rng)
        function = get_function("concatenation")
        out = main_protocol_run(function, inputs, net, rng, 16)
        ideal = ideal_world(function, inputs, out.blocked, spec.alpha)
        assert out.blocked == spec.corrupted_users
        assert out.output == ideal.output


def addition_circuit():
    return parse_circuit("""
        inputs a b c
        gate s add a b
        gate t add s c   # second gate
        outputs t s
    """)


def honest_tree(n, kappa, rng):
    return ideal_many_committees(n, kappa, np.ones(n + 1, dtype=bool), rng)


class Rewire(Strategy):
    """Swap the source lists of the first two gates that read different wires."""

    def rewire(self, wiring):
        wiring = dict(wiring)
        first = min(wiring)
        second = min(g for g in wiring if wiring[g] != wiring[first])
        wiring[first], wiring[second] = wiring[second], wiring[first]
        return wiring


class TestCircuits:
    """Gate-by-gate committee evaluation."""

    def test_two_gate_addition(self, rng):
        tree = honest_tree(16, 8, rng)
        out = circuit_committees_run(addition_circuit(), {"a": (1, 5), "b": (2, 7), "c": (3, 30)}, tree,
                                     honest_net(16), rng)
        assert out.outputs == [42, 12]

    def test_rewire_rejected(self, rng):
        tree = honest_tree(16, 8, rng)
        net = corrupted_net(16, Rewire(), rng)
        out = circuit_committees_run(addition_circuit(), {"a": (1, 5), "b": (2, 7), "c": (3, 30)}, tree, net, rng)
        assert out.outputs is None and out.stage == "wiring"
        assert net.aborted[1:].all()

    def test_forged_committee_rejected(self, rng):
        class Forge(Strategy):
            def forged_committees(self, n):
                return {1: (2, 3, 4)}

        tree = honest_tree(16, 8, rng)
        net = corrupted_net(16, Forge(), rng)
        out = circuit_committees_run(addition_circuit(), {"a": (1, 5), "b": (2, 7), "c": (3, 30)}, tree, net, rng)
        assert out.outputs is None and out.rejected_wires

    def test_roundtrip(self):
        circuit = addition_circuit()
        assert parse_circuit(format_circuit(circuit)) == circuit

    def test_parse_error(self):
        with pytest.raises(ValueError):
            parse_circuit("wire a b")

    def test_validate_rejects_cycle(self):
        circuit = CircuitSpec((Gate("a", "input", ()), Gate("x", "add", ("a", "y")), Gate("y", "add", ("x", "a"))),
                              ("a",), ("y",))
        with pytest.raises(ValueError):
            circuit.validate(16)

    def test_validate_rejects_deep(self):
        lines = ["inputs a"] + [f"gate g{k} add {'a' if k == 0 else f'g{k - 1}'} a" for k in range(20)] + ["outputs g19"]
        with pytest.raises(ValueError):
            parse_circuit("\n".join(lines)).validate(4, c=1)

    def test_depth_log_squared_user_ops(self, rng):
        n, kappa = 256, 16
        network = bitonic_network(n)
        circuit = sorting_circuit(network)
        circuit.validate(n)
        assert circuit.depth <= math.log2(n) ** 2
        values = rng.integers(0, 1 << 20, n).tolist()
        net = honest_net(n, "off")
        out = circuit_committees_run(circuit, {w: (k + 1, v) for k, (w, v) in enumerate(zip(circuit.inputs, values))},
                                     honest_tree(n, kappa, rng), net, rng, value_bytes=4)
        assert out.outputs == sorted(values)
        # C = 4 covers the 2 kappa share operations of every oracle step
        assert net.metrics.summary()["max_user_ops"] <= 4 * kappa * math.log2(n) ** 4


class TestSorting:
    """Bitonic sorting networks."""

    def test_example(self):
        assert bitonic_network(4).apply([3, 1, 2, 0]) == [0, 1, 2, 3]

    def test_depth_frozen(self, frozen):
        for width, depth in frozen["bitonic_depth"].items():
            assert bitonic_network(int(width)).depth == depth

    @pytest.mark.parametrize("width", [2, 4, 8, 16])
    def test_zero_one_principle(self, width):
        network = bitonic_network(width)
        vectors = np.array(list(itertools.product([0, 1], repeat=width)), dtype=np.int8)
        for layer in network.layers:
            lo = np.array([p[0] for p in layer])
            hi = np.array([p[1] for p in layer])
            a, b = vectors[:, lo].copy(), vectors[:, hi].copy()
            vectors[:, lo], vectors[:, hi] = np.minimum(a, b), np.maximum(a, b)
        assert (np.diff(vectors, axis=1) >= 0).all()

    @given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=40))
    def test_sorts_with_padding(self, values):
        assert bitonic_network(len(values)).apply(values) == sorted(values)


class TestShuffle:
    """Shuffle by random keys."""

    @pytest.mark.parametrize("n", [3, 4, 16])
    def test_multiset_conserved(self, rng, n):
        tree = honest_tree(n, min(n, 4), rng)
        inputs = [bytes([k % 3, k]) for k in range(n)]
        out = shuffle_run(inputs, tree, honest_net(n, "off"), rng, 4)
        assert sorted(out.output) == sorted(inputs)

    def test_rewire_aborts(self, rng):
        tree = honest_tree(4, 4, rng)
        net = corrupted_net(4, Rewire(), rng)
        out = shuffle_run([b"a", b"b", b"c", b"d"], tree, net, rng, 4)
        assert out.output is None
        assert net.aborted[1:].all()
