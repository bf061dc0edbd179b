"""Shallow circuits evaluated gate by gate by committees.

Every gate is computed by a committee of the tree. The server tells each
gate committee which committees hold its input wires; a committee accepts a
wire only with a certificate signed under the tree key that names the gate
the circuit says feeds it. Values move between committees through the
NxtMsg oracle and only output gates are revealed to the server.

Text format, one statement per line (``#`` starts a comment)::

    inputs a b c          # input wires, in user order
    gate s add a b        # name, op, argument wires
    gate m min s c
    outputs m             # wires revealed to the server, in order

Ops: add, mul, min, max, xor, const (its single argument is a literal).
"""
from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..committees.flood import committee_user_exchange, virtual_exchange
from ..committees.many import TREE_SERVER, CommitteeTree
from ..crypto import sig_gen, sig_sign, sig_verify
from ..crypto.encoding import frame
from ..netsim import Network
from .nxtmsg import CommitteeParties

OPS = {
    "add": lambda a: a[0] + a[1],
    "mul": lambda a: a[0] * a[1],
    "min": lambda a: min(a),
    "max": lambda a: max(a),
    "xor": lambda a: a[0] ^ a[1],
}


@dataclass(frozen=True)
class Gate:
    name: str
    op: str          # "input", "const" or a key of OPS
    args: tuple[str, ...]


@dataclass(frozen=True)
class CircuitSpec:
    gates: tuple[Gate, ...]      # inputs first, then gates in a topological order
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    @property
    def by_name(self) -> dict[str, Gate]:
        return {g.name: g for g in self.gates}

    def layers(self) -> list[list[Gate]]:
        """Gates grouped by depth; inputs and constants are layer 0."""
        depth: dict[str, int] = {}
        for gate in self.gates:
            depth[gate.name] = 0 if gate.op in ("input", "const") else 1 + max(depth[a] for a in gate.args)
        out: list[list[Gate]] = [[] for _ in range(max(depth.values(), default=0) + 1)]
        for gate in self.gates:
            out[depth[gate.name]].append(gate)
        return out

    @property
    def depth(self) -> int:
        return len(self.layers()) - 1

    def fan_out(self) -> dict[str, int]:
        counts = {g.name: 0 for g in self.gates}
        for gate in self.gates:
            if gate.op not in ("input", "const"):
                for a in gate.args:
                    counts[a] += 1
        return counts

    def validate(self, n: int, c: int = 2) -> None:
        """DAG with fan-in, fan-out and depth at most log^c n and size at most n log^c n."""
        bound = max(2, math.ceil(math.log2(max(n, 2)) ** c))
        seen: set[str] = set()
        for gate in self.gates:
            if gate.name in seen:
                raise ValueError(f"duplicate wire {gate.name!r}")
            if gate.op not in ("input", "const") and not set(gate.args) <= seen:
                raise ValueError(f"gate {gate.name!r} reads an undefined or later wire")
            if gate.op not in ("input", "const", *OPS):
                raise ValueError(f"unknown op {gate.op!r}")
            if len(gate.args) > bound:
                raise ValueError(f"gate {gate.name!r} exceeds fan-in {bound}")
            seen.add(gate.name)
        if not set(self.outputs) <= seen:
            raise ValueError("output wire is not defined")
        if max(self.fan_out().values(), default=0) > bound:
            raise ValueError(f"fan-out exceeds {bound}")
        if self.depth > bound:
            raise ValueError(f"depth {self.depth} exceeds {bound}")
        if len(self.gates) > n * bound:
            raise ValueError(f"size {len(self.gates)} exceeds {n * bound}")

    def evaluate(self, inputs: Mapping[str, int]) -> list[int]:
        """Plain evaluation (the reference)."""
        values: dict[str, int] = {}
        for gate in self.gates:
            values[gate.name] = _apply(gate, values, inputs)
        return [values[o] for o in self.outputs]


def _apply(gate: Gate, values: Mapping[str, int], inputs: Mapping[str, int]) -> int:
    if gate.op == "input":
        return inputs[gate.name]
    if gate.op == "const":
        return int(gate.args[0])
    return OPS[gate.op]([values[a] for a in gate.args])


def parse_circuit(text: str) -> CircuitSpec:
    gates: list[Gate] = []
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    for number, raw in enumerate(text.splitlines(), 1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        head, rest = words[0], words[1:]
        if head == "inputs":
            inputs += tuple(rest)
            gates.extend(Gate(w, "input", ()) for w in rest)
        elif head == "gate" and len(rest) >= 2:
            gates.append(Gate(rest[0], rest[1], tuple(rest[2:])))
        elif head == "outputs":
            outputs += tuple(rest)
        else:
            raise ValueError(f"line {number}: cannot parse {raw!r}")
    return CircuitSpec(tuple(gates), inputs, outputs)


def format_circuit(circuit: CircuitSpec) -> str:
    lines = [f"inputs {' '.join(circuit.inputs)}"]
    lines += [f"gate {g.name} {g.op} {' '.join(g.args)}".rstrip() for g in circuit.gates if g.op != "input"]
    lines.append(f"outputs {' '.join(circuit.outputs)}")
    return "\n".join(lines) + "\n"


def sorting_circuit(network) -> CircuitSpec:
    """Compare-exchange layers as min/max gates over wires x0..x{w-1}."""
    wires = [f"x{i}" for i in range(network.width)]
    gates = [Gate(w, "input", ()) for w in wires]
    for depth, layer in enumerate(network.layers):
        for lo, hi in layer:
            a, b = wires[lo], wires[hi]
            wires[lo], wires[hi] = f"l{depth}_{lo}", f"l{depth}_{hi}"
            gates.append(Gate(wires[lo], "min", (a, b)))
            gates.append(Gate(wires[hi], "max", (a, b)))
    return CircuitSpec(tuple(gates), tuple(f"x{i}" for i in range(network.width)), tuple(wires))


@dataclass
class CircuitOutcome:
    outputs: list[int] | None
    stage: str
    reason: str
    rejected_wires: list[tuple[str, str]]


def certificate_message(gate: str, committee: int, members) -> bytes:
    return frame([b"gate", gate.encode(), committee.to_bytes(8, "little"),
                  b"".join(int(m).to_bytes(4, "little") for m in members)])


@lru_cache(maxsize=1 << 16)
def _signed(sk: bytes, message: bytes) -> bytes:
    return sig_sign(sk, message)


@lru_cache(maxsize=1 << 16)
def _verified(pk: bytes, message: bytes, signature: bytes) -> bool:
    return sig_verify(pk, message, signature)


def assign_committees(circuit: CircuitSpec, n: int) -> dict[str, int]:
    """Gate g (in order) is computed by committee 1 + (g mod n)."""
    return {g.name: 1 + k % n for k, g in enumerate(circuit.gates)}


def circuit_committees_run(circuit: CircuitSpec, inputs: Mapping[str, tuple[int, int]], tree: CommitteeTree,
                           net: Network, rng: np.random.Generator, *, default: int = 0,
                           value_bytes: int = 16) -> CircuitOutcome:
    """inputs maps each input wire to (user, value); the user hands the value
    to the wire's committee. Values are non-negative integers."""
    n = tree.n
    spec = net.adversary
    server = spec.server
    matrix = tree.member_matrix()
    assign = assign_committees(circuit, n)
    names = [g.name for g in circuit.gates]
    index = {name: k for k, name in enumerate(names)}
    gate_rows = matrix[[assign[name] for name in names]]
    parties = CommitteeParties(net, gate_rows, rng)

    # certificates: each gate committee signs its role with the shared tree key
    certs = {name: _signed(tree.sk, certificate_message(name, assign[name], tree.committees[assign[name]]))
             for name in names}
    net.metrics.charge_ops(gate_rows[gate_rows >= 0], 1)

    # the server announces the wiring: for every gate, the source wires it claims
    honest_wiring = {g.name: list(g.args) for g in circuit.gates if g.op not in ("input", "const")}
    wiring = server.rewire({k: list(v) for k, v in honest_wiring.items()})
    forged = server.forged_committees(n) if spec.server_corrupted else {}
    rogue = sig_gen(len(tree.committees[-1]), rng) if forged else None
    rejected: list[tuple[str, str]] = []
    for gate, claimed in wiring.items():
        if claimed != honest_wiring.get(gate):
            rejected.append((gate, "inconsistent"))
            continue
        for source in claimed:
            committee = assign[source]
            cert = certs[source]
            if committee in forged:
                cert = sig_sign(rogue.sk, certificate_message(source, committee, forged[committee]))
            if not _verified(tree.pk, certificate_message(source, committee, tree.committees[committee]), cert):
                rejected.append((gate, source))
    checks = np.array([assign[g] for g in wiring], dtype=np.int64)
    virtual_exchange(net, "circuit-wiring", TREE_SERVER, checks, matrix, 96, server=TREE_SERVER)
    net.metrics.charge_ops(matrix[checks][matrix[checks] >= 0], 2)
    if rejected or set(wiring) != set(honest_wiring):
        return _abort(net, tree, matrix, "wiring", "rejected-wire", rejected or [("*", "missing")])

    # inputs from users
    input_gates = [g for g in circuit.gates if g.op == "input"]
    users = np.array([inputs[g.name][0] for g in input_gates], dtype=np.int64)
    committees = np.array([assign[g.name] for g in input_gates], dtype=np.int64)
    got = committee_user_exchange(net, "circuit-input", committees, users, matrix, value_bytes, to_user=False)
    values_in = [inputs[g.name][1] if ok else default for g, ok in zip(input_gates, got)]
    parties.load([index[g.name] for g in input_gates], [_encode(v, value_bytes) for v in values_in])
    consts = [g for g in circuit.gates if g.op == "const"]
    if consts:
        parties.load([index[g.name] for g in consts], [_encode(int(g.args[0]), value_bytes) for g in consts])

    # layer by layer; a wire that does not arrive aborts
    wire_bytes: dict[str, bytes] = {}
    for layer in circuit.layers()[1:]:
        src = np.array([assign[a] for g in layer for a in g.args], dtype=np.int64)
        dst = np.array([assign[g.name] for g in layer for _ in g.args], dtype=np.int64)
        same = src == dst
        arrived = np.ones(src.size, dtype=bool)
        arrived[~same] = virtual_exchange(net, "circuit-wire", src[~same], dst[~same], matrix, value_bytes,
                                          server=TREE_SERVER)
        if not arrived.all():
            return _abort(net, tree, matrix, "evaluate", "missing-wire", [])
        needed = sorted({a for g in layer for a in g.args} - set(wire_bytes))
        if needed:
            opened, bottom = parties.step("circuit-read", [index[a] for a in needed], lambda p, s: (s, s))
            if bottom.any():
                return _abort(net, tree, matrix, "evaluate", "bottom", [])
            wire_bytes.update(zip(needed, opened))

        def compute(party: int, state: bytes, layer_gates={g.name: g for g in layer}):
            gate = layer_gates[names[party]]
            value = OPS[gate.op]([_decode(wire_bytes[a]) for a in gate.args])
            return _encode(value, value_bytes), b""

        _, bottom = parties.step("circuit-gate", [index[g.name] for g in layer], compute)
        if bottom.any():
            return _abort(net, tree, matrix, "evaluate", "bottom", [])

    # output committees reveal to the server
    outs = [index[o] for o in circuit.outputs]
    revealed, bottom = parties.step("circuit-output", outs, lambda p, s: (s, s))
    got = virtual_exchange(net, "circuit-output", np.array([assign[o] for o in circuit.outputs]), TREE_SERVER,
                           matrix, value_bytes, server=TREE_SERVER)
    if bottom.any() or not got.all():
        return _abort(net, tree, matrix, "output", "missing-output", [])
    return CircuitOutcome([_decode(v) for v in revealed], "done", "ok", [])


def _abort(net: Network, tree: CommitteeTree, matrix: np.ndarray, stage: str, reason: str,
           rejected: list) -> CircuitOutcome:
    """Rejecting committees send bottom down the tree and every user aborts."""
    users = np.arange(1, tree.n + 1)
    virtual_exchange(net, "circuit-bottom", 0, users, matrix, 1, server=TREE_SERVER)
    net.abort(users[~net.aborted[1:]], f"circuit-abort:{stage}")
    return CircuitOutcome(None, stage, reason, rejected)


def _encode(value: int, width: int) -> bytes:
    return value.to_bytes(max(width, (value.bit_length() + 7) // 8), "little")


def _decode(data: bytes) -> int:
    return int.from_bytes(data, "little")
