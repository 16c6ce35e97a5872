"""Boolean-circuit IR, plaintext evaluator, and the two protocol circuits:
the agreement-count function and the agreement-threshold function.

Constructed circuits use only the {XOR, AND, CONST1} basis (NOT is
XOR with CONST1), so XOR-sharing MPC pays communication only for AND
gates.  The adder tree is a fixed recursive ripple construction, making
gate counts reproducible; total gate count grows linearly in the input
width k (see GATE_COUNT_SLOPE).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

XOR = "XOR"
AND = "AND"
NOT = "NOT"
CONST0 = "CONST0"
CONST1 = "CONST1"

_UNARY = {NOT}
_NULLARY = {CONST0, CONST1}

# Empirical bound on total gates per input bit for the threshold
# constructor, valid for k in [1, 64] (asserted in the test suite).
GATE_COUNT_SLOPE = 12


@dataclass(frozen=True)
class Gate:
    kind: str
    a: int = -1  # first input wire, -1 for constants
    b: int = -1  # second input wire, -1 if unary/constant


@dataclass
class Circuit:
    """Topologically ordered gate list.  Wires [0, n_inputs) are the
    input wires; gate i produces wire n_inputs + i."""

    n_inputs: int
    gates: list[Gate]
    input_a_wires: tuple[int, ...]
    input_b_wires: tuple[int, ...]
    output_wires: tuple[int, ...]

    @property
    def n_wires(self) -> int:
        return self.n_inputs + len(self.gates)

    @property
    def and_count(self) -> int:
        return sum(1 for g in self.gates if g.kind == AND)

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    def and_depth_per_wire(self) -> list[int]:
        """AND-depth of every wire (input wires have depth 0).  Drives
        the MPC round structure."""
        depth = [0] * self.n_wires
        for i, g in enumerate(self.gates):
            w = self.n_inputs + i
            da = depth[g.a] if g.a >= 0 else 0
            db = depth[g.b] if g.b >= 0 else 0
            depth[w] = max(da, db) + (1 if g.kind == AND else 0)
        return depth

    @property
    def and_depth(self) -> int:
        depth = self.and_depth_per_wire()
        return max(depth) if depth else 0

    def validate(self) -> None:
        seen_inputs = set(self.input_a_wires) | set(self.input_b_wires)
        if set(self.input_a_wires) & set(self.input_b_wires):
            raise ValueError("input partitions overlap")
        if seen_inputs != set(range(self.n_inputs)):
            raise ValueError("input partitions do not cover input wires")
        for i, g in enumerate(self.gates):
            w = self.n_inputs + i
            if g.kind in _NULLARY:
                continue
            if not 0 <= g.a < w:
                raise ValueError(f"gate {i}: input wire {g.a} not earlier than {w}")
            if g.kind not in _UNARY and not 0 <= g.b < w:
                raise ValueError(f"gate {i}: input wire {g.b} not earlier than {w}")
        for w in self.output_wires:
            if not 0 <= w < self.n_wires:
                raise ValueError(f"output wire {w} out of range")

    def dump(self) -> str:
        """Debug dump: header lines then one gate per line."""
        lines = [
            "INPUTS_A " + " ".join(map(str, self.input_a_wires)),
            "INPUTS_B " + " ".join(map(str, self.input_b_wires)),
            "OUTPUTS " + " ".join(map(str, self.output_wires)),
        ]
        for i, g in enumerate(self.gates):
            w = self.n_inputs + i
            if g.kind in _NULLARY:
                lines.append(f"{w} {g.kind}")
            elif g.kind in _UNARY:
                lines.append(f"{w} {g.kind} {g.a}")
            else:
                lines.append(f"{w} {g.kind} {g.a} {g.b}")
        return "\n".join(lines) + "\n"


class _Builder:
    """Wire allocator over the {XOR, AND, CONST1} basis."""

    def __init__(self, n_inputs: int):
        self.n_inputs = n_inputs
        self.gates: list[Gate] = []
        self._const1: int | None = None

    def _emit(self, gate: Gate) -> int:
        self.gates.append(gate)
        return self.n_inputs + len(self.gates) - 1

    def xor(self, a: int, b: int) -> int:
        return self._emit(Gate(XOR, a, b))

    def and_(self, a: int, b: int) -> int:
        return self._emit(Gate(AND, a, b))

    def const1(self) -> int:
        if self._const1 is None:
            self._const1 = self._emit(Gate(CONST1))
        return self._const1

    def not_(self, a: int) -> int:
        return self.xor(a, self.const1())

    def or_(self, a: int, b: int) -> int:
        return self.xor(self.xor(a, b), self.and_(a, b))

    def xnor(self, a: int, b: int) -> int:
        return self.not_(self.xor(a, b))

    def add(self, xs: list[int], ys: list[int]) -> list[int]:
        """Ripple add of two little-endian binary numbers of possibly
        different widths; returns the (len+1)-wide sum without dropping
        the carry."""
        if len(xs) < len(ys):
            xs, ys = ys, xs
        out: list[int] = []
        carry: int | None = None
        for i, x in enumerate(xs):
            y = ys[i] if i < len(ys) else None
            if y is None and carry is None:
                out.append(x)
            elif y is None:
                s = self.xor(x, carry)
                carry = self.and_(x, carry)
                out.append(s)
            elif carry is None:
                out.append(self.xor(x, y))
                carry = self.and_(x, y)
            else:
                t = self.xor(x, y)
                out.append(self.xor(t, carry))
                carry = self.xor(self.and_(x, y), self.and_(carry, t))
        if carry is not None:
            out.append(carry)
        return out

    def popcount(self, bits: list[int]) -> list[int]:
        """Little-endian binary count of set bits, via a balanced adder
        tree of ripple adders."""
        if len(bits) == 1:
            return [bits[0]]
        mid = len(bits) // 2
        return self.add(self.popcount(bits[:mid]), self.popcount(bits[mid:]))

    def geq_const(self, value_bits: list[int], r: int) -> int:
        """1 iff the little-endian number value_bits >= constant r,
        via the borrow chain of value - r."""
        borrow: int | None = None  # None encodes constant 0
        for i, a in enumerate(value_bits):
            if (r >> i) & 1:
                # borrow' = NOT a  OR  (borrow AND a)
                if borrow is None:
                    borrow = self.not_(a)
                else:
                    borrow = self.or_(self.not_(a), self.and_(borrow, a))
            else:
                # borrow' = borrow AND NOT a
                if borrow is not None:
                    borrow = self.and_(borrow, self.not_(a))
        if borrow is None:
            return self.const1()
        return self.not_(borrow)


def output_width(k: int) -> int:
    """ceil(log2(k + 1)): the count ranges over {0, ..., k} inclusive,
    so k agreements must be representable."""
    w = 0
    while (1 << w) < k + 1:
        w += 1
    return max(w, 1)


def _agreement_bits(builder: _Builder, k: int) -> list[int]:
    # Input layout: wires 0..k-1 are party A's bits, k..2k-1 party B's.
    return [builder.xnor(i, k + i) for i in range(k)]


def build_count_circuit(k: int) -> Circuit:
    """Circuit taking k bits from each party and outputting the number
    of agreeing positions in binary, most significant bit first."""
    if k < 1:
        raise ValueError("k must be >= 1")
    builder = _Builder(2 * k)
    count = builder.popcount(_agreement_bits(builder, k))
    # The tree's width can exceed ceil(log2(k+1)) by always-zero high
    # bits; the count itself fits in output_width(k) bits.
    count = count[: output_width(k)]
    circuit = Circuit(
        n_inputs=2 * k,
        gates=builder.gates,
        input_a_wires=tuple(range(k)),
        input_b_wires=tuple(range(k, 2 * k)),
        output_wires=tuple(reversed(count)),  # MSB first
    )
    circuit.validate()
    return circuit


def build_threshold_circuit(k: int, r: int) -> Circuit:
    """Circuit outputting a single bit: 1 iff the agreement count of the
    two k-bit inputs is >= r."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 <= r <= k:
        raise ValueError(f"r={r} out of [0, {k}]")
    builder = _Builder(2 * k)
    count = builder.popcount(_agreement_bits(builder, k))
    out = builder.geq_const(count, r)
    circuit = Circuit(
        n_inputs=2 * k,
        gates=builder.gates,
        input_a_wires=tuple(range(k)),
        input_b_wires=tuple(range(k, 2 * k)),
        output_wires=(out,),
    )
    circuit.validate()
    return circuit


def _eval_words(c: Circuit, a_words: Sequence[int], b_words: Sequence[int], mask: int) -> list[int]:
    values = [0] * c.n_wires
    for wire, word in zip(c.input_a_wires, a_words):
        values[wire] = word & mask
    for wire, word in zip(c.input_b_wires, b_words):
        values[wire] = word & mask
    base = c.n_inputs
    for i, g in enumerate(c.gates):
        if g.kind == XOR:
            v = values[g.a] ^ values[g.b]
        elif g.kind == AND:
            v = values[g.a] & values[g.b]
        elif g.kind == NOT:
            v = ~values[g.a] & mask
        elif g.kind == CONST1:
            v = mask
        elif g.kind == CONST0:
            v = 0
        else:
            raise ValueError(f"unknown gate kind {g.kind}")
        values[base + i] = v
    return [values[w] for w in c.output_wires]


def evaluate_plain(c: Circuit, a_bits: Sequence[int], b_bits: Sequence[int]) -> list[int]:
    """Gate-by-gate plaintext evaluation; the reference oracle for the
    secure evaluator."""
    if len(a_bits) != len(c.input_a_wires):
        raise ValueError(f"expected {len(c.input_a_wires)} A-bits, got {len(a_bits)}")
    if len(b_bits) != len(c.input_b_wires):
        raise ValueError(f"expected {len(c.input_b_wires)} B-bits, got {len(b_bits)}")
    return _eval_words(c, a_bits, b_bits, 1)


def evaluate_bitsliced(
    c: Circuit, a_words: Sequence[int], b_words: Sequence[int], width: int
) -> list[int]:
    """Evaluate `width` independent instances at once: bit p of each
    input word is instance p's input bit.  Used by exhaustive tests."""
    if len(a_words) != len(c.input_a_wires) or len(b_words) != len(c.input_b_wires):
        raise ValueError("input word count mismatch")
    return _eval_words(c, a_words, b_words, (1 << width) - 1)
