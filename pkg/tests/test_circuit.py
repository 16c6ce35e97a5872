import pytest

from bitpact.circuit import (
    GATE_COUNT_SLOPE,
    Circuit,
    Gate,
    build_count_circuit,
    build_threshold_circuit,
    evaluate_bitsliced,
    evaluate_plain,
    output_width,
)


def to_bits(value, k):
    return [(value >> i) & 1 for i in range(k)]


def from_msb(bits):
    out = 0
    for b in bits:
        out = (out << 1) | b
    return out


def agreement(a, b, k):
    return sum(1 for i in range(k) if ((a >> i) & 1) == ((b >> i) & 1))


def all_pair_columns(k):
    """Bit-sliced input columns covering all 2^(2k) input pairs at once:
    bit p of column i is pair p's bit i."""
    width = 1 << (2 * k)
    a_cols = [0] * k
    b_cols = [0] * k
    for p in range(width):
        for i in range(k):
            a_cols[i] |= ((p >> i) & 1) << p
            b_cols[i] |= ((p >> (k + i)) & 1) << p
    return a_cols, b_cols, width


def col_string(col, width):
    """Column as an index-by-instance character string ('0'/'1')."""
    return format(col, "b").zfill(width)[::-1]


class TestCountCircuit:
    def test_full_agreement(self):
        c = build_count_circuit(4)
        assert evaluate_plain(c, [1, 0, 1, 0], [1, 0, 1, 0]) == [1, 0, 0]

    def test_zero_agreement(self):
        c = build_count_circuit(4)
        assert evaluate_plain(c, [0, 0, 0, 0], [1, 1, 1, 1]) == [0, 0, 0]

    def test_hand_case(self):
        c = build_count_circuit(5)
        a = [int(ch) for ch in "10110"]
        b = [int(ch) for ch in "10011"]
        assert from_msb(evaluate_plain(c, a, b)) == 3

    def test_output_width(self):
        # The count ranges over {0..k}: k=4 must be representable.
        assert output_width(1) == 1
        assert output_width(4) == 3
        assert output_width(7) == 3
        assert output_width(8) == 4

    @pytest.mark.parametrize("k", range(1, 9))
    def test_exhaustive_vs_agreement_count(self, k):
        c = build_count_circuit(k)
        a_cols, b_cols, width = all_pair_columns(k)
        out_cols = evaluate_bitsliced(c, a_cols, b_cols, width)
        out_strs = [col_string(col, width) for col in out_cols]
        for p in range(width):
            got = from_msb([int(s[p]) for s in out_strs])
            assert got == agreement(p & ((1 << k) - 1), p >> k, k)


class TestThresholdCircuit:
    def test_threshold_zero_always_true(self):
        c = build_threshold_circuit(4, 0)
        assert evaluate_plain(c, [0, 1, 0, 1], [1, 0, 1, 0]) == [1]

    def test_simple_case(self):
        c = build_threshold_circuit(4, 2)
        assert evaluate_plain(c, [1, 0, 1, 0], [1, 0, 1, 0]) == [1]

    def test_r_out_of_range(self):
        with pytest.raises(ValueError):
            build_threshold_circuit(4, 5)

    @pytest.mark.parametrize("k", range(1, 9))
    def test_exhaustive_all_r(self, k):
        a_cols, b_cols, width = all_pair_columns(k)
        agreements = [agreement(p & ((1 << k) - 1), p >> k, k) for p in range(width)]
        for r in range(k + 1):
            c = build_threshold_circuit(k, r)
            (out_col,) = evaluate_bitsliced(c, a_cols, b_cols, width)
            out_str = col_string(out_col, width)
            for p in range(width):
                assert out_str[p] == ("1" if agreements[p] >= r else "0")


class TestGateCounts:
    def test_linear_gate_count(self):
        for k in range(1, 65):
            c = build_threshold_circuit(k, (k + 1) // 2)
            assert c.gate_count <= GATE_COUNT_SLOPE * k

    def test_and_count_input_independent(self):
        # AND count is a pure function of (k, r): rebuild and compare.
        for k in (3, 8, 16):
            r = (k + 1) // 2
            assert build_threshold_circuit(k, r).and_count == build_threshold_circuit(k, r).and_count


class TestEvaluatePlain:
    def test_single_xor_gate(self):
        c = Circuit(
            n_inputs=2,
            gates=[Gate("XOR", 0, 1)],
            input_a_wires=(0,),
            input_b_wires=(1,),
            output_wires=(2,),
        )
        assert evaluate_plain(c, [1], [1]) == [0]

    def test_input_length_mismatch(self):
        c = build_count_circuit(3)
        with pytest.raises(ValueError):
            evaluate_plain(c, [1, 0], [1, 0, 1])

    def test_random_circuits_vs_truth_table(self):
        # Independent interpreter: recursive truth-table expansion.
        import random

        def truth_eval(c, a_bits, b_bits):
            values = {}
            for w, bit in zip(c.input_a_wires, a_bits):
                values[w] = bit
            for w, bit in zip(c.input_b_wires, b_bits):
                values[w] = bit
            for i, g in enumerate(c.gates):
                w = c.n_inputs + i
                if g.kind == "CONST0":
                    values[w] = 0
                elif g.kind == "CONST1":
                    values[w] = 1
                elif g.kind == "NOT":
                    values[w] = 1 - values[g.a]
                elif g.kind == "XOR":
                    values[w] = values[g.a] ^ values[g.b]
                elif g.kind == "AND":
                    values[w] = values[g.a] & values[g.b]
            return [values[w] for w in c.output_wires]

        rng = random.Random(2024)
        for _ in range(40):
            k = rng.randint(1, 4)
            n_inputs = 2 * k
            gates = []
            for gi in range(rng.randint(1, 50)):
                limit = n_inputs + gi
                kind = rng.choice(["XOR", "AND", "NOT", "CONST0", "CONST1"])
                if kind in ("CONST0", "CONST1"):
                    gates.append(Gate(kind))
                elif kind == "NOT":
                    gates.append(Gate(kind, rng.randrange(limit)))
                else:
                    gates.append(Gate(kind, rng.randrange(limit), rng.randrange(limit)))
            outputs = tuple(
                rng.randrange(n_inputs + len(gates)) for _ in range(rng.randint(1, 3))
            )
            c = Circuit(
                n_inputs=n_inputs,
                gates=gates,
                input_a_wires=tuple(range(k)),
                input_b_wires=tuple(range(k, 2 * k)),
                output_wires=outputs,
            )
            c.validate()
            for pair in range(1 << (2 * k)):
                a_bits = to_bits(pair & ((1 << k) - 1), k)
                b_bits = to_bits(pair >> k, k)
                assert evaluate_plain(c, a_bits, b_bits) == truth_eval(c, a_bits, b_bits)


class TestDump:
    def test_dump_format(self):
        c = build_threshold_circuit(2, 1)
        text = c.dump()
        lines = text.strip().split("\n")
        assert lines[0].startswith("INPUTS_A ")
        assert lines[1].startswith("INPUTS_B ")
        assert lines[2].startswith("OUTPUTS ")
        assert len(lines) == 3 + c.gate_count
        first_gate = lines[3].split()
        assert int(first_gate[0]) == c.n_inputs
        assert first_gate[1] in {"XOR", "AND", "NOT", "CONST0", "CONST1"}


def test_validate_rejects_forward_reference():
    c = Circuit(
        n_inputs=2,
        gates=[Gate("XOR", 0, 3)],
        input_a_wires=(0,),
        input_b_wires=(1,),
        output_wires=(2,),
    )
    with pytest.raises(ValueError):
        c.validate()
