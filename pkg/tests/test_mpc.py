import pytest

from bitpact import mpc
from bitpact.channel import ChannelError, MessageChannel
from bitpact.circuit import build_count_circuit, build_threshold_circuit, evaluate_plain
from bitpact.mpc import (
    MSG_AND_MASK,
    MSG_INPUT_SHARE,
    ProtocolError,
    TripleSet,
    deal_triples,
    decode_message,
    encode_message,
    pack_bits,
    run_secure_pair,
    share_input_bits,
    unpack_bits,
)
from bitpact.randomness import LocalRng


def to_bits(value, k):
    return [(value >> i) & 1 for i in range(k)]


class TestFraming:
    def test_pack_lsb_first(self):
        assert pack_bits([1, 0, 0, 0, 0, 0, 0, 0, 1]) == b"\x01\x01"

    def test_roundtrip(self):
        bits = [1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1]
        assert unpack_bits(pack_bits(bits), len(bits)) == bits

    def test_frame_layout(self):
        frame = encode_message(MSG_AND_MASK, [1, 1, 0])
        assert frame[:4] == b"\x00\x00\x00\x01"  # 1 payload byte
        assert frame[4] == MSG_AND_MASK
        assert frame[5] == 0b011

    def test_kind_mismatch_detected(self):
        frame = encode_message(MSG_AND_MASK, [1])
        with pytest.raises(ProtocolError):
            decode_message(frame, MSG_INPUT_SHARE, 1)


class TestDealTriples:
    def test_empty(self):
        ta, tb = deal_triples(0, LocalRng(1))
        assert len(ta) == len(tb) == 0

    def test_reconstruction(self):
        ta, tb = deal_triples(10_000, LocalRng(2))
        for _ in range(10_000):
            a0, b0, c0 = ta.take()
            a1, b1, c1 = tb.take()
            assert (a0 ^ a1) & (b0 ^ b1) == c0 ^ c1

    def test_share_marginals_uniform(self):
        ta, _ = deal_triples(100_000, LocalRng(3))
        totals = [0, 0, 0]
        for _ in range(100_000):
            t = ta.take()
            for i in range(3):
                totals[i] += t[i]
        for total in totals:
            assert abs(total / 100_000 - 0.5) < 0.01

    def test_exhaustion(self):
        ta, _ = deal_triples(1, LocalRng(4))
        ta.take()
        with pytest.raises(ProtocolError):
            ta.take()


class TestInputSharing:
    def test_shares_reconstruct(self):
        rng = LocalRng(5)
        for value in range(16):
            bits = to_bits(value, 4)
            keep, sent = share_input_bits(bits, rng)
            assert [k ^ s for k, s in zip(keep, sent)] == bits

    def test_sent_share_uniform(self):
        # One-time-pad masking: the wire share of a fixed input is uniform.
        rng = LocalRng(6)
        ones = [1] * 4
        totals = [0] * 4
        for _ in range(100_000):
            _, sent = share_input_bits(ones, rng)
            for i, b in enumerate(sent):
                totals[i] += b
        for total in totals:
            assert abs(total / 100_000 - 0.5) < 0.01

    def test_empty_input_no_messages(self):
        channel = MessageChannel(timeout=1.0)
        keep, peer = mpc.input_share([], LocalRng(7), channel.endpoint_a, "A", 0)
        assert keep == [] and peer == []
        assert channel.total_messages == 0


def secure_pair(circuit, a_bits, b_bits, seed):
    return run_secure_pair(
        circuit,
        a_bits,
        b_bits,
        LocalRng(seed),
        LocalRng(seed + 1),
        LocalRng(seed + 2),
    )


class TestSecureEvaluate:
    def test_threshold_simple(self):
        c = build_threshold_circuit(4, 2)
        out_a, _, out_b, _, _ = secure_pair(c, [1, 0, 1, 0], [1, 0, 1, 0], 10)
        assert out_a == out_b == [1]

    @pytest.mark.parametrize("k", range(1, 7))
    def test_exhaustive_threshold(self, k):
        c = build_threshold_circuit(k, (k + 1) // 2)
        for pair in range(1 << (2 * k)):
            a_bits = to_bits(pair & ((1 << k) - 1), k)
            b_bits = to_bits(pair >> k, k)
            expected = evaluate_plain(c, a_bits, b_bits)
            out_a, _, out_b, _, _ = secure_pair(c, a_bits, b_bits, pair)
            assert out_a == expected
            assert out_b == expected

    def test_count_circuit(self):
        c = build_count_circuit(5)
        for pair in (0, 37, 1023, 512):
            a_bits = to_bits(pair & 31, 5)
            b_bits = to_bits(pair >> 5, 5)
            expected = evaluate_plain(c, a_bits, b_bits)
            out_a, _, out_b, _, _ = secure_pair(c, a_bits, b_bits, pair)
            assert out_a == expected == out_b

    def test_triple_exhaustion(self):
        c = build_threshold_circuit(4, 2)
        short_a = TripleSet([(0, 0, 0)])
        channel = MessageChannel(timeout=1.0)
        with pytest.raises(ProtocolError):
            mpc.secure_evaluate(c, [1, 0, 1, 0], "A", channel.endpoint_a, short_a, LocalRng(1))

    def test_triple_consumption_equals_and_count(self):
        c = build_threshold_circuit(8, 4)
        triples_a, triples_b = deal_triples(c.and_count + 5, LocalRng(20))
        channel = MessageChannel()
        import threading

        results = {}

        def run_b():
            results["b"] = mpc.secure_evaluate(
                c, to_bits(200, 8), "B", channel.endpoint_b, triples_b, LocalRng(22)
            )

        t = threading.Thread(target=run_b)
        t.start()
        mpc.secure_evaluate(c, to_bits(100, 8), "A", channel.endpoint_a, triples_a, LocalRng(21))
        t.join()
        assert triples_a.consumed == c.and_count
        assert triples_b.consumed == c.and_count


class TestLeakageShape:
    def test_transcript_shape_input_independent(self):
        c = build_threshold_circuit(16, 8)
        rng = LocalRng(31)
        shapes = set()
        for trial in range(100):
            a_bits = to_bits(rng.getrandbits(16), 16)
            b_bits = to_bits(rng.getrandbits(16), 16)
            _, tr_a, _, tr_b, _ = secure_pair(c, a_bits, b_bits, 1000 + trial)
            shapes.add((tr_a.shape(), tr_b.shape()))
        assert len(shapes) == 1

    def test_round_count_tracks_and_depth(self):
        c = build_threshold_circuit(8, 4)
        _, tr_a, _, _, _ = secure_pair(c, to_bits(5, 8), to_bits(9, 8), 77)
        # input round + one round per AND level + output round
        assert tr_a.rounds == c.and_depth + 2

    def test_payload_bits_marginally_uniform(self):
        # Every on-wire payload bit (input masks, AND masks, output-open
        # shares) should be uniform for fixed inputs: each is one-time-pad
        # masked by dealer or local randomness.
        import threading

        c = build_threshold_circuit(4, 2)
        a_bits, b_bits = [1, 1, 0, 0], [1, 0, 1, 0]
        trials = 4000
        bit_totals: list[int] = []
        for trial in range(trials):
            channel = MessageChannel()
            sent_frames: list[bytes] = []
            orig_send = channel.endpoint_a.send

            def recording_send(payload, _orig=orig_send, _frames=sent_frames):
                _frames.append(payload)
                _orig(payload)

            channel.endpoint_a.send = recording_send
            triples_a, triples_b = deal_triples(c.and_count, LocalRng(5000 + 3 * trial))
            t = threading.Thread(
                target=mpc.secure_evaluate,
                args=(c, b_bits, "B", channel.endpoint_b, triples_b, LocalRng(5001 + 3 * trial)),
            )
            t.start()
            mpc.secure_evaluate(
                c, a_bits, "A", channel.endpoint_a, triples_a, LocalRng(5002 + 3 * trial)
            )
            t.join()
            bits = []
            for frame in sent_frames:
                for byte in frame[5:]:
                    bits.extend((byte >> i) & 1 for i in range(8))
            if not bit_totals:
                bit_totals = [0] * len(bits)
            for i, b in enumerate(bits):
                bit_totals[i] += b
        # 3-sigma band around 0.5; padding bit positions are constant 0
        # and excluded (they carry no information).
        sigma = (0.25 / trials) ** 0.5
        payload_positions = [i for i, total in enumerate(bit_totals) if total > 0]
        assert payload_positions, "no payload bits captured"
        for i in payload_positions:
            assert abs(bit_totals[i] / trials - 0.5) < 3 * sigma + 0.005


def test_channel_timeout():
    channel = MessageChannel(timeout=0.05)
    with pytest.raises(ChannelError):
        channel.endpoint_a.recv()
