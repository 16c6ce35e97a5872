"""Semi-honest two-party secure circuit evaluation.

XOR secret sharing with precomputed Beaver multiplication triples from
a simulated trusted dealer.  XOR and constant gates are free; each AND
gate consumes one triple, and all AND gates at the same depth share one
message exchange, so the round count depends only on the circuit.

Message framing (bit-exact): 4-byte big-endian payload length, 1-byte
message kind, payload bits packed 8 per byte, LSB of each byte first,
zero-padded.

The dealer stands in for an oblivious-transfer-based preprocessing
phase, which is a deployment gap, not a modeling one: everything after
dealing is the real protocol.
"""

from __future__ import annotations

import struct
import threading
from dataclasses import dataclass, field
from typing import Sequence

from bitpact.channel import ChannelEndpoint, ChannelError, MessageChannel
from bitpact.circuit import AND, CONST0, CONST1, NOT, XOR, Circuit
from bitpact.randomness import LocalRng

MSG_INPUT_SHARE = 0x01
MSG_AND_MASK = 0x02
MSG_OUTPUT_OPEN = 0x03

ROLE_A = "A"
ROLE_B = "B"


class ProtocolError(RuntimeError):
    """Framing or resource failure during secure evaluation."""


def pack_bits(bits: Sequence[int]) -> bytes:
    out = bytearray((len(bits) + 7) // 8)
    for i, b in enumerate(bits):
        if b:
            out[i >> 3] |= 1 << (i & 7)
    return bytes(out)


def unpack_bits(data: bytes, nbits: int) -> list[int]:
    if len(data) != (nbits + 7) // 8:
        raise ProtocolError(f"payload is {len(data)} bytes, expected bits {nbits}")
    return [(data[i >> 3] >> (i & 7)) & 1 for i in range(nbits)]


def encode_message(kind: int, bits: Sequence[int]) -> bytes:
    payload = pack_bits(bits)
    return struct.pack(">IB", len(payload), kind) + payload


def decode_message(raw: bytes, expect_kind: int, nbits: int) -> list[int]:
    if len(raw) < 5:
        raise ProtocolError("truncated frame")
    length, kind = struct.unpack(">IB", raw[:5])
    if kind != expect_kind:
        raise ProtocolError(f"expected message kind {expect_kind:#04x}, got {kind:#04x}")
    payload = raw[5:]
    if len(payload) != length:
        raise ProtocolError("frame length mismatch")
    return unpack_bits(payload, nbits)


@dataclass
class Transcript:
    """Per-message bookkeeping; its shape must depend only on the
    circuit, never on the inputs."""

    entries: list[tuple[str, int]] = field(default_factory=list)
    rounds: int = 0

    def log(self, direction: str, byte_len: int) -> None:
        self.entries.append((direction, byte_len))

    @property
    def message_count(self) -> int:
        return len(self.entries)

    @property
    def sent_count(self) -> int:
        return sum(1 for d, _ in self.entries if d == "send")

    def shape(self) -> tuple:
        return (tuple(self.entries), self.rounds)


class TripleSet:
    """One party's shares of Beaver triples, consumed front to back."""

    def __init__(self, triples: list[tuple[int, int, int]]):
        self._triples = triples
        self._cursor = 0

    def __len__(self) -> int:
        return len(self._triples)

    @property
    def consumed(self) -> int:
        return self._cursor

    @property
    def remaining(self) -> int:
        return len(self._triples) - self._cursor

    def take(self) -> tuple[int, int, int]:
        if self._cursor >= len(self._triples):
            raise ProtocolError("multiplication triples exhausted")
        t = self._triples[self._cursor]
        self._cursor += 1
        return t


def deal_triples(count: int, rng: LocalRng) -> tuple[TripleSet, TripleSet]:
    """Trusted-dealer triples: shares reconstruct to (a, b, a AND b),
    and each individual share is uniform."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    side_a: list[tuple[int, int, int]] = []
    side_b: list[tuple[int, int, int]] = []
    for _ in range(count):
        bits = rng.getrandbits(5)
        a, b = bits & 1, (bits >> 1) & 1
        a0, b0, c0 = (bits >> 2) & 1, (bits >> 3) & 1, (bits >> 4) & 1
        side_a.append((a0, b0, c0))
        side_b.append((a ^ a0, b ^ b0, (a & b) ^ c0))
    return TripleSet(side_a), TripleSet(side_b)


def share_input_bits(my_bits: Sequence[int], rng: LocalRng) -> tuple[list[int], list[int]]:
    """One-time-pad split of an input: (my retained shares, shares to
    send).  The sent shares are uniform regardless of the input."""
    mask = [rng.getrandbits(1) for _ in my_bits]
    return [b ^ m for b, m in zip(my_bits, mask)], mask


def input_share(
    my_bits: Sequence[int],
    rng: LocalRng,
    channel: ChannelEndpoint,
    role: str,
    peer_width: int,
    transcript: Transcript | None = None,
) -> tuple[list[int], list[int]]:
    """Symmetric input-sharing phase.  Returns (shares of own input
    wires, shares of peer input wires).  Zero-length inputs send no
    message."""
    keep, to_send = share_input_bits(my_bits, rng)
    if my_bits:
        frame = encode_message(MSG_INPUT_SHARE, to_send)
        channel.send(frame)
        if transcript:
            transcript.log("send", len(frame))
    peer_shares: list[int] = []
    if peer_width:
        raw = channel.recv()
        if transcript:
            transcript.log("recv", len(raw))
        peer_shares = decode_message(raw, MSG_INPUT_SHARE, peer_width)
    return keep, peer_shares


def secure_evaluate(
    c: Circuit,
    my_bits: Sequence[int],
    role: str,
    channel: ChannelEndpoint,
    triples: TripleSet,
    rng: LocalRng,
) -> tuple[list[int], Transcript]:
    """Run one party's side of the GMW evaluation.  The peer must run
    the same circuit concurrently with the opposite role.  Both parties
    obtain the plaintext output bits."""
    if role not in (ROLE_A, ROLE_B):
        raise ValueError(f"role must be A or B, got {role!r}")
    my_wires = c.input_a_wires if role == ROLE_A else c.input_b_wires
    peer_wires = c.input_b_wires if role == ROLE_A else c.input_a_wires
    if len(my_bits) != len(my_wires):
        raise ValueError(f"expected {len(my_wires)} input bits, got {len(my_bits)}")
    if triples.remaining < c.and_count:
        raise ProtocolError(
            f"need {c.and_count} triples, have {triples.remaining}"
        )
    transcript = Transcript()

    shares: list[int | None] = [None] * c.n_wires
    own, peer = input_share(my_bits, rng, channel, role, len(peer_wires), transcript)
    for wire, s in zip(my_wires, own):
        shares[wire] = s
    for wire, s in zip(peer_wires, peer):
        shares[wire] = s
    if my_bits or peer_wires:
        transcript.rounds += 1

    is_a = role == ROLE_A
    base = c.n_inputs
    remaining = list(range(len(c.gates)))
    while remaining:
        deferred: list[int] = []
        batch: list[int] = []
        for gi in remaining:
            g = c.gates[gi]
            if g.kind == CONST0:
                shares[base + gi] = 0
                continue
            if g.kind == CONST1:
                shares[base + gi] = 1 if is_a else 0
                continue
            a = shares[g.a]
            if a is None:
                deferred.append(gi)
                continue
            if g.kind == NOT:
                shares[base + gi] = a ^ 1 if is_a else a
                continue
            b = shares[g.b]
            if b is None:
                deferred.append(gi)
                continue
            if g.kind == XOR:
                shares[base + gi] = a ^ b
            elif g.kind == AND:
                batch.append(gi)
            else:
                raise ProtocolError(f"unknown gate kind {g.kind}")
        if batch:
            used = [triples.take() for _ in batch]
            masked: list[int] = []
            for gi, (ta, tb, _tc) in zip(batch, used):
                g = c.gates[gi]
                masked.append(shares[g.a] ^ ta)
                masked.append(shares[g.b] ^ tb)
            frame = encode_message(MSG_AND_MASK, masked)
            channel.send(frame)
            transcript.log("send", len(frame))
            raw = channel.recv()
            transcript.log("recv", len(raw))
            peer_masked = decode_message(raw, MSG_AND_MASK, len(masked))
            for pos, (gi, (ta, tb, tc)) in enumerate(zip(batch, used)):
                d = masked[2 * pos] ^ peer_masked[2 * pos]
                e = masked[2 * pos + 1] ^ peer_masked[2 * pos + 1]
                z = tc ^ (d & tb) ^ (e & ta)
                if is_a:
                    z ^= d & e
                shares[base + gi] = z
            transcript.rounds += 1
        elif len(deferred) == len(remaining):
            raise ProtocolError("circuit is not in topological order")
        remaining = deferred

    out_shares = [shares[w] for w in c.output_wires]
    frame = encode_message(MSG_OUTPUT_OPEN, out_shares)
    channel.send(frame)
    transcript.log("send", len(frame))
    raw = channel.recv()
    transcript.log("recv", len(raw))
    peer_out = decode_message(raw, MSG_OUTPUT_OPEN, len(out_shares))
    transcript.rounds += 1
    return [s ^ p for s, p in zip(out_shares, peer_out)], transcript


def run_secure_pair(
    c: Circuit,
    a_bits: Sequence[int],
    b_bits: Sequence[int],
    rng_a: LocalRng,
    rng_b: LocalRng,
    dealer_rng: LocalRng,
    channel: MessageChannel | None = None,
) -> tuple[list[int], Transcript, list[int], Transcript, MessageChannel]:
    """Test/driver convenience: deal triples, run both endpoints on two
    threads, and return both parties' results."""
    if channel is None:
        channel = MessageChannel()
    triples_a, triples_b = deal_triples(c.and_count, dealer_rng)
    results: dict[str, tuple[list[int], Transcript]] = {}
    errors: list[BaseException] = []

    def _run(role, bits, endpoint, triples, rng):
        try:
            results[role] = secure_evaluate(c, bits, role, endpoint, triples, rng)
        except BaseException as exc:  # surface peer failures in the caller
            errors.append(exc)

    t_b = threading.Thread(
        target=_run, args=(ROLE_B, b_bits, channel.endpoint_b, triples_b, rng_b)
    )
    t_b.start()
    _run(ROLE_A, a_bits, channel.endpoint_a, triples_a, rng_a)
    t_b.join()
    if errors:
        raise errors[0]
    out_a, tr_a = results[ROLE_A]
    out_b, tr_b = results[ROLE_B]
    return out_a, tr_a, out_b, tr_b, channel
