"""In-memory duplex message channel between the two party endpoints.

Reliable, in-order, no duplication.  One writer and one reader per
direction; receives block (with a timeout guard so a desynchronized
test fails instead of hanging).
"""

from __future__ import annotations

import queue


class ChannelError(RuntimeError):
    """Raised on receive timeout or use of a closed channel."""


class _Closed:
    pass


_CLOSED = _Closed()


class ChannelEndpoint:
    def __init__(self, outbox: queue.Queue, inbox: queue.Queue, timeout: float):
        self._outbox = outbox
        self._inbox = inbox
        self._timeout = timeout
        self.sent = 0
        self.received = 0
        self.bytes_sent = 0

    def send(self, payload: bytes) -> None:
        self._outbox.put(payload)
        self.sent += 1
        self.bytes_sent += len(payload)

    def recv(self) -> bytes:
        try:
            item = self._inbox.get(timeout=self._timeout)
        except queue.Empty:
            raise ChannelError("receive timed out; peer desynchronized or dead")
        if isinstance(item, _Closed):
            raise ChannelError("channel closed by peer")
        self.received += 1
        return item

    def close(self) -> None:
        self._outbox.put(_CLOSED)


class MessageChannel:
    """Two FIFO queues, one per direction; hand endpoint_a to party A
    and endpoint_b to party B."""

    def __init__(self, timeout: float = 30.0):
        q_ab: queue.Queue = queue.Queue()
        q_ba: queue.Queue = queue.Queue()
        self.endpoint_a = ChannelEndpoint(q_ab, q_ba, timeout)
        self.endpoint_b = ChannelEndpoint(q_ba, q_ab, timeout)

    @property
    def total_messages(self) -> int:
        return self.endpoint_a.sent + self.endpoint_b.sent
