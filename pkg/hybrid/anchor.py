#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""A mock public DLT: an append-only log of anchor transactions.

Transactions get sequential ids and the simulated time of their
submission; they become readable once ``confirmation_latency`` has elapsed
on the log's clock. There is no way to change or remove a transaction once
submitted. Submissions are serialized by a lock, so concurrent writers see
a single total order while readers observe a prefix.

The persisted form is ``b"HYBA"``, a version byte, the confirmation
latency and the canonically encoded transactions. A loaded log is a frozen
snapshot: its clock stands at the confirmation time of its last
transaction.
"""

from __future__ import absolute_import, division, print_function, with_statement

import io
import threading

from hybrid.errors import AnchorError, ProtocolError
from hybrid.identity import ActorId
from hybrid.log import anchor_log
from hybrid.protocol import (
    AnchorTxn, BatchPayload, ExtendPayload, InitPayload, Reader, Writer,
    decode, encode)

LOG_MAGIC = b"HYBA"
LOG_VERSION = 1


class AnchorLog(object):

    def __init__(self, clock=None, confirmation_latency=0):
        self._txns = []
        self._lock = threading.Lock()
        self._clock = clock
        self.confirmation_latency = confirmation_latency

    def now(self):
        if self._clock is not None:
            return self._clock()
        with self._lock:
            if not self._txns:
                return 0
            return max(t.timestamp for t in self._txns) + \
                self.confirmation_latency

    def submit(self, address, payload, now=None):
        """Appends a transaction and returns its id."""
        timestamp = self.now() if now is None else now
        with self._lock:
            txn = AnchorTxn(len(self._txns), ActorId(address), timestamp,
                            payload)
            self._txns.append(txn)
        anchor_log.debug("txn %d by %s: %s", txn.txn_id, txn.address,
                         type(payload).__name__)
        return txn.txn_id

    def is_confirmed(self, txn, now=None):
        now = self.now() if now is None else now
        return txn.timestamp + self.confirmation_latency <= now

    def read_all(self, address=None, now=None):
        """Confirmed transactions, in submission order, optionally only
        those written by ``address``."""
        now = self.now() if now is None else now
        with self._lock:
            txns = list(self._txns)
        return [t for t in txns
                if self.is_confirmed(t, now) and
                (address is None or t.address == address)]

    def get(self, txn_id, now=None):
        """The confirmed transaction with this id, or None."""
        with self._lock:
            if not 0 <= txn_id < len(self._txns):
                return None
            txn = self._txns[txn_id]
        return txn if self.is_confirmed(txn, now) else None

    def is_submitted(self, txn_id):
        with self._lock:
            return 0 <= txn_id < len(self._txns)

    def __len__(self):
        with self._lock:
            return len(self._txns)

    @property
    def txns(self):
        """Every submitted transaction, confirmed or not."""
        with self._lock:
            return tuple(self._txns)

    def canonical_bytes(self):
        w = Writer()
        w.u64(self.confirmation_latency)
        txns = self.txns
        w.u32(len(txns))
        for txn in txns:
            w.var(encode(txn))
        return LOG_MAGIC + bytes([LOG_VERSION]) + w.getvalue()

    def persist(self, path):
        try:
            with io.open(path, "wb") as f:
                f.write(self.canonical_bytes())
        except (IOError, OSError) as e:
            raise AnchorError("IO_ERROR", str(e))

    @classmethod
    def from_bytes(cls, data):
        if data[:4] != LOG_MAGIC or data[4:5] != bytes([LOG_VERSION]):
            raise AnchorError("MALFORMED_FILE", "not an anchor log")
        try:
            r = Reader(data[5:])
            log = cls(confirmation_latency=r.u64())
            for expected_id in range(r.count(4)):
                txn = decode(r.var(), AnchorTxn)
                if txn.txn_id != expected_id:
                    raise AnchorError("MALFORMED_FILE",
                                      "txn id %d at position %d"
                                      % (txn.txn_id, expected_id))
                log._txns.append(txn)
            r.finish()
        except ProtocolError as e:
            raise AnchorError("MALFORMED_FILE", e.detail)
        return log

    @classmethod
    def load(cls, path):
        try:
            with io.open(path, "rb") as f:
                data = f.read()
        except (IOError, OSError) as e:
            raise AnchorError("IO_ERROR", str(e))
        log = cls.from_bytes(data)
        anchor_log.debug("loaded %d txns from %s", len(log), path)
        return log


def steps_of(payload):
    """Extension steps carried by a payload, in order."""
    if isinstance(payload, ExtendPayload):
        return [payload]
    if isinstance(payload, BatchPayload):
        return list(payload.steps)
    return []


def ledger_txns(txns, ledger_id):
    return [t for t in txns if t.payload.ledger_id == ledger_id]


def anchored_states(txns, ledger_id):
    """(digest, size) states published for a ledger: the first Init, then
    the new state of every extension step, as written (not verified)."""
    states = []
    for txn in ledger_txns(txns, ledger_id):
        if isinstance(txn.payload, InitPayload):
            if not states:
                states.append((txn.payload.digest, txn.payload.size))
            continue
        for step in steps_of(txn.payload):
            if states:
                states.append(step.new_state())
    return states
