#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Misbehaving drop-in replacements for the Notary and for nodes.

Each variant overrides a single hook of the honest implementation and
misbehaves once, at the first opportunity after its `FaultSpec` trigger
(a simulated time, a request index, or both) has been reached. The
simulator picks them by fault kind from `FAULT_CLASSES`.
"""

from __future__ import absolute_import, division, print_function, with_statement

import dataclasses

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from hybrid.errors import NotaryError
from hybrid.hashtree import verify_consistency
from hybrid.log import node_log, notary_log
from hybrid.node import Node
from hybrid.notary import Notary
from hybrid.protocol import ExtendPayload, InitPayload, Receipt, ReceiptKind
from hybrid.util import hexlify

NOTARY_FORK = "NOTARY_FORK"
NOTARY_UNAUTHORIZED_ACCEPT = "NOTARY_UNAUTHORIZED_ACCEPT"
ANCHOR_OMIT = "ANCHOR_OMIT"
DUPLICATE_INIT = "DUPLICATE_INIT"
NODE_TAMPER_BLOCK = "NODE_TAMPER_BLOCK"

FAULT_KINDS = (NOTARY_FORK, NOTARY_UNAUTHORIZED_ACCEPT, ANCHOR_OMIT,
               DUPLICATE_INIT, NODE_TAMPER_BLOCK)

@dataclass
class FaultSpec:
    kind: str
    time_ms: Optional[int] = None
    event: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def targets_notary(self):
        return self.kind != NODE_TAMPER_BLOCK

    def due(self, now, event_index=None):
        """True once every configured trigger has been reached."""
        if self.time_ms is not None and now < self.time_ms:
            return False
        if self.event is not None and \
                (event_index is None or event_index < self.event):
            return False
        return True


class _Armed(object):
    """Fires at most once, at the first chance after the trigger."""

    def __init__(self, fault):
        self.fault = fault
        self.fired = False

    def ready(self, now, event_index=None):
        return not self.fired and self.fault.due(now, event_index)

    def fire(self):
        self.fired = True


class _FaultyNotary(Notary):

    def __init__(self, config, anchor, clock=None, fault=None):
        super(_FaultyNotary, self).__init__(config, anchor, clock)
        self.trigger = _Armed(fault or FaultSpec(self.kind))

    def _ready(self):
        return self.trigger.ready(self.now(), self.request_index)


class ForkingNotary(_FaultyNotary):
    """Signs a stale extension on a parallel branch of the history while
    the official record keeps following the first branch."""

    kind = NOTARY_FORK

    def __init__(self, config, anchor, clock=None, fault=None):
        super(ForkingNotary, self).__init__(config, anchor, clock, fault)
        self._issued = {}

    def handle_extend(self, request, blocks=None):
        record = self.records.get(bytes(request.ledger_id))
        prev = (request.prev_digest, request.prev_size)
        if record is not None and prev != record.state() and \
                (record.ledger_id, prev) in self._issued and self._ready():
            self._count_request()
            return self._fork(record, request, prev)
        return super(ForkingNotary, self).handle_extend(request, blocks)

    def _issue(self, record, kind, request, payload, state=None):
        receipt = super(ForkingNotary, self)._issue(record, kind, request,
                                                    payload, state)
        self._issued[(record.ledger_id, receipt.prev_state())] = receipt
        return receipt

    def _fork(self, record, request, prev):
        with record.lock:
            if not request.is_well_formed() or not verify_consistency(
                    request.prev_digest, request.prev_size,
                    request.new_digest, request.new_size, request.proof):
                raise NotaryError("INVALID_PROOF", "consistency proof rejected")
            self._check_authorized(record, request)
            sibling = self._issued[(record.ledger_id, prev)]
            seq, ref = sibling.notary_seq, sibling.anchor_ref
            receipt = Receipt(ReceiptKind.EXTENSION, request, self.now(), ref,
                              seq).signed_by(self.keypair)
        self.trigger.fire()
        notary_log.warning("fault %s: parallel receipt for %s at seq %d",
                           self.kind, hexlify(record.ledger_id), seq)
        return receipt


class PermissiveNotary(_FaultyNotary):
    """Accepts one extension signed by a key outside the author set."""

    kind = NOTARY_UNAUTHORIZED_ACCEPT

    def _check_authorized(self, record, request):
        try:
            super(PermissiveNotary, self)._check_authorized(record, request)
        except NotaryError as e:
            if e.code != "UNAUTHORIZED" or not self._ready():
                raise
            self.trigger.fire()
            notary_log.warning("fault %s: accepting %s for %s", self.kind,
                               e.detail, hexlify(record.ledger_id))


class OmittingNotary(_FaultyNotary):
    """Signs one extension receipt naming an anchor transaction it never
    submits."""

    kind = ANCHOR_OMIT

    def _anchor(self, payload, now):
        if isinstance(payload, ExtendPayload) and self._ready():
            self.trigger.fire()
            claimed = len(self.anchor)
            notary_log.warning("fault %s: claiming txn %d for %s without "
                               "submitting it", self.kind, claimed,
                               hexlify(payload.ledger_id))
            return claimed
        return super(OmittingNotary, self)._anchor(payload, now)


class ReinitializingNotary(_FaultyNotary):
    """Publishes a second Init for a ledger after one of its extensions."""

    kind = DUPLICATE_INIT

    def _anchor(self, payload, now):
        txn_id = super(ReinitializingNotary, self)._anchor(payload, now)
        if isinstance(payload, ExtendPayload) and self._ready():
            self.trigger.fire()
            extra = self.anchor.submit(
                self.address, InitPayload(payload.ledger_id,
                                          payload.new_digest,
                                          payload.new_size), now)
            notary_log.warning("fault %s: extra init txn %d for %s",
                               self.kind, extra, hexlify(payload.ledger_id))
        return txn_id


class TamperingNode(Node):
    """Flips one byte of the first block content it serves after the
    trigger."""

    kind = NODE_TAMPER_BLOCK

    def __init__(self, *args, **kwargs):
        fault = kwargs.pop("fault", None)
        super(TamperingNode, self).__init__(*args, **kwargs)
        self.trigger = _Armed(fault or FaultSpec(self.kind))

    def serve_blocks(self, ledger_id, indices, requester_key):
        archive = super(TamperingNode, self).serve_blocks(ledger_id, indices,
                                                          requester_key)
        if not self.trigger.ready(self.now()):
            return archive
        items = list(archive.items)
        for position, item in enumerate(items):
            if item.entry.is_present and item.entry.content:
                content = bytearray(item.entry.content)
                content[0] ^= 0x01
                entry = dataclasses.replace(item.entry, content=bytes(content))
                items[position] = dataclasses.replace(item, entry=entry)
                self.trigger.fire()
                node_log.warning("fault %s: tampered block %d of %s",
                                 self.kind, item.index, hexlify(ledger_id))
                return dataclasses.replace(archive, items=tuple(items))
        return archive


FAULT_CLASSES = {
    cls.kind: cls for cls in (ForkingNotary, PermissiveNotary, OmittingNotary,
                              ReinitializingNotary, TamperingNode)
}
