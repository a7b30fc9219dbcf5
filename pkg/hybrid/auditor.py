#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Verification available to external actors.

Everything here works from the anchor log, the Notary public key and the
material handed over (export archives, misbehavior proofs); nothing reads
node state, and this module never imports `hybrid.node`.
"""

from __future__ import absolute_import, division, print_function, with_statement

import sys

from collections import OrderedDict, namedtuple

from tornado.escape import json_encode

from hybrid.anchor import steps_of
from hybrid.hashtree import verify_consistency, verify_inclusion
from hybrid.identity import ActorId, check
from hybrid.log import audit_log
from hybrid.protocol import (
    BatchPayload, ExtendPayload, InitPayload, ProofKind, Verdict,
    verify_receipt)
from hybrid.util import hexlify

DUPLICATE_INIT = "DUPLICATE_INIT"
INVALID_PROOF = "INVALID_PROOF"
BROKEN_CHAIN = "BROKEN_CHAIN"
MALFORMED_TXN = "MALFORMED_TXN"

Violation = namedtuple("Violation", "kind txn_ids detail")


class LedgerAudit(object):
    """Audit outcome for one ledger id found on the anchor log."""

    def __init__(self, ledger_id):
        self.ledger_id = ledger_id
        self.violations = []
        self.init_txns = []
        self.states = []

    @property
    def coherent(self):
        return not self.violations

    def add(self, kind, txn_ids, detail=None):
        self.violations.append(Violation(kind, tuple(txn_ids), detail))

    def to_dict(self):
        return {
            "ledger_id": hexlify(self.ledger_id),
            "status": "coherent" if self.coherent else "violations",
            "size": self.states[-1][1] if self.states else 0,
            "violations": [{"kind": v.kind, "txn_ids": list(v.txn_ids),
                            "detail": v.detail} for v in self.violations],
        }


class AuditReport(object):

    def __init__(self):
        self.ledgers = OrderedDict()

    @property
    def coherent(self):
        return all(l.coherent for l in self.ledgers.values())

    def get(self, ledger_id):
        return self.ledgers.get(bytes(ledger_id))

    def is_coherent(self, ledger_id):
        ledger = self.get(ledger_id)
        return ledger is not None and ledger.coherent

    def violations(self, kind=None):
        return [v for l in self.ledgers.values() for v in l.violations
                if kind is None or v.kind == kind]

    def records(self):
        return [l.to_dict() for l in self.ledgers.values()]

    def write_jsonl(self, stream=None):
        stream = stream or sys.stdout
        for record in self.records():
            stream.write(json_encode(record) + "\n")


def audit_anchor(anchor_log, notary_address, now=None):
    """Checks every ledger history published by ``notary_address``."""
    report = AuditReport()
    for txn in anchor_log.read_all(ActorId(notary_address), now):
        payload = txn.payload
        ledger = report.ledgers.get(payload.ledger_id)
        if ledger is None:
            ledger = report.ledgers[payload.ledger_id] = \
                LedgerAudit(payload.ledger_id)

        if isinstance(payload, InitPayload):
            ledger.init_txns.append(txn.txn_id)
            if payload.size < 1:
                ledger.add(MALFORMED_TXN, [txn.txn_id], "empty initial ledger")
            elif not ledger.states:
                ledger.states.append((payload.digest, payload.size))
            continue

        if not ledger.states:
            ledger.add(MALFORMED_TXN, [txn.txn_id], "extension before init")
            continue
        if isinstance(payload, BatchPayload) and not payload.steps:
            ledger.add(MALFORMED_TXN, [txn.txn_id], "empty batch")
            continue
        for step in steps_of(payload):
            _check_step(ledger, txn.txn_id, step)

    for ledger in report.ledgers.values():
        if len(ledger.init_txns) > 1:
            ledger.add(DUPLICATE_INIT, ledger.init_txns,
                       "%d init transactions" % len(ledger.init_txns))
        if not ledger.coherent:
            audit_log.info("ledger %s: %s", hexlify(ledger.ledger_id),
                           ", ".join(v.kind for v in ledger.violations))
    return report


def _check_step(ledger, txn_id, step):
    if step.prev_state() != ledger.states[-1]:
        ledger.add(BROKEN_CHAIN, [txn_id],
                   "step from size %d, history at size %d"
                   % (step.prev_size, ledger.states[-1][1]))
    proof = step.proof
    if proof.old_size != step.prev_size or proof.new_size != step.new_size \
            or not verify_consistency(step.prev_digest, step.prev_size,
                                      step.new_digest, step.new_size, proof):
        ledger.add(INVALID_PROOF, [txn_id],
                   "%d -> %d" % (step.prev_size, step.new_size))
    ledger.states.append(step.new_state())


def verify_export(archive, anchor_log, notary_key, now=None):
    """Checks an export archive against the public history."""
    report = audit_anchor(anchor_log, ActorId.of(notary_key), now)
    ledger = report.get(archive.ledger_id)
    if ledger is None or not ledger.coherent:
        return Verdict.reject("HISTORY_INCOHERENT")

    receipts = archive.receipts
    if not receipts or not receipts[0].is_creation:
        return Verdict.reject("BAD_RECEIPT")
    authors = receipts[0].request.authors
    if authors != archive.authors:
        return Verdict.reject("BAD_RECEIPT")
    previous = None
    for seq, receipt in enumerate(receipts):
        if receipt.ledger_id != bytes(archive.ledger_id) or \
                receipt.notary_seq != seq or \
                not verify_receipt(receipt, notary_key, authors):
            return Verdict.reject("BAD_RECEIPT")
        if previous is not None and \
                receipt.prev_state() != previous.new_state():
            return Verdict.reject("BAD_RECEIPT")
        previous = receipt
    if previous.new_state() != (archive.claimed_digest, archive.claimed_size):
        return Verdict.reject("BAD_RECEIPT")

    states = [r.new_state() for r in receipts]
    if ledger.states[:len(states)] != states:
        return Verdict.reject("RECEIPT_ANCHOR_MISMATCH")

    for item in archive.items:
        if not verify_inclusion(archive.claimed_digest, archive.claimed_size,
                                item.index, item.entry.leaf_digest,
                                item.proof):
            return Verdict.reject("BAD_INCLUSION")
    for item in archive.items:
        if not item.entry.matches():
            return Verdict.reject("CONTENT_MISMATCH")
    return Verdict.accept()


def expected_payload(receipt):
    """The anchor payload a receipt commits the Notary to publish."""
    request = receipt.request
    if receipt.is_creation:
        return InitPayload(bytes(request.ledger_id), request.initial_digest,
                           request.initial_size)
    return ExtendPayload.from_request(request)


def anchoring_violation(receipt, anchor_log, notary_address, now=None):
    """Reason the receipt's anchoring obligation is provably unmet at
    ``now``, or None when it is met or cannot be judged yet."""
    now = anchor_log.now() if now is None else now
    latency = anchor_log.confirmation_latency
    expected = expected_payload(receipt)
    ref = receipt.anchor_ref

    if not ref.pending:
        txn = anchor_log.get(ref.txn_id, now)
        if txn is None:
            if now >= receipt.timestamp + latency:
                return "txn %d missing" % ref.txn_id
            return None
        if txn.address != notary_address:
            return "txn %d written by another address" % ref.txn_id
        if txn.payload != expected and expected not in steps_of(txn.payload):
            return "txn %d does not carry the receipt" % ref.txn_id
        return None

    if now < ref.deadline + latency:
        return None
    for txn in anchor_log.read_all(notary_address, now):
        if txn.timestamp > ref.deadline or \
                txn.payload.ledger_id != receipt.ledger_id:
            continue
        if txn.payload == expected or expected in steps_of(txn.payload):
            return None
    return "not anchored by deadline %d" % ref.deadline


def verify_misbehavior_proof(proof, notary_key, anchor_log=None, now=None):
    """Accepts a proof iff the evidence it carries convicts the Notary."""
    receipts = proof.receipts
    for receipt in receipts:
        if receipt.ledger_id != bytes(proof.ledger_id) or \
                receipt.notary_sig is None or \
                not check(notary_key, receipt.signing_bytes(),
                          receipt.notary_sig):
            return Verdict.reject("BAD_NOTARY_SIG")

    if proof.kind == ProofKind.FORK:
        if len(receipts) != 2:
            return Verdict.reject("MALFORMED")
        first, second = receipts
        if first.prev_state() != second.prev_state():
            return Verdict.reject("NOT_CONFLICTING")
        if first.new_state()[0] == second.new_state()[0]:
            return Verdict.reject("NOT_CONFLICTING")
        return Verdict.accept()

    if proof.kind == ProofKind.UNAUTHORIZED_ACCEPT:
        if len(receipts) != 2 or not receipts[0].is_creation:
            return Verdict.reject("MALFORMED")
        creation, offending = receipts
        authors = creation.request.authors
        if not verify_receipt(creation, notary_key, authors):
            return Verdict.reject("BAD_CREATION")
        verdict = verify_receipt(offending, notary_key, authors)
        if verdict.reason not in ("AUTHOR_NOT_IN_SET", "BAD_AUTHOR_SIG"):
            return Verdict.reject("AUTHORIZED")
        return Verdict.accept()

    if proof.kind == ProofKind.ANCHOR_DESYNC:
        if len(receipts) != 1:
            return Verdict.reject("MALFORMED")
        if anchor_log is None:
            return Verdict.reject("ANCHOR_LOG_REQUIRED")
        reason = anchoring_violation(receipts[0], anchor_log,
                                     ActorId.of(notary_key), now)
        if reason is None:
            return Verdict.reject("ANCHORED")
        return Verdict.accept()

    return Verdict.reject("MALFORMED")
