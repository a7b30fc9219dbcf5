#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

from __future__ import absolute_import, division, print_function, with_statement

import dataclasses
import io
import unittest

from tornado.escape import json_decode

from hybrid.anchor import AnchorLog
from hybrid.auditor import (
    BROKEN_CHAIN, DUPLICATE_INIT, INVALID_PROOF, MALFORMED_TXN,
    anchoring_violation, audit_anchor, verify_export,
    verify_misbehavior_proof)
from hybrid.faulty import ForkingNotary
from hybrid.ledgerstore import LedgerReplica
from hybrid.notary import DELAYED
from hybrid.protocol import (
    BatchPayload, BlockEntry, ExtendPayload, InitPayload, MisbehaviorProof,
    ProofKind)

from hybrid.test.util import (
    ALICE, BOB, CAROL, NOTARY, Chain, ManualClock, make_notary)


def _init(chain):
    digest, size = chain.state()
    return InitPayload(chain.ledger_id, digest, size)


class AuditAnchorTest(unittest.TestCase):

    def setUp(self):
        self.anchor = AnchorLog()
        self.chain = Chain(ALICE, [b"a", b"b"])
        self.anchor.submit(NOTARY.actor_id, _init(self.chain))

    def submit(self, payload, address=None):
        return self.anchor.submit(address or NOTARY.actor_id, payload)

    def audit(self):
        return audit_anchor(self.anchor, NOTARY.actor_id)

    def test_honest_history(self):
        notary, anchor = make_notary()
        chain = Chain(ALICE, [b"genesis"])
        notary.handle_create(chain.creation)
        notary.handle_extend(chain.extend([b"one"]))
        notary.handle_extend(chain.extend([b"two", b"three"]))
        report = audit_anchor(anchor, NOTARY.actor_id)
        self.assertTrue(report.coherent)
        ledger = report.get(chain.ledger_id)
        self.assertEqual([size for _, size in ledger.states], [1, 2, 4])
        self.assertEqual(ledger.states[-1], chain.state())
        self.assertEqual(ledger.to_dict()["status"], "coherent")

    def test_duplicate_init(self):
        self.submit(ExtendPayload.from_request(self.chain.extend([b"c"])))
        second = self.submit(_init(self.chain))
        report = self.audit()
        violations = report.violations(DUPLICATE_INIT)
        self.assertEqual(len(violations), 1)
        self.assertEqual(violations[0].txn_ids, (0, second))
        self.assertFalse(report.coherent)

    def test_broken_chain(self):
        stale = self.chain.fork()
        self.submit(ExtendPayload.from_request(self.chain.extend([b"c"])))
        txn_id = self.submit(ExtendPayload.from_request(stale.extend([b"d"])))
        violations = self.audit().violations()
        self.assertEqual([(v.kind, v.txn_ids) for v in violations],
                         [(BROKEN_CHAIN, (txn_id,))])

    def test_invalid_proof(self):
        other = self.chain.fork()
        other.extend([b"elsewhere"])
        payload = dataclasses.replace(
            ExtendPayload.from_request(self.chain.extend([b"c"])),
            new_digest=other.state()[0])
        self.submit(payload)
        self.assertEqual([v.kind for v in self.audit().violations()],
                         [INVALID_PROOF])

    def test_batch_steps_are_checked_in_order(self):
        first = ExtendPayload.from_request(self.chain.extend([b"c"]))
        second = ExtendPayload.from_request(self.chain.extend([b"d", b"e"]))
        self.submit(BatchPayload(self.chain.ledger_id, (first, second)))
        report = self.audit()
        self.assertTrue(report.coherent)
        self.assertEqual(report.get(self.chain.ledger_id).states[-1],
                         self.chain.state())

        self.submit(BatchPayload(self.chain.ledger_id, (second,)))
        self.assertEqual([v.kind for v in self.audit().violations()],
                         [BROKEN_CHAIN])

    def test_malformed_transactions(self):
        orphan = Chain(BOB, [b"x"])
        self.submit(ExtendPayload.from_request(orphan.extend([b"y"])))
        self.submit(BatchPayload(self.chain.ledger_id, ()))
        report = self.audit()
        self.assertEqual([v.kind for v in report.violations(MALFORMED_TXN)],
                         [MALFORMED_TXN, MALFORMED_TXN])
        self.assertFalse(report.is_coherent(orphan.ledger_id))
        self.assertFalse(report.is_coherent(self.chain.ledger_id))

    def test_other_addresses_are_ignored(self):
        self.submit(_init(self.chain), address=CAROL.actor_id)
        report = self.audit()
        self.assertTrue(report.coherent)
        self.assertEqual(list(report.ledgers), [self.chain.ledger_id])

    def test_unconfirmed_transactions_are_not_audited(self):
        clock = ManualClock(0)
        anchor = AnchorLog(clock=clock, confirmation_latency=30)
        anchor.submit(NOTARY.actor_id, _init(self.chain))
        anchor.submit(NOTARY.actor_id, _init(self.chain))
        self.assertTrue(audit_anchor(anchor, NOTARY.actor_id).coherent)
        clock.advance(30)
        self.assertFalse(audit_anchor(anchor, NOTARY.actor_id).coherent)

    def test_jsonl_report(self):
        self.submit(_init(self.chain))
        stream = io.StringIO()
        self.audit().write_jsonl(stream)
        records = [json_decode(line) for line in
                   stream.getvalue().splitlines()]
        self.assertEqual(len(records), 1)
        self.assertEqual(records[0]["status"], "violations")
        self.assertEqual(records[0]["size"], 2)
        self.assertEqual(records[0]["violations"][0]["txn_ids"], [0, 1])


class VerifyExportTest(unittest.TestCase):

    def setUp(self):
        self.notary, self.anchor = make_notary()
        self.chain = Chain(ALICE, [b"genesis", b"terms"], [BOB])
        self.replica = LedgerReplica.open(self.chain.ledger_id,
                                          self.chain.authors, NOTARY.public)
        self.replica.commit(self.notary.handle_create(self.chain.creation),
                            list(self.chain.blocks))
        blocks = [b"one", b"two"]
        receipt = self.notary.handle_extend(self.chain.extend(blocks))
        self.replica.commit(receipt, blocks)
        self.archive = self.replica.make_export()

    def verify(self, archive, anchor=None):
        return verify_export(archive, anchor or self.anchor, NOTARY.public)

    def replace_item(self, index, entry):
        items = tuple(dataclasses.replace(i, entry=entry)
                      if i.index == index else i for i in self.archive.items)
        return dataclasses.replace(self.archive, items=items)

    def test_accepts_honest_archive(self):
        verdict = self.verify(self.archive)
        self.assertTrue(verdict)
        self.assertIsNone(verdict.reason)

    def test_accepts_erased_blocks(self):
        self.replica.erase_block(2)
        archive = self.replica.make_export()
        self.assertFalse(archive.item(2).entry.is_present)
        self.assertTrue(self.verify(archive))

    def test_unknown_history(self):
        self.assertEqual(self.verify(self.archive, AnchorLog()).reason,
                         "HISTORY_INCOHERENT")

    def test_bad_receipts(self):
        cases = [
            dataclasses.replace(self.archive,
                                receipts=self.archive.receipts[1:]),
            dataclasses.replace(self.archive,
                                receipts=self.archive.receipts[::-1]),
            dataclasses.replace(self.archive, claimed_size=3),
        ]
        for archive in cases:
            self.assertEqual(self.verify(archive).reason, "BAD_RECEIPT")
        self.assertEqual(verify_export(self.archive, self.anchor,
                                       CAROL.public).reason,
                         "HISTORY_INCOHERENT")

    def test_receipts_disagreeing_with_anchor(self):
        # same key, different public history
        rival, rival_anchor = make_notary()
        chain = Chain(ALICE, [b"genesis", b"terms"], [BOB])
        rival.handle_create(chain.creation)
        rival.handle_extend(chain.extend([b"other"]))
        self.assertEqual(self.verify(self.archive, rival_anchor).reason,
                         "RECEIPT_ANCHOR_MISMATCH")

    def test_bad_inclusion(self):
        archive = self.replace_item(1, BlockEntry.present(b"forged"))
        self.assertEqual(self.verify(archive).reason, "BAD_INCLUSION")

    def test_content_mismatch(self):
        entry = self.archive.item(1).entry
        archive = self.replace_item(1, dataclasses.replace(
            entry, content=b"forged"))
        self.assertEqual(self.verify(archive).reason, "CONTENT_MISMATCH")


class MisbehaviorProofTest(unittest.TestCase):

    def setUp(self):
        self.notary, self.anchor = make_notary(cls=ForkingNotary)
        self.chain = Chain(ALICE, [b"genesis"], [BOB])
        self.creation = self.notary.handle_create(self.chain.creation)
        stale = self.chain.fork()
        self.first = self.notary.handle_extend(self.chain.extend([b"a"]))
        self.forked = self.notary.handle_extend(stale.extend([b"b"], BOB))

    def proof(self, kind, *receipts, **kwargs):
        return MisbehaviorProof(kind, self.chain.ledger_id, receipts, **kwargs)

    def verify(self, proof, key=NOTARY.public):
        return verify_misbehavior_proof(proof, key, self.anchor)

    def test_fork(self):
        self.assertTrue(self.verify(self.proof(
            ProofKind.FORK, self.first, self.forked)))
        self.assertEqual(self.verify(self.proof(
            ProofKind.FORK, self.first, self.first)).reason,
            "NOT_CONFLICTING")
        self.assertEqual(self.verify(self.proof(
            ProofKind.FORK, self.creation, self.first)).reason,
            "NOT_CONFLICTING")
        self.assertEqual(self.verify(self.proof(
            ProofKind.FORK, self.first)).reason, "MALFORMED")

    def test_foreign_key(self):
        self.assertEqual(self.verify(self.proof(
            ProofKind.FORK, self.first, self.forked), CAROL.public).reason,
            "BAD_NOTARY_SIG")

    def test_unauthorized_accept_needs_an_outsider(self):
        self.assertEqual(self.verify(self.proof(
            ProofKind.UNAUTHORIZED_ACCEPT, self.creation,
            self.first)).reason, "AUTHORIZED")
        self.assertEqual(self.verify(self.proof(
            ProofKind.UNAUTHORIZED_ACCEPT, self.first,
            self.forked)).reason, "MALFORMED")

    def test_anchor_desync_needs_the_log(self):
        proof = self.proof(ProofKind.ANCHOR_DESYNC, self.first,
                           anchor_txn_id=self.first.anchor_ref.txn_id)
        self.assertEqual(self.verify(proof).reason, "ANCHORED")
        self.assertEqual(verify_misbehavior_proof(proof, NOTARY.public).reason,
                         "ANCHOR_LOG_REQUIRED")
        # the forked receipt reuses the first one's transaction
        self.assertTrue(self.verify(self.proof(ProofKind.ANCHOR_DESYNC,
                                               self.forked)))


class AnchoringViolationTest(unittest.TestCase):

    def setUp(self):
        self.clock = ManualClock()
        self.notary, self.anchor = make_notary(
            self.clock, notarization=DELAYED, interval=100)
        self.chain = Chain(ALICE, [b"genesis"])
        self.creation = self.notary.handle_create(self.chain.creation)
        self.clock.advance(10)
        self.receipt = self.notary.handle_extend(self.chain.extend([b"x"]))

    def violation(self, receipt, now=None):
        return anchoring_violation(receipt, self.anchor, NOTARY.actor_id, now)

    def test_pending_until_deadline(self):
        self.assertTrue(self.receipt.anchor_ref.pending)
        self.assertEqual(self.receipt.anchor_ref.deadline, 100)
        self.assertIsNone(self.violation(self.receipt, 99))
        self.assertIn("deadline 100", self.violation(self.receipt, 100))

    def test_flushed_in_time(self):
        self.clock.advance(90)
        self.assertEqual(len(self.notary.flush()), 2)
        self.assertIsNone(self.violation(self.creation))
        self.assertIsNone(self.violation(self.receipt))
        self.assertTrue(audit_anchor(self.anchor, NOTARY.actor_id).coherent)

    def test_flushed_late(self):
        self.clock.advance(150)
        self.notary.flush()
        self.assertIsNotNone(self.violation(self.receipt))

    def test_immediate_receipt_waits_for_confirmation(self):
        clock = ManualClock()
        notary, anchor = make_notary(clock, anchor_latency=20)
        receipt = notary.handle_create(Chain(BOB, [b"y"]).creation)
        check = lambda now: anchoring_violation(receipt, anchor,
                                                NOTARY.actor_id, now)
        self.assertIsNone(check(5))
        self.assertIsNone(check(20))


if __name__ == "__main__":
    unittest.main()
