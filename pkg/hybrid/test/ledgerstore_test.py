#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

from __future__ import absolute_import, division, print_function, with_statement

import os
import shutil
import tempfile
import unittest

from hybrid.errors import LedgerError
from hybrid.hashtree import EMPTY_ROOT, verify_inclusion
from hybrid.ledgerstore import (
    LedgerReplica, archive_bytes, parse_archive, read_archive, write_archive)
from hybrid.protocol import encode

from hybrid.test.util import (
    ALICE, BOB, CAROL, NOTARY, Chain, make_notary, random_blocks, seeded)


class ReplicaTest(unittest.TestCase):

    def setUp(self):
        self.notary, self.anchor = make_notary()
        self.chain = Chain(ALICE, [b"genesis", b"terms"], [BOB])
        self.replica = LedgerReplica.open(self.chain.ledger_id,
                                          self.chain.authors, NOTARY.public)
        creation = self.notary.handle_create(self.chain.creation)
        self.replica.commit(creation, [b"genesis", b"terms"])

    def _extend(self, blocks):
        staged = self.replica.stage_blocks(blocks)
        request = self.chain.extend(blocks)
        self.assertEqual((staged.digest, staged.size), self.chain.state())
        receipt = self.notary.handle_extend(request)
        self.replica.commit(receipt, blocks)
        return receipt

    def test_empty_replica(self):
        replica = LedgerReplica.open(self.chain.ledger_id, self.chain.authors,
                                     NOTARY.public)
        self.assertEqual(replica.state(), (EMPTY_ROOT, 0))
        self.assertEqual(replica.check_invariants(), [])

    def test_commit_moves_official_state(self):
        self._extend([b"one", b"two"])
        self.assertEqual(self.replica.official_size, 4)
        self.assertEqual(self.replica.state(), self.chain.state())
        self.assertEqual(self.replica.content(3), b"two")
        self.assertEqual(self.replica.check_invariants(), [])

    def test_staging_leaves_state_untouched(self):
        before = self.replica.state()
        staged = self.replica.stage_blocks([b"x"])
        self.assertEqual(self.replica.state(), before)
        self.assertEqual(staged.proof.old_size, 2)
        with self.assertRaises(LedgerError) as cm:
            self.replica.stage_blocks([])
        self.assertEqual(cm.exception.code, "EMPTY_APPEND")

    def test_rejects_receipt_for_other_blocks(self):
        request = self.chain.extend([b"real"])
        receipt = self.notary.handle_extend(request)
        with self.assertRaises(LedgerError) as cm:
            self.replica.commit(receipt, [b"fake"])
        self.assertEqual(cm.exception.code, "RECEIPT_MISMATCH")
        self.assertEqual(self.replica.official_size, 2)

    def test_rejects_out_of_order_receipt(self):
        self.notary.handle_extend(self.chain.extend([b"skipped"]))
        later = self.notary.handle_extend(self.chain.extend([b"later"]))
        with self.assertRaises(LedgerError) as cm:
            self.replica.commit(later, [b"later"])
        self.assertEqual(cm.exception.code, "RECEIPT_MISMATCH")

    def test_rejects_forged_receipt(self):
        other, _ = make_notary(keypair=CAROL)
        receipt = other.handle_create(Chain(ALICE, [b"a"], nonce=5).creation)
        with self.assertRaises(LedgerError) as cm:
            self.replica.commit(receipt, [b"a"])
        self.assertEqual(cm.exception.code, "BAD_RECEIPT")

    def test_erase_keeps_digest(self):
        self._extend([b"personal data"])
        digest = self.replica.official_digest
        self.replica.erase_block(2)
        self.assertEqual(self.replica.official_digest, digest)
        self.assertIsNone(self.replica.content(2))
        self.assertEqual(self.replica.check_invariants(), [])
        with self.assertRaises(LedgerError) as cm:
            self.replica.erase_block(2)
        self.assertEqual(cm.exception.code, "ALREADY_OMITTED")
        with self.assertRaises(LedgerError) as cm:
            self.replica.erase_block(3)
        self.assertEqual(cm.exception.code, "INDEX_OUT_OF_RANGE")

    def test_export(self):
        self._extend([b"x"])
        self.replica.erase_block(0)
        archive = self.replica.make_export([2, 0, 2])
        self.assertEqual([i.index for i in archive.items], [0, 2])
        self.assertFalse(archive.item(0).entry.is_present)
        self.assertEqual(archive.item(2).entry.content, b"x")
        self.assertEqual(len(archive.receipts), 2)
        for item in archive.items:
            self.assertTrue(verify_inclusion(
                archive.claimed_digest, archive.claimed_size, item.index,
                item.entry.leaf_digest, item.proof))
        with self.assertRaises(LedgerError):
            self.replica.make_export([7])

    def test_rebuild(self):
        self._extend([b"x", b"y"])
        rebuilt = LedgerReplica.rebuild(
            self.chain.ledger_id, self.chain.authors, NOTARY.public,
            list(reversed(self.replica.receipts)), self.chain.blocks)
        self.assertEqual(rebuilt.state(), self.replica.state())
        self.assertEqual(rebuilt.content(3), b"y")


class ArchiveFileTest(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()
        notary, _ = make_notary()
        chain = Chain(ALICE, [b"a", b"b", b"c"])
        replica = LedgerReplica.open(chain.ledger_id, chain.authors,
                                     NOTARY.public)
        replica.commit(notary.handle_create(chain.creation), chain.blocks)
        self.archive = replica.make_export()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def test_file_round_trip(self):
        path = os.path.join(self.tmpdir, "ledger.hybx")
        write_archive(path, self.archive)
        self.assertEqual(read_archive(path), self.archive)

    def test_bad_magic(self):
        data = archive_bytes(self.archive)
        self.assertEqual(data[:4], b"HYBX")
        for bad in (b"XXXX" + data[4:], data[:4] + b"\x02" + data[5:],
                    data[:-3]):
            with self.assertRaises(LedgerError) as cm:
                parse_archive(bad)
            self.assertEqual(cm.exception.code, "MALFORMED_FILE")

    def test_missing_file(self):
        with self.assertRaises(LedgerError) as cm:
            read_archive(os.path.join(self.tmpdir, "missing.hybx"))
        self.assertEqual(cm.exception.code, "IO_ERROR")


class RandomErasureTest(unittest.TestCase):

    def setUp(self):
        self.tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmpdir)

    def _persisted(self, replica, anchor):
        archive_path = os.path.join(self.tmpdir, "ledger.hybx")
        log_path = os.path.join(self.tmpdir, "anchor.log")
        write_archive(archive_path, replica.make_export())
        anchor.persist(log_path)
        chunks = [archive_bytes(replica.make_export())]
        chunks.extend(encode(r) for r in replica.receipts)
        for path in (archive_path, log_path):
            with open(path, "rb") as f:
                chunks.append(f.read())
        return b"".join(chunks)

    def test_erased_content_leaves_no_trace(self):
        rng = seeded(200)
        for case in range(200):
            notary, anchor = make_notary()
            chain = Chain(ALICE, random_blocks(rng, rng.randint(1, 3), 24),
                          [BOB], nonce=case)
            replica = LedgerReplica.open(chain.ledger_id, chain.authors,
                                         NOTARY.public)
            replica.commit(notary.handle_create(chain.creation), chain.blocks)
            for _ in range(rng.randint(0, 3)):
                blocks = random_blocks(rng, rng.randint(1, 4), 24)
                replica.commit(notary.handle_extend(chain.extend(blocks)),
                               blocks)
            digest = replica.official_digest
            size = replica.official_size
            erased = set(rng.sample(range(size), rng.randint(1, size)))
            for index in sorted(erased):
                replica.erase_block(index)

            self.assertEqual(replica.official_digest, digest)
            self.assertEqual(replica.check_invariants(), [])
            data = self._persisted(replica, anchor)
            for index, block in enumerate(chain.blocks):
                if index in erased:
                    self.assertNotIn(block, data, "case %d" % case)
                else:
                    self.assertIn(block, data, "case %d" % case)
            archive = parse_archive(archive_bytes(replica.make_export()))
            self.assertEqual(archive.claimed_digest, digest)
            for item in archive.items:
                self.assertEqual(item.entry.is_present,
                                 item.index not in erased)
                self.assertTrue(verify_inclusion(
                    digest, size, item.index, item.entry.leaf_digest,
                    item.proof))


if __name__ == "__main__":
    unittest.main()
