#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Node-local ledger replicas.

A replica keeps the ordered data blocks of one ledger together with the
chain of Notary receipts that made them official. Blocks become part of the
official state only when their receipt is committed; until then they are
merely staged. Erasing a block keeps its leaf digest, so the ledger digest,
every proof and every receipt stay valid afterwards.

Export archives are written as ``b"HYBX"``, a version byte and the
canonical encoding of `~hybrid.protocol.ExportArchive`.
"""

from __future__ import absolute_import, division, print_function, with_statement

import io

from collections import namedtuple

from hybrid.errors import LedgerError, ProtocolError
from hybrid.hashtree import (
    MerkleTree, prove_consistency, prove_inclusion, root_from_leaf_digests)
from hybrid.protocol import (
    BlockEntry, ExportArchive, ExportItem, decode, encode, verify_receipt)

ARCHIVE_MAGIC = b"HYBX"
ARCHIVE_VERSION = 1

Staged = namedtuple("Staged", "digest size proof")


class LedgerReplica(object):
    """One node's copy of a ledger; single writer, shareable snapshots."""

    def __init__(self, ledger_id, authors, notary_key):
        self.ledger_id = bytes(ledger_id)
        self.authors = authors
        self.notary_key = notary_key
        self.entries = []
        self.receipts = []
        self._tree = MerkleTree()

    @classmethod
    def open(cls, ledger_id, authors, notary_key):
        """An empty replica waiting for its creation receipt."""
        return cls(ledger_id, authors, notary_key)

    @property
    def official_digest(self):
        return self._tree.root()

    @property
    def official_size(self):
        return self._tree.size

    def state(self):
        return self.official_digest, self.official_size

    def leaf_digests(self):
        return self._tree.leaf_digests

    def content(self, index):
        return self.entries[index].content

    def stage_blocks(self, blocks):
        """Digest, size and consistency proof of the ledger extended by
        ``blocks``; the official state is left untouched."""
        if not blocks:
            raise LedgerError("EMPTY_APPEND", "nothing to append")
        tree = self._tree.copy()
        tree.extend(_entry(b).leaf_digest for b in blocks)
        proof = prove_consistency(tree.leaf_digests, self.official_size)
        return Staged(tree.root(), tree.size, proof)

    def commit(self, receipt, blocks):
        """Appends ``blocks`` (contents or `BlockEntry` values) under
        ``receipt``, which must extend the current official state."""
        verdict = verify_receipt(receipt, self.notary_key, self.authors)
        if not verdict:
            raise LedgerError("BAD_RECEIPT", verdict.reason)
        if receipt.ledger_id != self.ledger_id:
            raise LedgerError("RECEIPT_MISMATCH", "receipt for another ledger")
        if receipt.prev_state() != self.state():
            raise LedgerError("RECEIPT_MISMATCH",
                              "receipt does not extend the official digest")
        if receipt.notary_seq != len(self.receipts):
            raise LedgerError("RECEIPT_MISMATCH",
                              "expected notary_seq %d, got %d"
                              % (len(self.receipts), receipt.notary_seq))
        if receipt.is_creation != (not self.receipts):
            raise LedgerError("RECEIPT_MISMATCH", "receipt kind out of order")

        entries = [_entry(b) for b in blocks]
        new_digest, new_size = receipt.new_state()
        if self.official_size + len(entries) != new_size:
            raise LedgerError("RECEIPT_MISMATCH",
                              "%d blocks for a receipt of %d"
                              % (len(entries), new_size - self.official_size))
        if any(not e.matches() for e in entries):
            raise LedgerError("RECEIPT_MISMATCH",
                              "block content disagrees with its digest")
        tree = self._tree.copy()
        tree.extend(e.leaf_digest for e in entries)
        if tree.root() != new_digest:
            raise LedgerError("RECEIPT_MISMATCH",
                              "blocks do not produce the receipt digest")

        self.entries.extend(entries)
        self.receipts.append(receipt)
        self._tree = tree
        return self

    def erase_block(self, index):
        """Replaces a block with its digest; the ledger digest is unchanged."""
        if not 0 <= index < self.official_size:
            raise LedgerError("INDEX_OUT_OF_RANGE", "index %s" % index)
        entry = self.entries[index]
        if not entry.is_present:
            raise LedgerError("ALREADY_OMITTED", "index %d" % index)
        self.entries[index] = BlockEntry.omitted(entry.leaf_digest)
        return self

    def make_export(self, indices=None):
        """Archive of the selected blocks (all when ``indices`` is None),
        each with an inclusion proof against the official digest."""
        size = self.official_size
        if indices is None:
            indices = range(size)
        indices = sorted(set(indices))
        for index in indices:
            if not 0 <= index < size:
                raise LedgerError("INDEX_OUT_OF_RANGE", "index %s" % index)
        leaves = self._tree.leaf_digests
        items = tuple(ExportItem(i, self.entries[i],
                                 prove_inclusion(leaves, i))
                      for i in indices)
        return ExportArchive(self.ledger_id, self.authors,
                             tuple(self.receipts), items,
                             self.official_digest, size)

    def check_invariants(self):
        """Human readable list of violated replica invariants."""
        problems = []
        leaves = [e.leaf_digest for e in self.entries]
        if root_from_leaf_digests(leaves) != self.official_digest:
            problems.append("entries do not hash to the official digest")
        if any(not e.matches() for e in self.entries):
            problems.append("present entry disagrees with its digest")
        if self.receipts:
            if not self.receipts[0].is_creation:
                problems.append("first receipt is not a creation receipt")
            for seq, receipt in enumerate(self.receipts):
                if receipt.notary_seq != seq:
                    problems.append("notary_seq gap at %d" % seq)
            for earlier, later in zip(self.receipts, self.receipts[1:]):
                if later.prev_state() != earlier.new_state():
                    problems.append("receipt chain broken at seq %d"
                                    % later.notary_seq)
            if self.receipts[-1].new_state() != self.state():
                problems.append("official state differs from last receipt")
        elif self.entries:
            problems.append("entries without receipts")
        return problems

    @classmethod
    def rebuild(cls, ledger_id, authors, notary_key, receipts, blocks):
        """Replays ``receipts`` over a full list of recovered blocks."""
        replica = cls(ledger_id, authors, notary_key)
        for receipt in sorted(receipts, key=lambda r: r.notary_seq):
            _, prev_size = receipt.prev_state()
            _, new_size = receipt.new_state()
            replica.commit(receipt, blocks[prev_size:new_size])
        return replica


def _entry(block):
    if isinstance(block, BlockEntry):
        return block
    return BlockEntry.present(block)


def archive_bytes(archive):
    return ARCHIVE_MAGIC + bytes([ARCHIVE_VERSION]) + encode(archive)


def parse_archive(data):
    if data[:4] != ARCHIVE_MAGIC or data[4:5] != bytes([ARCHIVE_VERSION]):
        raise LedgerError("MALFORMED_FILE", "not an export archive")
    try:
        return decode(data[5:], ExportArchive)
    except ProtocolError as e:
        raise LedgerError("MALFORMED_FILE", e.detail)


def write_archive(path, archive):
    try:
        with io.open(path, "wb") as f:
            f.write(archive_bytes(archive))
    except (IOError, OSError) as e:
        raise LedgerError("IO_ERROR", str(e))


def read_archive(path):
    try:
        with io.open(path, "rb") as f:
            data = f.read()
    except (IOError, OSError) as e:
        raise LedgerError("IO_ERROR", str(e))
    return parse_archive(data)
