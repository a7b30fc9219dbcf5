#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""The Notary: keeper of the single official history of every ledger.

The Notary validates ledger creation and extension requests, advances the
official (digest, size) of each ledger, publishes every step on the anchor
log under its own address and returns signed receipts. In the base mode it
never looks at data blocks. Three optional variations are supported:

* ``mode_repository``: requests carry their blocks; the Notary stores them,
  checks that they hash to the requested digests, certifies them and serves
  them back to authors (data recovery).
* ``mode_policy``: block 0 of every ledger holds a canonical `Policy` that
  the Notary enforces on every later request. Requires the repository.
* delayed notarization: receipts are returned at once, marked pending with
  a signed deadline, and the steps are anchored later by `Notary.flush` as
  one Batch transaction per ledger.

Requests for the same ledger are processed strictly one at a time under a
per-ledger lock; a global lock guards the ledger registry.
"""

from __future__ import absolute_import, division, print_function, with_statement

import io
import threading
import time

from collections import Counter
from dataclasses import dataclass

from tornado.util import ObjectDict

from hybrid.anchor import anchored_states
from hybrid.errors import NotaryError, ProtocolError
from hybrid.hashtree import EMPTY_ROOT, MerkleTree, leaf_hash, \
    verify_consistency
from hybrid.identity import ActorId, KeyPair, check
from hybrid.log import notary_log
from hybrid.protocol import (
    AnchorRef, AuthorSet, BatchPayload, BlockCertificate, ExtendPayload,
    InitPayload, Policy, Reader, Receipt, ReceiptKind, Writer, decode, encode)
from hybrid.util import hexlify

SNAPSHOT_MAGIC = b"HYBN"
SNAPSHOT_VERSION = 1

IMMEDIATE = "immediate"
DELAYED = "delayed"


@dataclass
class NotaryConfig:
    keypair: KeyPair
    mode_repository: bool = False
    mode_policy: bool = False
    notarization: str = IMMEDIATE
    interval: int = 0

    def __post_init__(self):
        if self.mode_policy and not self.mode_repository:
            raise NotaryError("INVALID_CONFIG",
                              "policy mode requires repository mode")
        if self.notarization not in (IMMEDIATE, DELAYED):
            raise NotaryError("INVALID_CONFIG",
                              "unknown notarization %r" % self.notarization)
        if self.notarization == DELAYED and self.interval <= 0:
            raise NotaryError("INVALID_CONFIG",
                              "delayed notarization needs an interval")

    @property
    def delayed(self):
        return self.notarization == DELAYED

    @classmethod
    def from_dict(cls, keypair, settings=None):
        """Builds a config from plain settings merged over the defaults."""
        options = dict(mode_repository=False, mode_policy=False,
                       notarization=IMMEDIATE, interval=0)
        options.update(settings or {})
        return cls(keypair, bool(options["mode_repository"]),
                   bool(options["mode_policy"]), options["notarization"],
                   int(options["interval"]))


class LedgerRecord(object):
    """The Notary's view of one ledger: official state, anchoring progress
    and, in repository mode, the stored blocks."""

    def __init__(self, ledger_id, authors, digest, size, policy=None):
        self.ledger_id = ledger_id
        self.authors = authors
        self.digest = digest
        self.size = size
        self.seq = 0
        self.policy = policy
        self.init_digest = digest
        self.init_size = size
        self.last_anchored_digest = EMPTY_ROOT
        self.last_anchored_size = 0
        self.pending_init = False
        self.pending_since = None
        self.pending_steps = []
        self.blocks = []
        self.lock = threading.Lock()

    def state(self):
        return self.digest, self.size

    def check_pending(self):
        """True iff the pending steps chain from the last anchored state to
        the official one."""
        if self.size < self.last_anchored_size:
            return False
        state = (self.last_anchored_digest, self.last_anchored_size)
        if self.pending_init:
            state = (self.init_digest, self.init_size)
        for step in self.pending_steps:
            if step.prev_state() != state:
                return False
            state = step.new_state()
        return state == self.state()

    def write(self, w):
        w.fixed(self.ledger_id, 16)
        self.authors.write(w)
        w.fixed(self.digest, 32)
        w.u64(self.size)
        w.u64(self.seq)
        w.flag(self.policy is not None)
        if self.policy is not None:
            w.var(encode(self.policy))
        w.fixed(self.init_digest, 32)
        w.u64(self.init_size)
        w.fixed(self.last_anchored_digest, 32)
        w.u64(self.last_anchored_size)
        w.flag(self.pending_init)
        w.flag(self.pending_since is not None)
        if self.pending_since is not None:
            w.u64(self.pending_since)
        w.u32(len(self.pending_steps))
        for step in self.pending_steps:
            w.var(encode(step))
        w.u32(len(self.blocks))
        for block in self.blocks:
            w.var(block)

    @classmethod
    def read(cls, r):
        ledger_id = r.fixed(16)
        authors = AuthorSet.read(r)
        record = cls(ledger_id, authors, r.fixed(32), r.u64())
        record.seq = r.u64()
        if r.flag():
            record.policy = decode(r.var(), Policy)
        record.init_digest, record.init_size = r.fixed(32), r.u64()
        record.last_anchored_digest = r.fixed(32)
        record.last_anchored_size = r.u64()
        record.pending_init = r.flag()
        record.pending_since = r.u64() if r.flag() else None
        record.pending_steps = [decode(r.var(), ExtendPayload)
                                for _ in range(r.count(4))]
        record.blocks = [r.var() for _ in range(r.count(4))]
        return record


class Notary(object):
    """Authoritative, publicly audited keeper of official ledger histories.

    ``clock`` returns simulated milliseconds; by default the wall clock is
    used.
    """

    def __init__(self, config, anchor, clock=None):
        self.config = config
        self.keypair = config.keypair
        self.public_key = config.keypair.public
        self.address = ActorId.of(self.public_key)
        self.anchor = anchor
        self._clock = clock
        self.records = {}
        self._registry_lock = threading.Lock()
        self._stats_lock = threading.Lock()
        self._request_index = 0
        self.stats = ObjectDict(requests=0, accepted=0, rejected=Counter(),
                                blocks_received=0)

    def now(self):
        if self._clock is not None:
            return self._clock()
        return int(time.time() * 1000)

    def handle_create(self, request, blocks=None):
        """Validates a creation request and returns its receipt (seq 0)."""
        self._count_request(blocks)
        with self._registry_lock:
            try:
                record = self._validate_create(request, blocks)
            except NotaryError as e:
                self._rejected(e, request)
                raise
            with record.lock:
                receipt = self._issue(record, ReceiptKind.CREATION, request,
                                      InitPayload(record.ledger_id,
                                                  record.digest, record.size))
            self.records[record.ledger_id] = record
        return receipt

    def handle_extend(self, request, blocks=None):
        """Validates an extension request and returns its receipt."""
        self._count_request(blocks)
        with self._registry_lock:
            record = self.records.get(bytes(request.ledger_id))
        if record is None:
            e = NotaryError("UNKNOWN_LEDGER", hexlify(request.ledger_id))
            self._rejected(e, request)
            raise e
        with record.lock:
            try:
                self._validate_extend(record, request, blocks)
            except NotaryError as e:
                self._rejected(e, request)
                raise
            receipt = self._issue(record, ReceiptKind.EXTENSION, request,
                                  ExtendPayload.from_request(request),
                                  (request.new_digest, request.new_size))
            if self.config.mode_repository:
                record.blocks.extend(bytes(b) for b in blocks)
            return receipt

    def flush(self, now=None, force=False):
        """Anchors the pending steps of every ledger whose interval has
        elapsed (all of them with ``force``); returns the new txn ids."""
        if not self.config.delayed:
            return []
        now = self.now() if now is None else now
        with self._registry_lock:
            records = [self.records[k] for k in sorted(self.records)]
        txn_ids = []
        for record in records:
            with record.lock:
                if record.pending_since is None:
                    continue
                if not force and now < record.pending_since + \
                        self.config.interval:
                    continue
                txn_ids.extend(self._flush_record(record, now))
        return txn_ids

    def next_due(self):
        """Earliest simulated time at which `flush` has work, or None."""
        if not self.config.delayed:
            return None
        with self._registry_lock:
            pending = [r.pending_since for r in self.records.values()
                       if r.pending_since is not None]
        if not pending:
            return None
        return min(pending) + self.config.interval

    def certify_blocks(self, ledger_id, indices):
        """Signed statement that the stored blocks at ``indices`` belong to
        the official digest (repository mode)."""
        record = self._stored_record(ledger_id)
        with record.lock:
            indices = tuple(sorted(set(indices)))
            if any(not 0 <= i < len(record.blocks) for i in indices):
                raise NotaryError("NOT_STORED", "index beyond stored blocks")
            certificate = BlockCertificate(record.ledger_id, record.digest,
                                           record.size, indices, self.now())
        notary_log.debug("certified %d blocks of %s", len(indices),
                         hexlify(record.ledger_id))
        return certificate.signed_by(self.keypair)

    def serve_blocks(self, ledger_id, indices, access_request):
        """Stored blocks for an author proving its key (repository mode)."""
        record = self._stored_record(ledger_id)
        request = access_request
        if bytes(request.ledger_id) != record.ledger_id or \
                tuple(request.indices) != tuple(indices):
            raise NotaryError("UNAUTHORIZED", "access request mismatch")
        if request.requester_key not in record.authors or \
                request.sig is None or \
                not check(request.requester_key, request.signing_bytes(),
                          request.sig):
            notary_log.info("refused blocks of %s to %s",
                            hexlify(record.ledger_id),
                            ActorId.of(request.requester_key))
            raise NotaryError("UNAUTHORIZED", "requester is not an author")
        with record.lock:
            if any(not 0 <= i < len(record.blocks) for i in indices):
                raise NotaryError("NOT_STORED", "index beyond stored blocks")
            return [record.blocks[i] for i in indices]

    def save(self, path):
        """Writes the registry snapshot (``HYBN`` file)."""
        w = Writer()
        with self._registry_lock:
            records = [self.records[k] for k in sorted(self.records)]
        w.u32(len(records))
        for record in records:
            with record.lock:
                record.write(w)
        try:
            with io.open(path, "wb") as f:
                f.write(SNAPSHOT_MAGIC + bytes([SNAPSHOT_VERSION]) +
                        w.getvalue())
        except (IOError, OSError) as e:
            raise NotaryError("IO_ERROR", str(e))

    @classmethod
    def restore(cls, path, config, anchor, clock=None, **kwargs):
        """Reloads a snapshot and reconciles it with the anchor log.

        Ledgers whose anchored history moved past the snapshot are advanced
        to the last anchored state; pending steps are kept for the next
        flush. Steps acknowledged by receipts but neither anchored nor
        snapshotted cannot be recovered.
        """
        try:
            with io.open(path, "rb") as f:
                data = f.read()
        except (IOError, OSError) as e:
            raise NotaryError("IO_ERROR", str(e))
        if data[:4] != SNAPSHOT_MAGIC or data[4:5] != bytes([SNAPSHOT_VERSION]):
            raise NotaryError("MALFORMED_FILE", "not a notary snapshot")
        notary = cls(config, anchor, clock, **kwargs)
        try:
            r = Reader(data[5:])
            for _ in range(r.count(4)):
                record = LedgerRecord.read(r)
                notary.records[record.ledger_id] = record
            r.finish()
        except ProtocolError as e:
            raise NotaryError("MALFORMED_FILE", e.detail)
        notary._reconcile()
        return notary

    def _reconcile(self):
        txns = self.anchor.read_all(self.address)
        known = set()
        for record in self.records.values():
            known.add(record.ledger_id)
            states = anchored_states(txns, record.ledger_id)
            if not states:
                if not record.pending_init:
                    notary_log.warning("ledger %s was never anchored",
                                       hexlify(record.ledger_id))
                continue
            self._catch_up(record, states)
        for txn in txns:
            if isinstance(txn.payload, InitPayload) and \
                    txn.payload.ledger_id not in known:
                known.add(txn.payload.ledger_id)
                notary_log.warning("ledger %s anchored but missing from the "
                                   "snapshot", hexlify(txn.payload.ledger_id))

    def _catch_up(self, record, states):
        """Moves a restored record past whatever the anchor log published
        for it after the snapshot was taken."""
        if record.pending_init:
            base = (record.init_digest, record.init_size)
        else:
            base = (record.last_anchored_digest, record.last_anchored_size)
        conflict = NotaryError("RECOVERY_CONFLICT",
                               "snapshot of %s disagrees with the anchor log"
                               % hexlify(record.ledger_id))
        if base not in states:
            raise conflict
        published = states[states.index(base):]
        # the snapshot's own view: the base, then every pending step
        expected = [base] + [s.new_state() for s in record.pending_steps]
        if any(a != b for a, b in zip(expected, published)):
            raise conflict

        record.last_anchored_digest, record.last_anchored_size = states[-1]
        record.pending_init = False
        if len(published) < len(expected):
            record.pending_steps = record.pending_steps[len(published) - 1:]
            return
        behind = len(published) - len(expected)
        if behind:
            notary_log.warning("snapshot of %s is %d steps behind the "
                               "anchor log", hexlify(record.ledger_id),
                               behind)
        record.digest, record.size = states[-1]
        record.seq += behind
        record.pending_steps = []
        record.pending_since = None

    def _validate_create(self, request, blocks):
        ledger_id = bytes(request.ledger_id)
        if ledger_id in self.records:
            raise NotaryError("ID_IN_USE", hexlify(ledger_id))
        authors = request.authors
        if not isinstance(authors, AuthorSet) or not authors.is_canonical() \
                or request.creator_key not in authors:
            raise NotaryError("INVALID_AUTHOR_SET",
                              "authors must be a non-empty duplicate-free set "
                              "including the creator")
        if request.creator_sig is None or not check(
                request.creator_key, request.signing_bytes(),
                request.creator_sig):
            raise NotaryError("BAD_SIGNATURE", "creator signature")
        if request.initial_size < 1:
            raise NotaryError("MALFORMED_REQUEST", "empty initial ledger")

        policy = None
        record = LedgerRecord(ledger_id, authors, request.initial_digest,
                              request.initial_size)
        if self.config.mode_repository:
            blocks = [bytes(b) for b in (blocks or ())]
            tree = MerkleTree(leaf_hash(b) for b in blocks)
            if tree.size != request.initial_size or \
                    tree.root() != request.initial_digest:
                raise NotaryError("DIGEST_MISMATCH",
                                  "blocks do not produce the initial digest")
            if self.config.mode_policy:
                policy = _policy_of(blocks[0])
                for block in blocks[1:]:
                    reason = policy.violation(block)
                    if reason:
                        raise NotaryError("POLICY_VIOLATION", reason)
            record.blocks = blocks
        record.policy = policy
        return record

    def _validate_extend(self, record, request, blocks):
        self._check_fresh(record, request)
        if not request.is_well_formed() or not verify_consistency(
                request.prev_digest, request.prev_size, request.new_digest,
                request.new_size, request.proof):
            raise NotaryError("INVALID_PROOF", "consistency proof rejected")
        self._check_authorized(record, request)
        if self.config.mode_repository:
            blocks = [bytes(b) for b in (blocks or ())]
            tree = MerkleTree(leaf_hash(b) for b in record.blocks)
            tree.extend(leaf_hash(b) for b in blocks)
            if tree.size != request.new_size or \
                    tree.root() != request.new_digest:
                raise NotaryError("DIGEST_MISMATCH",
                                  "blocks do not produce the new digest")
            if record.policy is not None:
                for block in blocks:
                    reason = record.policy.violation(block)
                    if reason:
                        raise NotaryError("POLICY_VIOLATION", reason)

    def _check_fresh(self, record, request):
        if (request.prev_digest, request.prev_size) != record.state():
            raise NotaryError("STALE_DIGEST",
                              "official size is %d" % record.size)

    def _check_authorized(self, record, request):
        keys, sigs = request.author_keys, request.author_sigs
        if not keys or len(keys) != len(sigs):
            raise NotaryError("UNAUTHORIZED", "missing signatures")
        if record.policy is None and len(keys) != 1:
            raise NotaryError("UNAUTHORIZED", "exactly one author signs")
        payload = request.signing_bytes()
        for key, sig in zip(keys, sigs):
            if key not in record.authors or not check(key, payload, sig):
                raise NotaryError("UNAUTHORIZED",
                                  "signer %s not authorized" % ActorId.of(key))
        if record.policy is not None and record.policy.min_signers:
            if len(set(keys)) < record.policy.min_signers:
                raise NotaryError("POLICY_VIOLATION",
                                  "%d of %d required signers"
                                  % (len(set(keys)),
                                     record.policy.min_signers))

    def _issue(self, record, kind, request, payload, state=None):
        """Anchors or queues ``payload``, then moves the record to ``state``
        and signs the receipt."""
        now = self.now()
        if self.config.delayed:
            if kind == ReceiptKind.CREATION:
                record.pending_init = True
            else:
                record.pending_steps.append(payload)
            if record.pending_since is None:
                record.pending_since = now
            ref = AnchorRef.pending_until(record.pending_since +
                                          self.config.interval)
        else:
            ref = AnchorRef.anchored(self._anchor(payload, now))
        if state is not None:
            record.digest, record.size = state
        if not self.config.delayed:
            record.last_anchored_digest, record.last_anchored_size = \
                record.state()
        receipt = Receipt(kind, request, now, ref,
                          record.seq).signed_by(self.keypair)
        record.seq += 1
        with self._stats_lock:
            self.stats.accepted += 1
        notary_log.debug("accepted %s of %s at size %d (seq %d)",
                         kind.name.lower(), hexlify(record.ledger_id),
                         record.size, receipt.notary_seq)
        return receipt

    def _anchor(self, payload, now):
        return self.anchor.submit(self.address, payload, now)

    def _flush_record(self, record, now):
        txn_ids = []
        if record.pending_init:
            txn_ids.append(self._anchor(
                InitPayload(record.ledger_id, record.init_digest,
                            record.init_size), now))
        if record.pending_steps:
            txn_ids.append(self._anchor(
                BatchPayload(record.ledger_id, tuple(record.pending_steps)),
                now))
        notary_log.debug("flushed %s: %d steps", hexlify(record.ledger_id),
                         len(record.pending_steps))
        record.pending_init = False
        record.pending_steps = []
        record.pending_since = None
        record.last_anchored_digest, record.last_anchored_size = \
            record.state()
        return txn_ids

    def _stored_record(self, ledger_id):
        if not self.config.mode_repository:
            raise NotaryError("NOT_STORED", "the Notary stores no blocks")
        with self._registry_lock:
            record = self.records.get(bytes(ledger_id))
        if record is None:
            raise NotaryError("UNKNOWN_LEDGER", hexlify(ledger_id))
        return record

    def _count_request(self, blocks=None):
        with self._stats_lock:
            if blocks is not None:
                self.stats.blocks_received += len(blocks)
            self._request_index += 1
            self.stats.requests += 1

    @property
    def request_index(self):
        """Number of requests received so far."""
        return self._request_index

    def _rejected(self, error, request):
        with self._stats_lock:
            self.stats.rejected[error.code] += 1
        notary_log.info("rejected %s for %s: %s", type(request).__name__,
                        hexlify(request.ledger_id), error)


def _policy_of(block):
    try:
        policy = decode(block, Policy)
    except ProtocolError as e:
        raise NotaryError("POLICY_VIOLATION",
                          "block 0 is not a policy: %s" % e.detail)
    return policy
