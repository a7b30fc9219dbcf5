#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""A participant of the private network.

Nodes build and sign requests for the ledgers they author, keep replicas
of those ledgers, gossip Notary receipts to everybody, exchange data blocks
only with co-authors and watch the Notary: conflicting receipts,
receipts accepting foreign signers and receipts missing from the anchor log
all turn into self-contained `~hybrid.protocol.MisbehaviorProof` values.

A node is a single-threaded event processor. Its entry points return (or
queue in `Node.outbox`) plain action values that the driver, normally
`hybrid.simnet`, turns into messages.
"""

from __future__ import absolute_import, division, print_function, with_statement

import time

from dataclasses import dataclass
from typing import Tuple

from tornado.util import ObjectDict

from hybrid.auditor import anchoring_violation
from hybrid.errors import LedgerError, NodeError, NotaryError
from hybrid.hashtree import verify_inclusion
from hybrid.identity import ActorId, check
from hybrid.ledgerstore import LedgerReplica
from hybrid.log import node_log
from hybrid.protocol import (
    AccessRequest, AuthorSet, BlockEntry, CreationRequest, ExtensionRequest,
    MisbehaviorProof, ProofKind, new_ledger_id, verify_receipt)
from hybrid.util import hexlify


@dataclass(frozen=True)
class Forward:
    """Gossip ``receipt`` to ``fanout`` random peers."""
    receipt: object
    hops: int


@dataclass(frozen=True)
class FetchBlocks:
    """Ask ``sources`` in order for the blocks at ``indices``."""
    ledger_id: bytes
    indices: Tuple[int, ...]
    sources: Tuple[ActorId, ...]


@dataclass(frozen=True)
class Issued:
    """The Notary accepted a request of ours, retried ones included."""
    receipt: object


@dataclass(frozen=True)
class Misbehavior:
    proof: object
    hops: int


class Node(object):

    def __init__(self, keypair, registry, notary_key, notary=None,
                 send_blocks=False, clock=None):
        self.keypair = keypair
        self.public_key = keypair.public
        self.actor_id = keypair.actor_id
        self.registry = registry
        self.notary_key = notary_key
        self.notary_address = ActorId.of(notary_key)
        self.notary = notary
        self.send_blocks = send_blocks
        self._clock = clock
        self.replicas = {}
        self.receipt_index = {}
        self.creations = {}
        self.known = {}
        self.first_seen = {}
        self.outbox = []
        self.proofs = []
        self._by_prev = {}
        self._orphans = {}
        self._buffered = {}
        self._deferred = {}
        self._proof_keys = set()
        self._nonce = 0
        self.stats = ObjectDict(stale=0, retries=0, retry_failures=0,
                                accepted_blocks=0, rejected_blocks=0)

    def now(self):
        if self._clock is not None:
            return self._clock()
        return int(time.time() * 1000)

    def create_ledger(self, authors, initial_blocks, nonce=None):
        """Creates a ledger and returns ``(replica, receipt)``."""
        authors = AuthorSet.of(authors)
        if self.public_key not in authors:
            raise NodeError("SELF_NOT_AUTHOR", str(self.actor_id))
        if nonce is None:
            nonce = self._nonce
            self._nonce += 1
        ledger_id = new_ledger_id(self.public_key, nonce)
        replica = LedgerReplica.open(ledger_id, authors, self.notary_key)
        staged = replica.stage_blocks(initial_blocks)
        request = CreationRequest(ledger_id, authors, staged.digest,
                                  staged.size,
                                  self.public_key).signed_by(self.keypair)
        receipt = self.notary.handle_create(request,
                                            self._for_notary(initial_blocks))
        self.replicas[ledger_id] = replica
        self._buffer(ledger_id, 0, initial_blocks)
        self.outbox.append(Issued(receipt))
        self.outbox.extend(self._accept(receipt, 0))
        node_log.debug("%s created ledger %s with %d blocks", self.actor_id,
                       hexlify(ledger_id), staged.size)
        return replica, receipt

    def extend_ledger(self, ledger_id, blocks, cosigners=()):
        """Extends a ledger this node holds a replica of.

        On ``STALE_DIGEST`` the node catches up from the receipts and blocks
        it already has and retries once; when it cannot catch up yet the
        retry is deferred until it has, and None is returned.
        """
        ledger_id = bytes(ledger_id)
        replica = self.replicas.get(ledger_id)
        if replica is None:
            raise NodeError("NOT_PARTICIPANT", hexlify(ledger_id))
        try:
            return self._submit(replica, blocks, cosigners)
        except NotaryError as e:
            if e.code != "STALE_DIGEST":
                raise
            self.stats.stale += 1
        size = replica.official_size
        self._advance(ledger_id, retry=False)
        if replica.official_size > size:
            self.stats.retries += 1
            return self._submit(replica, blocks, cosigners)
        node_log.info("%s deferring stale extension of %s", self.actor_id,
                      hexlify(ledger_id))
        self._deferred.setdefault(ledger_id, []).append((blocks, cosigners))
        return None

    def cosign(self, request, blocks):
        """Co-author signature over an extension of our own replica."""
        replica = self.replicas.get(bytes(request.ledger_id))
        if replica is None or self.public_key not in replica.authors:
            raise NodeError("NOT_PARTICIPANT", hexlify(request.ledger_id))
        staged = replica.stage_blocks(blocks)
        if (request.prev_digest, request.prev_size) != replica.state() or \
                (request.new_digest, request.new_size) != \
                (staged.digest, staged.size):
            raise NodeError("COSIGN_REFUSED",
                            "request does not extend our replica")
        return self.keypair.sign(request.signing_bytes())

    def _submit(self, replica, blocks, cosigners):
        staged = replica.stage_blocks(blocks)
        digest, size = replica.state()
        keys = (self.public_key,) + tuple(c.public_key for c in cosigners)
        request = ExtensionRequest(replica.ledger_id, digest, size,
                                   staged.digest, staged.size, staged.proof,
                                   keys)
        sigs = [self.keypair.sign(request.signing_bytes())]
        sigs.extend(c.cosign(request, blocks) for c in cosigners)
        request = request.with_signatures(sigs)
        receipt = self.notary.handle_extend(request, self._for_notary(blocks))
        self._buffer(replica.ledger_id, size, blocks)
        self.outbox.append(Issued(receipt))
        self.outbox.extend(self._accept(receipt, 0))
        return receipt

    def _for_notary(self, blocks):
        return [bytes(b) for b in blocks] if self.send_blocks else None

    def _buffer(self, ledger_id, start, blocks):
        buffered = self._buffered.setdefault(ledger_id, {})
        for offset, block in enumerate(blocks):
            entry = block if isinstance(block, BlockEntry) \
                else BlockEntry.present(block)
            buffered[start + offset] = entry

    def on_receipt(self, receipt, hops=0, sender=None):
        """Processes a gossiped receipt; returns the resulting actions."""
        key = bytes(receipt.notary_sig or b"")
        if not key or key in self.known or key in self.first_seen:
            return []
        if not check(self.notary_key, receipt.signing_bytes(),
                     receipt.notary_sig):
            node_log.debug("%s dropped receipt without a Notary signature "
                           "from %s", self.actor_id, sender)
            return []
        return self._accept(receipt, hops)

    def _accept(self, receipt, hops, forward=True):
        key = bytes(receipt.notary_sig)
        if key in self.first_seen:
            return []
        self.first_seen[key] = hops
        ledger_id = bytes(receipt.ledger_id)
        actions = [Forward(receipt, hops + 1)] if forward else []

        if receipt.is_creation:
            authors = receipt.request.authors
            if not verify_receipt(receipt, self.notary_key, authors):
                node_log.warning("%s got an invalid creation receipt for %s",
                                 self.actor_id, hexlify(ledger_id))
                return actions
            self.creations.setdefault(ledger_id, receipt)
        else:
            creation = self.creations.get(ledger_id)
            if creation is None:
                self.known[key] = receipt
                self._orphans.setdefault(ledger_id, []).append(receipt)
                return actions
            verdict = verify_receipt(receipt, self.notary_key,
                                     creation.request.authors)
            if not verdict:
                if verdict.reason in ("AUTHOR_NOT_IN_SET", "BAD_AUTHOR_SIG"):
                    self.known[key] = receipt
                    actions.extend(self._emit(MisbehaviorProof(
                        ProofKind.UNAUTHORIZED_ACCEPT, ledger_id,
                        (creation, receipt)), hops))
                return actions

        self.known[key] = receipt
        conflict = self._index(receipt)
        if conflict is not None:
            actions.extend(self._emit(MisbehaviorProof(
                ProofKind.FORK, ledger_id, (conflict, receipt)), hops))

        if receipt.is_creation:
            for orphan in self._orphans.pop(ledger_id, []):
                self.first_seen.pop(bytes(orphan.notary_sig), None)
                actions.extend(self._accept(orphan, hops, forward=False))
        actions.extend(self._sync(ledger_id, receipt))
        return actions

    def _index(self, receipt):
        """Stores a valid receipt; returns an earlier receipt it forks."""
        ledger_id = bytes(receipt.ledger_id)
        digest, size = receipt.prev_state()
        slot = (ledger_id, bytes(digest), size)
        earlier = self._by_prev.get(slot)
        if earlier is None:
            self._by_prev[slot] = receipt
        elif earlier.new_state() != receipt.new_state():
            return earlier
        self.receipt_index.setdefault(ledger_id, {}).setdefault(
            receipt.notary_seq, receipt)
        return None

    def _emit(self, proof, hops):
        key = (proof.kind,) + tuple(bytes(r.notary_sig)
                                    for r in proof.receipts)
        if key in self._proof_keys:
            return []
        self._proof_keys.add(key)
        self.proofs.append(proof)
        node_log.warning("%s: %s evidence against the Notary for %s",
                         self.actor_id, proof.kind.name,
                         hexlify(proof.ledger_id))
        return [Misbehavior(proof, hops)]

    def _sync(self, ledger_id, receipt):
        creation = self.creations.get(ledger_id)
        if creation is None or \
                self.public_key not in creation.request.authors:
            return []
        if ledger_id not in self.replicas:
            self.replicas[ledger_id] = LedgerReplica.open(
                ledger_id, creation.request.authors, self.notary_key)
        self._advance(ledger_id)
        missing = self.missing_indices(ledger_id)
        if not missing:
            return []
        return [FetchBlocks(ledger_id, missing, self._sources(receipt))]

    def _sources(self, receipt):
        authors = self.creations[bytes(receipt.ledger_id)].request.authors
        first = ActorId.of(receipt.signers()[0])
        others = [ActorId.of(k) for k in authors]
        ordered = [first] + sorted(a for a in others if a != first)
        return tuple(a for a in ordered
                     if a != self.actor_id and a in self.registry)

    def missing_indices(self, ledger_id):
        """Indices covered by known receipts but absent locally."""
        replica = self.replicas.get(bytes(ledger_id))
        if replica is None:
            return ()
        target = self.known_size(ledger_id)
        buffered = self._buffered.get(bytes(ledger_id), {})
        return tuple(i for i in range(replica.official_size, target)
                     if i not in buffered)

    def known_size(self, ledger_id):
        """Size reached by the contiguous chain of known receipts."""
        receipts = self.receipt_index.get(bytes(ledger_id), {})
        seq, size = 0, 0
        while seq in receipts:
            size = receipts[seq].new_state()[1]
            seq += 1
        return size

    def pending_fetches(self):
        """Fetch actions for every authored ledger that lags its receipts."""
        actions = []
        for ledger_id in sorted(self.replicas):
            if self.public_key not in self.replicas[ledger_id].authors:
                continue
            missing = self.missing_indices(ledger_id)
            receipts = self.receipt_index.get(ledger_id, {})
            if missing and receipts:
                latest = receipts[max(receipts)]
                actions.append(FetchBlocks(ledger_id, missing,
                                           self._sources(latest)))
        return actions

    def _advance(self, ledger_id, retry=True):
        replica = self.replicas.get(ledger_id)
        receipts = self.receipt_index.get(ledger_id, {})
        buffered = self._buffered.get(ledger_id, {})
        while replica is not None:
            receipt = receipts.get(len(replica.receipts))
            if receipt is None:
                break
            prev_size = receipt.prev_state()[1]
            new_size = receipt.new_state()[1]
            if any(i not in buffered for i in range(prev_size, new_size)):
                break
            entries = [buffered[i] for i in range(prev_size, new_size)]
            try:
                replica.commit(receipt, entries)
            except LedgerError as e:
                node_log.warning("%s cannot commit seq %d of %s: %s",
                                 self.actor_id, receipt.notary_seq,
                                 hexlify(ledger_id), e)
                break
            for i in range(prev_size, new_size):
                del buffered[i]
        if retry and replica is not None and ledger_id in self._deferred \
                and len(replica.receipts) not in receipts:
            self._retry_deferred(ledger_id, replica)

    def _retry_deferred(self, ledger_id, replica):
        for blocks, cosigners in self._deferred.pop(ledger_id):
            self.stats.retries += 1
            try:
                self._submit(replica, blocks, cosigners)
            except NotaryError as e:
                self.stats.retry_failures += 1
                node_log.info("%s gave up extending %s: %s", self.actor_id,
                              hexlify(ledger_id), e)

    def serve_blocks(self, ledger_id, indices, requester_key):
        """Export bundle of our blocks for a co-author of the ledger.

        Erased blocks travel as digests; indices we do not hold yet are
        left out.
        """
        replica = self.replicas.get(bytes(ledger_id))
        if replica is None:
            raise NodeError("UNKNOWN_LEDGER", hexlify(ledger_id))
        if requester_key not in replica.authors:
            node_log.info("%s refused blocks of %s to %s", self.actor_id,
                          hexlify(ledger_id), ActorId.of(requester_key))
            raise NodeError("REFUSED", "requester is not an author")
        return self.share(ledger_id, indices)

    def share(self, ledger_id, indices=None):
        """Export bundle for any node; sharing is the caller's decision."""
        replica = self.replicas.get(bytes(ledger_id))
        if replica is None:
            raise NodeError("UNKNOWN_LEDGER", hexlify(ledger_id))
        if indices is not None:
            indices = [i for i in indices if 0 <= i < replica.official_size]
        return replica.make_export(indices)

    def ingest_blocks(self, ledger_id, archive, fallback=()):
        """Verifies received blocks against the official history.

        Returns ``{index: accepted}``. Accepted entries are committed as
        soon as they complete a receipt; when indices remain missing and
        ``fallback`` sources are given, a fetch to them is queued.
        """
        ledger_id = bytes(ledger_id)
        if bytes(archive.ledger_id) != ledger_id:
            raise NodeError("UNKNOWN_LEDGER", "archive of another ledger")
        for receipt in archive.receipts:
            if receipt.notary_sig is not None and check(
                    self.notary_key, receipt.signing_bytes(),
                    receipt.notary_sig):
                self.outbox.extend(self._accept(receipt, 0, forward=False))
        creation = self.creations.get(ledger_id)
        if creation is None:
            return dict((item.index, False) for item in archive.items)
        if ledger_id not in self.replicas:
            self.replicas[ledger_id] = LedgerReplica.open(
                ledger_id, creation.request.authors, self.notary_key)

        sizes = dict((r.new_state()[1], r) for r in
                     self.receipt_index.get(ledger_id, {}).values())
        buffered = self._buffered.setdefault(ledger_id, {})
        results = {}
        for item in archive.items:
            receipt = sizes.get(item.proof.tree_size)
            accepted = receipt is not None and item.entry.matches() and \
                verify_inclusion(receipt.new_state()[0],
                                 item.proof.tree_size, item.index,
                                 item.entry.leaf_digest, item.proof)
            results[item.index] = accepted
            if accepted:
                self.stats.accepted_blocks += 1
                if item.index not in buffered or item.entry.is_present:
                    buffered[item.index] = item.entry
            else:
                self.stats.rejected_blocks += 1
                node_log.warning("%s rejected block %d of %s", self.actor_id,
                                 item.index, hexlify(ledger_id))
        self._advance(ledger_id)
        missing = self.missing_indices(ledger_id)
        if missing and fallback:
            self.outbox.append(FetchBlocks(ledger_id, missing,
                                           tuple(fallback)))
        return results

    def erase_block(self, ledger_id, index):
        replica = self.replicas.get(bytes(ledger_id))
        if replica is None:
            raise NodeError("UNKNOWN_LEDGER", hexlify(ledger_id))
        return replica.erase_block(index)

    def audit_internal(self, anchor_log, now=None):
        """Compares every known receipt with the anchor log; returns the
        new ANCHOR_DESYNC proofs."""
        proofs = []
        for key in sorted(self.known):
            receipt = self.known[key]
            reason = anchoring_violation(receipt, anchor_log,
                                         self.notary_address, now)
            if reason is None:
                continue
            node_log.warning("%s: receipt seq %d of %s: %s", self.actor_id,
                             receipt.notary_seq, hexlify(receipt.ledger_id),
                             reason)
            actions = self._emit(MisbehaviorProof(
                ProofKind.ANCHOR_DESYNC, bytes(receipt.ledger_id), (receipt,),
                receipt.anchor_ref.txn_id), 0)
            proofs.extend(a.proof for a in actions)
        return proofs

    def drop_replica(self, ledger_id):
        """Simulates local data loss."""
        ledger_id = bytes(ledger_id)
        self._buffered.pop(ledger_id, None)
        return self.replicas.pop(ledger_id, None)

    def recover_from_notary(self, ledger_id):
        """Rebuilds a lost replica from the blocks a repository Notary
        stores, up to the last receipt this node knows."""
        ledger_id = bytes(ledger_id)
        creation = self.creations.get(ledger_id)
        if creation is None:
            raise NodeError("UNKNOWN_LEDGER", hexlify(ledger_id))
        receipts = self.receipt_index.get(ledger_id, {})
        chain = []
        while len(chain) in receipts:
            chain.append(receipts[len(chain)])
        if not chain:
            raise NodeError("UNKNOWN_LEDGER", "no receipts for %s"
                            % hexlify(ledger_id))
        size = chain[-1].new_state()[1]
        self._nonce += 1
        access = AccessRequest(ledger_id, tuple(range(size)), self.public_key,
                               self._nonce).signed_by(self.keypair)
        blocks = self.notary.serve_blocks(ledger_id, access.indices, access)
        replica = LedgerReplica.rebuild(ledger_id, creation.request.authors,
                                        self.notary_key, chain, blocks)
        self.replicas[ledger_id] = replica
        self._buffered.pop(ledger_id, None)
        node_log.info("%s recovered %d blocks of %s from the Notary",
                      self.actor_id, size, hexlify(ledger_id))
        return replica

    def summary(self):
        """Receipt keys held, for anti-entropy exchanges."""
        return frozenset(self.known)

    def missing_for(self, summary):
        """Receipts we hold that a peer's summary lacks."""
        return [self.known[k] for k in sorted(self.known)
                if k not in summary]
