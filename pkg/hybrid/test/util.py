#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Shared fixtures for the test suite."""

from __future__ import absolute_import, division, print_function, with_statement

import random

from hybrid.anchor import AnchorLog
from hybrid.hashtree import MerkleTree, leaf_hash
from hybrid.identity import keypair_from_label
from hybrid.notary import Notary, NotaryConfig
from hybrid.protocol import (
    AuthorSet, CreationRequest, ExtensionRequest, new_ledger_id)

NOTARY = keypair_from_label("notary")
ALICE = keypair_from_label("alice")
BOB = keypair_from_label("bob")
CAROL = keypair_from_label("carol")


class ManualClock(object):

    def __init__(self, now=0):
        self.now = now

    def __call__(self):
        return self.now

    def advance(self, ms):
        self.now += ms
        return self.now


def random_blocks(rng, count, size=32):
    return [rng.randbytes(size) for _ in range(count)]


def make_notary(clock=None, anchor_latency=0, cls=Notary, keypair=NOTARY,
                **settings):
    clock = clock or ManualClock()
    anchor = AnchorLog(clock=clock, confirmation_latency=anchor_latency)
    config = NotaryConfig.from_dict(keypair, settings)
    return cls(config, anchor, clock), anchor


class Chain(object):
    """Builds signed requests for one ledger from its author's side."""

    def __init__(self, creator, blocks, co_authors=(), nonce=0):
        self.creator = creator
        self.authors = AuthorSet.of([creator.public] +
                                    [a.public for a in co_authors])
        self.ledger_id = new_ledger_id(creator.public, nonce)
        self.blocks = list(blocks)
        self.tree = MerkleTree(leaf_hash(b) for b in blocks)
        self.creation = CreationRequest(
            self.ledger_id, self.authors, self.tree.root(), self.tree.size,
            creator.public).signed_by(creator)

    def state(self):
        return self.tree.root(), self.tree.size

    def extend(self, blocks, *signers):
        """Signed extension of the current tip; the tip moves forward."""
        signers = signers or (self.creator,)
        digest, size = self.state()
        self.tree.extend(leaf_hash(b) for b in blocks)
        self.blocks.extend(blocks)
        return ExtensionRequest(
            self.ledger_id, digest, size, self.tree.root(), self.tree.size,
            self.tree.prove_consistency(size), ()).signed_by(*signers)

    def fork(self):
        other = Chain.__new__(Chain)
        other.__dict__.update(self.__dict__)
        other.tree = self.tree.copy()
        other.blocks = list(self.blocks)
        return other


def seeded(seed=0):
    return random.Random(seed)
