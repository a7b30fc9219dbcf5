#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Merkle trees over ordered data blocks.

The tree follows the RFC 6962 construction: SHA-256 with a ``0x00`` prefix
for leaves and ``0x01`` for interior nodes, the left subtree always being
the largest power of two strictly smaller than the leaf count. A ledger
digest is the root of the tree built over its blocks.

Every proof path is stored leaf-to-root, which is also the order used on
the wire. All functions are pure; results are immutable and may be shared
between threads.
"""

from __future__ import absolute_import, division, print_function, with_statement

import hashlib

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from hybrid.errors import HashTreeError
from hybrid.util import ceil_log2

LEAF_PREFIX = b"\x00"
NODE_PREFIX = b"\x01"

DIGEST_SIZE = 32


class Digest(bytes):
    """A 32-byte hash value; equality is byte equality."""

    __slots__ = ()

    def __new__(cls, value):
        value = bytes(value)
        if len(value) != DIGEST_SIZE:
            raise HashTreeError("MALFORMED_DIGEST",
                                "expected %d bytes, got %d"
                                % (DIGEST_SIZE, len(value)))
        return bytes.__new__(cls, value)

    def __repr__(self):
        return "Digest(%s)" % self.hex()


EMPTY_ROOT = Digest(hashlib.sha256(b"").digest())


@dataclass(frozen=True)
class InclusionProof:
    leaf_index: int
    tree_size: int
    path: Tuple[Digest, ...]

    def is_well_formed(self):
        if not 0 <= self.leaf_index < self.tree_size:
            return False
        return len(self.path) <= ceil_log2(self.tree_size)


@dataclass(frozen=True)
class ConsistencyProof:
    old_size: int
    new_size: int
    path: Tuple[Digest, ...]

    def is_well_formed(self):
        if not 0 <= self.old_size <= self.new_size:
            return False
        if self.old_size in (0, self.new_size):
            return not self.path
        return bool(self.path)


def leaf_hash(data):
    """Returns H(0x00 || data)."""
    h = hashlib.sha256(LEAF_PREFIX)
    h.update(data)
    return Digest(h.digest())


def node_hash(left, right):
    """Returns H(0x01 || left || right)."""
    return Digest(hashlib.sha256(NODE_PREFIX + left + right).digest())


def root(leaves):
    # type: (Sequence[bytes]) -> Digest
    """Merkle Tree Hash of the given data blocks."""
    return root_from_leaf_digests([leaf_hash(b) for b in leaves])


def root_from_leaf_digests(leaf_digests):
    # type: (Sequence[bytes]) -> Digest
    """Merkle Tree Hash computed from already hashed leaves.

    Erased blocks keep only their leaf digest, so the ledger digest can
    still be recomputed after erasure.
    """
    if not leaf_digests:
        return EMPTY_ROOT
    return _subtree_root(leaf_digests, 0, len(leaf_digests))


def prove_inclusion(leaf_digests, index):
    # type: (Sequence[bytes], int) -> InclusionProof
    """Audit path for the leaf at ``index``."""
    n = len(leaf_digests)
    if not 0 <= index < n:
        raise HashTreeError("INDEX_OUT_OF_RANGE",
                            "index %s, tree size %d" % (index, n))
    path = _inclusion_path(leaf_digests, index, 0, n)
    return InclusionProof(index, n, tuple(path))


def verify_inclusion(root_digest, tree_size, index, leaf_digest, proof):
    """True iff ``proof`` links ``leaf_digest`` at ``index`` to the root."""
    path = _proof_path(proof)
    if isinstance(proof, InclusionProof):
        if proof.leaf_index != index or proof.tree_size != tree_size:
            return False
    if not 0 <= index < tree_size:
        return False

    fn, sn = index, tree_size - 1
    r = leaf_digest
    for p in path:
        if sn == 0:
            return False
        if fn & 1 or fn == sn:
            r = node_hash(p, r)
            if not fn & 1:
                while not fn & 1 and fn != 0:
                    fn >>= 1
                    sn >>= 1
        else:
            r = node_hash(r, p)
        fn >>= 1
        sn >>= 1
    return sn == 0 and r == root_digest


def prove_consistency(leaf_digests, old_size):
    # type: (Sequence[bytes], int) -> ConsistencyProof
    """Proof that the first ``old_size`` leaves are a prefix of all of them."""
    n = len(leaf_digests)
    if not 0 <= old_size <= n:
        raise HashTreeError("SIZE_OUT_OF_RANGE",
                            "old size %s, tree size %d" % (old_size, n))
    if old_size in (0, n):
        return ConsistencyProof(old_size, n, ())
    path = _subproof(leaf_digests, old_size, 0, n, True)
    return ConsistencyProof(old_size, n, tuple(path))


def verify_consistency(old_root, old_size, new_root, new_size, proof):
    """True iff ``proof`` shows the old tree is a prefix of the new one.

    Any history extends the empty one: from size 0 the path must be empty
    and the old root must be the empty-tree digest.
    """
    path = _proof_path(proof)
    if isinstance(proof, ConsistencyProof):
        if proof.old_size != old_size or proof.new_size != new_size:
            return False
    if not 0 <= old_size <= new_size:
        return False
    if old_size == new_size:
        return not path and old_root == new_root
    if old_size == 0:
        return not path and old_root == EMPTY_ROOT
    if not path:
        return False

    if old_size & (old_size - 1) == 0:
        path = [old_root] + path
    fn, sn = old_size - 1, new_size - 1
    while fn & 1:
        fn >>= 1
        sn >>= 1

    fr = sr = path[0]
    for c in path[1:]:
        if sn == 0:
            return False
        if fn & 1 or fn == sn:
            fr = node_hash(c, fr)
            sr = node_hash(c, sr)
            if not fn & 1:
                while not fn & 1 and fn != 0:
                    fn >>= 1
                    sn >>= 1
        else:
            sr = node_hash(sr, c)
        fn >>= 1
        sn >>= 1
    return sn == 0 and fr == old_root and sr == new_root


class MerkleTree(object):
    """An append-only tree keeping the frontier of full subtrees.

    Appends cost O(log n) hashes and `root` folds the frontier right to
    left, which yields the same value as `root_from_leaf_digests`.
    """

    def __init__(self, leaf_digests=()):
        self._leaves = []  # type: List[Digest]
        self._frontier = []  # type: List[Tuple[int, Digest]]
        for digest in leaf_digests:
            self.append(digest)

    def __len__(self):
        return len(self._leaves)

    @property
    def size(self):
        return len(self._leaves)

    @property
    def leaf_digests(self):
        return tuple(self._leaves)

    def append(self, leaf_digest):
        node = Digest(leaf_digest)
        self._leaves.append(node)
        size = 1
        while self._frontier and self._frontier[-1][0] == size:
            _, left = self._frontier.pop()
            node = node_hash(left, node)
            size *= 2
        self._frontier.append((size, node))

    def extend(self, leaf_digests):
        for digest in leaf_digests:
            self.append(digest)

    def root(self):
        if not self._frontier:
            return EMPTY_ROOT
        acc = self._frontier[-1][1]
        for _, digest in reversed(self._frontier[:-1]):
            acc = node_hash(digest, acc)
        return acc

    def copy(self):
        tree = MerkleTree()
        tree._leaves = list(self._leaves)
        tree._frontier = list(self._frontier)
        return tree

    def prove_inclusion(self, index):
        return prove_inclusion(self._leaves, index)

    def prove_consistency(self, old_size):
        return prove_consistency(self._leaves, old_size)


def _split(n):
    # largest power of two strictly less than n, n >= 2
    return 1 << ((n - 1).bit_length() - 1)


def _proof_path(proof):
    return list(getattr(proof, "path", proof))


def _subtree_root(leaves, lo, hi):
    n = hi - lo
    if n == 1:
        return Digest(leaves[lo])
    k = _split(n)
    return node_hash(_subtree_root(leaves, lo, lo + k),
                     _subtree_root(leaves, lo + k, hi))


def _inclusion_path(leaves, m, lo, hi):
    n = hi - lo
    if n == 1:
        return []
    k = _split(n)
    if m < k:
        return (_inclusion_path(leaves, m, lo, lo + k) +
                [_subtree_root(leaves, lo + k, hi)])
    return (_inclusion_path(leaves, m - k, lo + k, hi) +
            [_subtree_root(leaves, lo, lo + k)])


def _subproof(leaves, m, lo, hi, complete):
    n = hi - lo
    if m == n:
        return [] if complete else [_subtree_root(leaves, lo, hi)]
    k = _split(n)
    if m <= k:
        return (_subproof(leaves, m, lo, lo + k, complete) +
                [_subtree_root(leaves, lo + k, hi)])
    return (_subproof(leaves, m - k, lo + k, hi, False) +
            [_subtree_root(leaves, lo, lo + k)])
