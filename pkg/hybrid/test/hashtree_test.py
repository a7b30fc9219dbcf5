#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

from __future__ import absolute_import, division, print_function, with_statement

import hashlib
import unittest

from hybrid.errors import HashTreeError
from hybrid.hashtree import (
    EMPTY_ROOT, ConsistencyProof, Digest, InclusionProof, MerkleTree,
    leaf_hash, node_hash, prove_consistency, prove_inclusion, root,
    root_from_leaf_digests, verify_consistency, verify_inclusion)
from hybrid.util import ceil_log2

from hybrid.test.util import random_blocks, seeded


def _leaves(n, seed=0):
    return [leaf_hash(b) for b in random_blocks(seeded(seed), n, 16)]


def _counted_leaves(n):
    return [leaf_hash(i.to_bytes(4, "big")) for i in range(n)]


def _sha(data):
    return hashlib.sha256(data).digest()


def _levels(digests):
    # bottom-up pairing, an odd last node is carried up unchanged
    levels = [list(digests)]
    while len(levels[-1]) > 1:
        level = levels[-1]
        upper = [_sha(b"\x01" + level[i] + level[i + 1])
                 for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            upper.append(level[-1])
        levels.append(upper)
    return levels


def _oracle_root(digests):
    if not digests:
        return _sha(b"")
    return _levels(digests)[-1][0]


def _oracle_path(levels, index):
    path = []
    for level in levels[:-1]:
        sibling = index ^ 1
        if sibling < len(level):
            path.append(level[sibling])
        index //= 2
    return path


def _oracle_subproof(m, digests, complete):
    n = len(digests)
    if m == n:
        return [] if complete else [_oracle_root(digests)]
    k = 1
    while k * 2 < n:
        k *= 2
    if m <= k:
        return (_oracle_subproof(m, digests[:k], complete) +
                [_oracle_root(digests[k:])])
    return (_oracle_subproof(m - k, digests[k:], False) +
            [_oracle_root(digests[:k])])


def _oracle_consistency(digests, m):
    if m in (0, len(digests)):
        return []
    return _oracle_subproof(m, digests, True)


class DigestTest(unittest.TestCase):

    def test_empty_root(self):
        self.assertEqual(EMPTY_ROOT, hashlib.sha256(b"").digest())
        self.assertEqual(root([]), EMPTY_ROOT)

    def test_domain_separation(self):
        self.assertEqual(leaf_hash(b"x"),
                         hashlib.sha256(b"\x00x").digest())
        a, b = leaf_hash(b"a"), leaf_hash(b"b")
        self.assertEqual(node_hash(a, b),
                         hashlib.sha256(b"\x01" + a + b).digest())
        self.assertEqual(root([b"a", b"b"]), node_hash(a, b))

    def test_single_leaf_root(self):
        self.assertEqual(root([b"only"]), leaf_hash(b"only"))

    def test_unbalanced_split(self):
        a, b, c = (leaf_hash(x) for x in (b"a", b"b", b"c"))
        self.assertEqual(root_from_leaf_digests([a, b, c]),
                         node_hash(node_hash(a, b), c))

    def test_bad_digest_size(self):
        with self.assertRaises(HashTreeError) as cm:
            Digest(b"short")
        self.assertEqual(cm.exception.code, "MALFORMED_DIGEST")


class MerkleTreeTest(unittest.TestCase):

    def test_incremental_matches_batch(self):
        leaves = _leaves(70)
        tree = MerkleTree()
        for i, leaf in enumerate(leaves):
            tree.append(leaf)
            self.assertEqual(tree.root(), root_from_leaf_digests(leaves[:i + 1]))
        self.assertEqual(tree.size, 70)
        self.assertEqual(tree.leaf_digests, tuple(leaves))

    def test_copy_is_independent(self):
        tree = MerkleTree(_leaves(5))
        before = tree.root()
        other = tree.copy()
        other.append(leaf_hash(b"more"))
        self.assertEqual(tree.root(), before)
        self.assertNotEqual(other.root(), before)


class InclusionTest(unittest.TestCase):

    def test_every_leaf_of_small_trees(self):
        for n in range(1, 18):
            leaves = _leaves(n, n)
            digest = root_from_leaf_digests(leaves)
            for i in range(n):
                proof = prove_inclusion(leaves, i)
                self.assertTrue(proof.is_well_formed())
                self.assertLessEqual(len(proof.path), ceil_log2(n))
                self.assertTrue(verify_inclusion(digest, n, i, leaves[i],
                                                 proof))

    def test_rejects_wrong_leaf_or_index(self):
        leaves = _leaves(9)
        digest = root_from_leaf_digests(leaves)
        proof = prove_inclusion(leaves, 4)
        self.assertFalse(verify_inclusion(digest, 9, 4, leaves[5], proof))
        self.assertFalse(verify_inclusion(digest, 9, 5, leaves[4], proof))
        self.assertFalse(verify_inclusion(digest, 10, 4, leaves[4], proof))

    def test_rejects_tampered_path(self):
        leaves = _leaves(8)
        digest = root_from_leaf_digests(leaves)
        proof = prove_inclusion(leaves, 3)
        path = list(proof.path)
        path[1] = leaf_hash(b"forged")
        forged = InclusionProof(3, 8, tuple(path))
        self.assertFalse(verify_inclusion(digest, 8, 3, leaves[3], forged))

    def test_out_of_range(self):
        with self.assertRaises(HashTreeError) as cm:
            prove_inclusion(_leaves(3), 3)
        self.assertEqual(cm.exception.code, "INDEX_OUT_OF_RANGE")


class ConsistencyTest(unittest.TestCase):

    def test_all_prefixes(self):
        leaves = _leaves(13)
        for n in range(1, 14):
            new_root = root_from_leaf_digests(leaves[:n])
            for m in range(0, n + 1):
                old_root = root_from_leaf_digests(leaves[:m])
                proof = prove_consistency(leaves[:n], m)
                self.assertTrue(proof.is_well_formed())
                self.assertTrue(
                    verify_consistency(old_root, m, new_root, n, proof),
                    "%d -> %d" % (m, n))

    def test_rejects_rewritten_history(self):
        leaves = _leaves(10)
        rewritten = list(leaves)
        rewritten[2] = leaf_hash(b"rewritten")
        proof = prove_consistency(rewritten, 6)
        self.assertFalse(verify_consistency(
            root_from_leaf_digests(leaves[:6]), 6,
            root_from_leaf_digests(rewritten), 10, proof))

    def test_rejects_mismatched_sizes(self):
        leaves = _leaves(7)
        proof = prove_consistency(leaves, 3)
        self.assertFalse(verify_consistency(
            root_from_leaf_digests(leaves[:3]), 4,
            root_from_leaf_digests(leaves), 7, proof))

    def test_from_empty(self):
        leaves = _leaves(4)
        proof = prove_consistency(leaves, 0)
        self.assertEqual(proof, ConsistencyProof(0, 4, ()))
        self.assertTrue(verify_consistency(
            EMPTY_ROOT, 0, root_from_leaf_digests(leaves), 4, proof))
        self.assertFalse(verify_consistency(
            leaf_hash(b"x"), 0, root_from_leaf_digests(leaves), 4, proof))

    def test_shrinking_is_never_consistent(self):
        leaves = _leaves(5)
        proof = ConsistencyProof(5, 3, ())
        self.assertFalse(proof.is_well_formed())
        self.assertFalse(verify_consistency(
            root_from_leaf_digests(leaves), 5,
            root_from_leaf_digests(leaves[:3]), 3, proof))

    def test_out_of_range(self):
        with self.assertRaises(HashTreeError) as cm:
            prove_consistency(_leaves(3), 4)
        self.assertEqual(cm.exception.code, "SIZE_OUT_OF_RANGE")


class OracleTest(unittest.TestCase):
    """Roots and paths checked against a level-by-level reference tree."""

    def test_roots_match(self):
        for n in range(0, 65):
            leaves = _leaves(n, n)
            self.assertEqual(root_from_leaf_digests(leaves),
                             _oracle_root(leaves), "n=%d" % n)

    def test_inclusion_paths_up_to_64(self):
        for n in range(1, 65):
            leaves = _leaves(n, n)
            levels = _levels(leaves)
            digest = levels[-1][0]
            for i in range(n):
                proof = prove_inclusion(leaves, i)
                self.assertEqual(list(proof.path), _oracle_path(levels, i),
                                 "n=%d i=%d" % (n, i))
                self.assertTrue(verify_inclusion(digest, n, i, leaves[i],
                                                 proof))

    def test_random_inclusion_paths(self):
        rng = seeded(1000)
        cases = {}
        for _ in range(1000):
            n = rng.randint(1, 4096)
            cases.setdefault(n, []).append(rng.randrange(n))
        for n, indices in sorted(cases.items()):
            leaves = _counted_leaves(n)
            levels = _levels(leaves)
            digest = levels[-1][0]
            tree = MerkleTree(leaves)
            for i in indices:
                proof = tree.prove_inclusion(i)
                self.assertLessEqual(len(proof.path), ceil_log2(n))
                self.assertEqual(list(proof.path), _oracle_path(levels, i),
                                 "n=%d i=%d" % (n, i))
                self.assertTrue(verify_inclusion(digest, n, i, leaves[i],
                                                 proof))
                self.assertFalse(verify_inclusion(
                    digest, n, i, leaf_hash(b"absent"), proof))

    def test_consistency_paths_up_to_64(self):
        leaves = _leaves(64, 64)
        for n in range(1, 65):
            new_root = _oracle_root(leaves[:n])
            for m in range(0, n + 1):
                proof = prove_consistency(leaves[:n], m)
                self.assertEqual(list(proof.path),
                                 _oracle_consistency(leaves[:n], m),
                                 "%d -> %d" % (m, n))
                self.assertTrue(verify_consistency(
                    _oracle_root(leaves[:m]), m, new_root, n, proof))

    def test_consistency_proof_length_bound(self):
        rng = seeded(16)
        leaves = _counted_leaves(1 << 16)
        tree = MerkleTree()
        pairs = []
        for k in range(1, 17):
            n = 1 << k
            pairs.append((rng.randint(1, n - 1), n))
            top = min(2 * n, 1 << 16)
            pairs.append((rng.randint(1, n), rng.randint(n, top)))
        for m, n in sorted(pairs, key=lambda p: p[1]):
            if tree.size < n:
                tree.extend(leaves[tree.size:n])
            proof = tree.prove_consistency(m)
            self.assertLessEqual(len(proof.path), 2 * ceil_log2(n),
                                 "%d -> %d" % (m, n))
            self.assertTrue(verify_consistency(
                root_from_leaf_digests(leaves[:m]), m, tree.root(), n, proof))


if __name__ == "__main__":
    unittest.main()
