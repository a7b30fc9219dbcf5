#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Desk-scale benchmarks of the Notary and of node-side hashing.

These run on the wall clock and drive a real `Notary` from worker threads;
they never touch the simulator. Every function returns a plain dictionary
for ``hybrid bench`` to print.
"""

from __future__ import absolute_import, division, print_function, with_statement

import math
import random
import statistics
import time

from concurrent.futures import ThreadPoolExecutor

from hybrid.anchor import AnchorLog, ledger_txns
from hybrid.auditor import audit_anchor
from hybrid.form import BenchForm
from hybrid.hashtree import MerkleTree, leaf_hash
from hybrid.identity import keypair_from_label
from hybrid.log import sim_log
from hybrid.notary import DELAYED, Notary, NotaryConfig
from hybrid.protocol import (
    AuthorSet, BatchPayload, CreationRequest, ExtensionRequest, InitPayload,
    encode, new_ledger_id)

SMALL_BLOCK = 1024
LARGE_BLOCK = 1024 * 1024


class _Chain(object):
    """A creation request and the extensions that follow it, one block
    each, prepared before the clock starts."""

    def __init__(self, author, nonce, blocks, block_bytes, rng):
        self.ledger_id = new_ledger_id(author.public, nonce)
        tree = MerkleTree()
        self.hashed_bytes = 0
        self.hashing_seconds = 0.0
        tree.append(self._hash(rng.randbytes(block_bytes)))
        self.creation = CreationRequest(
            self.ledger_id, AuthorSet.of([author.public]), tree.root(),
            tree.size, author.public).signed_by(author)
        self.extensions = []
        for _ in range(blocks):
            prev_digest, prev_size = tree.root(), tree.size
            tree.append(self._hash(rng.randbytes(block_bytes)))
            request = ExtensionRequest(
                self.ledger_id, prev_digest, prev_size, tree.root(),
                tree.size, tree.prove_consistency(prev_size), ())
            self.extensions.append(request.signed_by(author))

    def _hash(self, block):
        start = time.perf_counter()
        digest = leaf_hash(block)
        self.hashing_seconds += time.perf_counter() - start
        self.hashed_bytes += len(block)
        return digest


def _drive(notary, chains):
    timings, sizes = [], []
    for chain in chains:
        for request in [chain.creation] + chain.extensions:
            start = time.perf_counter()
            if isinstance(request, CreationRequest):
                receipt = notary.handle_create(request)
            else:
                receipt = notary.handle_extend(request)
            timings.append(time.perf_counter() - start)
            sizes.append(len(encode(receipt)))
    return timings, sizes


def notary_throughput(blocks, block_bytes=SMALL_BLOCK, ledgers=1,
                      mode="immediate", threads=1, interval_ms=100, seed=0):
    """Times the Notary over ``ledgers`` request chains of ``blocks``
    extensions each.

    Chains are spread over ``threads`` workers, so requests of one ledger
    stay in order while different ledgers contend for the Notary. The
    anchor log is audited afterwards.
    """
    rng = random.Random(seed)
    author = keypair_from_label("bench-author")
    chains = [_Chain(author, i, blocks, block_bytes, rng)
              for i in range(ledgers)]
    config = NotaryConfig.from_dict(keypair_from_label("bench-notary"), dict(
        notarization=mode,
        interval=interval_ms if mode == DELAYED else 0))
    anchor = AnchorLog()
    notary = Notary(config, anchor)

    threads = min(threads, ledgers)
    start = time.perf_counter()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(
            lambda k: _drive(notary, chains[k::threads]), range(threads)))
    elapsed = time.perf_counter() - start
    notary.flush(force=True)

    timings = [t for ts, _ in results for t in ts]
    sizes = [s for _, ss in results for s in ss]
    hashed = sum(c.hashed_bytes for c in chains)
    hashing = sum(c.hashing_seconds for c in chains)
    report = audit_anchor(anchor, notary.address)
    coherent = report.coherent and len(report.ledgers) == ledgers and all(
        report.get(c.ledger_id).states[-1][1] == blocks + 1 for c in chains)
    sim_log.info("bench: %d requests in %.3fs over %d threads",
                 len(timings), elapsed, threads)
    return {
        "mode": mode,
        "ledgers": ledgers,
        "blocks": blocks,
        "block_bytes": block_bytes,
        "threads": threads,
        "requests": len(timings),
        "seconds": elapsed,
        "requests_per_sec": len(timings) / elapsed if elapsed else None,
        "median_request_us": statistics.median(timings) * 1e6,
        "node_hashed_bytes_per_sec": hashed / hashing if hashing else None,
        "receipt_bytes_mean": statistics.mean(sizes),
        "anchor_txns": len(anchor),
        "coherent": coherent,
    }


def node_hashing_rate(block_bytes, blocks=64, seed=0):
    """Bytes per second a node spends hashing blocks into its tree."""
    rng = random.Random(seed)
    payload = [rng.randbytes(block_bytes) for _ in range(blocks)]
    tree = MerkleTree()
    start = time.perf_counter()
    for block in payload:
        tree.append(leaf_hash(block))
    tree.root()
    elapsed = time.perf_counter() - start
    return {
        "block_bytes": block_bytes,
        "blocks": blocks,
        "seconds": elapsed,
        "bytes_per_sec": block_bytes * blocks / elapsed if elapsed else None,
    }


def block_blindness(blocks=50, small=SMALL_BLOCK, large=LARGE_BLOCK):
    """Compares Notary handling time for small and large blocks.

    In base mode the Notary only sees digests, so per-request time should
    not follow block size while node-side hashing does.
    """
    fast = notary_throughput(blocks, small)
    slow = notary_throughput(blocks, large)
    ratio = slow["median_request_us"] / fast["median_request_us"]
    hashing = node_hashing_rate(large, 8)["seconds"] / \
        node_hashing_rate(small, 8)["seconds"]
    return {
        "small_block_bytes": small,
        "large_block_bytes": large,
        "notary_time_ratio": ratio,
        "node_hashing_ratio": hashing,
        "block_blind": ratio <= 2.0,
    }


def delayed_batching(extensions=40, interval_ms=200, spacing_ms=15,
                     ledgers=2):
    """Runs delayed notarization on a manual clock.

    Every ledger gets ``extensions`` requests ``spacing_ms`` apart; the
    Notary flushes whenever a ledger's interval has elapsed and once more
    when the last batch falls due.
    """
    clock = [0]
    author = keypair_from_label("bench-author")
    rng = random.Random(0)
    chains = [_Chain(author, i, extensions, 32, rng) for i in range(ledgers)]
    anchor = AnchorLog(clock=lambda: clock[0])
    notary = Notary(NotaryConfig(keypair_from_label("bench-notary"),
                                 notarization=DELAYED, interval=interval_ms),
                    anchor, clock=lambda: clock[0])

    receipts = 0
    for chain in chains:
        notary.handle_create(chain.creation)
        receipts += 1
    for step in range(extensions):
        clock[0] += spacing_ms
        notary.flush()
        for chain in chains:
            notary.handle_extend(chain.extensions[step])
            receipts += 1
    while notary.next_due() is not None:
        clock[0] = max(clock[0], notary.next_due())
        notary.flush()

    duration = clock[0]
    bound = int(math.ceil(duration / interval_ms))
    per_ledger = {}
    for chain in chains:
        txns = ledger_txns(anchor.txns, chain.ledger_id)
        per_ledger[chain.ledger_id] = dict(
            inits=sum(isinstance(t.payload, InitPayload) for t in txns),
            batches=sum(isinstance(t.payload, BatchPayload) for t in txns),
            steps=sum(len(t.payload.steps) for t in txns
                      if isinstance(t.payload, BatchPayload)))
    batches = max(v["batches"] for v in per_ledger.values())
    return {
        "ledgers": ledgers,
        "extensions": extensions * ledgers,
        "receipts": receipts,
        "duration_ms": duration,
        "interval_ms": interval_ms,
        "max_batches_per_ledger": batches,
        "batch_bound": bound,
        "within_bound": batches <= bound,
        "all_steps_anchored": all(v["steps"] == extensions
                                  for v in per_ledger.values()),
        "coherent": audit_anchor(anchor, notary.address).coherent,
    }


def run_bench(values):
    """Validates bench parameters and runs the throughput benchmark plus
    the node-side hashing rate at the same block size."""
    params = BenchForm.parse(values, "bench parameters")
    result = notary_throughput(params["blocks"], params["block_bytes"],
                               params["ledgers"], params["mode"],
                               params["threads"], params["interval_ms"])
    result["node_hashing"] = node_hashing_rate(params["block_bytes"])
    return result
