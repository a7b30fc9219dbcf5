#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Deterministic discrete-event simulation of a private network.

One `World` holds the nodes ``n0 .. n{k-1}``, the Notary and the anchor
log, all reading the clock of one `simpy.Environment`. The script, the
gossip rounds, the Notary flushes and every message in transit are simpy
processes; each node reads its messages from a `simpy.Store` inbox. simpy
runs events of equal time in scheduling order and the only randomness is a
`random.Random` seeded from the config, so a (config, script) pair always
yields the same trace.

Receipts spread by push gossip (each node forwards a new receipt to
``fanout`` random peers) plus a pull exchange of receipt summaries with one
peer per gossip interval, chosen round robin. Blocks travel only on fetch
requests, from co-author to co-author.
"""

from __future__ import absolute_import, division, print_function, with_statement

import io
import random

from collections import Counter, namedtuple
from dataclasses import dataclass, field
from typing import List, Tuple

import simpy
from tornado.escape import json_decode, json_encode

from hybrid.anchor import AnchorLog
from hybrid.auditor import audit_anchor, verify_export, \
    verify_misbehavior_proof
from hybrid.errors import HybridError, ScriptError
from hybrid.faulty import FAULT_CLASSES, FaultSpec
from hybrid.form import ActionForm, FaultForm, PolicyForm, SimConfigForm
from hybrid.identity import ActorId, Registry, keypair_from_label
from hybrid.log import sim_log
from hybrid.node import FetchBlocks, Forward, Issued, Misbehavior, Node
from hybrid.notary import Notary, NotaryConfig
from hybrid.protocol import Policy, encode
from hybrid.util import hexlify

ReceiptMsg = namedtuple("ReceiptMsg", "receipt hops")
FetchMsg = namedtuple("FetchMsg", "ledger_id indices requester fallback")
BundleMsg = namedtuple("BundleMsg", "archive sender fallback shared")
RefusedMsg = namedtuple("RefusedMsg", "ledger_id indices fallback")
SummaryMsg = namedtuple("SummaryMsg", "keys sender")

Action = namedtuple("Action", "time_ms actor action params")


@dataclass
class SimConfig:
    seed: int = 0
    node_count: int = 1
    fanout: int = 2
    latency_ms: Tuple[int, int] = (5, 20)
    notary: dict = field(default_factory=dict)
    anchor_latency_ms: int = 0
    faults: List[FaultSpec] = field(default_factory=list)
    gossip_interval_ms: int = 50
    settle_ms: int = 3000

    @classmethod
    def from_dict(cls, values):
        """Validated config from plain (JSON) values."""
        params = SimConfigForm.parse(values, "config")
        faults = [FaultSpec(f["kind"], f["time_ms"], f["event"],
                            dict(f["params"] or {}, node=f["node"]))
                  for f in (FaultForm.parse(v, "fault")
                            for v in params["faults"] or ())]
        notary = dict(mode_repository=params["mode_repository"],
                      mode_policy=params["mode_policy"],
                      notarization=params["notarization"],
                      interval=params["interval_ms"])
        return cls(params["seed"], params["node_count"], params["fanout"],
                   (params["latency_min_ms"], params["latency_max_ms"]),
                   notary, params["anchor_latency_ms"], faults,
                   params["gossip_interval_ms"], params["settle_ms"])

    def notary_fault(self):
        for fault in self.faults:
            if fault.targets_notary:
                return fault
        return None


class SimMetrics(object):

    def __init__(self):
        self.receipt_propagation_rounds = []
        self.sync_delay_ms = []
        self.receipt_bytes = Counter()
        self.message_count = 0
        self.messages_by_type = Counter()
        self.stale_rejections = 0
        self.retries = 0
        self.rejected_blocks = 0
        self.confinement_breaches = 0
        self.detection_hops = []
        self.anchor_txns = 0
        self.receipts_issued = 0

    def to_dict(self):
        return {
            "receipt_propagation_rounds": list(self.receipt_propagation_rounds),
            "sync_delay_ms": list(self.sync_delay_ms),
            "receipt_bytes": dict((str(k), v) for k, v in
                                  sorted(self.receipt_bytes.items())),
            "message_count": self.message_count,
            "messages_by_type": dict(sorted(self.messages_by_type.items())),
            "stale_rejections": self.stale_rejections,
            "retries": self.retries,
            "rejected_blocks": self.rejected_blocks,
            "confinement_breaches": self.confinement_breaches,
            "detection_hops": list(self.detection_hops),
            "anchor_txns": self.anchor_txns,
            "receipts_issued": self.receipts_issued,
        }

    def to_json(self):
        return json_encode(self.to_dict())


SimResult = namedtuple("SimResult", "world metrics proofs anchor_log")


class World(object):

    def __init__(self, config):
        self.config = config
        self.env = simpy.Environment()
        self.rng = random.Random(config.seed)
        self.metrics = SimMetrics()
        self.anchor = AnchorLog(clock=self._clock,
                                confirmation_latency=config.anchor_latency_ms)

        self.notary_keypair = keypair_from_label("notary")
        notary_config = NotaryConfig.from_dict(self.notary_keypair,
                                               config.notary)
        fault = config.notary_fault()
        if fault is not None:
            notary_cls = FAULT_CLASSES[fault.kind]
            self.notary = notary_cls(notary_config, self.anchor, self._clock,
                                     fault=fault)
        else:
            self.notary = Notary(notary_config, self.anchor, self._clock)

        self.registry = Registry()
        self.nodes = {}
        self.names = {}
        self.order = []
        for i in range(config.node_count):
            name = "n%d" % i
            keypair = keypair_from_label(name)
            self.registry.add(keypair.public)
            self.names[keypair.actor_id] = name
            self.order.append(name)
        for name in self.order:
            self.nodes[name] = self._make_node(name)

        self.ledgers = {}
        self.exports = {}
        self.certificates = []
        self.rejections = []
        self.proofs = []
        self._proof_keys = set()
        self._pending_sync = {}
        self._fetching = set()
        self.horizon = 0
        self._round = 0
        self._flush_at = None
        self._failure = None
        self.inboxes = dict((name, simpy.Store(self.env))
                            for name in self.order)

    @property
    def now(self):
        return self.env.now

    def _clock(self):
        return self.env.now

    def _make_node(self, name):
        node_cls, kwargs = Node, {}
        for fault in self.config.faults:
            if not fault.targets_notary and \
                    (fault.params.get("node") or "n0") == name:
                node_cls = FAULT_CLASSES[fault.kind]
                kwargs["fault"] = fault
        return node_cls(keypair_from_label(name), self.registry,
                        self.notary_keypair.public, self.notary,
                        send_blocks=self.notary.config.mode_repository,
                        clock=self._clock, **kwargs)

    def node(self, name):
        node = self.nodes.get(name)
        if node is None:
            raise ScriptError("unknown actor %r" % name)
        return node

    def ledger(self, alias):
        ledger_id = self.ledgers.get(alias)
        if ledger_id is None:
            raise ScriptError("unknown ledger %r" % alias)
        return ledger_id

    def send(self, recipient, message):
        low, high = self.config.latency_ms
        self.metrics.message_count += 1
        self.metrics.messages_by_type[type(message).__name__] += 1
        self.env.process(self._transit(self.rng.randint(low, high), recipient,
                                       message))

    def run(self, actions):
        last = max([a.time_ms for a in actions] or [0])
        self.horizon = last + self.config.settle_ms
        self.env.process(self._script(actions))
        self.env.process(self._gossip())
        for name in self.order:
            self.env.process(self._receiver(name))
        self._schedule_flush()

        # receivers wait on their inboxes forever; stop once nothing is due
        while self._failure is None and \
                self.env.peek() != simpy.core.Infinity:
            self.env.step()
        if self._failure is not None:
            raise self._failure
        if self.env.now < self.horizon:
            self.env.run(until=self.horizon)

        for name in self.order:
            for proof in self.nodes[name].audit_internal(self.anchor,
                                                        self.now):
                self._record_proof(proof, 0)
        self._finish_metrics()
        return SimResult(self, self.metrics, list(self.proofs), self.anchor)

    def _settled(self):
        self._schedule_flush()
        self._check_sync()

    def _script(self, actions):
        for action in sorted(actions, key=lambda a: a.time_ms):
            if action.time_ms > self.env.now:
                yield self.env.timeout(action.time_ms - self.env.now)
            try:
                self._on_action(action)
            except ScriptError as e:
                self._failure = e
                return
            self._settled()

    def _transit(self, delay, recipient, message):
        yield self.env.timeout(delay)
        yield self.inboxes[recipient].put(message)

    def _receiver(self, name):
        inbox = self.inboxes[name]
        while True:
            message = yield inbox.get()
            self._on_deliver(name, message)
            self._settled()

    def _gossip(self):
        interval = self.config.gossip_interval_ms
        while self.env.now + interval <= self.horizon:
            yield self.env.timeout(interval)
            self._gossip_round()
            self._settled()

    def _schedule_flush(self):
        due = self.notary.next_due()
        if due is not None and due != self._flush_at:
            self._flush_at = due
            self.env.process(self._flush(max(due - self.env.now, 0)))

    def _flush(self, delay):
        yield self.env.timeout(delay)
        if self.notary.flush(self.now):
            sim_log.debug("t=%d flushed delayed steps", self.now)
        self._settled()

    def _gossip_round(self):
        self._round += 1
        names = self.order
        if len(names) > 1:
            for i, name in enumerate(names):
                node = self.nodes[name]
                peer = names[(i + 1 + self._round % (len(names) - 1))
                             % len(names)]
                if peer == name:
                    peer = names[(i + 1) % len(names)]
                self.send(peer, SummaryMsg(node.summary(), name))
                for fetch in node.pending_fetches():
                    self._fetch(name, fetch)

    def _on_action(self, action):
        node = self.node(action.actor)
        params = action.params
        try:
            getattr(self, "_do_" + action.action)(action.actor, node, params)
        except ScriptError:
            raise
        except HybridError as e:
            sim_log.info("t=%d %s %s rejected: %s", self.now, action.actor,
                         action.action, e)
            self.rejections.append((action, e.code))
        self._drain(action.actor)

    def _blocks(self, params, start=0):
        if params.get("blocks"):
            blocks = [b.encode("utf-8") for b in params["blocks"]]
        else:
            blocks = [self.rng.getrandbits(8 * params["size"]).to_bytes(
                params["size"], "big") for _ in range(params["count"])]
        if params.get("tag") is not None:
            blocks = [bytes([params["tag"]]) + b for b in blocks]
        return blocks

    def _do_create(self, name, node, params):
        authors = [self.node(a).public_key for a in params["authors"] or ()]
        authors.append(node.public_key)
        blocks = self._blocks(params)
        if params.get("policy"):
            policy = PolicyForm.parse(params["policy"], "policy")
            tags = policy["allowed_content_tags"]
            blocks.insert(0, encode(Policy(
                policy["max_block_bytes"], policy["min_signers"],
                bytes(tags) if tags is not None else None)))
        _, receipt = node.create_ledger(authors, blocks, params["nonce"])
        self.ledgers[params["ledger"]] = bytes(receipt.ledger_id)

    def _do_extend(self, name, node, params):
        ledger_id = self.ledger(params["ledger"])
        cosigners = [self.node(c) for c in params["cosigners"] or ()]
        node.extend_ledger(ledger_id, self._blocks(params), cosigners)

    def _do_erase(self, name, node, params):
        node.erase_block(self.ledger(params["ledger"]), params["index"])

    def _do_export(self, name, node, params):
        ledger_id = self.ledger(params["ledger"])
        archive = node.share(ledger_id, params["indices"])
        key = params["name"] or "%s-%s" % (name, params["ledger"])
        self.exports[key] = archive

    def _do_serve(self, name, node, params):
        ledger_id = self.ledger(params["ledger"])
        self.node(params["to"])
        archive = node.share(ledger_id, params["indices"])
        self.send(params["to"], BundleMsg(archive, name, (), True))

    def _do_recover(self, name, node, params):
        ledger_id = self.ledger(params["ledger"])
        node.drop_replica(ledger_id)
        node.recover_from_notary(ledger_id)

    def _do_certify(self, name, node, params):
        ledger_id = self.ledger(params["ledger"])
        indices = params["indices"]
        if indices is None:
            indices = range(node.known_size(ledger_id))
        self.certificates.append(
            self.notary.certify_blocks(ledger_id, indices))

    def _issued(self, receipt):
        self.metrics.receipt_bytes[len(encode(receipt))] += 1
        authors = self.participants(bytes(receipt.ledger_id))
        self._pending_sync[(bytes(receipt.ledger_id),
                            receipt.new_state()[1])] = (receipt.timestamp,
                                                        authors)

    def _check_sync(self):
        for key in sorted(self._pending_sync):
            ledger_id, size = key
            issued_at, authors = self._pending_sync[key]
            if all(self.nodes[a].replicas.get(ledger_id) is not None and
                   self.nodes[a].replicas[ledger_id].official_size >= size
                   for a in authors):
                self.metrics.sync_delay_ms.append(self.now - issued_at)
                del self._pending_sync[key]

    def _drain(self, name):
        node = self.nodes[name]
        actions, node.outbox = node.outbox, []
        self._perform(name, actions)

    def _perform(self, name, actions):
        for action in actions:
            if isinstance(action, Forward):
                peers = [p for p in self.order if p != name]
                count = min(self.config.fanout, len(peers))
                for peer in self.rng.sample(peers, count):
                    self.send(peer, ReceiptMsg(action.receipt, action.hops))
            elif isinstance(action, FetchBlocks):
                self._fetch(name, action)
            elif isinstance(action, Misbehavior):
                self._record_proof(action.proof, action.hops)
            elif isinstance(action, Issued):
                self._issued(action.receipt)

    def _fetch(self, name, action):
        key = (name, action.ledger_id)
        sources = [self.names[a] for a in action.sources if a in self.names]
        if key in self._fetching or not sources:
            return
        self._fetching.add(key)
        self.send(sources[0], FetchMsg(action.ledger_id, action.indices, name,
                                       tuple(sources[1:])))

    def _record_proof(self, proof, hops):
        key = (proof.kind,) + tuple(bytes(r.notary_sig)
                                    for r in proof.receipts)
        if key in self._proof_keys:
            return
        self._proof_keys.add(key)
        self.proofs.append(proof)
        self.metrics.detection_hops.append(hops)
        sim_log.info("t=%d %s proof for ledger %s", self.now, proof.kind.name,
                     hexlify(proof.ledger_id))

    def _on_deliver(self, recipient, message):
        node = self.nodes[recipient]
        if isinstance(message, ReceiptMsg):
            self._perform(recipient, node.on_receipt(message.receipt,
                                                     message.hops))
        elif isinstance(message, SummaryMsg):
            for receipt in node.missing_for(message.keys):
                hops = node.first_seen.get(bytes(receipt.notary_sig), 0)
                self.send(message.sender, ReceiptMsg(receipt, hops + 1))
        elif isinstance(message, FetchMsg):
            self._serve(recipient, node, message)
        elif isinstance(message, BundleMsg):
            self._ingest(recipient, node, message)
        elif isinstance(message, RefusedMsg):
            self._fetching.discard((recipient, message.ledger_id))
            self._fetch(recipient, FetchBlocks(
                message.ledger_id, message.indices,
                tuple(self.nodes[n].actor_id for n in message.fallback)))
        self._drain(recipient)

    def _serve(self, name, node, message):
        requester = self.nodes[message.requester]
        try:
            archive = node.serve_blocks(message.ledger_id, message.indices,
                                        requester.public_key)
        except HybridError as e:
            sim_log.debug("t=%d %s refused %s: %s", self.now, name,
                          message.requester, e)
            self.send(message.requester, RefusedMsg(
                message.ledger_id, message.indices, message.fallback))
            return
        self.send(message.requester, BundleMsg(archive, name,
                                               message.fallback, False))

    def _ingest(self, name, node, message):
        archive = message.archive
        ledger_id = bytes(archive.ledger_id)
        if not message.shared:
            self._fetching.discard((name, ledger_id))
            if node.public_key not in archive.authors and \
                    any(i.entry.is_present for i in archive.items):
                self.metrics.confinement_breaches += 1
        fallback = tuple(self.nodes[n].actor_id for n in message.fallback)
        node.ingest_blocks(ledger_id, archive, fallback)

    def _finish_metrics(self):
        rounds = {}
        for name in self.order:
            for key, hops in self.nodes[name].first_seen.items():
                rounds.setdefault(key, []).append(hops)
        self.metrics.receipt_propagation_rounds = [
            max(hops) for _, hops in sorted(rounds.items())
            if len(hops) == len(self.order)]
        self.metrics.stale_rejections = \
            self.notary.stats.rejected["STALE_DIGEST"]
        self.metrics.retries = sum(n.stats.retries
                                   for n in self.nodes.values())
        self.metrics.rejected_blocks = sum(n.stats.rejected_blocks
                                           for n in self.nodes.values())
        self.metrics.anchor_txns = len(self.anchor)
        self.metrics.receipts_issued = self.notary.stats.accepted

    def participants(self, ledger_id):
        """Names of the nodes in a ledger's author set."""
        for name in self.order:
            creation = self.nodes[name].creations.get(ledger_id)
            if creation is not None:
                actors = [ActorId.of(k) for k in creation.request.authors]
                return [self.names[a] for a in actors if a in self.names]
        return []

    def check_invariants(self):
        """Failures of the invariants every fault-free run must keep."""
        failures = []
        for name in self.order:
            for ledger_id, replica in sorted(self.nodes[name].replicas.items()):
                for problem in replica.check_invariants():
                    failures.append("%s/%s: %s" % (name, hexlify(ledger_id),
                                                   problem))
        for alias, ledger_id in sorted(self.ledgers.items()):
            record = self.notary.records.get(ledger_id)
            official = record.state() if record is not None else None
            for name in self.participants(ledger_id):
                replica = self.nodes[name].replicas.get(ledger_id)
                if replica is None:
                    failures.append("%s has no replica of %s" % (name, alias))
                elif replica.state() != official:
                    failures.append("%s: %s at size %d, official %d" % (
                        name, alias, replica.official_size,
                        official[1] if official else 0))
        if self.metrics.confinement_breaches:
            failures.append("%d bundles crossed the author set"
                            % self.metrics.confinement_breaches)
        if not self.notary.config.mode_repository and \
                self.notary.stats.blocks_received:
            failures.append("the Notary received %d blocks"
                            % self.notary.stats.blocks_received)
        report = audit_anchor(self.anchor, self.notary.address, self.now)
        for violation in report.violations():
            failures.append("anchor audit: %s %s" % (violation.kind,
                                                     violation.txn_ids))
        return failures

    def verify_exports(self):
        """Verdict of the external export check for every export made."""
        return dict((name, verify_export(archive, self.anchor,
                                         self.notary.public_key, self.now))
                    for name, archive in sorted(self.exports.items()))

    def verify_proofs(self):
        return [verify_misbehavior_proof(p, self.notary.public_key,
                                         self.anchor, self.now)
                for p in self.proofs]


def parse_script(lines):
    """Actions from JSON-lines text (or already decoded dicts), in order."""
    actions = []
    for number, line in enumerate(lines, 1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if isinstance(line, str):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                line = json_decode(line)
            except ValueError as e:
                raise ScriptError("line %d: %s" % (number, e))
        values = ActionForm.parse(line, "action on line %d" % number)
        actions.append(Action(values["time_ms"], values["actor"],
                              values["action"], values["params"]))
    return actions


def load_script(path):
    try:
        with io.open(path, "r", encoding="utf-8") as f:
            return parse_script(f.readlines())
    except (IOError, OSError) as e:
        raise ScriptError("cannot read %s: %s" % (path, e))


def run(config, actions):
    """Runs a script; the same (config, actions) always gives the same
    result."""
    if isinstance(config, dict):
        config = SimConfig.from_dict(config)
    actions = [a if isinstance(a, Action) else parse_script([a])[0]
               for a in actions]
    world = World(config)
    for action in actions:
        world.node(action.actor)
    result = world.run(actions)
    sim_log.info("simulated %d actions: %d messages, %d anchor txns, "
                 "%d proofs", len(actions), result.metrics.message_count,
                 result.metrics.anchor_txns, len(result.proofs))
    return result
