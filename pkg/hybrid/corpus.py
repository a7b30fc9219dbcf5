#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Named simulation scenarios and the outcome each one must produce.

Scenarios register themselves with a decorator::

    @scenario("honest-small", nodes=2)
    def honest_small():
        return [act(0, "n0", "create", ledger="L", blocks=["a"])]

The decorated function returns the scenario script as plain action
dictionaries; `Scenario.check` compares a `~hybrid.simnet.SimResult` with
the expectation: ``honest`` runs keep every invariant and produce no
evidence, fault runs must yield their designated detection.
"""

from __future__ import absolute_import, division, print_function, with_statement

import math

from collections import OrderedDict

from hybrid.anchor import ledger_txns
from hybrid.auditor import DUPLICATE_INIT, audit_anchor
from hybrid.errors import ScriptError
from hybrid.ledgerstore import archive_bytes
from hybrid.log import sim_log
from hybrid.protocol import BatchPayload, ProofKind, verify_certificate
from hybrid.simnet import SimConfig, parse_script, run

HONEST = "honest"
BLOCK_REJECTION = "BLOCK_REJECTION"


def act(time_ms, actor, action, **params):
    return {"time_ms": time_ms, "actor": actor, "action": action,
            "params": params}


class Scenario(object):

    _scenarios = OrderedDict()

    def __init__(self, name, nodes, expect=HONEST, config=None, faults=(),
                 rejections=(), extra=None):
        self.name = name
        self.nodes = nodes
        self.expect = expect
        self.settings = dict(config or {})
        self.faults = list(faults)
        self.rejections = tuple(rejections)
        self.extra = extra
        self.build = None

    def __call__(self, build):
        """gets called when we decorate the script builder"""
        sim_log.debug("scenario `%s`, found builder `%s`", self.name,
                      build.__name__)
        self.build = build
        self._scenarios[self.name] = self
        return build

    @classmethod
    def scenarios(cls):
        return list(cls._scenarios.values())

    @classmethod
    def get(cls, name):
        try:
            return cls._scenarios[name]
        except KeyError:
            raise ScriptError("unknown scenario %r" % name)

    @property
    def honest(self):
        return self.expect == HONEST

    def config(self, seed=0):
        values = dict(self.settings, seed=seed, node_count=self.nodes,
                      faults=self.faults)
        return SimConfig.from_dict(values)

    def actions(self):
        return parse_script(self.build())

    def run(self, seed=0):
        return run(self.config(seed), self.actions())

    def check(self, result):
        """Human readable failures; empty when the run behaved as
        expected."""
        world = result.world
        failures = []
        for proof, verdict in zip(result.proofs, world.verify_proofs()):
            if not verdict:
                failures.append("%s proof rejected: %s"
                                % (proof.kind.name, verdict.reason))
        codes = tuple(code for _, code in world.rejections)
        if codes != self.rejections:
            failures.append("rejections %r, expected %r"
                            % (codes, self.rejections))

        if self.honest:
            failures.extend(world.check_invariants())
            for name, verdict in world.verify_exports().items():
                if not verdict:
                    failures.append("export %s rejected: %s"
                                    % (name, verdict.reason))
            if result.proofs:
                failures.append("%d proofs in an honest run"
                                % len(result.proofs))
        elif self.expect == DUPLICATE_INIT:
            report = audit_anchor(result.anchor_log, world.notary.address,
                                  world.now)
            if not report.violations(DUPLICATE_INIT):
                failures.append("no DUPLICATE_INIT reported")
        elif self.expect == BLOCK_REJECTION:
            if not result.metrics.rejected_blocks:
                failures.append("no tampered block rejected")
            failures.extend(world.check_invariants())
        else:
            kinds = set(p.kind.name for p in result.proofs)
            if self.expect not in kinds:
                failures.append("no %s proof (got %s)"
                                % (self.expect, sorted(kinds) or "none"))

        if self.extra is not None:
            failures.extend(self.extra(result))
        return failures


scenario = Scenario


def scenario_corpus():
    return Scenario.scenarios()


def _final_size(alias, size):
    def check(result):
        world = result.world
        record = world.notary.records[world.ledger(alias)]
        if record.size != size:
            return ["%s at size %d, expected %d" % (alias, record.size, size)]
        return []
    return check


def _race(result):
    failures = _final_size("L", 3)(result)
    if result.metrics.stale_rejections != 1:
        failures.append("%d stale rejections, expected 1"
                        % result.metrics.stale_rejections)
    if result.metrics.retries < 1:
        failures.append("the stale extension was never retried")
    return failures


def _erasure(result):
    archive = result.world.exports["full"]
    failures = []
    if archive.item(1).entry.is_present:
        failures.append("erased block exported with content")
    if b"secret-record" in archive_bytes(archive):
        failures.append("erased plaintext found in the archive")
    return failures


def _delayed(result):
    world = result.world
    ledger_id = world.ledger("L")
    txns = ledger_txns(result.anchor_log.txns, ledger_id)
    batches = [t for t in txns if isinstance(t.payload, BatchPayload)]
    start = world.nodes["n0"].creations[ledger_id].timestamp
    flushes = sorted(set(t.timestamp for t in txns))
    duration = flushes[-1] - start
    interval = world.notary.config.interval
    failures = []
    if len(txns) > math.ceil(duration / interval):
        failures.append("%d anchor txns over %d ms" % (len(txns), duration))
    for previous, flushed in zip([start] + flushes, flushes):
        if flushed - previous < interval:
            failures.append("flush at %d ms, %d ms after the previous one"
                            % (flushed, flushed - previous))
    if len(batches) != 3:
        failures.append("%d batches, expected 3" % len(batches))
    if result.metrics.receipts_issued != 7:
        failures.append("%d receipts, expected 7"
                        % result.metrics.receipts_issued)
    if not any(len(b.payload.steps) == 3 for b in batches):
        failures.append("no batch carried three steps")
    return failures


def _recovery(result):
    world = result.world
    failures = _final_size("L", 6)(result)
    for certificate in world.certificates:
        if not verify_certificate(certificate, world.notary.public_key):
            failures.append("certificate does not verify")
    if not world.certificates:
        failures.append("no certificate issued")
    return failures


def _fork_detection(result):
    if result.metrics.detection_hops and \
            min(result.metrics.detection_hops) > 10:
        return ["fork detected after %d hops"
                % min(result.metrics.detection_hops)]
    return []


def _incoherent_export(result):
    verdicts = result.world.verify_exports()
    return ["export %s: %s" % (name, verdict.reason)
            for name, verdict in verdicts.items()
            if verdict.reason != "HISTORY_INCOHERENT"]


@scenario("honest-small", nodes=2, extra=_final_size("L", 9))
def honest_small():
    return [
        act(0, "n0", "create", ledger="L", authors=["n1"],
            blocks=["genesis", "terms"]),
        act(300, "n0", "extend", ledger="L", count=2),
        act(600, "n1", "extend", ledger="L", count=3),
        act(900, "n0", "extend", ledger="L", count=2),
        act(1500, "n1", "export", ledger="L", name="full"),
    ]


@scenario("honest-medium", nodes=5, extra=_final_size("L", 21))
def honest_medium():
    names = ["n%d" % i for i in range(5)]
    actions = [act(0, "n0", "create", ledger="L", authors=names[1:],
                   count=1)]
    for i in range(10):
        actions.append(act(400 * (i + 1), names[i % 5], "extend",
                           ledger="L", count=2, size=64))
    actions.append(act(4600, "n3", "export", ledger="L", name="full"))
    return actions


@scenario("honest-large", nodes=20, extra=_final_size("L", 11))
def honest_large():
    sharing = ["n%d" % i for i in range(10)]
    actions = [
        act(0, "n0", "create", ledger="L", authors=sharing[1:], count=1),
        act(0, "n10", "create", ledger="M", authors=["n11"], count=2),
    ]
    for i in range(10):
        actions.append(act(500 * (i + 1), sharing[i], "extend", ledger="L",
                           count=1))
    actions.append(act(700, "n11", "extend", ledger="M", count=1))
    actions.append(act(6000, "n9", "export", ledger="L", name="full"))
    actions.append(act(6000, "n10", "export", ledger="M", name="other"))
    return actions


@scenario("honest-groups", nodes=6, extra=_final_size("B", 4))
def honest_groups():
    return [
        act(0, "n0", "create", ledger="A", authors=["n1", "n2"], count=2),
        act(0, "n3", "create", ledger="B", authors=["n4"], count=2),
        act(10, "n5", "create", ledger="C", count=1),
        act(400, "n2", "extend", ledger="A", count=1),
        act(400, "n4", "extend", ledger="B", count=2),
        act(800, "n5", "extend", ledger="C", count=1),
        act(1500, "n1", "export", ledger="A", indices=[0, 2], name="partial"),
    ]


@scenario("race", nodes=2, extra=_race)
def race():
    return [
        act(0, "n0", "create", ledger="L", authors=["n1"], count=1),
        act(500, "n0", "extend", ledger="L", count=1),
        act(500, "n1", "extend", ledger="L", count=1),
    ]


@scenario("erasure-export", nodes=3, extra=_erasure)
def erasure_export():
    return [
        act(0, "n0", "create", ledger="L", authors=["n1"],
            blocks=["public-header", "secret-record-of-a-person"]),
        act(300, "n1", "extend", ledger="L", blocks=["invoice-1"]),
        act(800, "n0", "erase", ledger="L", index=1),
        act(900, "n0", "export", ledger="L", name="full"),
    ]


@scenario("delayed-notarization", nodes=3,
          config=dict(notarization="delayed", interval_ms=200,
                      anchor_latency_ms=20),
          extra=_delayed)
def delayed_notarization():
    actions = [act(0, "n0", "create", ledger="L", authors=["n1"], count=1)]
    for t in (100, 120, 140, 400, 420, 900):
        actions.append(act(t, "n0", "extend", ledger="L", count=1))
    actions.append(act(1500, "n1", "export", ledger="L", name="full"))
    return actions


@scenario("repository-recovery", nodes=2,
          config=dict(mode_repository=True), extra=_recovery)
def repository_recovery():
    return [
        act(0, "n0", "create", ledger="L", authors=["n1"], count=3),
        act(300, "n1", "extend", ledger="L", count=2),
        act(600, "n0", "extend", ledger="L", count=1),
        act(900, "n0", "recover", ledger="L"),
        act(1000, "n1", "certify", ledger="L"),
        act(1200, "n0", "export", ledger="L", name="full"),
    ]


@scenario("policy-enforcement", nodes=3,
          config=dict(mode_repository=True, mode_policy=True),
          rejections=("POLICY_VIOLATION", "POLICY_VIOLATION"),
          extra=_final_size("L", 5))
def policy_enforcement():
    policy = dict(max_block_bytes=64, min_signers=2,
                  allowed_content_tags=[1])
    return [
        act(0, "n0", "create", ledger="L", authors=["n1", "n2"],
            policy=policy, count=2, size=16, tag=1),
        act(500, "n0", "extend", ledger="L", count=2, size=16, tag=1,
            cosigners=["n1"]),
        act(1000, "n0", "extend", ledger="L", count=1, size=200, tag=1,
            cosigners=["n1"]),
        act(1100, "n2", "extend", ledger="L", count=1, size=16, tag=1),
        act(1500, "n2", "export", ledger="L", name="full"),
    ]


@scenario("notary-fork", nodes=4, expect=ProofKind.FORK.name,
          faults=[dict(kind="NOTARY_FORK", time_ms=400)],
          extra=_fork_detection)
def notary_fork():
    return [
        act(0, "n0", "create", ledger="L", authors=["n1"], count=2),
        act(500, "n0", "extend", ledger="L", count=1),
        act(500, "n1", "extend", ledger="L", count=1),
    ]


@scenario("notary-unauthorized-accept", nodes=3,
          expect=ProofKind.UNAUTHORIZED_ACCEPT.name,
          faults=[dict(kind="NOTARY_UNAUTHORIZED_ACCEPT", time_ms=0)])
def notary_unauthorized_accept():
    return [
        act(0, "n0", "create", ledger="L", authors=["n1"], count=2),
        act(300, "n0", "serve", ledger="L", to="n2"),
        act(800, "n2", "extend", ledger="L", count=1),
    ]


@scenario("anchor-omit", nodes=3, expect=ProofKind.ANCHOR_DESYNC.name,
          config=dict(anchor_latency_ms=30),
          faults=[dict(kind="ANCHOR_OMIT", event=2)])
def anchor_omit():
    return [
        act(0, "n0", "create", ledger="L", authors=["n1"], count=1),
        act(300, "n0", "extend", ledger="L", count=1),
        act(600, "n1", "extend", ledger="L", count=1),
    ]


@scenario("duplicate-init", nodes=2, expect=DUPLICATE_INIT,
          faults=[dict(kind="DUPLICATE_INIT", event=2)],
          extra=_incoherent_export)
def duplicate_init():
    return [
        act(0, "n0", "create", ledger="L", authors=["n1"], count=2),
        act(300, "n1", "extend", ledger="L", count=1),
        act(900, "n0", "export", ledger="L", name="full"),
    ]


@scenario("node-tamper-block", nodes=3, expect=BLOCK_REJECTION,
          faults=[dict(kind="NODE_TAMPER_BLOCK", node="n0", time_ms=400)])
def node_tamper_block():
    return [
        act(0, "n0", "create", ledger="L", authors=["n1", "n2"], count=1),
        act(500, "n0", "extend", ledger="L", count=2),
        act(1200, "n1", "extend", ledger="L", count=1),
    ]
