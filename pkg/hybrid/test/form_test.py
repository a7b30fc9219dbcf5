#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

from __future__ import absolute_import, division, print_function, with_statement

import unittest

from hybrid.errors import ScriptError
from hybrid.form import (
    ActionForm, BenchForm, FaultForm, PolicyForm, SimConfigForm)


class ActionFormTest(unittest.TestCase):

    def test_create(self):
        action = ActionForm.parse({
            "time_ms": "0", "actor": "n0", "action": "create",
            "params": {"ledger": "L", "authors": ["n1"], "blocks": ["a"],
                       "surplus": True}})
        self.assertEqual(action["time_ms"], 0)
        params = action["params"]
        self.assertEqual(params["authors"], ["n1"])
        self.assertEqual(params["size"], 32)
        self.assertIsNone(params["nonce"])
        self.assertNotIn("surplus", params)

    def test_extend_needs_blocks_or_count(self):
        with self.assertRaises(ScriptError) as cm:
            ActionForm.parse({"time_ms": 5, "actor": "n0", "action": "extend",
                              "params": {"ledger": "L"}})
        self.assertIn("blocks", cm.exception.errors)
        action = ActionForm.parse({
            "time_ms": 5, "actor": "n0", "action": "extend",
            "params": {"ledger": "L", "count": 3, "size": 8}})
        self.assertEqual(action["params"]["count"], 3)
        self.assertEqual(action["params"]["cosigners"], ())

    def test_rejects(self):
        cases = [
            ({"time_ms": -1, "actor": "n0", "action": "erase"}, "time_ms"),
            ({"time_ms": 0, "actor": "", "action": "erase"}, "actor"),
            ({"time_ms": 0, "actor": "n0", "action": "explode"}, "action"),
            ({"time_ms": 0, "actor": "n0", "action": "erase",
              "params": ["ledger"]}, "params"),
        ]
        for values, field in cases:
            with self.assertRaises(ScriptError) as cm:
                ActionForm.parse(values)
            self.assertIn(field, cm.exception.errors)
        with self.assertRaises(ScriptError):
            ActionForm.parse(["not", "an", "object"])

    def test_param_errors_name_the_action(self):
        with self.assertRaises(ScriptError) as cm:
            ActionForm.parse({"time_ms": 0, "actor": "n0", "action": "erase",
                              "params": {"ledger": "L", "index": -2}})
        self.assertIn("erase params", cm.exception.detail)
        self.assertIn("index", cm.exception.errors)

    def test_indices(self):
        action = ActionForm.parse({
            "time_ms": 0, "actor": "n0", "action": "export",
            "params": {"ledger": "L", "indices": ["2", 0]}})
        self.assertEqual(action["params"]["indices"], [2, 0])
        self.assertIsNone(action["params"]["name"])
        action = ActionForm.parse({
            "time_ms": 0, "actor": "n0", "action": "certify",
            "params": {"ledger": "L"}})
        self.assertIsNone(action["params"]["indices"])


class SimConfigFormTest(unittest.TestCase):

    def test_defaults(self):
        params = SimConfigForm.parse({"node_count": 3})
        self.assertEqual(params["seed"], 0)
        self.assertEqual(params["fanout"], 2)
        self.assertEqual((params["latency_min_ms"], params["latency_max_ms"]),
                         (5, 20))
        self.assertEqual(params["notarization"], "immediate")
        self.assertFalse(params["mode_repository"])

    def test_node_count_required(self):
        with self.assertRaises(ScriptError) as cm:
            SimConfigForm.parse({})
        self.assertIn("node_count", cm.exception.errors)

    def test_latency_order(self):
        form = SimConfigForm({"node_count": 2, "latency_min_ms": 30,
                              "latency_max_ms": 10})
        self.assertFalse(form.validate())
        self.assertIn("latency_min_ms", form.errors)

    def test_notary_modes(self):
        form = SimConfigForm({"node_count": 2, "mode_policy": "true",
                              "notarization": "delayed"})
        self.assertFalse(form.validate())
        self.assertEqual(sorted(form.normalized_errors),
                         ["interval_ms", "mode_policy"])
        params = SimConfigForm.parse({
            "node_count": 2, "mode_repository": True, "mode_policy": True,
            "notarization": "delayed", "interval_ms": 200})
        self.assertTrue(params["mode_policy"])
        self.assertEqual(params["interval_ms"], 200)


class FaultAndPolicyFormTest(unittest.TestCase):

    def test_fault(self):
        params = FaultForm.parse({"kind": "ANCHOR_OMIT", "event": 2})
        self.assertEqual(params["event"], 2)
        self.assertIsNone(params["time_ms"])
        with self.assertRaises(ScriptError):
            FaultForm.parse({"kind": "METEOR_STRIKE"})

    def test_policy(self):
        params = PolicyForm.parse({"max_block_bytes": 64,
                                   "allowed_content_tags": [1, 2]})
        self.assertEqual(params["allowed_content_tags"], [1, 2])
        self.assertIsNone(params["min_signers"])
        with self.assertRaises(ScriptError):
            PolicyForm.parse({"allowed_content_tags": [256]})


class BenchFormTest(unittest.TestCase):

    def test_bench(self):
        params = BenchForm.parse({"blocks": "10"})
        self.assertEqual(params["blocks"], 10)
        self.assertEqual(params["block_bytes"], 1024)
        self.assertEqual(params["mode"], "immediate")
        for values in ({"blocks": 0}, {"blocks": None}, {"blocks": 5,
                                                          "mode": "lazy"}):
            with self.assertRaises(ScriptError):
                BenchForm.parse(values)


if __name__ == "__main__":
    unittest.main()
