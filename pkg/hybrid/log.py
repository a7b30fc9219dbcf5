#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Logging support for the hybrid ledger components.

Like `tornado.log`, this module only names the loggers; formatting is left
to `tornado.log.enable_pretty_logging`, which the command line installs
through Tornado's ``--logging`` option.

* ``hybrid.notary``: request handling, anchoring and flushes.
* ``hybrid.node``: gossip, block dissemination and misbehavior evidence.
* ``hybrid.anchor``: public log submissions and persistence.
* ``hybrid.audit``: public audits and export verification.
* ``hybrid.sim``: the network simulator and benchmarks.
"""

from __future__ import absolute_import, division, print_function, with_statement

import logging
import os

notary_log = logging.getLogger("hybrid.notary")
node_log = logging.getLogger("hybrid.node")
anchor_log = logging.getLogger("hybrid.anchor")
audit_log = logging.getLogger("hybrid.audit")
sim_log = logging.getLogger("hybrid.sim")

LOG_LEVELS = ("error", "info", "debug")

DEFAULT_LOG_LEVEL = "info"


def level_from_env(environ=None):
    """Returns the log level named by ``HYBRID_LOG_LEVEL``.

    Unknown values fall back to ``info`` with a warning.
    """
    environ = os.environ if environ is None else environ
    level = environ.get("HYBRID_LOG_LEVEL", DEFAULT_LOG_LEVEL).strip().lower()
    if level not in LOG_LEVELS:
        logging.getLogger("hybrid").warning(
            "Ignoring HYBRID_LOG_LEVEL=%r, expected one of %s",
            level, ", ".join(LOG_LEVELS))
        return DEFAULT_LOG_LEVEL
    return level
