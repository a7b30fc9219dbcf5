#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Exceptions raised across the package.

Every error carries a short ``code`` (``"STALE_DIGEST"``,
``"INDEX_OUT_OF_RANGE"``, ...) so callers can branch on it without parsing
messages. Verifiers never raise for a negative outcome; they return a
`~hybrid.protocol.Verdict` instead.
"""

from __future__ import absolute_import, division, print_function, with_statement


class HybridError(Exception):
    """Base class for every error raised by this package."""

    def __init__(self, code, detail=None):
        self.code = code
        self.detail = detail
        message = code if detail is None else "%s: %s" % (code, detail)
        super(HybridError, self).__init__(message)


class HashTreeError(HybridError):
    pass


class IdentityError(HybridError):
    pass


class ProtocolError(HybridError):
    pass


class LedgerError(HybridError):
    pass


class AnchorError(HybridError):
    pass


class NotaryError(HybridError):
    pass


class NodeError(HybridError):
    pass


class ScriptError(HybridError):
    """Raised for unusable scenario scripts and configuration.

    ``errors`` holds the per-field messages when the error comes from form
    validation.
    """

    def __init__(self, detail=None, errors=None):
        self.errors = errors or {}
        super(ScriptError, self).__init__("SCRIPT_ERROR", detail)
