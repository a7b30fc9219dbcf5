#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Hex and size helpers shared by the wire format, key files and proofs."""

from __future__ import absolute_import, division, print_function, with_statement

import binascii


def hexlify(value):
    """Lowercase hex for bytes-like values; other values pass through."""
    if isinstance(value, (bytes, bytearray, memoryview)):
        return binascii.hexlify(bytes(value)).decode("ascii")
    return value


def unhexlify(text, size=None):
    """Parses a hex string, optionally checking the decoded length."""
    try:
        value = binascii.unhexlify(text.strip())
    except (binascii.Error, TypeError, AttributeError) as e:
        raise ValueError("not a hex string: %s" % e)
    if size is not None and len(value) != size:
        raise ValueError("expected %d bytes, got %d" % (size, len(value)))
    return value


def ceil_log2(n):
    """Smallest k with 2**k >= n; 0 for n <= 1."""
    return (n - 1).bit_length() if n > 1 else 0
