#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Hybrid ledgers: private per-group ledgers with notarized public histories."""

from __future__ import absolute_import, division, \
    print_function, with_statement

# package version
version = "0.1.0"
