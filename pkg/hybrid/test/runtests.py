#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

from __future__ import absolute_import, division, print_function, with_statement

import logging
import unittest

TEST_MODULES = [
    'hybrid.test.hashtree_test',
    'hybrid.test.identity_test',
    'hybrid.test.protocol_test',
    'hybrid.test.ledgerstore_test',
    'hybrid.test.anchor_test',
    'hybrid.test.notary_test',
    'hybrid.test.node_test',
    'hybrid.test.faulty_test',
    'hybrid.test.auditor_test',
    'hybrid.test.form_test',
    'hybrid.test.simnet_test',
    'hybrid.test.corpus_test',
    'hybrid.test.bench_test',
    'hybrid.test.cli_test',
]


def all():
    return unittest.defaultTestLoader.loadTestsFromNames(TEST_MODULES)


def main():
    # rejections and misbehavior evidence are logged all over the suite
    logging.getLogger("hybrid").setLevel(logging.ERROR)

    import tornado.testing
    tornado.testing.main()


if __name__ == '__main__':
    main()
