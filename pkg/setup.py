#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""
Hybrid
------

Hybrid keeps private ledgers among small groups of authors, certified by a
Notary that publishes every ledger's history on an anchor log.
"""

from __future__ import print_function

try:
    # Use setuptools if available, for install_requires (among other things).
    import setuptools
    from setuptools import setup
except ImportError:
    setuptools = None
    from distutils.core import setup


kwargs = {}

version = "0.1.0"

with open('README.rst') as f:
    kwargs['long_description'] = f.read()

if setuptools is not None:
    kwargs['entry_points'] = {
        'console_scripts': ['hybrid = hybrid.cli:main'],
    }

setup(
    name="hybrid-ledger",
    version=version,
    packages=["hybrid", "hybrid.test"],
    install_requires = [
        'tornado>=6.0',
        'FormEncode>=2.0.0',
        'cryptography>=3.0',
        'simpy>=4.0',
    ],
    python_requires=">=3.9",
    platforms=["Linux", "Unix", "Mac OS X", "Windows"],
    include_package_data=True,
    author="Mark Gao",
    author_email="elrilos@gmail.com",
    license="private license",
    description="Notarized private ledgers with a public anchor log",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Developers",
        "License :: Private License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Topic :: Security :: Cryptography",
        "Topic :: Software Development :: Libraries :: Python Modules"
    ],
    **kwargs
)
