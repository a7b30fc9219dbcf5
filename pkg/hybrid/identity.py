#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Key pairs, signatures and actor identities for nodes and the Notary.

Signatures are Ed25519 (deterministic, 64 bytes) over raw message bytes.
Certificates are reduced to a flat `Registry` mapping each `ActorId` to its
public key; removing an entry excludes the actor from the private network.

Key files hold one line of lowercase hex: ``<prefix>.key`` is the 32-byte
seed, ``<prefix>.pub`` the public key.
"""

from __future__ import absolute_import, division, print_function, with_statement

import functools
import hashlib
import io

from dataclasses import dataclass, field

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey, Ed25519PublicKey)
from cryptography.hazmat.primitives.serialization import (
    Encoding, PublicFormat)

from hybrid.errors import IdentityError
from hybrid.util import hexlify, unhexlify

SEED_SIZE = 32
PUBLIC_KEY_SIZE = 32
SIGNATURE_SIZE = 64


class PublicKey(bytes):
    """Raw 32-byte Ed25519 public key."""

    __slots__ = ()

    def __new__(cls, value):
        value = bytes(value)
        if len(value) != PUBLIC_KEY_SIZE:
            raise IdentityError("MALFORMED_INPUT",
                                "public key must be %d bytes, got %d"
                                % (PUBLIC_KEY_SIZE, len(value)))
        return bytes.__new__(cls, value)

    def __repr__(self):
        return "PublicKey(%s)" % self.hex()[:16]


class Signature(bytes):
    """Raw 64-byte Ed25519 signature."""

    __slots__ = ()

    def __new__(cls, value):
        value = bytes(value)
        if len(value) != SIGNATURE_SIZE:
            raise IdentityError("MALFORMED_INPUT",
                                "signature must be %d bytes, got %d"
                                % (SIGNATURE_SIZE, len(value)))
        return bytes.__new__(cls, value)

    def __repr__(self):
        return "Signature(%s...)" % self.hex()[:16]


class ActorId(bytes):
    """SHA-256 fingerprint of a public key."""

    __slots__ = ()

    def __new__(cls, value):
        value = bytes(value)
        if len(value) != 32:
            raise IdentityError("MALFORMED_INPUT", "actor id must be 32 bytes")
        return bytes.__new__(cls, value)

    @classmethod
    def of(cls, public_key):
        return cls(hashlib.sha256(bytes(public_key)).digest())

    def __repr__(self):
        return "ActorId(%s)" % self.hex()[:12]

    def __str__(self):
        return self.hex()[:12]


@dataclass(frozen=True)
class KeyPair:
    public: PublicKey
    secret: bytes = field(repr=False)

    def __post_init__(self):
        try:
            signer = Ed25519PrivateKey.from_private_bytes(bytes(self.secret))
        except (ValueError, TypeError) as e:
            raise IdentityError("INVALID_KEY", str(e))
        derived = signer.public_key().public_bytes(Encoding.Raw,
                                                   PublicFormat.Raw)
        if derived != bytes(self.public):
            raise IdentityError("INVALID_KEY",
                                "public key does not match secret")
        # frozen dataclass: cache the signer object outside the fields
        object.__setattr__(self, "_signer", signer)

    @property
    def actor_id(self):
        return ActorId.of(self.public)

    def sign(self, message):
        return Signature(self._signer.sign(bytes(message)))


def generate_keypair(seed):
    """Derives a key pair from 32 bytes of entropy; same seed, same keys."""
    seed = bytes(seed)
    if len(seed) != SEED_SIZE:
        raise IdentityError("INVALID_KEY",
                            "seed must be %d bytes" % SEED_SIZE)
    signer = Ed25519PrivateKey.from_private_bytes(seed)
    public = signer.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
    return KeyPair(PublicKey(public), seed)


def keypair_from_label(label):
    """Deterministic key pair for a textual label (simulated actors)."""
    if isinstance(label, str):
        label = label.encode("utf-8")
    return generate_keypair(hashlib.sha256(b"hybrid-seed:" + label).digest())


def sign(secret, message):
    """Signs ``message`` with a raw 32-byte secret key."""
    if isinstance(secret, KeyPair):
        return secret.sign(message)
    try:
        signer = Ed25519PrivateKey.from_private_bytes(bytes(secret))
    except (ValueError, TypeError) as e:
        raise IdentityError("INVALID_KEY", str(e))
    return Signature(signer.sign(bytes(message)))


def verify(public, message, signature):
    """True iff ``signature`` is valid for ``message`` under ``public``.

    Undecodable keys or signatures raise ``MALFORMED_INPUT``; a well-formed
    but wrong signature is simply rejected.
    """
    public = bytes(public)
    signature = bytes(signature)
    if len(public) != PUBLIC_KEY_SIZE:
        raise IdentityError("MALFORMED_INPUT", "bad public key length")
    if len(signature) != SIGNATURE_SIZE:
        raise IdentityError("MALFORMED_INPUT", "bad signature length")
    try:
        _verifier(public).verify(signature, bytes(message))
    except InvalidSignature:
        return False
    return True


def check(public, message, signature):
    """Like `verify`, but malformed input is a rejection instead of an error."""
    try:
        return verify(public, message, signature)
    except IdentityError:
        return False


@functools.lru_cache(maxsize=4096)
def _verifier(public):
    try:
        return Ed25519PublicKey.from_public_bytes(public)
    except ValueError as e:
        raise IdentityError("MALFORMED_INPUT", str(e))


class Registry(object):
    """Known actors of the private network, by fingerprint."""

    def __init__(self, keys=()):
        self._keys = {}
        for key in keys:
            self.add(key)

    def add(self, public_key):
        actor_id = ActorId.of(public_key)
        self._keys[actor_id] = PublicKey(public_key)
        return actor_id

    def get(self, actor_id):
        return self._keys.get(actor_id)

    def remove(self, actor_id):
        """Excludes an actor; returns its key or None if it was unknown."""
        return self._keys.pop(actor_id, None)

    def __contains__(self, actor_id):
        return actor_id in self._keys

    def __len__(self):
        return len(self._keys)

    def __iter__(self):
        return iter(sorted(self._keys))


def write_key_files(keypair, path_prefix):
    """Writes ``<prefix>.key`` (seed hex) and ``<prefix>.pub``."""
    with io.open(path_prefix + ".key", "w", encoding="ascii") as f:
        f.write(hexlify(keypair.secret) + "\n")
    with io.open(path_prefix + ".pub", "w", encoding="ascii") as f:
        f.write(hexlify(keypair.public) + "\n")
    return path_prefix + ".key", path_prefix + ".pub"


def read_seed(path):
    return _read_hex_line(path, SEED_SIZE)


def read_keypair(path):
    return generate_keypair(read_seed(path))


def read_public_key(path):
    return PublicKey(_read_hex_line(path, PUBLIC_KEY_SIZE))


def _read_hex_line(path, size):
    try:
        with io.open(path, "r", encoding="ascii") as f:
            line = f.readline()
        return unhexlify(line, size)
    except ValueError as e:
        # UnicodeDecodeError included
        raise IdentityError("MALFORMED_INPUT", "%s: %s" % (path, e))
