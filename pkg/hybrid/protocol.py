#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""Canonical message formats and their deterministic binary encoding.

Every message starts with a one-byte tag, followed by its fields in
declaration order: fixed-width big-endian integers, raw fixed-size values
(ledger ids, digests, keys, signatures) and a 4-byte big-endian length
prefix in front of every variable-size field, list or nested message. The
signing input of a message is its encoding with the signature fields left
out, so a signature always covers every other field.

Message classes register their tag with the `message` decorator::

    @message(0x04)
    @dataclass(frozen=True)
    class InitPayload(Message):
        ...

`decode` refuses anything `encode` cannot produce: unknown tags, short or
oversized length prefixes, trailing bytes and violated invariants all raise
`~hybrid.errors.ProtocolError` with code ``MALFORMED``.
"""

from __future__ import absolute_import, division, print_function, with_statement

import dataclasses
import enum
import hashlib
import io
import struct

from collections import namedtuple
from dataclasses import dataclass
from typing import Optional, Tuple

from tornado.escape import json_encode

from hybrid.errors import HybridError, ProtocolError
from hybrid.hashtree import (
    EMPTY_ROOT, ConsistencyProof, Digest, InclusionProof, leaf_hash)
from hybrid.identity import ActorId, PublicKey, Signature, check
from hybrid.util import hexlify

LEDGER_ID_SIZE = 16

_U8 = struct.Struct(">B")
_U32 = struct.Struct(">I")
_U64 = struct.Struct(">Q")

MESSAGES = {}


class message(object):
    """Class decorator registering a message type under its wire tag."""

    def __init__(self, tag):
        self.tag = tag

    def __call__(self, cls):
        if self.tag in MESSAGES:
            raise ValueError("tag 0x%02x already used by %s"
                             % (self.tag, MESSAGES[self.tag].__name__))
        cls.TAG = self.tag
        MESSAGES[self.tag] = cls
        return cls


class Writer(object):

    def __init__(self):
        self._buf = bytearray()

    def u8(self, value):
        self._pack(_U8, value)

    def u32(self, value):
        self._pack(_U32, value)

    def u64(self, value):
        self._pack(_U64, value)

    def fixed(self, value, size):
        value = bytes(value)
        if len(value) != size:
            raise ProtocolError("MALFORMED", "expected %d bytes, got %d"
                                % (size, len(value)))
        self._buf += value

    def var(self, value):
        value = bytes(value)
        self.u32(len(value))
        self._buf += value

    def flag(self, present):
        self.u8(1 if present else 0)

    def getvalue(self):
        return bytes(self._buf)

    def _pack(self, fmt, value):
        try:
            self._buf += fmt.pack(value)
        except struct.error as e:
            raise ProtocolError("MALFORMED", "integer %r: %s" % (value, e))


class Reader(object):

    def __init__(self, data):
        self._data = bytes(data)
        self._pos = 0

    @property
    def remaining(self):
        return len(self._data) - self._pos

    def u8(self):
        return _U8.unpack(self._take(1))[0]

    def u32(self):
        return _U32.unpack(self._take(4))[0]

    def u64(self):
        return _U64.unpack(self._take(8))[0]

    def fixed(self, size):
        return self._take(size)

    def var(self):
        return self._take(self.u32())

    def count(self, item_size=1):
        n = self.u32()
        if n * item_size > self.remaining:
            raise ProtocolError("MALFORMED", "list of %d items overruns input"
                                % n)
        return n

    def flag(self):
        value = self.u8()
        if value not in (0, 1):
            raise ProtocolError("MALFORMED", "bad flag byte %d" % value)
        return value == 1

    def finish(self):
        if self.remaining:
            raise ProtocolError("MALFORMED", "%d trailing bytes"
                                % self.remaining)

    def _take(self, n):
        if n > self.remaining:
            raise ProtocolError("MALFORMED", "truncated input")
        chunk = self._data[self._pos:self._pos + n]
        self._pos += n
        return chunk


class Message(object):
    """Base class of every tagged message."""

    TAG = None

    def write(self, w, signed=True):
        raise NotImplementedError()

    @classmethod
    def read(cls, r):
        raise NotImplementedError()

    def signing_bytes(self):
        return encode(self, signed=False)


def encode(msg, signed=True):
    """Canonical bytes of ``msg``; ``signed=False`` drops signature fields."""
    w = Writer()
    w.u8(msg.TAG)
    msg.write(w, signed)
    return w.getvalue()


def decode(data, expected=None):
    """Inverse of `encode`; ``expected`` restricts the accepted types."""
    r = Reader(data)
    tag = r.u8()
    cls = MESSAGES.get(tag)
    if cls is None:
        raise ProtocolError("MALFORMED", "unknown tag 0x%02x" % tag)
    try:
        msg = cls.read(r)
    except ProtocolError:
        raise
    except HybridError as e:
        # invalid embedded values (digest, key sizes) are malformed input
        raise ProtocolError("MALFORMED", str(e))
    r.finish()
    if expected is not None and not isinstance(msg, expected):
        raise ProtocolError("MALFORMED", "expected %s, got %s"
                            % (_type_names(expected), cls.__name__))
    return msg


def _type_names(expected):
    if isinstance(expected, tuple):
        return " or ".join(t.__name__ for t in expected)
    return expected.__name__


def _write_nested(w, msg):
    w.var(encode(msg))


def _read_nested(r, expected):
    return decode(r.var(), expected)


def _write_digests(w, digests):
    w.u32(len(digests))
    for digest in digests:
        w.fixed(digest, 32)


def _read_digests(r):
    return tuple(Digest(r.fixed(32)) for _ in range(r.count(32)))


def _write_consistency(w, proof):
    w.u64(proof.old_size)
    w.u64(proof.new_size)
    _write_digests(w, proof.path)


def _read_consistency(r):
    return ConsistencyProof(r.u64(), r.u64(), _read_digests(r))


def _write_inclusion(w, proof):
    w.u64(proof.leaf_index)
    w.u64(proof.tree_size)
    _write_digests(w, proof.path)


def _read_inclusion(r):
    return InclusionProof(r.u64(), r.u64(), _read_digests(r))


def _write_keys(w, keys):
    w.u32(len(keys))
    for key in keys:
        w.fixed(key, 32)


def _read_keys(r):
    return tuple(PublicKey(r.fixed(32)) for _ in range(r.count(32)))


def _require(condition, detail):
    if not condition:
        raise ProtocolError("MALFORMED", detail)


@dataclass(frozen=True)
class AuthorSet:
    """The public keys allowed to extend a ledger, sorted and unique."""

    keys: Tuple[PublicKey, ...]

    @classmethod
    def of(cls, keys):
        return cls(tuple(sorted(set(PublicKey(k) for k in keys))))

    def is_canonical(self):
        if not self.keys:
            return False
        return all(a < b for a, b in zip(self.keys, self.keys[1:]))

    def __contains__(self, key):
        return bytes(key) in self.keys

    def __iter__(self):
        return iter(self.keys)

    def __len__(self):
        return len(self.keys)

    def write(self, w):
        _write_keys(w, self.keys)

    @classmethod
    def read(cls, r):
        authors = cls(_read_keys(r))
        _require(authors.is_canonical(), "author set not canonical")
        return authors


def new_ledger_id(creator_key, nonce):
    """First 16 bytes of H(creator key || nonce); int nonces are u64."""
    if isinstance(nonce, int):
        nonce = _U64.pack(nonce)
    return hashlib.sha256(bytes(creator_key) + bytes(nonce)).digest()[
        :LEDGER_ID_SIZE]


@message(0x01)
@dataclass(frozen=True)
class CreationRequest(Message):
    ledger_id: bytes
    authors: AuthorSet
    initial_digest: Digest
    initial_size: int
    creator_key: PublicKey
    creator_sig: Optional[Signature] = None

    def write(self, w, signed=True):
        w.fixed(self.ledger_id, LEDGER_ID_SIZE)
        self.authors.write(w)
        w.fixed(self.initial_digest, 32)
        w.u64(self.initial_size)
        w.fixed(self.creator_key, 32)
        if signed:
            _require(self.creator_sig is not None, "unsigned request")
            w.fixed(self.creator_sig, 64)

    @classmethod
    def read(cls, r):
        msg = cls(r.fixed(LEDGER_ID_SIZE), AuthorSet.read(r),
                  Digest(r.fixed(32)), r.u64(), PublicKey(r.fixed(32)),
                  Signature(r.fixed(64)))
        _require(msg.initial_size >= 1, "empty initial ledger")
        _require(msg.creator_key in msg.authors, "creator outside the authors")
        return msg

    def signers(self):
        return (self.creator_key,)

    def signatures(self):
        return (self.creator_sig,)

    def signed_by(self, keypair):
        unsigned = dataclasses.replace(self, creator_key=keypair.public,
                                       creator_sig=None)
        return dataclasses.replace(
            unsigned, creator_sig=keypair.sign(unsigned.signing_bytes()))


@message(0x02)
@dataclass(frozen=True)
class ExtensionRequest(Message):
    ledger_id: bytes
    prev_digest: Digest
    prev_size: int
    new_digest: Digest
    new_size: int
    proof: ConsistencyProof
    author_keys: Tuple[PublicKey, ...]
    author_sigs: Tuple[Signature, ...] = ()

    def write(self, w, signed=True):
        w.fixed(self.ledger_id, LEDGER_ID_SIZE)
        w.fixed(self.prev_digest, 32)
        w.u64(self.prev_size)
        w.fixed(self.new_digest, 32)
        w.u64(self.new_size)
        _write_consistency(w, self.proof)
        _write_keys(w, self.author_keys)
        if signed:
            _require(len(self.author_sigs) == len(self.author_keys),
                     "signatures do not match author keys")
            w.u32(len(self.author_sigs))
            for sig in self.author_sigs:
                w.fixed(sig, 64)

    @classmethod
    def read(cls, r):
        ledger_id = r.fixed(LEDGER_ID_SIZE)
        prev_digest, prev_size = Digest(r.fixed(32)), r.u64()
        new_digest, new_size = Digest(r.fixed(32)), r.u64()
        proof = _read_consistency(r)
        keys = _read_keys(r)
        sigs = tuple(Signature(r.fixed(64)) for _ in range(r.count(64)))
        msg = cls(ledger_id, prev_digest, prev_size, new_digest, new_size,
                  proof, keys, sigs)
        _require(msg.is_well_formed(), "inconsistent extension request")
        return msg

    def is_well_formed(self):
        return (self.new_size > self.prev_size and
                self.proof.old_size == self.prev_size and
                self.proof.new_size == self.new_size and
                len(self.author_keys) >= 1 and
                len(self.author_sigs) == len(self.author_keys))

    def signers(self):
        return self.author_keys

    def signatures(self):
        return self.author_sigs

    def signed_by(self, *keypairs):
        """Signs with every given key pair, in order."""
        unsigned = dataclasses.replace(
            self, author_keys=tuple(kp.public for kp in keypairs),
            author_sigs=())
        payload = unsigned.signing_bytes()
        return dataclasses.replace(
            unsigned, author_sigs=tuple(kp.sign(payload) for kp in keypairs))

    def with_signatures(self, signatures):
        return dataclasses.replace(self, author_sigs=tuple(signatures))


class ReceiptKind(enum.IntEnum):
    CREATION = 0
    EXTENSION = 1


@dataclass(frozen=True)
class AnchorRef:
    """Either the id of the anchoring transaction or a pending marker.

    A pending marker carries the simulated time by which the Notary commits
    to anchor the receipt; since it is signed, missing that deadline is
    provable from the receipt itself.
    """

    pending: bool
    value: int

    @classmethod
    def anchored(cls, txn_id):
        return cls(False, txn_id)

    @classmethod
    def pending_until(cls, deadline_ms):
        return cls(True, deadline_ms)

    @property
    def txn_id(self):
        return None if self.pending else self.value

    @property
    def deadline(self):
        return self.value if self.pending else None

    def write(self, w):
        w.flag(self.pending)
        w.u64(self.value)

    @classmethod
    def read(cls, r):
        return cls(r.flag(), r.u64())


@message(0x03)
@dataclass(frozen=True)
class Receipt(Message):
    kind: ReceiptKind
    request: Message
    timestamp: int
    anchor_ref: AnchorRef
    notary_seq: int
    notary_sig: Optional[Signature] = None

    def write(self, w, signed=True):
        w.u8(int(self.kind))
        _write_nested(w, self.request)
        w.u64(self.timestamp)
        self.anchor_ref.write(w)
        w.u64(self.notary_seq)
        if signed:
            _require(self.notary_sig is not None, "unsigned receipt")
            w.fixed(self.notary_sig, 64)

    @classmethod
    def read(cls, r):
        kind = r.u8()
        _require(kind in (0, 1), "bad receipt kind %d" % kind)
        kind = ReceiptKind(kind)
        expected = (CreationRequest if kind == ReceiptKind.CREATION
                    else ExtensionRequest)
        request = _read_nested(r, expected)
        return cls(kind, request, r.u64(), AnchorRef.read(r), r.u64(),
                   Signature(r.fixed(64)))

    @property
    def ledger_id(self):
        return self.request.ledger_id

    @property
    def is_creation(self):
        return self.kind == ReceiptKind.CREATION

    def prev_state(self):
        """(digest, size) the receipt extends; creation extends the empty tree."""
        if self.is_creation:
            return EMPTY_ROOT, 0
        return self.request.prev_digest, self.request.prev_size

    def new_state(self):
        if self.is_creation:
            return self.request.initial_digest, self.request.initial_size
        return self.request.new_digest, self.request.new_size

    def signers(self):
        return self.request.signers()

    def signed_by(self, keypair):
        unsigned = dataclasses.replace(self, notary_sig=None)
        return dataclasses.replace(
            unsigned, notary_sig=keypair.sign(unsigned.signing_bytes()))


@message(0x04)
@dataclass(frozen=True)
class InitPayload(Message):
    ledger_id: bytes
    digest: Digest
    size: int

    def write(self, w, signed=True):
        w.fixed(self.ledger_id, LEDGER_ID_SIZE)
        w.fixed(self.digest, 32)
        w.u64(self.size)

    @classmethod
    def read(cls, r):
        return cls(r.fixed(LEDGER_ID_SIZE), Digest(r.fixed(32)), r.u64())


@message(0x05)
@dataclass(frozen=True)
class ExtendPayload(Message):
    ledger_id: bytes
    prev_digest: Digest
    prev_size: int
    new_digest: Digest
    new_size: int
    proof: ConsistencyProof

    @classmethod
    def from_request(cls, request):
        return cls(request.ledger_id, request.prev_digest, request.prev_size,
                   request.new_digest, request.new_size, request.proof)

    def prev_state(self):
        return self.prev_digest, self.prev_size

    def new_state(self):
        return self.new_digest, self.new_size

    def write(self, w, signed=True):
        w.fixed(self.ledger_id, LEDGER_ID_SIZE)
        w.fixed(self.prev_digest, 32)
        w.u64(self.prev_size)
        w.fixed(self.new_digest, 32)
        w.u64(self.new_size)
        _write_consistency(w, self.proof)

    @classmethod
    def read(cls, r):
        return cls(r.fixed(LEDGER_ID_SIZE), Digest(r.fixed(32)), r.u64(),
                   Digest(r.fixed(32)), r.u64(), _read_consistency(r))


@message(0x06)
@dataclass(frozen=True)
class BatchPayload(Message):
    """Several extension steps anchored at once (delayed notarization)."""

    ledger_id: bytes
    steps: Tuple[ExtendPayload, ...]

    def write(self, w, signed=True):
        w.fixed(self.ledger_id, LEDGER_ID_SIZE)
        w.u32(len(self.steps))
        for step in self.steps:
            _write_nested(w, step)

    @classmethod
    def read(cls, r):
        ledger_id = r.fixed(LEDGER_ID_SIZE)
        steps = tuple(_read_nested(r, ExtendPayload)
                      for _ in range(r.count(4)))
        return cls(ledger_id, steps)


ANCHOR_PAYLOADS = (InitPayload, ExtendPayload, BatchPayload)


@message(0x07)
@dataclass(frozen=True)
class AnchorTxn(Message):
    txn_id: int
    address: ActorId
    timestamp: int
    payload: Message

    def write(self, w, signed=True):
        w.u64(self.txn_id)
        w.fixed(self.address, 32)
        w.u64(self.timestamp)
        _write_nested(w, self.payload)

    @classmethod
    def read(cls, r):
        return cls(r.u64(), ActorId(r.fixed(32)), r.u64(),
                   _read_nested(r, ANCHOR_PAYLOADS))


@dataclass(frozen=True)
class BlockEntry:
    """A data block, or its explicit omission when only the digest is kept."""

    leaf_digest: Digest
    content: Optional[bytes] = None

    @classmethod
    def present(cls, content):
        content = bytes(content)
        return cls(leaf_hash(content), content)

    @classmethod
    def omitted(cls, leaf_digest):
        return cls(Digest(leaf_digest), None)

    @property
    def is_present(self):
        return self.content is not None

    def matches(self):
        """True unless the content disagrees with the claimed digest."""
        return not self.is_present or leaf_hash(self.content) == \
            self.leaf_digest

    def write(self, w):
        w.fixed(self.leaf_digest, 32)
        w.flag(self.is_present)
        if self.is_present:
            w.var(self.content)

    @classmethod
    def read(cls, r):
        leaf_digest = Digest(r.fixed(32))
        content = r.var() if r.flag() else None
        return cls(leaf_digest, content)


@dataclass(frozen=True)
class ExportItem:
    index: int
    entry: BlockEntry
    proof: InclusionProof

    def write(self, w):
        w.u64(self.index)
        self.entry.write(w)
        _write_inclusion(w, self.proof)

    @classmethod
    def read(cls, r):
        return cls(r.u64(), BlockEntry.read(r), _read_inclusion(r))


@message(0x08)
@dataclass(frozen=True)
class ExportArchive(Message):
    """Selected blocks with inclusion proofs and the receipt chain."""

    ledger_id: bytes
    authors: AuthorSet
    receipts: Tuple[Receipt, ...]
    items: Tuple[ExportItem, ...]
    claimed_digest: Digest
    claimed_size: int

    def write(self, w, signed=True):
        w.fixed(self.ledger_id, LEDGER_ID_SIZE)
        self.authors.write(w)
        w.u32(len(self.receipts))
        for receipt in self.receipts:
            _write_nested(w, receipt)
        w.u32(len(self.items))
        for item in self.items:
            item.write(w)
        w.fixed(self.claimed_digest, 32)
        w.u64(self.claimed_size)

    @classmethod
    def read(cls, r):
        ledger_id = r.fixed(LEDGER_ID_SIZE)
        authors = AuthorSet.read(r)
        receipts = tuple(_read_nested(r, Receipt) for _ in range(r.count(4)))
        items = tuple(ExportItem.read(r) for _ in range(r.count(57)))
        return cls(ledger_id, authors, receipts, items,
                   Digest(r.fixed(32)), r.u64())

    def item(self, index):
        for item in self.items:
            if item.index == index:
                return item
        return None


@message(0x09)
@dataclass(frozen=True)
class BlockCertificate(Message):
    """Notary statement that stored blocks hash into an official digest."""

    ledger_id: bytes
    digest: Digest
    size: int
    indices: Tuple[int, ...]
    timestamp: int
    notary_sig: Optional[Signature] = None

    def write(self, w, signed=True):
        w.fixed(self.ledger_id, LEDGER_ID_SIZE)
        w.fixed(self.digest, 32)
        w.u64(self.size)
        w.u32(len(self.indices))
        for index in self.indices:
            w.u64(index)
        w.u64(self.timestamp)
        if signed:
            _require(self.notary_sig is not None, "unsigned certificate")
            w.fixed(self.notary_sig, 64)

    @classmethod
    def read(cls, r):
        ledger_id = r.fixed(LEDGER_ID_SIZE)
        digest, size = Digest(r.fixed(32)), r.u64()
        indices = tuple(r.u64() for _ in range(r.count(8)))
        return cls(ledger_id, digest, size, indices, r.u64(),
                   Signature(r.fixed(64)))

    def signed_by(self, keypair):
        unsigned = dataclasses.replace(self, notary_sig=None)
        return dataclasses.replace(
            unsigned, notary_sig=keypair.sign(unsigned.signing_bytes()))


def verify_certificate(certificate, notary_key):
    if certificate.notary_sig is None:
        return False
    return check(notary_key, certificate.signing_bytes(),
                 certificate.notary_sig)


@message(0x0A)
@dataclass(frozen=True)
class AccessRequest(Message):
    """A signed request for stored blocks, proving the requester's key."""

    ledger_id: bytes
    indices: Tuple[int, ...]
    requester_key: PublicKey
    nonce: int
    sig: Optional[Signature] = None

    def write(self, w, signed=True):
        w.fixed(self.ledger_id, LEDGER_ID_SIZE)
        w.u32(len(self.indices))
        for index in self.indices:
            w.u64(index)
        w.fixed(self.requester_key, 32)
        w.u64(self.nonce)
        if signed:
            _require(self.sig is not None, "unsigned access request")
            w.fixed(self.sig, 64)

    @classmethod
    def read(cls, r):
        ledger_id = r.fixed(LEDGER_ID_SIZE)
        indices = tuple(r.u64() for _ in range(r.count(8)))
        return cls(ledger_id, indices, PublicKey(r.fixed(32)), r.u64(),
                   Signature(r.fixed(64)))

    def signed_by(self, keypair):
        unsigned = dataclasses.replace(self, requester_key=keypair.public,
                                       sig=None)
        return dataclasses.replace(
            unsigned, sig=keypair.sign(unsigned.signing_bytes()))


class ProofKind(enum.IntEnum):
    FORK = 0
    UNAUTHORIZED_ACCEPT = 1
    ANCHOR_DESYNC = 2


@message(0x0B)
@dataclass(frozen=True)
class MisbehaviorProof(Message):
    """Self-contained evidence against the Notary.

    FORK cites two receipts, UNAUTHORIZED_ACCEPT cites the creation receipt
    and the offending one, ANCHOR_DESYNC cites one receipt plus, when the
    receipt names one, the anchor transaction it claims.
    """

    kind: ProofKind
    ledger_id: bytes
    receipts: Tuple[Receipt, ...]
    anchor_txn_id: Optional[int] = None

    def write(self, w, signed=True):
        w.u8(int(self.kind))
        w.fixed(self.ledger_id, LEDGER_ID_SIZE)
        w.u32(len(self.receipts))
        for receipt in self.receipts:
            _write_nested(w, receipt)
        w.flag(self.anchor_txn_id is not None)
        if self.anchor_txn_id is not None:
            w.u64(self.anchor_txn_id)

    @classmethod
    def read(cls, r):
        kind = r.u8()
        _require(kind in (0, 1, 2), "bad proof kind %d" % kind)
        ledger_id = r.fixed(LEDGER_ID_SIZE)
        receipts = tuple(_read_nested(r, Receipt) for _ in range(r.count(4)))
        txn_id = r.u64() if r.flag() else None
        return cls(ProofKind(kind), ledger_id, receipts, txn_id)


@message(0x0C)
@dataclass(frozen=True)
class Policy(Message):
    """Ledger policy carried in plaintext as the whole of block 0."""

    max_block_bytes: Optional[int] = None
    min_signers: Optional[int] = None
    allowed_content_tags: Optional[bytes] = None

    def is_valid(self):
        if self.max_block_bytes is not None and self.max_block_bytes < 1:
            return False
        if self.min_signers is not None and self.min_signers < 1:
            return False
        if self.allowed_content_tags is not None and \
                not self.allowed_content_tags:
            return False
        return True

    def violation(self, block):
        """Reason the data block breaks this policy, or None."""
        if self.max_block_bytes is not None and \
                len(block) > self.max_block_bytes:
            return "block of %d bytes exceeds %d" % (len(block),
                                                     self.max_block_bytes)
        if self.allowed_content_tags is not None:
            if not block or block[0] not in self.allowed_content_tags:
                return "content tag not allowed"
        return None

    def write(self, w, signed=True):
        w.flag(self.max_block_bytes is not None)
        if self.max_block_bytes is not None:
            w.u64(self.max_block_bytes)
        w.flag(self.min_signers is not None)
        if self.min_signers is not None:
            w.u32(self.min_signers)
        w.flag(self.allowed_content_tags is not None)
        if self.allowed_content_tags is not None:
            w.var(self.allowed_content_tags)

    @classmethod
    def read(cls, r):
        max_block_bytes = r.u64() if r.flag() else None
        min_signers = r.u32() if r.flag() else None
        tags = r.var() if r.flag() else None
        policy = cls(max_block_bytes, min_signers, tags)
        _require(policy.is_valid(), "policy bounds must be positive")
        return policy


class Verdict(namedtuple("Verdict", "accepted reason")):
    """Outcome of a verification; falsy when rejected."""

    __slots__ = ()

    @classmethod
    def accept(cls):
        return cls(True, None)

    @classmethod
    def reject(cls, reason):
        return cls(False, reason)

    def __bool__(self):
        return self.accepted


def verify_receipt(receipt, notary_key, authors):
    """Checks a receipt against the Notary key and the ledger's author set.

    Rejection reasons: ``BAD_NOTARY_SIG``, ``MALFORMED``,
    ``AUTHOR_NOT_IN_SET`` and ``BAD_AUTHOR_SIG``, tested in that order.
    """
    if receipt.notary_sig is None:
        return Verdict.reject("BAD_NOTARY_SIG")
    try:
        payload = receipt.signing_bytes()
    except ProtocolError:
        return Verdict.reject("MALFORMED")
    if not check(notary_key, payload, receipt.notary_sig):
        return Verdict.reject("BAD_NOTARY_SIG")

    request = receipt.request
    if receipt.is_creation:
        if not isinstance(request, CreationRequest) or \
                request.initial_size < 1:
            return Verdict.reject("MALFORMED")
    elif not isinstance(request, ExtensionRequest) or \
            not request.is_well_formed():
        return Verdict.reject("MALFORMED")

    signers = request.signers()
    if any(key not in authors for key in signers):
        return Verdict.reject("AUTHOR_NOT_IN_SET")
    signed = request.signing_bytes()
    for key, sig in zip(signers, request.signatures()):
        if sig is None or not check(key, signed, sig):
            return Verdict.reject("BAD_AUTHOR_SIG")
    return Verdict.accept()


def to_json(value):
    """JSON-ready form of a message: bytes as lowercase hex, enums by name."""
    if isinstance(value, enum.Enum):
        return value.name
    if isinstance(value, (bytes, bytearray)):
        return hexlify(value)
    if dataclasses.is_dataclass(value):
        doc = {}
        if isinstance(value, Message):
            doc["type"] = type(value).__name__
        for f in dataclasses.fields(value):
            doc[f.name] = to_json(getattr(value, f.name))
        return doc
    if isinstance(value, (list, tuple)):
        return [to_json(v) for v in value]
    return value


def dump_jsonl(messages, path):
    """Writes one hex JSON document per line, for debugging."""
    with io.open(path, "w", encoding="utf-8") as f:
        for msg in messages:
            f.write(json_encode(to_json(msg)) + "\n")
