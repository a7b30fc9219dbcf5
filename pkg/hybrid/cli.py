#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""The ``hybrid`` command.

::

    hybrid sim honest-medium --seed=7 --out=run/
    hybrid audit run/anchor.log --notary-key=run/notary.pub
    hybrid verify-export run/full.hybx run/anchor.log --notary-key=run/notary.pub
    hybrid bench --blocks=1000 --block-bytes=1024
    hybrid keygen --out=alice

Reports go to standard output as JSON, logs to standard error. The exit
status alone tells the outcome: 0 success, 1 a failed check, 2 bad usage
or unreadable input.
"""

from __future__ import absolute_import, division, print_function, with_statement

import enum
import io
import os
import sys

from collections import OrderedDict

from tornado.escape import json_decode, json_encode
from tornado.log import define_logging_options
from tornado.options import Error as OptionError, OptionParser

from hybrid.anchor import AnchorLog
from hybrid.auditor import audit_anchor, verify_export
from hybrid.bench import block_blindness, delayed_batching, run_bench
from hybrid.corpus import Scenario
from hybrid.errors import HybridError, ScriptError
from hybrid.identity import (
    ActorId, generate_keypair, read_public_key, write_key_files)
from hybrid.ledgerstore import read_archive, write_archive
from hybrid.log import level_from_env, sim_log
from hybrid.protocol import dump_jsonl
from hybrid.simnet import SimConfig, load_script, run
from hybrid.util import hexlify, unhexlify


class ExitCode(enum.IntEnum):
    OK = 0
    FAILURE = 1
    USAGE = 2


class Command(object):
    """One subcommand: declares its flags, then runs on the parsed
    options and positional arguments."""

    name = None
    usage = ""
    arguments = 0

    def __init__(self, stdout):
        self.stdout = stdout

    def define(self, parser):
        pass

    def run(self, options, args):
        raise NotImplementedError()

    def emit(self, value):
        self.stdout.write(json_encode(value) + "\n")


class SimCommand(Command):
    name = "sim"
    usage = "sim <scenario|script.jsonl> [--seed=N] [--out=DIR]"
    arguments = 1

    def define(self, parser):
        parser.define("seed", default=0, type=int, help="simulation seed")
        parser.define("out", default=None, type=str,
                      help="directory receiving the run artifacts")
        parser.define("config", default=None, type=str,
                      help="JSON simulator config for script files")

    def run(self, options, args):
        target = args[0]
        scenario = None
        if os.path.isfile(target):
            config = self._config(options)
            actions = load_script(target)
        else:
            scenario = Scenario.get(target)
            config = scenario.config(options.seed)
            actions = scenario.actions()
        result = run(config, actions)
        failures = scenario.check(result) if scenario is not None else []

        if options.out:
            self._write(options.out, result)
        self.emit({
            "scenario": scenario.name if scenario else target,
            "seed": config.seed,
            "expect": scenario.expect if scenario else None,
            "failures": failures,
            "proofs": [p.kind.name for p in result.proofs],
            "metrics": result.metrics.to_dict(),
        })
        return ExitCode.FAILURE if failures else ExitCode.OK

    def _config(self, options):
        values = {}
        if options.config:
            try:
                with io.open(options.config, "r", encoding="utf-8") as f:
                    values = json_decode(f.read())
            except (IOError, OSError, ValueError) as e:
                raise ScriptError("cannot read %s: %s" % (options.config, e))
        if not isinstance(values, dict):
            raise ScriptError("config must be an object")
        values.setdefault("node_count", 2)
        values["seed"] = options.seed
        return SimConfig.from_dict(values)

    def _write(self, out, result):
        world = result.world
        if not os.path.isdir(out):
            os.makedirs(out)
        path = lambda name: os.path.join(out, name)
        result.anchor_log.persist(path("anchor.log"))
        with io.open(path("notary.pub"), "w", encoding="ascii") as f:
            f.write(hexlify(world.notary.public_key) + "\n")
        for name, archive in sorted(world.exports.items()):
            write_archive(path(name + ".hybx"), archive)
            dump_jsonl([archive], path(name + ".jsonl"))
        dump_jsonl(result.anchor_log.txns, path("anchor.jsonl"))
        dump_jsonl(result.proofs, path("proofs.jsonl"))
        with io.open(path("metrics.json"), "w", encoding="utf-8") as f:
            f.write(result.metrics.to_json() + "\n")
        report = audit_anchor(result.anchor_log, world.notary.address,
                              world.now)
        with io.open(path("audit.jsonl"), "w", encoding="utf-8") as f:
            report.write_jsonl(f)
        sim_log.info("wrote run artifacts to %s", out)


class AuditCommand(Command):
    name = "audit"
    usage = "audit <anchor.log> --notary-key=FILE"
    arguments = 1

    def define(self, parser):
        parser.define("notary_key", default=None, type=str,
                      help="file holding the Notary public key hex")

    def run(self, options, args):
        key = read_public_key(_required(options, "notary_key"))
        log = AnchorLog.load(args[0])
        report = audit_anchor(log, ActorId.of(key))
        report.write_jsonl(self.stdout)
        return ExitCode.OK if report.coherent else ExitCode.FAILURE


class VerifyExportCommand(Command):
    name = "verify-export"
    usage = "verify-export <archive.hybx> <anchor.log> --notary-key=FILE"
    arguments = 2

    def define(self, parser):
        parser.define("notary_key", default=None, type=str,
                      help="file holding the Notary public key hex")

    def run(self, options, args):
        key = read_public_key(_required(options, "notary_key"))
        archive = read_archive(args[0])
        log = AnchorLog.load(args[1])
        verdict = verify_export(archive, log, key)
        self.emit({"ledger_id": hexlify(archive.ledger_id),
                   "accepted": verdict.accepted, "reason": verdict.reason})
        return ExitCode.OK if verdict else ExitCode.FAILURE


class BenchCommand(Command):
    name = "bench"
    usage = "bench --blocks=N [--block-bytes=B] [--ledgers=M] " \
            "[--mode=immediate|delayed] [--threads=T] [--all]"

    def define(self, parser):
        parser.define("blocks", default=None, type=int)
        parser.define("block_bytes", default=1024, type=int)
        parser.define("ledgers", default=1, type=int)
        parser.define("mode", default="immediate", type=str)
        parser.define("threads", default=1, type=int)
        parser.define("interval_ms", default=100, type=int)
        parser.define("all", default=False, type=bool,
                      help="also compare block sizes and delayed batching")

    def run(self, options, args):
        result = run_bench(dict(
            blocks=options.blocks, block_bytes=options.block_bytes,
            ledgers=options.ledgers, mode=options.mode,
            threads=options.threads, interval_ms=options.interval_ms))
        ok = result["coherent"]
        if options.all:
            result["block_blindness"] = block_blindness(options.blocks)
            result["delayed_batching"] = delayed_batching(
                interval_ms=options.interval_ms)
            ok = ok and result["block_blindness"]["block_blind"] and \
                result["delayed_batching"]["within_bound"]
        self.emit(result)
        return ExitCode.OK if ok else ExitCode.FAILURE


class KeygenCommand(Command):
    name = "keygen"
    usage = "keygen --out=PREFIX [--seed-hex=HEX]"

    def define(self, parser):
        parser.define("out", default=None, type=str)
        parser.define("seed_hex", default=None, type=str)

    def run(self, options, args):
        prefix = _required(options, "out")
        if options.seed_hex:
            try:
                seed = unhexlify(options.seed_hex, 32)
            except ValueError as e:
                raise ScriptError("--seed-hex: %s" % e)
        else:
            seed = os.urandom(32)
        keypair = generate_keypair(seed)
        try:
            key_path, pub_path = write_key_files(keypair, prefix)
        except (IOError, OSError) as e:
            raise ScriptError("cannot write %s: %s" % (prefix, e))
        self.emit({"actor_id": str(keypair.actor_id),
                   "public_key": hexlify(keypair.public),
                   "files": [key_path, pub_path]})
        return ExitCode.OK


COMMANDS = OrderedDict((cls.name, cls) for cls in (
    SimCommand, AuditCommand, VerifyExportCommand, BenchCommand,
    KeygenCommand))


def _required(options, name):
    value = getattr(options, name)
    if not value:
        raise ScriptError("--%s is required" % name.replace("_", "-"))
    return value


def _usage(stream):
    stream.write("usage: hybrid <command> [options]\n\ncommands:\n")
    for cls in COMMANDS.values():
        stream.write("  %s\n" % cls.usage)


def main(argv=None, stdout=None, stderr=None):
    """Entry point of the ``hybrid`` console script; returns the exit
    code."""
    argv = sys.argv if argv is None else argv
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if len(argv) < 2 or argv[1] not in COMMANDS:
        _usage(stderr)
        return ExitCode.USAGE

    command = COMMANDS[argv[1]](stdout)
    parser = OptionParser()
    define_logging_options(parser)
    parser.logging = level_from_env()
    command.define(parser)
    # tornado stops at the first positional argument
    flags = [a for a in argv[2:] if a.startswith("--")]
    positional = [a for a in argv[2:] if not a.startswith("--")]
    try:
        args = parser.parse_command_line([argv[0]] + flags + positional)
    except OptionError as e:
        stderr.write("hybrid %s: %s\n" % (command.name, e))
        return ExitCode.USAGE
    if len(args) != command.arguments:
        stderr.write("usage: hybrid %s\n" % command.usage)
        return ExitCode.USAGE

    try:
        return command.run(parser, args)
    except ScriptError as e:
        stderr.write("hybrid %s: %s\n" % (command.name, e.detail))
        return ExitCode.USAGE
    except HybridError as e:
        # unreadable or malformed input files
        stderr.write("hybrid %s: %s\n" % (command.name, e))
        return ExitCode.USAGE
    except (IOError, OSError) as e:
        stderr.write("hybrid %s: %s\n" % (command.name, e))
        return ExitCode.USAGE


if __name__ == "__main__":
    sys.exit(main())
