#!/usr/bin/env python
#
# Copyright (c) 2026 Stoneopus Technologies Co., Ltd.
# <http://stoneopus.com>

"""FormEncode schemas for everything read from outside: scenario actions,
simulator configuration, fault specifications and bench parameters.
"""

from __future__ import absolute_import, division, print_function, with_statement

import formencode

from formencode import validators
from formencode.foreach import ForEach

from hybrid.errors import ScriptError

ACTIONS = ("create", "extend", "erase", "export", "serve", "recover",
           "certify")
FAULT_KINDS = ("NOTARY_FORK", "NOTARY_UNAUTHORIZED_ACCEPT", "ANCHOR_OMIT",
               "DUPLICATE_INIT", "NODE_TAMPER_BLOCK")
NOTARIZATIONS = ("immediate", "delayed")


class Form(formencode.Schema):
    """A schema that validates one dictionary of values.

    ``Form(values).validate()`` keeps the converted values in `params` and
    the errors in `errors`; `parse` does both and raises `ScriptError`.
    """

    # unknown keys are dropped, not rejected
    allow_extra_fields = True
    filter_extra_fields = True

    def __init__(self, values=None):
        super(Form, self).__init__()
        self._args = dict(values or {})
        self._fields = {}
        self._form_errors = {}
        self._result = True

    @property
    def args(self):
        return self._args

    @property
    def params(self):
        return self._fields

    @property
    def errors(self):
        return self._form_errors

    @property
    def normalized_errors(self):
        return dict((k, str(self._form_errors[k])) for k in self._form_errors)

    def validate(self):
        self._result = True
        try:
            self._fields = self.to_python(self._args)
        except formencode.Invalid as e:
            self._fields = e.value
            self._form_errors = e.error_dict or {"_form": e.msg}
            self._result = False
        else:
            self.__after__()
        return self._result

    def add_error(self, attr, msg):
        """Records an error found by a `__after__` check."""
        self._result = False
        self._form_errors[attr] = msg

    def __after__(self):
        """Cross-field checks run after a successful conversion."""

    @classmethod
    def parse(cls, values, what=None):
        if not isinstance(values, dict):
            raise ScriptError("%s must be an object" % (what or "input"))
        form = cls(values)
        if not form.validate():
            errors = form.normalized_errors
            raise ScriptError("invalid %s: %s" % (
                what or "input",
                "; ".join("%s: %s" % kv for kv in sorted(errors.items()))),
                errors)
        return form.params


class Mapping(validators.FancyValidator):
    """A nested JSON object, passed through unchanged."""

    if_missing = None
    accept_iterator = True
    messages = {"notMapping": "Please provide an object"}

    def _validate_python(self, value, state):
        if not isinstance(value, dict):
            raise formencode.Invalid(self.message("notMapping", state),
                                     value, state)


class Labels(ForEach):
    """A list of non-empty strings (node or ledger names)."""

    validators = [validators.String(not_empty=True)]
    if_missing = ()


class Indices(ForEach):

    validators = [validators.Int(min=0, not_empty=True)]
    if_missing = None


class _BlockSource(Form):
    blocks = Labels()
    count = validators.Int(min=1, if_missing=None)
    size = validators.Int(min=1, if_missing=32)
    tag = validators.Int(min=0, max=255, if_missing=None)

    def __after__(self):
        if not self._fields.get("blocks") and not self._fields.get("count"):
            self.add_error("blocks", "Give either blocks or count")


class CreateParams(_BlockSource):
    ledger = validators.String(not_empty=True)
    authors = Labels()
    policy = Mapping()
    nonce = validators.Int(min=0, if_missing=None)


class ExtendParams(_BlockSource):
    ledger = validators.String(not_empty=True)
    cosigners = Labels()


class EraseParams(Form):
    ledger = validators.String(not_empty=True)
    index = validators.Int(min=0, not_empty=True)


class ExportParams(Form):
    ledger = validators.String(not_empty=True)
    indices = Indices()
    name = validators.String(if_missing=None)


class ServeParams(Form):
    ledger = validators.String(not_empty=True)
    to = validators.String(not_empty=True)
    indices = Indices()


class RecoverParams(Form):
    ledger = validators.String(not_empty=True)


class CertifyParams(Form):
    ledger = validators.String(not_empty=True)
    indices = Indices()


class PolicyForm(Form):
    max_block_bytes = validators.Int(min=1, if_missing=None)
    min_signers = validators.Int(min=1, if_missing=None)
    allowed_content_tags = ForEach(validators.Int(min=0, max=255),
                                   if_missing=None)


PARAM_FORMS = {
    "create": CreateParams,
    "extend": ExtendParams,
    "erase": EraseParams,
    "export": ExportParams,
    "serve": ServeParams,
    "recover": RecoverParams,
    "certify": CertifyParams,
}


class ActionForm(Form):
    """One scenario line: ``{time_ms, actor, action, params}``."""

    time_ms = validators.Int(min=0, not_empty=True)
    actor = validators.String(not_empty=True)
    action = validators.OneOf(ACTIONS, not_empty=True)
    params = Mapping(if_missing={})

    @classmethod
    def parse(cls, values, what="action"):
        action = super(ActionForm, cls).parse(values, what)
        action["params"] = PARAM_FORMS[action["action"]].parse(
            action["params"] or {}, "%s params" % action["action"])
        return action


class FaultForm(Form):
    kind = validators.OneOf(FAULT_KINDS, not_empty=True)
    time_ms = validators.Int(min=0, if_missing=None)
    event = validators.Int(min=0, if_missing=None)
    node = validators.String(if_missing=None)
    params = Mapping(if_missing={})


class LatencyOrder(validators.FormValidator):
    """min latency must not exceed max latency."""

    validate_partial_form = False

    def _validate_python(self, field_dict, state):
        if field_dict["latency_min_ms"] > field_dict["latency_max_ms"]:
            message = "Minimum latency exceeds the maximum"
            raise formencode.Invalid(message, field_dict, state,
                                     error_dict={"latency_min_ms": message})


class NotaryModes(validators.FormValidator):
    """policy mode needs the repository; delayed mode needs an interval."""

    validate_partial_form = False

    def _validate_python(self, field_dict, state):
        errors = {}
        if field_dict["mode_policy"] and not field_dict["mode_repository"]:
            errors["mode_policy"] = "Policy mode requires repository mode"
        if field_dict["notarization"] == "delayed" and \
                not field_dict["interval_ms"]:
            errors["interval_ms"] = "Delayed notarization needs an interval"
        if errors:
            raise formencode.Invalid("; ".join(sorted(errors.values())),
                                     field_dict, state, error_dict=errors)


class SimConfigForm(Form):
    seed = validators.Int(min=0, max=2 ** 64 - 1, if_missing=0)
    node_count = validators.Int(min=1, not_empty=True)
    fanout = validators.Int(min=1, if_missing=2)
    latency_min_ms = validators.Int(min=0, if_missing=5)
    latency_max_ms = validators.Int(min=0, if_missing=20)
    anchor_latency_ms = validators.Int(min=0, if_missing=0)
    gossip_interval_ms = validators.Int(min=1, if_missing=50)
    settle_ms = validators.Int(min=0, if_missing=3000)
    mode_repository = validators.StringBool(if_missing=False)
    mode_policy = validators.StringBool(if_missing=False)
    notarization = validators.OneOf(NOTARIZATIONS, if_missing="immediate")
    interval_ms = validators.Int(min=0, if_missing=0)
    faults = ForEach(Mapping(), if_missing=())

    chained_validators = [LatencyOrder(), NotaryModes()]


class BenchForm(Form):
    blocks = validators.Int(min=1, not_empty=True)
    block_bytes = validators.Int(min=1, if_missing=1024)
    ledgers = validators.Int(min=1, if_missing=1)
    mode = validators.OneOf(NOTARIZATIONS, if_missing="immediate")
    threads = validators.Int(min=1, if_missing=1)
    interval_ms = validators.Int(min=1, if_missing=100)
