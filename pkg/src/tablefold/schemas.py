"""JSON schemas for the descriptor and snapshot documents (normative)."""

from __future__ import annotations

import jsonschema

from .errors import ProtocolError, SchemaError

DESCRIPTOR_SCHEMA = {
    "type": "object",
    "required": ["columns"],
    "properties": {
        "protocol_version": {"type": "integer"},
        "columns": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "kind"],
                "properties": {
                    "id": {"type": "string"},
                    "label": {"type": "string"},
                    "kind": {"enum": ["numerical", "categorical", "text", "matrix"]},
                    "categories": {"type": "array", "items": {"type": "string"}},
                    "domain": {"type": "array", "items": {"type": "number"},
                               "minItems": 2, "maxItems": 2},
                    "matrix": {
                        "type": "object",
                        "required": ["members"],
                        "properties": {
                            "members": {"type": "array",
                                        "items": {"type": "string"},
                                        "minItems": 1},
                            "key": {
                                "type": "object",
                                "properties": {
                                    "label": {"type": ["string", "null"]},
                                    "values": {"type": "array"},
                                },
                            },
                        },
                    },
                },
            },
        },
    },
}

_CRITERION = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["categorical", "bins", "selection"]},
        "column": {"type": "string"},
        "thresholds": {"type": "array", "items": {"type": "number"}},
        "rows": {"type": "array", "items": {"type": "integer"}},
    },
}

STATE_SCHEMA = {
    "type": "object",
    "required": ["state"],
    "properties": {
        "protocol_version": {"type": "integer"},
        "dataset": {
            "type": "object",
            "properties": {"fingerprint": {"type": "string"},
                           "rows": {"type": "integer"}},
        },
        "state": {
            "type": "object",
            "properties": {
                "filters": {"type": "array", "items": {"type": "object"}},
                "grouping": {"type": "array", "items": _CRITERION},
                "sorting": {"type": "array", "items": {
                    "type": "object", "required": ["column"],
                    "properties": {
                        "column": {"type": "string"},
                        "direction": {"enum": ["asc", "desc"]},
                        "statistic": {"enum": ["min", "max", "q1", "median",
                                               "q3", "mean"]},
                    },
                }},
                "group_sort": {"type": ["object", "null"]},
                "aggregated": {"type": "array",
                               "items": {"type": "array", "items": {"type": "string"}}},
                "selection": {"type": "array", "items": {"type": "integer"}},
                "mode": {"enum": ["overview", "detail"]},
                "columns": {"type": "array", "items": {"type": "object"}},
                "encodings": {"type": "object"},
                "mappings": {"type": "object"},
            },
        },
    },
}


def validate_descriptor(doc: dict):
    try:
        jsonschema.validate(doc, DESCRIPTOR_SCHEMA)
    except jsonschema.ValidationError as e:
        raise SchemaError(f"invalid descriptor: {e.message}") from None


def validate_state(doc: dict):
    try:
        jsonschema.validate(doc, STATE_SCHEMA)
    except jsonschema.ValidationError as e:
        raise ProtocolError(f"invalid state document: {e.message}") from None
