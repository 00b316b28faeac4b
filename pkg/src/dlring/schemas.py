"""JSON Schemas for the command-line reports.

Every report is an object with ``command``, ``seed`` and ``passed`` keys plus
command-specific fields. Ring elements are lists of monomial strings whose
sum is the element; the empty list is zero.
"""

from __future__ import annotations

ELEMENT = {"type": "array", "items": {"type": "string"}}

SERIES = {
    "type": "object",
    "required": ["variables", "truncation", "terms"],
    "properties": {
        "variables": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "weight"],
                "properties": {"name": {"type": "string"}, "weight": {"type": "integer", "minimum": 1}},
            },
        },
        "truncation": {"type": "integer", "minimum": 0},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["exponents", "coefficient"],
                "properties": {
                    "exponents": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "coefficient": ELEMENT,
                },
            },
        },
    },
}

_CHECK = {
    "type": "object",
    "required": ["status", "checked", "counterexample"],
    "properties": {"status": {"enum": ["pass", "fail"]}, "checked": {"type": "integer", "minimum": 0}},
}

_TALLY = {
    "type": "object",
    "required": ["passed", "total", "counterexample"],
    "properties": {"passed": {"type": "integer", "minimum": 0}, "total": {"type": "integer", "minimum": 0}},
}

_INDEX_LIST = {"type": "array", "items": {"type": "integer", "minimum": 0}}

_TERM = {
    "type": "object",
    "required": ["coeff", "ops"],
    "properties": {"coeff": ELEMENT, "ops": _INDEX_LIST},
}

_MATRIX = {"type": "array", "items": {"type": "array", "items": ELEMENT}}


def _report(required: dict) -> dict:
    props = {"command": {"type": "string"}, "seed": {"type": "integer"}, "passed": {"type": "boolean"}}
    props.update(required)
    return {"type": "object", "required": sorted(props), "properties": props}


SCHEMAS = {
    "fgl check": _report({"law": SERIES, "violations": {"type": "array"}}),
    "fgl lubin": _report({"h_t": SERIES, "F_t": SERIES, "F_t_additive": {"type": "boolean"}}),
    "fgl iterate": _report({"h_ts": SERIES, "F_ts": SERIES, "checks": {"type": "object"}}),
    "lazard dims": _report({
        "dimensions": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "expected": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
    }),
    "dl adem": _report({
        "input": _INDEX_LIST,
        "normal_form": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["indices", "generator", "grade"],
                "properties": {"indices": _INDEX_LIST, "generator": {"type": "string"}, "grade": {"type": "integer"}},
            },
        },
    }),
    "dl derive": _report({
        "bound": {"type": "integer"},
        "rules": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lhs", "rhs"],
                "properties": {"lhs": _INDEX_LIST, "rhs": {"type": "array", "items": _TERM}},
            },
        },
        "unsolved": {"type": "array"},
        "mismatches": {"type": "array"},
    }),
    "dl priddy": _report({
        "truncation": {"type": "integer", "minimum": 0},
        "table": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "k", "value"],
                "properties": {"n": {"type": "integer"}, "k": {"type": "integer"}, "value": ELEMENT},
            },
        },
    }),
    "dl basis-change": _report({
        "direction": {"enum": ["d-to-q", "q-to-d"]},
        "matrix": _MATRIX,
        "round_trip": {"type": "boolean"},
        "reduces_to_identity": {"type": "boolean"},
    }),
    "dring validate": _report({"axioms": {"type": "object", "additionalProperties": _CHECK}}),
    "cover selftest": _report({
        "trials": {"type": "integer", "minimum": 0},
        "max_size": {"type": "integer", "minimum": 0},
        "laws": {"type": "object", "additionalProperties": _TALLY},
    }),
}
