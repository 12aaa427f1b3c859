"""JSON schemas for every report payload the CLI writes.

Payloads are validated against these before they are persisted, so a
schema drift shows up as a hard error in the producing run, not in a
consumer.
"""

from __future__ import annotations

import jsonschema

_NUM = {"type": "number"}
_INT = {"type": "integer"}
_STR = {"type": "string"}
_BOOL = {"type": "boolean"}
_NULLABLE_NUM = {"type": ["number", "null"]}
_NULLABLE_INT = {"type": ["integer", "null"]}
_NULLABLE_BOOL = {"type": ["boolean", "null"]}

SPECTRAL = {
    "type": "object",
    "required": ["q", "field", "kernel", "lambda1", "lambda2_abs", "ratio_q56", "method"],
    "properties": {
        "q": _INT, "field": _STR, "kernel": _STR,
        "lambda1": _NUM, "lambda2_abs": _NUM, "ratio_q56": _NUM,
        "method": {"enum": ["exact", "iterative"]},
        "residual": _NULLABLE_NUM, "iterations": _NULLABLE_INT,
    },
}

CUBE_AUDIT = {
    "type": "object",
    "required": ["q", "field", "kernel", "checked", "exhaustive", "mismatch_count"],
    "properties": {
        "q": _INT, "field": _STR, "kernel": _STR, "checked": _INT,
        "exhaustive": _BOOL, "mismatch_count": _INT,
        "mismatches": {"type": "array"},
    },
}

MIXING = {
    "type": "object",
    "required": ["q", "field", "kernel", "lambda2_abs", "trials", "violation_count"],
    "properties": {
        "q": _INT, "field": _STR, "kernel": _STR, "lambda2_abs": _NUM,
        "trials": _INT, "violation_count": _INT, "violations": {"type": "array"},
        "max_ratio": _NUM,
    },
}

INCIDENCE_ROW = {
    "type": "object",
    "required": ["q", "variant", "incidences", "p_size", "q_size",
                 "main", "deviation", "error_scale", "ratio"],
    "properties": {
        "q": _INT, "variant": _STR, "incidences": _INT,
        "p_size": _INT, "q_size": _INT,
        "main": {"type": "array", "items": _INT, "minItems": 2, "maxItems": 2},
        "deviation": {"type": "array", "items": _INT, "minItems": 2, "maxItems": 2},
        "error_scale": _NUM, "ratio": _NUM, "collisions": _INT,
        "trial": _INT, "degree": _INT,
    },
}

EXPANSION = {
    "type": "object",
    "required": ["q", "field", "sizes", "image_size", "missing",
                 "predicted_missing_scale", "ratio", "phi_image", "phi_ratio"],
    "properties": {
        "q": _INT, "field": _STR,
        "sizes": {"type": "array", "items": _INT, "minItems": 3, "maxItems": 3},
        "image_size": _INT, "missing": _INT,
        "predicted_missing_scale": _NUM, "ratio": _NUM,
        "phi_image": _INT, "phi_ratio": _NUM,
        "zero_incidence_checked": _BOOL, "incidence_count": _NULLABLE_INT,
        "p_set_size": _NULLABLE_INT, "q_set_size": _NULLABLE_INT,
        "lambda2_abs": _NULLABLE_NUM, "product_bound": _NULLABLE_NUM,
        "chain_ok": _NULLABLE_BOOL,
    },
}

CURVE_SWEEP = {
    "type": "object",
    "required": ["q", "kernel", "total", "reducible_count", "fraction", "exhaustive"],
    "properties": {
        "q": _INT, "kernel": _STR, "total": _INT, "reducible_count": _INT,
        "fraction": _NUM, "q_times_fraction": _NUM, "exhaustive": _BOOL,
        "seed": _NULLABLE_INT, "weil_violations": _INT,
    },
}

COMPOSITION = {
    "type": "object",
    "required": ["field", "trials", "hypothesis_cases", "counterexamples",
                 "additive_checked", "additive_disagreements"],
    "properties": {
        "field": _STR, "trials": _INT, "hypothesis_cases": _INT,
        "counterexamples": _INT, "additive_checked": _INT,
        "additive_disagreements": _INT, "exhaustive_cases": _INT,
    },
}

VERIFY = {
    "type": "object",
    "required": ["field", "kernel", "checks", "ok"],
    "properties": {
        "field": _STR, "kernel": _STR, "ok": _BOOL,
        "checks": {"type": "object",
                   "additionalProperties": {"type": "object",
                                            "required": ["ok"],
                                            "properties": {"ok": _BOOL}}},
    },
}

SUMMARY = {
    "type": "object",
    "required": ["experiment", "config_hash"],
    "properties": {"experiment": _STR, "config_hash": _STR},
}

RECORD = {
    "type": "object",
    "required": ["config_hash", "timestamp", "experiment", "payload", "version"],
    "properties": {
        "config_hash": _STR, "timestamp": _NUM, "experiment": _STR,
        "payload": {"type": ["object", "array"]}, "version": _STR,
    },
}

BY_NAME = {
    "spectral": SPECTRAL,
    "cube_audit": CUBE_AUDIT,
    "mixing": MIXING,
    "incidence_row": INCIDENCE_ROW,
    "expansion": EXPANSION,
    "curve_sweep": CURVE_SWEEP,
    "composition": COMPOSITION,
    "verify": VERIFY,
    "summary": SUMMARY,
    "record": RECORD,
}


def validate(payload: dict, name: str) -> None:
    """Raise jsonschema.ValidationError when the payload drifts from its schema."""
    jsonschema.validate(payload, BY_NAME[name])
