"""JSON codecs for function trees, weights and operator specs.

Complex numbers are written as [re, im]; plain numbers are accepted on input. Floats go
through json's shortest-repr encoding, so decode(encode(f)) evaluates bit-identically.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections.abc import Mapping

from .errors import ConfigError
from .fnspec import (
    AnalyticFunction,
    BinomialPower,
    Constant,
    DerivativeMark,
    Dilate,
    Monomial,
    Scale,
    Sum,
    make_self_map,
    polynomial,
)
from .integop import OperatorSpec
from .models import encode_complex
from .weights import NormalWeight, RadialWeight

SCHEMA_VERSION = 1


def decode_complex(value) -> complex:
    if isinstance(value, bool):
        raise ConfigError(f"Expected a number or [re, im], got {value!r}.")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if all(isinstance(part, (int, float)) and not isinstance(part, bool) for part in value):
            return complex(float(re), float(im))
    raise ConfigError(f"Expected a number or [re, im], got {value!r}.")


def _field(data: Mapping, key: str, where: str):
    try:
        return data[key]
    except KeyError:
        raise ConfigError(f"{where} is missing the {key!r} field.") from None


def encode_function(f: AnalyticFunction) -> dict:
    if isinstance(f, Constant):
        return {"kind": "constant", "c": encode_complex(f.c)}
    if isinstance(f, Monomial):
        return {"kind": "monomial", "m": f.m}
    if isinstance(f, BinomialPower):
        return {"kind": "binomial_power", "w": encode_complex(f.w), "alpha": f.alpha}
    if isinstance(f, Sum):
        return {"kind": "sum", "terms": [encode_function(term) for term in f.terms]}
    if isinstance(f, Scale):
        return {"kind": "scale", "c": encode_complex(f.c), "node": encode_function(f.node)}
    if isinstance(f, Dilate):
        return {"kind": "dilate", "r": f.r, "node": encode_function(f.node)}
    if isinstance(f, DerivativeMark):
        return {"kind": "derivative", "k": f.k, "node": encode_function(f.node)}
    raise TypeError(f"Unsupported node {type(f).__name__}.")


def decode_function(data) -> AnalyticFunction:
    if not isinstance(data, Mapping):
        raise ConfigError(f"A function spec must be an object, got {type(data).__name__}.")
    kind = _field(data, "kind", "Function spec")
    where = f"Function spec {kind!r}"
    try:
        if kind == "constant":
            return Constant(decode_complex(_field(data, "c", where)))
        if kind == "monomial":
            return Monomial(_field(data, "m", where))
        if kind == "binomial_power":
            return BinomialPower(
                decode_complex(_field(data, "w", where)), float(_field(data, "alpha", where))
            )
        if kind == "sum":
            return Sum(tuple(decode_function(term) for term in _field(data, "terms", where)))
        if kind == "scale":
            node = decode_function(_field(data, "node", where))
            return Scale(decode_complex(_field(data, "c", where)), node)
        if kind == "dilate":
            node = decode_function(_field(data, "node", where))
            return Dilate(float(_field(data, "r", where)), node)
        if kind == "derivative":
            node = decode_function(_field(data, "node", where))
            return DerivativeMark(_field(data, "k", where), node)
        if kind == "polynomial":
            return polynomial(decode_complex(c) for c in _field(data, "coefficients", where))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"Unknown function kind {kind!r}.")


def decode_weight(data) -> RadialWeight | NormalWeight:
    """{kind, parameters[, radii, values][, a, b]}; a and b make it a NormalWeight."""
    if not isinstance(data, Mapping):
        raise ConfigError(f"A weight spec must be an object, got {type(data).__name__}.")
    kind = _field(data, "kind", "Weight spec")
    try:
        profile = RadialWeight(
            kind,
            tuple(data.get("parameters", ())),
            radii=tuple(data.get("radii", ())),
            values=tuple(data.get("values", ())),
        )
        if "a" in data or "b" in data:
            a = float(_field(data, "a", "Weight spec"))
            return NormalWeight(profile, a, float(_field(data, "b", "Weight spec")))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"Weight spec {kind!r}: {exc}") from exc
    return profile


def decode_normal_weight(data) -> NormalWeight:
    weight = decode_weight(data)
    if not isinstance(weight, NormalWeight):
        raise ConfigError("This weight needs normality exponents 'a' and 'b'.")
    return weight


def encode_weight(w: RadialWeight | NormalWeight) -> dict:
    return w.to_dict()


def decode_self_map(data, tol: float = 1e-6):
    fn = decode_function(data)
    try:
        return make_self_map(fn, tol=tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def decode_operator(data) -> OperatorSpec:
    """{n, phi: <function spec>, g: <function spec>}."""
    if not isinstance(data, Mapping):
        raise ConfigError(f"An operator spec must be an object, got {type(data).__name__}.")
    try:
        return OperatorSpec(
            _field(data, "n", "Operator spec"),
            decode_self_map(_field(data, "phi", "Operator spec")),
            decode_function(_field(data, "g", "Operator spec")),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"Operator spec: {exc}") from exc


def encode_operator(spec: OperatorSpec) -> dict:
    return {"n": spec.n, "phi": encode_function(spec.phi.fn), "g": encode_function(spec.g)}


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, Mapping):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    return value


def dumps(document) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline.

    Non-finite floats are written as the strings "inf", "-inf" and "nan".
    """
    return json.dumps(_json_safe(document), sort_keys=True, indent=2, allow_nan=False) + "\n"


def config_fingerprint(document: Mapping) -> str:
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":")).encode("utf-8")
    digest = hashlib.blake2s(canonical, digest_size=8).hexdigest()
    return f"config-{digest}"


def load_document(text: str) -> dict:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Malformed JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError("A config document must be a JSON object.")
    version = document.get("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"Unsupported config version {version!r}; expected {SCHEMA_VERSION}.")
    return document
