"""JSON serialization helpers: exact rationals as strings, never floats."""

import json
from fractions import Fraction

from .complexes import Chain

SCHEMA_PREFIX = "fillnorm"
SCHEMA_VERSION = 1


def schema(name):
    return f"{SCHEMA_PREFIX}/{name}/{SCHEMA_VERSION}"


def frac_str(value):
    """Serialize a rational as "p/q" (plain "p" for integers); None passes through."""
    if value is None:
        return None
    return str(Fraction(value))


def parse_frac(text):
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, str):
        return Fraction(text)
    raise ValueError(f"expected an exact rational, got {text!r}")


def chain_to_json(chain):
    coeffs = {}
    for cell in sorted(chain.coeffs):
        v = chain.coeffs[cell]
        coeffs[cell] = int(v) if v.denominator == 1 else str(v)
    return {"degree": chain.degree, "coeffs": coeffs}


def chain_from_json(obj):
    if not isinstance(obj, dict) or "degree" not in obj or "coeffs" not in obj:
        raise ValueError("chain JSON needs 'degree' and 'coeffs'")
    return Chain(int(obj["degree"]),
                 {k: parse_frac(v) for k, v in obj["coeffs"].items()})


def dumps(obj):
    """Canonical JSON encoding: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
