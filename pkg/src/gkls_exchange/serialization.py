"""JSON encoding of operators, systems and physical forms.

A 2x2 operator is a nested list ``[[z00, z01], [z10, z11]]`` where each entry
is either a real number or a ``[re, im]`` pair. Floats are written with
``repr``, which round-trips doubles exactly.
"""
from __future__ import annotations

import json
from numbers import Real

import numpy as np

from .decompose import PhysicalForm
from .gkls import GklsSystem, JumpTerm


class FormatError(ValueError):
    """Input does not follow the documented JSON layout."""


def _entry(x) -> complex:
    if isinstance(x, bool):
        raise FormatError("booleans are not operator entries")
    if isinstance(x, Real):
        return complex(float(x))
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(p, Real) and not isinstance(p, bool) for p in x
    ):
        return complex(float(x[0]), float(x[1]))
    raise FormatError(f"operator entry must be a number or [re, im], got {x!r}")


def op_from_json(obj) -> np.ndarray:
    if not (isinstance(obj, list) and len(obj) == 2 and all(isinstance(r, list) and len(r) == 2 for r in obj)):
        raise FormatError("operator must be a 2x2 nested list")
    return np.array([[_entry(x) for x in row] for row in obj], dtype=complex)


def op_to_json(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def system_from_json(obj) -> GklsSystem:
    if not isinstance(obj, dict) or "hamiltonian" not in obj:
        raise FormatError("system must be an object with a 'hamiltonian' key")
    terms = obj.get("terms", [])
    if not isinstance(terms, list):
        raise FormatError("'terms' must be a list")
    parsed = []
    for t in terms:
        if not isinstance(t, dict) or "rate" not in t or "op" not in t:
            raise FormatError("each term needs 'rate' and 'op'")
        rate = t["rate"]
        if isinstance(rate, bool) or not isinstance(rate, Real):
            raise FormatError("rate must be a number")
        parsed.append(JumpTerm(float(rate), op_from_json(t["op"])))
    return GklsSystem(op_from_json(obj["hamiltonian"]), tuple(parsed))


def system_to_json(sys: GklsSystem) -> dict:
    return {
        "hamiltonian": op_to_json(sys.hamiltonian),
        "terms": [{"rate": t.rate, "op": op_to_json(t.op)} for t in sys.terms],
    }


def form_to_json(pf: PhysicalForm, residual: float) -> dict:
    return {
        "h_eff": op_to_json(pf.h_eff),
        "n": op_to_json(pf.n.op),
        "d": None if pf.dphase is None else op_to_json(pf.dphase.op),
        "gamma_p": pf.gamma_p,
        "gamma_m": pf.gamma_m,
        "big_gamma": pf.big_gamma,
        "roundtrip_residual": float(residual),
    }


def load_system(path) -> GklsSystem:
    with open(path, encoding="utf-8") as fh:
        return system_from_json(json.load(fh))


def dumps(obj) -> str:
    """One top-level key per line, values compact."""
    if not isinstance(obj, dict):
        return json.dumps(obj)
    body = ",\n".join(f"  {json.dumps(k)}: {json.dumps(v)}" for k, v in obj.items())
    return "{\n" + body + "\n}"
