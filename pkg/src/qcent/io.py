"""JSON v1 documents for states, channels and Hamiltonians, plus deterministic output.

Every document is an object with ``"type"`` in {``state``, ``channel``,
``hamiltonian``} and ``"version": "v1"`` (a missing version is read as v1).
Complex numbers are written as ``[re, im]`` pairs; plain numbers are read
as real. See the README for the full schema.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from . import channels as ch
from .energy import HamiltonianSpectrum
from .errors import ParseError

__all__ = [
    "load_document",
    "parse_state",
    "parse_channel",
    "parse_hamiltonian",
    "encode_matrix",
    "state_document",
    "channel_document",
    "format_float",
    "dumps",
    "to_csv",
    "to_table",
]

VERSION = "v1"


def load_document(source, expected_type: str | None = None) -> dict:
    """Read a JSON document from a path, a JSON string or an already parsed dict."""
    if isinstance(source, dict):
        doc = source
    else:
        text = source
        if isinstance(source, Path) or not str(source).lstrip().startswith("{"):
            try:
                text = Path(source).read_text()
            except OSError as exc:
                raise ParseError(f"cannot read {source}: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    version = doc.get("version", VERSION)
    if version != VERSION:
        raise ParseError(f"unsupported schema version {version!r}")
    if expected_type is not None and doc.get("type", expected_type) != expected_type:
        raise ParseError(f"expected a {expected_type} document, got type {doc.get('type')!r}")
    return doc


def _complex(x) -> complex:
    if isinstance(x, bool):
        raise ParseError("booleans are not numbers")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise ParseError(f"cannot read {x!r} as a number or [re, im] pair")


def _vector(v) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise ParseError("expected a nonempty list")
    return np.array([_complex(x) for x in v], dtype=complex)


def _matrix(m) -> np.ndarray:
    if not isinstance(m, list) or not m or not all(isinstance(r, list) for r in m):
        raise ParseError("expected a nonempty list of rows")
    rows = [_vector(r) for r in m]
    if len({r.size for r in rows}) != 1:
        raise ParseError("matrix rows have different lengths")
    return np.stack(rows)


def encode_matrix(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def parse_state(source) -> np.ndarray:
    """Density matrix from ``matrix``, ``ket``, ``diag`` or ``generator`` fields."""
    doc = load_document(source, "state")
    if "matrix" in doc:
        rho = _matrix(doc["matrix"])
    elif "ket" in doc:
        psi = _vector(doc["ket"])
        psi = psi / np.linalg.norm(psi)
        rho = np.outer(psi, psi.conj())
    elif "diag" in doc:
        rho = np.diag(_vector(doc["diag"]))
    elif doc.get("generator") == "maximally_mixed":
        d = int(doc.get("params", {}).get("dim", 0))
        if d < 1:
            raise ParseError("maximally_mixed needs params.dim >= 1")
        rho = np.eye(d, dtype=complex) / d
    else:
        raise ParseError("state needs one of: matrix, ket, diag, generator")
    if "dim" in doc and int(doc["dim"]) != rho.shape[0]:
        raise ParseError(f"declared dim {doc['dim']} does not match data ({rho.shape[0]})")
    if rho.shape[0] != rho.shape[1]:
        raise ParseError("state matrix must be square")
    return rho


_GENERATORS = ("dephasing", "mix_with_pure", "example1_pinching", "depolarizing")


def parse_channel(source) -> ch.KrausChannel:
    doc = load_document(source, "channel")
    if "generator" in doc:
        name = doc["generator"]
        prm = doc.get("params", {})
        try:
            if name == "dephasing":
                return ch.dephasing(int(prm["dim"]))
            if name == "mix_with_pure":
                psi = _vector(prm["psi"]) if "psi" in prm else None
                return ch.mix_with_pure(int(prm["dim"]), float(prm["p"]), psi)
            if name == "example1_pinching":
                return ch.example1_pinching(float(prm["alpha"]), int(prm["n"]))
            if name == "depolarizing":
                d = int(prm["dim"])
                sigma = parse_state({"type": "state", **prm["sigma"]}) if "sigma" in prm \
                    else np.eye(d) / d
                return ch.depolarize_to(sigma, d)
        except KeyError as exc:
            raise ParseError(f"generator {name!r} is missing parameter {exc}") from exc
        raise ParseError(f"unknown generator {name!r}; expected one of {_GENERATORS}")
    if "kraus" not in doc:
        raise ParseError("channel needs either 'kraus' or 'generator'")
    ops = [_matrix(m) for m in doc["kraus"]]
    kind = doc.get("kind", "channel")
    try:
        chan = ch.KrausChannel(ops, kind=kind)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    for key, actual in (("input_dim", chan.input_dim), ("output_dim", chan.output_dim)):
        if key in doc and int(doc[key]) != actual:
            raise ParseError(f"declared {key} {doc[key]} does not match Kraus data ({actual})")
    rep = ch.validate(chan)
    if not rep.passed:
        raise ParseError(f"Kraus operators violate the {kind} trace condition "
                         f"(deviation {rep.deviation:.3e})")
    return chan


def parse_hamiltonian(source) -> HamiltonianSpectrum:
    doc = load_document(source, "hamiltonian")
    kind = doc.get("kind")
    try:
        if kind == "explicit":
            return HamiltonianSpectrum.explicit(doc["levels"], tail=doc.get("tail", "finite"),
                                                gap=doc.get("gap"))
        if kind == "oscillator":
            return HamiltonianSpectrum.oscillator(doc["hbar_omega"], cutoff=doc.get("cutoff"))
    except KeyError as exc:
        raise ParseError(f"hamiltonian is missing field {exc}") from exc
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown hamiltonian kind {kind!r}")


def state_document(rho) -> dict:
    rho = np.asarray(rho)
    return {"version": VERSION, "type": "state", "dim": int(rho.shape[0]),
            "matrix": encode_matrix(rho)}


def channel_document(chan: ch.KrausChannel) -> dict:
    return {"version": VERSION, "type": "channel", "input_dim": chan.input_dim,
            "output_dim": chan.output_dim, "kind": chan.kind,
            "kraus": [encode_matrix(v) for v in chan.kraus]}


# --------------------------------------------------------------------------
# deterministic emission


def format_float(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, complex):
        return f"[{format_float(obj.real)}, {format_float(obj.imag)}]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with fixed float formatting, so equal inputs give equal bytes."""
    return _encode(obj, indent, 0) + "\n"


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format_float(v).strip('"')
    return str(v)


def to_csv(rows: list, header: list) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(row.get(h, "")) for h in header])
    return buf.getvalue()


def to_table(rows: list, header: list) -> str:
    cells = [[_cell(row.get(h, "")) for h in header] for row in rows]
    widths = [max([len(h)] + [len(c[i]) for c in cells]) for i, h in enumerate(header)]
    line = "  ".join(h.ljust(wd) for h, wd in zip(header, widths))
    out = [line, "  ".join("-" * wd for wd in widths)]
    out += ["  ".join(c.ljust(wd) for c, wd in zip(row, widths)) for row in cells]
    return "\n".join(out) + "\n"
