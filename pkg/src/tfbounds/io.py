"""Signal and symbol specifications, CSV tables and run manifests.

Signals are given either as shorthand strings

    gauss:<lam>                 exp(-pi lam t^2)
    shift:<x0>,<xi0>:gauss:<lam> time-frequency shifted Gaussian

or as JSON files (any argument ending in ``.json`` or naming an existing
file).  JSON signal objects (``"type"`` is accepted for ``"kind"``)::

    {"kind": "gaussian", "lam": 1, "x0": 0, "xi0": 0, "amplitude": 1}
    {"kind": "sum", "terms": [<signal>, ...], "coefs": [1, ...]}
    {"kind": "samples", "grid": {"n": 256, "delta": 0.0625}, <payload>}

with the sample payload given as ``"re"``/``"im"`` lists, as ``"base64"``
(little-endian complex128) or as ``"csv"`` text with rows ``index,re,im``.

Phase-space symbols use ``gengauss:<a>,<b>,<c>``, ``const:<value>`` or
JSON objects of kind ``gen_gaussian`` (keys ``a, b, c, amplitude, x0,
xi0``), ``constant`` (``value``) or ``samples`` (``xgrid``, ``xigrid`` and
row-major ``re``/``im`` lists).

Floats are written with 17 significant digits and JSON with sorted keys so
identical runs produce byte-identical files.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import io as _io
import json
import os
from typing import Dict, Iterable, List, Sequence

import numpy as np

from . import __version__
from .errors import InputError
from .oracles import GenGaussian
from .signals import (AxisGrid, ConstantSymbol, SampledSignal, TfArray, combine, gaussian)

__all__ = [
    "FLOAT_FMT",
    "load_signal",
    "load_symbol",
    "signal_from_obj",
    "symbol_from_obj",
    "file_sha256",
    "text_sha256",
    "signal_csv",
    "tfarray_csv",
    "table_csv",
    "dumps_json",
    "write_outputs",
    "input_record",
    "read_json",
]

FLOAT_FMT = "%.17g"


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def _number(s: str) -> float:
    try:
        return float(s)
    except ValueError as exc:
        raise InputError(f"cannot parse number {s!r}") from exc


def _is_file_ref(arg: str) -> bool:
    return arg.endswith(".json") or os.path.sep in arg or os.path.exists(arg)


def read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"input file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}") from exc


def _kind(obj, what: str) -> str:
    if not isinstance(obj, dict) or not ("kind" in obj or "type" in obj):
        raise InputError(f"{what} JSON must be an object with a 'kind' key")
    return obj.get("kind", obj.get("type"))


def _sample_payload(obj: dict) -> np.ndarray:
    if "base64" in obj:
        try:
            raw = base64.b64decode(obj["base64"], validate=True)
        except (binascii.Error, ValueError) as exc:
            raise InputError("invalid base64 sample payload") from exc
        if len(raw) % 16:
            raise InputError("base64 payload length is not a multiple of 16 bytes")
        return np.frombuffer(raw, dtype="<c16").astype(complex)
    if "csv" in obj:
        rows = [r for r in obj["csv"].strip().splitlines() if r.strip()]
        if rows and not rows[0].split(",")[0].strip().lstrip("-").isdigit():
            rows = rows[1:]
        table = {}
        for r in rows:
            parts = r.split(",")
            if len(parts) != 3:
                raise InputError(f"CSV sample rows need 'index,re,im', got {r!r}")
            table[int(parts[0])] = complex(_number(parts[1]), _number(parts[2]))
        if sorted(table) != list(range(len(table))):
            raise InputError("CSV sample indices must be 0..n-1")
        return np.array([table[k] for k in range(len(table))])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    return re + 1j * im


# ---------------------------------------------------------------- signals
def _parse_signal_shorthand(text: str, grid: AxisGrid) -> SampledSignal:
    parts = text.strip().split(":")
    x0 = xi0 = 0.0
    if parts[0] == "shift":
        if len(parts) < 3:
            raise InputError(f"malformed shift shorthand {text!r}")
        shift = parts[1].split(",")
        if len(shift) != 2:
            raise InputError(f"shift needs '<x0>,<xi0>' in {text!r}")
        x0, xi0 = (_number(v) for v in shift)
        parts = parts[2:]
    if parts[0] == "gauss" and len(parts) == 2:
        lam = _number(parts[1])
        if not lam > 0:
            raise InputError("gauss:<lam> needs lam > 0")
        return gaussian(lam, grid, x0, xi0)
    raise InputError(f"unknown signal shorthand {text!r}")


def signal_from_obj(obj: dict, grid: AxisGrid) -> SampledSignal:
    """Build a signal from a decoded JSON object."""
    kind = _kind(obj, "signal")
    if "grid" in obj:
        g = obj["grid"]
        try:
            grid = AxisGrid(int(g["n"]), float(g["delta"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("grid needs integer 'n' and float 'delta'") from exc
    try:
        if kind == "gaussian":
            lam = float(obj.get("lam", 1.0))
            if not lam > 0:
                raise InputError("gaussian 'lam' must be positive")
            return gaussian(lam, grid, float(obj.get("x0", 0.0)), float(obj.get("xi0", 0.0)),
                            complex(obj.get("amplitude", 1.0)))
        if kind == "sum":
            terms = [signal_from_obj(t, grid) for t in obj["terms"]]
            coefs = obj.get("coefs", [1.0] * len(terms))
            if len(coefs) != len(terms) or not terms:
                raise InputError("'sum' needs matching non-empty 'terms' and 'coefs'")
            return combine(terms, [complex(c) for c in coefs])
        if kind == "samples":
            return SampledSignal(grid, _sample_payload(obj))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed {kind!r} signal: {exc}") from exc
    raise InputError(f"unknown signal type {kind!r}")


def load_signal(arg: str, grid: AxisGrid) -> SampledSignal:
    """Signal from shorthand or a JSON file path."""
    if _is_file_ref(arg):
        return signal_from_obj(read_json(arg), grid)
    return _parse_signal_shorthand(arg, grid)


# ---------------------------------------------------------------- symbols
def _grid_obj(obj) -> AxisGrid:
    try:
        return AxisGrid(int(obj["n"]), float(obj["delta"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("grid needs integer 'n' and float 'delta'") from exc


def symbol_from_obj(obj: dict):
    """Phase-space symbol (callable or :class:`TfArray`) from a decoded JSON object."""
    kind = _kind(obj, "symbol")
    try:
        if kind == "gen_gaussian":
            return GenGaussian(float(obj["a"]), float(obj["b"]), float(obj.get("c", 0.0)),
                               float(obj.get("amplitude", 1.0)), 1,
                               float(obj.get("x0", 0.0)), float(obj.get("xi0", 0.0)))
        if kind == "constant":
            return ConstantSymbol(complex(obj.get("value", 1.0)))
        if kind == "samples":
            xg, xig = _grid_obj(obj["xgrid"]), _grid_obj(obj["xigrid"])
            return TfArray(xg, xig, _sample_payload(obj).reshape(xg.n, xig.n))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed {kind!r} symbol: {exc}") from exc
    raise InputError(f"unknown symbol type {kind!r}")


def load_symbol(arg: str):
    """Symbol from ``gengauss:a,b,c``, ``const:v`` or a JSON file path."""
    if _is_file_ref(arg):
        return symbol_from_obj(read_json(arg))
    head, _, rest = arg.partition(":")
    if head == "gengauss":
        vals = [_number(v) for v in rest.split(",")]
        if len(vals) not in (2, 3):
            raise InputError("gengauss needs '<a>,<b>[,<c>]'")
        return GenGaussian(*vals)
    if head == "const":
        return ConstantSymbol(complex(_number(rest)))
    raise InputError(f"unknown symbol shorthand {arg!r}")


# ---------------------------------------------------------------- tables
def table_csv(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    buf = _io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(float(v)) for v in row) + "\n")
    return buf.getvalue()


def signal_csv(f: SampledSignal) -> str:
    """Rows ``index,t,re,im``."""
    s = f.samples
    buf = _io.StringIO()
    buf.write("index,t,re,im\n")
    for k, (t, v) in enumerate(zip(f.grid.nodes, s)):
        buf.write(f"{k},{_fmt(t)},{_fmt(v.real)},{_fmt(v.imag)}\n")
    return buf.getvalue()


def tfarray_csv(F: TfArray) -> str:
    """Long format: one ``i,j,x,xi,re,im`` row per node, ``x`` varying slowest."""
    x, xi = F.mesh
    i, j = np.meshgrid(np.arange(F.xgrid.n), np.arange(F.xigrid.n), indexing="ij")
    v = F.values
    buf = _io.StringIO()
    buf.write("i,j,x,xi,re,im\n")
    for row in zip(i.ravel(), j.ravel(), x.ravel(), xi.ravel(), v.real.ravel(), v.imag.ravel()):
        buf.write("%d,%d,%s,%s,%s,%s\n" % (row[0], row[1], *(_fmt(c) for c in row[2:])))
    return buf.getvalue()


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


# ---------------------------------------------------------------- hashing and output
def text_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def file_sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def input_record(arg: str) -> dict:
    """Provenance of one input argument: file hash or the shorthand itself."""
    if _is_file_ref(arg) and os.path.exists(arg):
        return {"source": arg, "sha256": file_sha256(arg)}
    return {"source": arg, "sha256": text_sha256(arg)}


def write_outputs(prefix: str, files: Dict[str, str], subcommand: str, parameters: dict,
                  inputs: Dict[str, str]) -> List[str]:
    """Write every output plus ``<prefix>.manifest.json`` in one step.

    ``files`` maps suffixes (``".csv"``, ``".json"``) to text.  All content
    is rendered before anything touches the disk, and each file goes through
    a temporary name and an atomic rename.
    """
    manifest_path = prefix + ".manifest.json"
    outputs = {}
    rendered = {}
    for suffix, text in files.items():
        path = prefix + suffix
        rendered[path] = text
        outputs[os.path.basename(path)] = text_sha256(text)
    manifest = {
        "subcommand": subcommand,
        "parameters": parameters,
        "inputs": {k: input_record(v) for k, v in sorted(inputs.items())},
        "version": __version__,
        "outputs": outputs,
    }
    rendered[manifest_path] = dumps_json(manifest)
    directory = os.path.dirname(os.path.abspath(manifest_path))
    os.makedirs(directory, exist_ok=True)
    tmp_paths = []
    try:
        for path, text in rendered.items():
            tmp = path + ".tmp"
            with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            tmp_paths.append((tmp, path))
        for tmp, path in tmp_paths:
            os.replace(tmp, path)
    finally:
        for tmp, _ in tmp_paths:
            if os.path.exists(tmp):
                os.remove(tmp)
    return list(rendered)
