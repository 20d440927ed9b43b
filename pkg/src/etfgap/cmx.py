"""The cmx-1 text format for complex matrices.

A cmx-1 file is a JSON object::

    {"format": "cmx-1", "rows": R, "cols": C, "entries": [[re, im], ...]}

with ``entries`` in row-major order and every number written with 17
significant digits, which round-trips IEEE doubles exactly.
"""

import json

import numpy as np

from .errors import EtfError

FORMAT_TAG = "cmx-1"


class CmxFormatError(EtfError, ValueError):
    pass


def _num(x):
    # 17 significant digits round-trip every finite double
    return format(float(x), ".17g")


def render_cmx(matrix):
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError("cmx-1 stores 2-D matrices only")
    if not np.all(np.isfinite(m)):
        raise ValueError("cmx-1 cannot store non-finite entries")
    rows, cols = m.shape
    lines = [
        "{",
        f'  "format": "{FORMAT_TAG}",',
        f'  "rows": {rows},',
        f'  "cols": {cols},',
        '  "entries": [',
    ]
    flat = m.ravel()
    body = [f"    [{_num(z.real)}, {_num(z.imag)}]" for z in flat]
    lines.append(",\n".join(body))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _reject_constant(name):
    raise CmxFormatError(f"non-finite value {name} in cmx-1 data")


def _as_count(value, name):
    if not isinstance(value, float) or not value.is_integer() or value < 1:
        raise CmxFormatError(f"{name} must be a positive integer")
    return int(value)


def parse_cmx(text):
    try:
        # parse_int=float keeps "-0" as -0.0
        obj = json.loads(text, parse_int=float, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise CmxFormatError(f"malformed cmx-1 data: {exc}") from None
    if not isinstance(obj, dict) or obj.get("format") != FORMAT_TAG:
        raise CmxFormatError(f"missing format tag {FORMAT_TAG!r}")
    rows = _as_count(obj.get("rows"), "rows")
    cols = _as_count(obj.get("cols"), "cols")
    entries = obj.get("entries")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise CmxFormatError(f"expected {rows * cols} entries")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, pair in enumerate(entries):
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, float) for x in pair)):
            raise CmxFormatError(f"entry {i} is not a [re, im] pair")
        out[i] = complex(pair[0], pair[1])
    return out.reshape(rows, cols)


def write_cmx(path, matrix):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(render_cmx(matrix))


def read_cmx(path):
    with open(path, encoding="ascii") as fh:
        return parse_cmx(fh.read())
