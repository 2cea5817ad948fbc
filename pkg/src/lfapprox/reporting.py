"""Output documents: {meta, columns, rows} serialized as JSON or CSV.

Values are decimal strings at full working precision (binary floats
cannot carry a 256-bit result through a JSON number), and every document
embeds the resolved configuration for reproducibility.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Dict, List, Optional

import mpmath


def decimal_digits(bits: int) -> int:
    return int(bits * 0.30103) + 3


def num_str(value, bits: int = 256) -> str:
    """Full-precision decimal string for int / mpf / mpc / float."""
    if isinstance(value, (int, str)):
        return str(value)
    if isinstance(value, mpmath.mpc) or (hasattr(value, "imag") and getattr(value, "imag", 0) != 0):
        z = mpmath.mpc(value)
        return f"{num_str(z.real, bits)}{'+' if z.imag >= 0 else '-'}{num_str(abs(z.imag), bits)}j"
    return mpmath.nstr(mpmath.mpf(value), decimal_digits(bits), strip_zeros=True)


def build_document(meta: Dict, columns: List[str], rows: List[List], bits: int = 256) -> Dict:
    return {
        "meta": {key: (num_str(v, bits) if isinstance(v, (mpmath.mpf, mpmath.mpc)) else v)
                 for key, v in meta.items()},
        "columns": list(columns),
        "rows": [[num_str(cell, bits) if cell is not None else "" for cell in row] for row in rows],
    }


def write_json(document: Dict, stream) -> None:
    json.dump(document, stream, indent=2)
    stream.write("\n")


def write_csv(document: Dict, stream) -> None:
    for key, value in document["meta"].items():
        stream.write(f"# {key} = {value}\n")
    writer = csv.writer(stream)
    writer.writerow(document["columns"])
    for row in document["rows"]:
        writer.writerow(row)


def render(document: Dict, fmt: str, path: Optional[str]) -> str:
    """Serialize to a path ('-' or None means stdout); returns the text."""
    buf = io.StringIO()
    if fmt == "json":
        write_json(document, buf)
    elif fmt == "csv":
        write_csv(document, buf)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    text = buf.getvalue()
    if path and path != "-":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
