"""Model parameter files.

Plain-text schema, one file per model::

    # comment
    key = scalar
    key = v1 v2 v3          # vector
    key = r11 r12 ; r21 r22 # matrix, rows separated by ';'

All values are floats.  Every parameter of every model lives in such a file
so the committed defaults can be overridden via ``--params`` on the CLI.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np


def parse_params_text(text: str) -> dict:
    params = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        rows = [r.split() for r in value.strip().split(";")]
        try:
            data = [[float(x) for x in row] for row in rows]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: non-numeric value in {raw!r}") from exc
        if len(data) == 1 and len(data[0]) == 1:
            params[key] = data[0][0]
        elif len(data) == 1:
            params[key] = np.array(data[0])
        else:
            if len({len(row) for row in data}) != 1:
                raise ValueError(f"line {lineno}: ragged matrix in {raw!r}")
            params[key] = np.array(data)
    return params


def load_params(model_name: str, path: str | Path | None = None) -> dict:
    """Load the committed defaults for model_name, or a user-supplied file."""
    if path is not None:
        return parse_params_text(Path(path).read_text())
    ref = resources.files("stlmon.processes") / "params" / f"{model_name}.txt"
    return parse_params_text(ref.read_text())
