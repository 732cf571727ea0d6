"""Source configuration documents and CSV rendering of sweep results.

A source configuration is a JSON object::

    {
      "dimension": 2,
      "label": "zero-plus",
      "signals": [
        {"probability": 0.5, "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]},
        {"probability": 0.5, "state": [[0.7071067811865476, 0], [0.7071067811865476, 0]]}
      ]
    }

Complex numbers are ``[re, im]`` pairs. A signal gives either a density
``matrix`` or, for pure signals, a ``state`` vector.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .blocks import SweepCell
from .config import ValidationError
from .linalg import ket_bra
from .source import Ensemble

SWEEP_FIELDS = [
    "K",
    "rate",
    "d",
    "xi",
    "eta",
    "distortion",
    "lemma1_bound",
    "lemma2_floor",
    "avg_purity",
    "status",
]


class ConfigError(ValidationError):
    """A configuration document is malformed; the message names the location."""


def _complex(value: Any, where: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise ConfigError(f"{where}: expected a [re, im] pair of numbers, got {value!r}")
    z = complex(float(value[0]), float(value[1]))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ConfigError(f"{where}: non-finite entry {value!r}")
    return z


def _matrix(value: Any, n: int, where: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != n:
        raise ConfigError(f"{where}: expected {n} rows")
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != n:
            raise ConfigError(f"{where}[{i}]: expected {n} entries")
        for j, entry in enumerate(row):
            out[i, j] = _complex(entry, f"{where}[{i}][{j}]")
    return out


def _vector(value: Any, n: int, where: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != n:
        raise ConfigError(f"{where}: expected {n} amplitudes")
    v = np.array([_complex(x, f"{where}[{i}]") for i, x in enumerate(value)])
    norm = np.linalg.norm(v)
    if abs(norm**2 - 1.0) > 1e-10:
        raise ConfigError(f"{where}: state is not normalised (squared norm {norm**2!r})")
    return v


def parse_source_config(doc: Any) -> Ensemble:
    """Build an :class:`Ensemble` from a decoded configuration document."""
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object")
    n = doc.get("dimension")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError(f"dimension: expected a positive integer, got {n!r}")
    signals = doc.get("signals")
    if not isinstance(signals, list) or not signals:
        raise ConfigError("signals: expected a non-empty list")
    probs, ops = [], []
    for k, sig in enumerate(signals):
        where = f"signals[{k}]"
        if not isinstance(sig, dict):
            raise ConfigError(f"{where}: expected an object")
        p = sig.get("probability")
        if not isinstance(p, (int, float)) or isinstance(p, bool):
            raise ConfigError(f"{where}.probability: expected a number, got {p!r}")
        probs.append(float(p))
        if "matrix" in sig:
            ops.append(_matrix(sig["matrix"], n, f"{where}.matrix"))
        elif "state" in sig:
            ops.append(ket_bra(_vector(sig["state"], n, f"{where}.state")))
        else:
            raise ConfigError(f"{where}: needs a 'matrix' or a 'state'")
    label = doc.get("label")
    try:
        return Ensemble(np.array(probs), tuple(ops), label if isinstance(label, str) else None)
    except ValidationError as exc:
        msg = str(exc)
        if msg.startswith("signal "):
            k, _, rest = msg[len("signal "):].partition(":")
            msg = f"signals[{k}].matrix:{rest}"
        raise ConfigError(msg) from None


def load_source_config(path: str | Path) -> Ensemble:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None
    return parse_source_config(doc)


def ensemble_to_config(e: Ensemble) -> dict:
    """Inverse of :func:`parse_source_config` (signals written as matrices)."""
    doc: dict[str, Any] = {"dimension": e.dim}
    if e.label:
        doc["label"] = e.label
    doc["signals"] = [
        {
            "probability": p,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in s],
        }
        for p, s in e
    ]
    return doc


def _fmt(x: float | int | None) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return f"{x:.12g}"


def cell_row(cell: SweepCell) -> dict[str, str]:
    r = cell.report
    return {
        "K": str(cell.K),
        "rate": _fmt(cell.rate),
        "d": _fmt(cell.d),
        "xi": _fmt(r.xi if r else None),
        "eta": _fmt(r.eta if r else None),
        "distortion": _fmt(r.distortion if r else None),
        "lemma1_bound": _fmt(r.lemma1_bound if r else None),
        "lemma2_floor": _fmt(r.lemma2_floor if r else None),
        "avg_purity": _fmt(r.avg_purity if r else None),
        "status": cell.status,
    }


def sweep_csv(cells: Iterable[SweepCell]) -> str:
    """CSV text for sweep cells, rows sorted by ``(rate, K)``."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    writer.writeheader()
    for cell in sorted(cells, key=lambda c: (c.rate, c.K)):
        writer.writerow(cell_row(cell))
    return buf.getvalue()


def append_csv_row(path: str | Path, cell: SweepCell) -> None:
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_FIELDS, lineterminator="\n")
        if new:
            writer.writeheader()
        writer.writerow(cell_row(cell))
