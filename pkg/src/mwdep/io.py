"""Column-file ingestion, JSON report documents and covariance CSVs.

Floats are written with 17 significant digits so every document parses back
to the identical doubles. Non-finite floats become ``null``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .montecarlo import MonteCarloReport, TailTable
from .testing import TestReport
from .varest import AutocovarianceProfile

SCHEMA_VERSION = "1"


class InputError(ValueError):
    """Bad user input: unreadable file, malformed value, invalid flag."""


def parse_column_text(text: str, source: str = "<input>") -> np.ndarray:
    """Parse one value per line; blank lines are skipped and the first
    non-blank line may be a header."""
    values = []
    seen_content = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            v = float(line)
        except ValueError:
            if not seen_content:
                seen_content = True
                continue  # header
            raise InputError(f"{source}:{lineno}: cannot parse {line!r} as a number") from None
        seen_content = True
        if not math.isfinite(v):
            raise InputError(f"{source}:{lineno}: non-finite value {line!r}")
        values.append(v)
    if not values:
        raise InputError(f"{source}: no numeric values")
    return np.asarray(values, dtype=np.float64)


def read_column_file(path) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_column_text(text, str(path))


def format_float(v: float) -> str:
    s = format(v, ".17g")
    # keep floats recognisable as floats after a JSON round trip
    if "." not in s and "e" not in s and "n" not in s:
        s += ".0"
    return s


def write_column_text(values) -> str:
    return "".join(format_float(float(v)) + "\n" for v in values)


def digest_values(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a, dtype="<f8").tobytes())
        h.update(b"|")
    return "sha256:" + h.hexdigest()


# -- JSON with fixed float formatting ---------------------------------------


def _emit(obj, indent: int, level: int, out: list) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or obj is True or obj is False or isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        f = float(obj)
        out.append(format_float(f) if math.isfinite(f) else "null")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.append(pad + json.dumps(str(k)) + ": ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            parts = []
            for v in seq:
                sub: list = []
                _emit(v, indent, level + 1, sub)
                parts.append("".join(sub))
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(seq):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    out: list = []
    _emit(obj, indent, 0, out)
    return "".join(out) + "\n"


# -- report documents --------------------------------------------------------

PAYLOAD_KINDS = ("test", "montecarlo", "profile", "tail")


def profile_to_dict(p: AutocovarianceProfile) -> dict:
    return {"series_length": p.series_length, "band": p.band, "gamma": [float(v) for v in p.gamma]}


def profile_from_dict(d: dict) -> AutocovarianceProfile:
    return AutocovarianceProfile(np.asarray(d["gamma"], dtype=np.float64), int(d["series_length"]))


@dataclass
class ReportDocument:
    kind: str
    payload: object
    command: dict = field(default_factory=dict)
    inputs_digest: str | None = None
    rng: dict | None = None
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        if self.kind == "profile":
            payload = {k: profile_to_dict(v) for k, v in self.payload.items()}
        else:
            payload = self.payload.to_dict()
        return {
            "schema_version": self.schema_version,
            "kind": self.kind,
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "rng": self.rng,
            "payload": payload,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ReportDocument":
        kind = d["kind"]
        raw = d["payload"]
        if kind == "test":
            payload = TestReport.from_dict(raw)
        elif kind == "montecarlo":
            payload = MonteCarloReport.from_dict(raw)
        elif kind == "profile":
            payload = {k: profile_from_dict(v) for k, v in raw.items()}
        elif kind == "tail":
            payload = TailTable(**raw)
        else:
            raise ValueError(f"unknown report kind {kind!r}")
        return cls(
            kind=kind,
            payload=payload,
            command=d.get("command", {}),
            inputs_digest=d.get("inputs_digest"),
            rng=d.get("rng"),
            schema_version=d.get("schema_version", SCHEMA_VERSION),
        )

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(json.loads(text))


# -- covariance CSV ----------------------------------------------------------


def profile_csv(gx: AutocovarianceProfile, gy: AutocovarianceProfile | None = None) -> str:
    """``lag,gamma_x[,gamma_y],band`` with ``band = 2/sqrt(n)`` of the x series."""
    header = "lag,gamma_x,gamma_y,band" if gy is not None else "lag,gamma_x,band"
    lines = [header]
    band = format_float(gx.band)
    for k in range(gx.max_lag + 1):
        cells = [str(k), format_float(float(gx.gamma[k]))]
        if gy is not None:
            cells.append(format_float(float(gy.gamma[k])))
        cells.append(band)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_profile_csv(text: str) -> dict:
    """Inverse of :func:`profile_csv`: column name to float array."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    cols = {h: [] for h in header}
    for ln in lines[1:]:
        for h, cell in zip(header, ln.split(",")):
            cols[h].append(float(cell))
    return {h: np.asarray(v) for h, v in cols.items()}
