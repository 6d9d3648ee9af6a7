"""
Scan configuration, symbol literals, and CSV emission.

Symbol literal::

    {"coeffs": {"-1": [1.0, 0.0], "2": [1.0, 0.0]}}

String keys are signed integer indices, values are ``[re, im]`` pairs.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import jsonschema

from .errors import ConfigError
from .symbol import LaurentSymbol

log = logging.getLogger(__name__)


def load_schema(name: str) -> dict:
    text = resources.files("toeplitz_growth.schemas").joinpath(f"{name}.schema.json").read_text()
    return json.loads(text)


def _validate(obj, schema_name: str):
    schema = load_schema(schema_name)
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"{schema_name}: invalid value at '{where}': {err.message}")


@dataclass(frozen=True)
class ScanConfig:
    """Grid geometry, refinement schedule and tolerances shared by the scans.

    ``grid`` is None (automatic box around the curve) or a dict
    ``{"box": [x0, x1, y0, y1], "nx": int, "ny": int}``.
    """

    grid: dict | None = None
    max_level: int = 32
    lrg_levels: int = 12
    margin: float = 1e-3
    band: float = 1e-8
    fft_size: int = 1024
    section_schedule: tuple = (100, 200, 400)
    seed: int = 0
    samples: int | None = None
    ring_samples: int | None = None
    intersection_tol: float = 1e-6
    cusp_tol: float = 1e-6
    workers: int = 1

    def __post_init__(self):
        for name in ("margin", "band", "intersection_tol", "cusp_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"'{name}' must be positive")
        sched = tuple(int(n) for n in self.section_schedule)
        if len(sched) < 1 or any(b <= a for a, b in zip(sched, sched[1:])):
            raise ConfigError("'section_schedule' must be strictly increasing")
        object.__setattr__(self, "section_schedule", sched)
        if self.max_level < 0 or self.lrg_levels < 1:
            raise ConfigError("'max_level' must be >= 0 and 'lrg_levels' >= 1")
        if self.fft_size < 1024 or self.fft_size & (self.fft_size - 1):
            raise ConfigError("'fft_size' must be a power of two >= 1024")

    def curve_samples(self, b: LaurentSymbol) -> int:
        return self.samples or 512 * max(b.degree, 1)

    def ring_points(self, b: LaurentSymbol) -> int:
        return self.ring_samples or 64 * max(b.degree, 1)

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        d["section_schedule"] = list(self.section_schedule)
        return d


_TOLERANCE_KEYS = ("margin", "band", "intersection_tol", "cusp_tol")


def config_from_dict(data: dict, warn=True) -> ScanConfig:
    _validate(data, "scan_config")
    if warn:
        for key in _TOLERANCE_KEYS:
            if key not in data:
                default = ScanConfig.__dataclass_fields__[key].default
                print(f"warning: config key '{key}' missing, using default {default}", file=sys.stderr)
    kwargs = dict(data)
    if "section_schedule" in kwargs:
        kwargs["section_schedule"] = tuple(kwargs["section_schedule"])
    return ScanConfig(**kwargs)


def load_config(path) -> ScanConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return config_from_dict(data)


def symbol_from_json(data: dict) -> LaurentSymbol:
    _validate(data, "symbol")
    coeffs = {}
    for key, pair in data["coeffs"].items():
        j = int(key)
        if j in coeffs:
            raise ConfigError(f"symbol: coefficient index '{key}' given twice")
        coeffs[j] = complex(pair[0], pair[1])
    b = LaurentSymbol.from_dict(coeffs)
    if b.is_constant:
        raise ConfigError("symbol: must be non-constant (m + k >= 1)")
    return b


def symbol_to_json(b: LaurentSymbol) -> dict:
    return {"coeffs": {str(j): [c.real, c.imag] for j, c in b.items() if c != 0}}


def load_symbol(path) -> LaurentSymbol:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return symbol_from_json(data)


def fmt_float(x) -> str:
    """17 significant digits: parses back to the identical double."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if v is None:
        return "nan"
    if isinstance(v, str):
        return v
    return fmt_float(v)


def emit_csv(records: Iterable[dict], path, columns: Sequence[str]):
    """Write ``records`` with the fixed column order ``columns``.

    ``path`` may be a filename or an open text stream. Rows are written as
    they are produced so large rasters never sit in memory.
    """
    own = not hasattr(path, "write")
    fh = open(path, "w", newline="") if own else path
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for rec in records:
            writer.writerow([_fmt(rec.get(c)) for c in columns])
            if not own:
                fh.flush()
    finally:
        if own:
            fh.close()


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_json(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=False)
    if path is None:
        sys.stdout.write(text + "\n")
    else:
        Path(path).write_text(text + "\n")
