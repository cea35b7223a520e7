"""Parameter grids, grid evaluation and the ``SpectralScan`` container.

Grid axes are written ``name:lo:hi:n:log|lin``. Evaluation order is the
row-major order of the grid regardless of the number of worker processes,
so serialized output is byte-identical between runs.
"""
from __future__ import annotations

import concurrent.futures
import csv
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[float, ...]
    log: bool = False

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError(f"{self.name}: empty axis")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"{self.name}: non-finite grid value")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError(f"{self.name}: grid not strictly increasing")
        object.__setattr__(self, "values", vals)

    @classmethod
    def linear(cls, name: str, lo: float, hi: float, n: int) -> "Axis":
        return cls(name, tuple(np.linspace(lo, hi, n)) if n > 1 else (lo,), False)

    @classmethod
    def logarithmic(cls, name: str, lo: float, hi: float, n: int) -> "Axis":
        if lo <= 0 or hi <= 0:
            raise ValueError(f"{name}: log axis needs positive bounds")
        return cls(name, tuple(np.geomspace(lo, hi, n)) if n > 1 else (lo,), True)

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``name:lo:hi:n:log|lin``."""
        parts = text.split(":")
        if len(parts) != 5:
            raise ValueError(f"grid spec {text!r} is not name:lo:hi:n:log|lin")
        name, lo, hi, n, kind = parts
        try:
            lo_f, hi_f, n_i = float(lo), float(hi), int(n)
        except ValueError:
            raise ValueError(f"grid spec {text!r}: bad number") from None
        if n_i < 1:
            raise ValueError(f"grid spec {text!r}: need at least one point")
        if not (math.isfinite(lo_f) and math.isfinite(hi_f)):
            raise ValueError(f"grid spec {text!r}: non-finite bound")
        if kind == "log":
            return cls.logarithmic(name, lo_f, hi_f, n_i)
        if kind == "lin":
            return cls.linear(name, lo_f, hi_f, n_i)
        raise ValueError(f"grid spec {text!r}: spacing must be log or lin")

    def spec(self) -> dict[str, Any]:
        return {"name": self.name, "values": list(self.values), "log": self.log}


def _fmt(x: float) -> str:
    # repr gives the shortest string that round-trips exactly
    return repr(float(x))


@dataclass
class SpectralScan:
    """Values of one quantity on a rectangular grid.

    ``values`` and ``valid`` have one dimension per axis. Points whose
    configuration was invalid or whose evaluation failed hold NaN with
    ``valid`` False.
    """

    axes: list[Axis]
    values: np.ndarray
    valid: np.ndarray
    quantity: str
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        shape = tuple(len(a.values) for a in self.axes)
        self.values = np.asarray(self.values, dtype=float).reshape(shape)
        self.valid = np.asarray(self.valid, dtype=bool).reshape(shape)

    def config_hash(self) -> str:
        blob = json.dumps({"quantity": self.quantity, "metadata": self.metadata,
                           "axes": [a.spec() for a in self.axes]},
                          sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def rows(self):
        for idx in np.ndindex(self.values.shape):
            coords = [self.axes[k].values[i] for k, i in enumerate(idx)]
            yield coords, float(self.values[idx]), bool(self.valid[idx])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# config {self.config_hash()}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([a.name for a in self.axes] + [self.quantity, "valid"])
        for coords, value, ok in self.rows():
            w.writerow([_fmt(c) for c in coords] + [_fmt(value), int(ok)])
        return buf.getvalue()

    def to_dict(self) -> dict[str, Any]:
        def clean(v):
            return v if math.isfinite(v) else repr(v)
        return {
            "quantity": self.quantity,
            "config_hash": self.config_hash(),
            "axes": [a.spec() for a in self.axes],
            "values": [clean(float(v)) for v in self.values.ravel()],
            "valid": [bool(v) for v in self.valid.ravel()],
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, default=str) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SpectralScan":
        data = json.loads(text)
        axes = [Axis(a["name"], tuple(a["values"]), a["log"]) for a in data["axes"]]
        values = [float(v) for v in data["values"]]
        return cls(axes, values, data["valid"], data["quantity"], data["metadata"])


def resolve_threads(threads: int | None) -> int:
    """Explicit count, else ``EITSIM_THREADS``, else 1."""
    if threads is None:
        env = os.environ.get("EITSIM_THREADS")
        threads = int(env) if env else 1
    return max(1, int(threads))


def evaluate_grid(func: Callable[..., tuple], axes: Sequence[Axis],
                  threads: int | None = None) -> tuple[np.ndarray, ...]:
    """Evaluate ``func(*coords) -> (value, valid, *flags)`` over the grid.

    Returns the value array, the validity mask and one boolean array per
    extra flag.

    With more than one thread the points are farmed out to a process pool;
    ``func`` must then be picklable. Results are placed by grid index.
    """
    points = list(np.ndindex(*(len(a.values) for a in axes)))
    coords = [tuple(axes[k].values[i] for k, i in enumerate(idx)) for idx in points]
    n = resolve_threads(threads)
    if n == 1 or len(coords) < 2:
        results = [func(*c) for c in coords]
    else:
        chunk = max(1, len(coords) // (4 * n))
        with concurrent.futures.ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(func, *zip(*coords), chunksize=chunk))
    shape = tuple(len(a.values) for a in axes)
    values = np.array([r[0] for r in results], dtype=float).reshape(shape)
    flags = [np.array([r[k] for r in results], dtype=bool).reshape(shape)
             for k in range(1, len(results[0]))]
    return (values, *flags)
