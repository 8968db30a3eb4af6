"""Run manifests and the text output formats (CSV, plain PGM)."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__


def fmt(value) -> str:
    """Shortest round-tripping text for a float, plain text otherwise."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


@dataclass
class RunManifest:
    subcommand: str
    config: dict
    parameters: dict
    version: str = __version__
    outputs: list = field(default_factory=list)
    wall_time_s: float = 0.0

    def digest(self) -> str:
        """Hash of everything that determines the numbers (not paths or timing)."""
        payload = json.dumps({"subcommand": self.subcommand, "config": self.config,
                              "parameters": self.parameters, "version": self.version},
                             sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    @property
    def comment(self) -> str:
        return f"mzscatter {self.version} {self.subcommand} manifest {self.digest()}"

    def write(self, out_dir: Path) -> Path:
        path = Path(out_dir) / f"{self.subcommand}_manifest.json"
        data = asdict(self)
        data["hash"] = self.digest()
        path.write_text(json.dumps(data, indent=2, sort_keys=True, default=str) + "\n")
        return path


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def write_csv(path: Path, header, rows, comment: str, footer=()) -> Path:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# {comment}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
        for line in footer:
            fh.write(f"# {line}\n")
    return path


def write_matrix_csv(path: Path, x, ys, values, comment: str) -> Path:
    """Rows are stations ``y``; the header row lists the ``x`` positions."""
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# {comment}\n")
        fh.write("y_m," + ",".join(fmt(float(v)) for v in x) + "\n")
        for y, row in zip(ys, values):
            fh.write(fmt(float(y)) + "," + ",".join(fmt(float(v)) for v in row) + "\n")
    return path


def write_pgm(path: Path, values, comment: str, maxval: int = 255, per_line: int = 16) -> Path:
    """Plain (P2) greymap, linearly scaled so the frame maximum maps to ``maxval``."""
    values = np.asarray(values, dtype=float)
    top = values.max()
    scaled = np.zeros(values.shape, dtype=int) if top <= 0 else np.rint(values / top * maxval).astype(int)
    rows, cols = scaled.shape
    with open(path, "w", newline="\n") as fh:
        fh.write(f"P2\n# {comment}\n{cols} {rows}\n{maxval}\n")
        for row in scaled:
            for start in range(0, cols, per_line):
                fh.write(" ".join(str(v) for v in row[start:start + per_line]) + "\n")
    return path


def read_pgm(path: Path) -> np.ndarray:
    tokens = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    cols, rows, _ = int(tokens[1]), int(tokens[2]), int(tokens[3])
    return np.array(tokens[4:], dtype=int).reshape(rows, cols)
