"""Readers and writers for the solver's CSV output contracts.

Snapshot files carry one row per degree of freedom with the fixed header
``x,y,rho,mx,my,mz,rhoE,B1,B2,B3,psi,p,alpha``; diagnostics files carry
``t,mean_alpha,total_entropy,min_rho,min_p``.  Values are written with 17
significant digits, so a parse/re-write round trip is lossless.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

SNAPSHOT_HEADER = "x,y,rho,mx,my,mz,rhoE,B1,B2,B3,psi,p,alpha"
SNAPSHOT_COLUMNS = SNAPSHOT_HEADER.split(",")
DIAGNOSTIC_COLUMNS = ("t", "mean_alpha", "total_entropy", "min_rho", "min_p")


class FormatError(ValueError):
    pass


@dataclass
class SnapshotTable:
    """One parsed snapshot: a column dictionary keyed by the header names."""

    columns: dict

    @classmethod
    def read(cls, path) -> "SnapshotTable":
        path = Path(path)
        with open(path) as fh:
            header = fh.readline().strip()
            if header != SNAPSHOT_HEADER:
                raise FormatError(
                    f"{path} does not carry the snapshot header; got '{header}'"
                )
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        if data.shape[1] != len(SNAPSHOT_COLUMNS):
            raise FormatError(f"{path}: expected {len(SNAPSHOT_COLUMNS)} columns")
        return cls(columns={name: data[:, k] for k, name in enumerate(SNAPSHOT_COLUMNS)})

    def write(self, path):
        data = np.stack([self.columns[name] for name in SNAPSHOT_COLUMNS], axis=1)
        with open(path, "w", newline="") as fh:
            fh.write(SNAPSHOT_HEADER + "\n")
            np.savetxt(fh, data, fmt="%.17g", delimiter=",")

    def __len__(self) -> int:
        return self.columns["x"].shape[0]

    def quantity(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise KeyError(
                f"unknown quantity '{name}'; available: {', '.join(SNAPSHOT_COLUMNS)}"
            )
        return self.columns[name]

    def grid(self, name: str):
        """Tensor-product grid (xs, ys, values[ny, nx]) of one quantity.

        Duplicated element-interface nodes share coordinates; their values
        are averaged, which is the right thing for rendering.
        """
        q = self.quantity(name)
        x, y = self.columns["x"], self.columns["y"]
        xs = np.unique(x)
        ys = np.unique(y)
        ix = np.searchsorted(xs, x)
        iy = np.searchsorted(ys, y)
        sums = np.zeros((ys.size, xs.size))
        counts = np.zeros((ys.size, xs.size))
        np.add.at(sums, (iy, ix), q)
        np.add.at(counts, (iy, ix), 1.0)
        if np.any(counts == 0.0):
            raise FormatError("snapshot nodes do not form a tensor-product grid")
        return xs, ys, sums / counts

    def line(self, axis: str, coord: float, name: str):
        """Nearest node line to a coordinate: (positions, values), duplicates
        averaged, sorted along the free axis."""
        if axis not in ("x", "y"):
            raise ValueError("axis must be 'x' or 'y'")
        fixed = self.columns[axis]
        free = self.columns["y" if axis == "x" else "x"]
        q = self.quantity(name)
        levels = np.unique(fixed)
        level = levels[np.argmin(np.abs(levels - coord))]
        mask = fixed == level
        pos, values = free[mask], q[mask]
        out_pos = np.unique(pos)
        sums = np.zeros(out_pos.size)
        counts = np.zeros(out_pos.size)
        idx = np.searchsorted(out_pos, pos)
        np.add.at(sums, idx, values)
        np.add.at(counts, idx, 1.0)
        return out_pos, sums / counts, float(level)


def read_diagnostics(path):
    """Diagnostics CSV as a structured array with named columns."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    missing = [c for c in DIAGNOSTIC_COLUMNS if c not in (data.dtype.names or ())]
    if missing:
        raise FormatError(f"{path}: missing diagnostics columns {missing}")
    return data


def read_reference_curve(path):
    """Two-column (position, value) reference data, with or without header."""
    path = Path(path)
    with open(path) as fh:
        first = fh.readline()
    try:
        float(first.split(",")[0])
        skip = 0
    except ValueError:
        skip = 1
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    return data[:, 0], data[:, 1]
