"""Rectangular parameter grids and the matrices emitted over them."""
from dataclasses import dataclass, field

import numpy as np

from ._errors import InvalidParameterError


@dataclass(frozen=True)
class SweepGrid:
    """Uniform 1-D axis ``linspace(start, stop, count)``."""

    start: float
    stop: float
    count: int

    def __post_init__(self):
        if int(self.count) < 2:
            raise InvalidParameterError("grid count must be at least 2")
        if not (np.isfinite(self.start) and np.isfinite(self.stop)) or self.stop == self.start:
            raise InvalidParameterError("grid bounds must be finite and distinct")

    @property
    def values(self):
        return np.linspace(self.start, self.stop, int(self.count))

    @property
    def step(self):
        return (self.stop - self.start) / (int(self.count) - 1)


@dataclass
class FieldMap:
    """A matrix of values over a (row axis) x (column axis) grid."""

    values: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    row_name: str
    col_name: str
    value_name: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != (len(self.rows), len(self.cols)):
            raise InvalidParameterError(
                f"values shape {self.values.shape} does not match axes "
                f"({len(self.rows)}, {len(self.cols)})"
            )


def as_axis(values, name="grid"):
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidParameterError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} contains non-finite values")
    if arr.size > 1 and not (np.all(np.diff(arr) > 0) or np.all(np.diff(arr) < 0)):
        raise InvalidParameterError(f"{name} must be strictly monotone")
    return arr
