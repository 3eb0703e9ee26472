"""Named-column tabular data shared by samplers, estimators and models."""

from __future__ import annotations

import numpy as np


class Dataset:
    """Immutable table of named float64 columns of equal length.

    Parameters
    ----------
    columns : mapping of str -> array-like
        Column name to values; all columns must share one positive length.
    seed : int, optional
        Seed recorded at creation when the data came from a seeded sampler;
        purely informational.
    """

    def __init__(self, columns, seed=None):
        cols = {}
        n = None
        for name, values in columns.items():
            v = np.asarray(values, dtype=np.float64)
            if v.ndim != 1:
                raise ValueError(f"column {name!r} is not 1-dimensional")
            if n is None:
                n = v.shape[0]
            elif v.shape[0] != n:
                raise ValueError(
                    f"column {name!r} has length {v.shape[0]}, expected {n}")
            v.flags.writeable = False
            cols[name] = v
        if not cols or n == 0:
            raise ValueError("a dataset needs at least one column and one row")
        self._cols = cols
        self.n_rows = n
        self.seed = seed

    @property
    def names(self):
        return list(self._cols)

    def __contains__(self, name):
        return name in self._cols

    def __len__(self):
        return self.n_rows

    def column(self, name: str) -> np.ndarray:
        try:
            return self._cols[name]
        except KeyError:
            raise KeyError(f"no column named {name!r}") from None

    def matrix(self, names) -> np.ndarray:
        """Columns stacked as an (n_rows, len(names)) array, in given order."""
        return np.column_stack([self.column(n) for n in names])

    def with_column(self, name: str, values) -> "Dataset":
        cols = dict(self._cols)
        cols[name] = values
        return Dataset(cols, seed=self.seed)

    def take(self, rows) -> "Dataset":
        """Row subset (by index array), keeping all columns."""
        rows = np.asarray(rows)
        return Dataset({k: v[rows] for k, v in self._cols.items()},
                       seed=self.seed)

    def __repr__(self):
        return f"Dataset({self.n_rows} rows x {len(self._cols)} cols: {', '.join(self._cols)})"
