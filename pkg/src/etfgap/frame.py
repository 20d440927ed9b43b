"""The ``Frame`` value type: a d x n complex matrix whose columns are the vectors."""

from dataclasses import dataclass

import numpy as np

from .matcore import as_complex_matrix


@dataclass(frozen=True, eq=False)
class Frame:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(as_complex_matrix(self.matrix), copy=True)
        if m.shape[0] > m.shape[1]:
            raise ValueError(f"frame has d={m.shape[0]} > n={m.shape[1]}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def d(self):
        return self.matrix.shape[0]

    @property
    def n(self):
        return self.matrix.shape[1]

    def gram(self):
        return self.matrix.conj().T @ self.matrix

    def __repr__(self):
        return f"Frame(d={self.d}, n={self.n})"
