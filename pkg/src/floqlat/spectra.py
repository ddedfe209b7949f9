"""Containers for spectra shared by the Floquet and static builders."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


def wrap_phase(x):
    """Map angles into ``(-pi, pi]``."""
    x = np.asarray(x, dtype=float)
    return x - 2 * np.pi * np.ceil((x - np.pi) / (2 * np.pi))


def bz_grid(n):
    """``n`` equally spaced momenta ``2 pi K / n`` covering ``(-pi, pi]``.

    Contains ``k = 0`` always and ``k = pi`` for even ``n``.
    """
    if n < 1:
        raise ValueError(f"grid size must be positive, got {n}")
    K = np.arange(n) - (n - 1) // 2
    return 2 * np.pi * K / n


@dataclass(frozen=True)
class MomentumPoint:
    """Rotated-lattice momentum ``(k_plus, k_minus)``, each wrapped into ``(-pi, pi]``."""

    k_plus: float
    k_minus: float

    def __post_init__(self):
        object.__setattr__(self, "k_plus", float(wrap_phase(self.k_plus)))
        object.__setattr__(self, "k_minus", float(wrap_phase(self.k_minus)))

    def swapped(self):
        return MomentumPoint(self.k_minus, self.k_plus)


def as_momentum(k):
    if isinstance(k, MomentumPoint):
        return k
    kp, km = k
    return MomentumPoint(kp, km)


@dataclass
class SpectrumTable:
    """Per-momentum ascending eigenvalue lists.

    ``k`` is ``(npts, 2)`` for Bloch grids or ``(npts,)`` for a strip's
    conserved momentum. ``gapless`` flags points where quasienergy zero is
    reached; comparisons fall back to absolute values there.
    """

    k: np.ndarray
    values: np.ndarray
    unit: str = "1/T"
    meta: dict = field(default_factory=dict)
    gapless: Optional[np.ndarray] = None

    def __post_init__(self):
        self.k = np.asarray(self.k, dtype=float)
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.values.shape[0] != self.k.shape[0]:
            raise ValueError(
                f"{self.k.shape[0]} momentum points but {self.values.shape[0]} value rows"
            )
        if np.any(np.diff(self.values, axis=1) < 0):
            raise ValueError("values must be sorted ascending at every point")
        if self.gapless is not None:
            self.gapless = np.asarray(self.gapless, dtype=bool)

    @property
    def npoints(self):
        return self.values.shape[0]

    @property
    def nbands(self):
        return self.values.shape[1]


@dataclass
class StripSpectrum:
    """Strip eigenvalues vs. conserved momentum, optionally with eigenvectors.

    ``cell_index[i]`` is the transverse unit cell of basis state ``i``;
    ``vectors[j]`` holds eigenvectors of momentum ``k[j]`` as columns.
    """

    k: np.ndarray
    values: np.ndarray
    open_dir: str
    model: str
    cell_index: np.ndarray
    n_cells: int
    vectors: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def table(self):
        return SpectrumTable(self.k, self.values, meta=dict(self.meta, model=self.model))
