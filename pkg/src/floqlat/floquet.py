"""Four-step driven square-lattice model: Bloch and strip Floquet operators.

Coordinates are the rotated Bravais axes ``x_+``/``x_-`` with lattice
constant 1. The B site of a unit cell is the one reached from its A site by
the first hop; the four hops then connect A in cell ``R`` to B in cell
``R + d_n`` with the integer displacements in :data:`STEP_DISPLACEMENTS`
(periodic gauge). Each step lasts ``T/4`` with hopping ``J = jt / T``.
"""
from dataclasses import dataclass

import numpy as np

from floqlat import numerics
from floqlat.spectra import (
    MomentumPoint,
    SpectrumTable,
    StripSpectrum,
    as_momentum,
    bz_grid,
    wrap_phase,
)

# (d_plus, d_minus) unit-cell displacement of the B partner at steps 1..4
STEP_DISPLACEMENTS = ((0, 0), (0, -1), (-1, -1), (-1, 0))

OPEN_DIRS = ("x-minus", "x-plus")
RHS_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Drive parameters shared by the Floquet and static constructions.

    ``jt`` is the dimensionless product J*T; ``m = cos(jt/2)`` is always
    derived, never stored.
    """

    jt: float
    T: float = 1.0
    variant: str = "A"
    n_minus: int = 6
    n_plus: int = 6

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"period T must be positive, got {self.T}")
        if self.n_minus < 2 or self.n_plus < 2:
            raise ValueError(
                f"site counts must be >= 2, got n_minus={self.n_minus}, n_plus={self.n_plus}"
            )
        if self.variant not in ("A", "B"):
            raise ValueError(f"variant must be 'A' or 'B', got {self.variant!r}")

    @property
    def m(self):
        return float(np.cos(self.jt / 2))

    @property
    def J(self):
        return self.jt / self.T

    def sites(self, open_dir):
        check_open_dir(open_dir)
        return self.n_minus if open_dir == "x-minus" else self.n_plus

    def as_dict(self):
        return {
            "jt": self.jt,
            "T": self.T,
            "m": self.m,
            "variant": self.variant,
            "n_minus": self.n_minus,
            "n_plus": self.n_plus,
        }


def check_open_dir(open_dir):
    if open_dir not in OPEN_DIRS:
        raise ValueError(f"open direction must be one of {OPEN_DIRS}, got {open_dir!r}")


def _step_phase(n, k_plus, k_minus):
    if n not in (1, 2, 3, 4):
        raise ValueError(f"step index must be 1..4, got {n}")
    dp, dm = STEP_DISPLACEMENTS[n - 1]
    return np.exp(1j * (np.asarray(k_plus) * dp + np.asarray(k_minus) * dm))


def step_bloch_hamiltonian(n, k, p):
    """2x2 Bloch Hamiltonian ``J (e^{i k.d_n} sigma_+ + h.c.)`` of step ``n``."""
    k = as_momentum(k)
    ph = complex(_step_phase(n, k.k_plus, k.k_minus))
    return p.J * np.array([[0, ph], [np.conj(ph), 0]], dtype=np.complex128)


def _bond_unitary(phase, jt):
    # exp(-i (jt/4) [[0, ph], [ph*, 0]]) for arrays of phases
    c, s = np.cos(jt / 4), np.sin(jt / 4)
    phase = np.asarray(phase)
    U = np.empty(phase.shape + (2, 2), dtype=np.complex128)
    U[..., 0, 0] = c
    U[..., 1, 1] = c
    U[..., 0, 1] = -1j * s * phase
    U[..., 1, 0] = -1j * s * np.conj(phase)
    return U


def floquet_bloch_grid(k_plus, k_minus, p):
    """``U(T) = U_4 U_3 U_2 U_1`` for broadcastable arrays of momenta, shape ``(..., 2, 2)``."""
    k_plus, k_minus = np.broadcast_arrays(np.asarray(k_plus, float), np.asarray(k_minus, float))
    U = np.broadcast_to(np.eye(2, dtype=np.complex128), k_plus.shape + (2, 2)).copy()
    for n in (1, 2, 3, 4):
        U = _bond_unitary(_step_phase(n, k_plus, k_minus), p.jt) @ U
    return U


def floquet_bloch(k, p):
    """One-period Bloch evolution operator at momentum ``k``."""
    k = as_momentum(k)
    return floquet_bloch_grid(k.k_plus, k.k_minus, p)


def analytic_rhs(k_plus, k_minus, jt):
    """Closed-form ``cos(eps T)`` of the bulk quasienergy bands."""
    c = np.cos(jt)
    cp, cm = np.cos(k_plus), np.cos(k_minus)
    return 0.25 * (3 + c - (1 - c) * (cp + cm + cp * cm))


def quasienergy_analytic(k, p):
    """``(eps_plus, eps_minus)`` with ``eps_plus`` in ``[0, pi/T]`` and ``eps_minus = -eps_plus``.

    ``k`` may be a :class:`MomentumPoint`, a pair, or a pair of arrays.
    """
    if isinstance(k, MomentumPoint):
        kp, km = k.k_plus, k.k_minus
    else:
        kp, km = k
    rhs = analytic_rhs(np.asarray(kp, float), np.asarray(km, float), p.jt)
    if np.any(np.abs(rhs) > 1 + RHS_TOL):
        raise ArithmeticError("cos(eps T) outside [-1, 1]; analytic dispersion is broken")
    eps = np.arccos(np.clip(rhs, -1.0, 1.0)) / p.T
    minus = np.where(eps >= np.pi / p.T, np.pi / p.T, -eps)
    if np.ndim(eps) == 0:
        return float(eps), float(minus)
    return eps, minus


def phases_to_quasienergies(theta, T):
    """``eps = -theta / T`` wrapped into ``(-pi/T, pi/T]``."""
    return wrap_phase(-np.asarray(theta)) / T


def quasienergy_numeric(k, p, backend=None):
    """``(eps_plus, eps_minus)`` from the eigenphases of :func:`floquet_bloch`."""
    dec = numerics.unitary_eigenphases(floquet_bloch(k, p), backend=backend)
    eps = np.sort(phases_to_quasienergies(dec.values, p.T))
    return float(eps[1]), float(eps[0])


def pbc_spectrum(n_grid, p, method="numeric", backend=None):
    """Quasienergies on an ``n_grid x n_grid`` Bloch grid.

    Rows run over ``k_plus`` outer, ``k_minus`` inner. ``method`` is
    ``"numeric"`` (diagonalize U) or ``"analytic"`` (closed form).
    """
    ks = bz_grid(n_grid)
    kp, km = np.meshgrid(ks, ks, indexing="ij")
    kp, km = kp.ravel(), km.ravel()
    if method == "analytic":
        ep, em = quasienergy_analytic((kp, km), p)
        values = np.sort(np.stack([em, ep], axis=1), axis=1)
    elif method == "numeric":
        theta, _ = numerics.eigenphases_stack(floquet_bloch_grid(kp, km, p), backend=backend)
        values = np.sort(phases_to_quasienergies(theta, p.T), axis=1)
    else:
        raise ValueError(f"method must be 'numeric' or 'analytic', got {method!r}")
    return SpectrumTable(
        np.stack([kp, km], axis=1),
        values,
        meta={"model": "floquet", "method": method, "params": p.as_dict()},
    )


def _strip_bonds(open_dir, n_cells):
    # per step: (A row index, B column index, conserved displacement)
    check_open_dir(open_dir)
    bonds = []
    for dp, dm in STEP_DISPLACEMENTS:
        d_cons, d_trans = (dp, dm) if open_dir == "x-minus" else (dm, dp)
        cells = np.arange(n_cells)
        partner = cells + d_trans
        keep = (partner >= 0) & (partner < n_cells)
        bonds.append((2 * cells[keep], 2 * partner[keep] + 1, d_cons))
    return bonds


def floquet_strip_stack(ks, p, open_dir):
    """Strip Floquet operators for an array of conserved momenta, shape ``(nk, 2N, 2N)``.

    Basis index ``2 X + s`` with transverse cell ``X`` and sublattice
    ``s`` (0 = A, 1 = B). Bonds crossing the open edge are removed; sites
    left without a partner evolve trivially during that step.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    N = p.sites(open_dir)
    dim = 2 * N
    c, s = np.cos(p.jt / 4), np.sin(p.jt / 4)
    U = np.broadcast_to(np.eye(dim, dtype=np.complex128), (len(ks), dim, dim)).copy()
    for a_idx, b_idx, d_cons in _strip_bonds(open_dir, N):
        step = np.broadcast_to(np.eye(dim, dtype=np.complex128), (len(ks), dim, dim)).copy()
        phase = np.exp(1j * ks * d_cons)[:, None]
        step[:, a_idx, a_idx] = c
        step[:, b_idx, b_idx] = c
        step[:, a_idx, b_idx] = -1j * s * phase
        step[:, b_idx, a_idx] = -1j * s * np.conj(phase)
        U = step @ U
    return U


def floquet_strip(k_conserved, p, open_dir):
    """``2N x 2N`` strip Floquet operator at one conserved momentum."""
    return floquet_strip_stack([k_conserved], p, open_dir)[0]


def strip_quasienergies(ks, p, open_dir, vectors=False, backend=None):
    """Sorted strip quasienergies in ``(-pi/T, pi/T]`` for each conserved momentum."""
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    if ks.size == 0:
        raise ValueError("momentum grid is empty")
    theta, V = numerics.eigenphases_stack(floquet_strip_stack(ks, p, open_dir), backend=backend)
    eps = phases_to_quasienergies(theta, p.T)
    order = np.argsort(eps, axis=1, kind="stable")
    eps = np.take_along_axis(eps, order, axis=1)
    N = p.sites(open_dir)
    return StripSpectrum(
        k=ks,
        values=eps,
        open_dir=open_dir,
        model="floquet",
        cell_index=np.repeat(np.arange(N), 2),
        n_cells=N,
        vectors=np.take_along_axis(V, order[:, None, :], axis=2) if vectors else None,
        meta={"params": p.as_dict()},
    )
