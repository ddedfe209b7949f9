"""Static discrete-time lattice fermion operators.

Builds the staggered ``x_+`` operators ``h1``/``h2``, the Wilson-Dirac and
SSH chains along ``x_-``, the anisotropic static Hamiltonian
``H_s = (h1 (x) 1 + h2 (x) H_chain) / T`` in Bloch and strip form, and the
discrete-time frequency solutions for naive and staggered time derivatives.

Position-space conventions (0-based site index ``i``):

* unit cell ``X`` holds sites ``2X`` and ``2X + 1``;
* ``h1[i, i+1] = (-1)^i / 2`` and ``h2[i, i+1] = 1/2`` (Hermitian), so
  projecting onto Bloch states ``|k, s> = sum_X e^{-i k X} |2X + s>`` gives
  :func:`stagger_bloch`;
* Wilson-Dirac chains are ordered site-major, index ``2x + spin``.
"""
from dataclasses import dataclass

import numpy as np

from floqlat import numerics
from floqlat.floquet import check_open_dir
from floqlat.spectra import MomentumPoint, SpectrumTable, StripSpectrum, bz_grid

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# radicands in [-1e-12, 0) are rounding at the band touching point and clip to 0
RADICAND_ERROR = -1e-12

CHAIN_KINDS = ("wilson_dirac", "ssh")
STAGGER_KINDS = ("sin", "cos")


def _check_kind(kind):
    if kind not in STAGGER_KINDS:
        raise ValueError(f"staggered operator kind must be 'sin' (h1) or 'cos' (h2), got {kind!r}")


def stagger_bloch(kind, k):
    """``h1`` (``kind="sin"``) or ``h2`` (``kind="cos"``) at momentum ``k``.

    ``h1 = 1/2 [[0, 1 - e^{ik}], [1 - e^{-ik}, 0]]``,
    ``h2 = 1/2 [[0, 1 + e^{ik}], [1 + e^{-ik}, 0]]``. Accepts arrays of ``k``.
    """
    _check_kind(kind)
    k = np.asarray(k, dtype=float)
    sign = -1.0 if kind == "sin" else 1.0
    off = 0.5 * (1 + sign * np.exp(1j * k))
    h = np.zeros(k.shape + (2, 2), dtype=np.complex128)
    h[..., 0, 1] = off
    h[..., 1, 0] = np.conj(off)
    return h


def stagger_position(kind, n_cells, boundary="open"):
    """Real-space ``h1``/``h2`` on ``2 n_cells`` sites.

    With ``boundary="periodic"`` the bond between the last and first site is
    kept, and the unit-cell Fourier transform block-diagonalizes the matrix
    into ``stagger_bloch(kind, 2 pi K / n_cells)``.
    """
    _check_kind(kind)
    if n_cells < 2:
        raise ValueError(f"need at least 2 unit cells, got {n_cells}")
    if boundary not in ("open", "periodic"):
        raise ValueError(f"boundary must be 'open' or 'periodic', got {boundary!r}")
    n = 2 * n_cells
    h = np.zeros((n, n), dtype=np.complex128)
    last = n if boundary == "periodic" else n - 1
    for i in range(last):
        j = (i + 1) % n
        val = 0.5 * (-1) ** i if kind == "sin" else 0.5
        h[i, j] = val
        h[j, i] = val
    return h


def staggered_time_derivative(k0, T=1.0):
    """Frequency-space staggered derivative ``d(k0) = h1(k0 T) / T``."""
    return stagger_bloch("sin", np.asarray(k0) * T) / T


@dataclass(frozen=True)
class ChainSpec:
    """One-dimensional chain along ``x_-``.

    ``params`` is ``(m0, R)`` for ``wilson_dirac`` and ``(v, w)`` for
    ``ssh``; either way the matrix dimension is ``2 * sites``.
    """

    kind: str
    params: tuple
    sites: int
    boundary: str = "open"

    def __post_init__(self):
        if self.kind not in CHAIN_KINDS:
            raise ValueError(f"chain kind must be one of {CHAIN_KINDS}, got {self.kind!r}")
        if len(self.params) != 2:
            raise ValueError(f"chain params must be a pair, got {self.params!r}")
        if self.sites < 2:
            raise ValueError(f"need at least 2 unit cells, got {self.sites}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")

    def topological(self):
        """Whether the open chain carries zero-energy end states."""
        a, b = self.params
        if self.kind == "wilson_dirac":
            return a / b < 0
        return abs(b) > abs(a)


def chain_bloch(kind, params, k):
    """2x2 Bloch chain Hamiltonian (arrays of ``k`` allowed).

    Wilson-Dirac: ``sigma_x R sin k + sigma_y (m0 + R (1 - cos k))``;
    SSH: ``[[0, v + w e^{ik}], [v + w e^{-ik}, 0]]``.
    """
    k = np.asarray(k, dtype=float)
    a, b = params
    if kind == "wilson_dirac":
        m0, R = a, b
        sx = R * np.sin(k)
        sy = m0 + R * (1 - np.cos(k))
        off = sx - 1j * sy
    elif kind == "ssh":
        v, w = a, b
        off = v + w * np.exp(1j * k)
    else:
        raise ValueError(f"chain kind must be one of {CHAIN_KINDS}, got {kind!r}")
    h = np.zeros(k.shape + (2, 2), dtype=np.complex128)
    h[..., 0, 1] = off
    h[..., 1, 0] = np.conj(off)
    return h


def _wilson_dirac_position(m0, R, n, periodic):
    # i R sigma_x nabla + sigma_y (m0 - R/2 Laplacian), site-major ordering
    nabla = np.zeros((n, n))
    lap = -2.0 * np.eye(n)
    for x in range(n if periodic else n - 1):
        y = (x + 1) % n
        nabla[x, y] += 0.5
        nabla[y, x] -= 0.5
        lap[x, y] += 1.0
        lap[y, x] += 1.0
    return np.kron(nabla, 1j * R * SIGMA_X) + np.kron(m0 * np.eye(n) - 0.5 * R * lap, SIGMA_Y)


def _ssh_position(v, w, n, periodic):
    h = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    for X in range(n):
        h[2 * X, 2 * X + 1] = h[2 * X + 1, 2 * X] = v
        if X < n - 1 or periodic:
            j = (2 * X + 2) % (2 * n)
            h[2 * X + 1, j] = h[j, 2 * X + 1] = w
    return h


def chain_build(spec):
    """Position-space chain Hamiltonian of dimension ``2 * spec.sites``."""
    periodic = spec.boundary == "periodic"
    a, b = spec.params
    if spec.kind == "wilson_dirac":
        return _wilson_dirac_position(a, b, spec.sites, periodic)
    return _ssh_position(a, b, spec.sites, periodic)


def variant_params(variant, m):
    """Chain kind and parameters whose Bloch bands are ``±eps_AB(k_-)``.

    ``A``: Wilson-Dirac with ``m0 = m``, ``R = (1 - m)/2``.
    ``B``: SSH with ``v = (1 + m)/2``, ``w = (m - 1)/2``.
    Both host open-chain zero modes exactly when ``m < 0``.
    """
    if abs(m) > 1:
        raise ValueError(f"|m| must be <= 1, got {m}")
    if variant == "A":
        return "wilson_dirac", (m, (1 - m) / 2)
    if variant == "B":
        return "ssh", ((1 + m) / 2, (m - 1) / 2)
    raise ValueError(f"variant must be 'A' or 'B', got {variant!r}")


def variant_chain(variant, m, sites, boundary="open"):
    kind, params = variant_params(variant, m)
    return ChainSpec(kind, params, sites, boundary)


def chain_dispersion(k_minus, m):
    """``(+eps_AB, -eps_AB)`` with ``eps_AB^2 = (1+m^2)/2 - (1-m^2)/2 cos k_-``."""
    if abs(m) > 1:
        raise ValueError(f"|m| must be <= 1, got {m}")
    # same quantity as (1+m^2)/2 - (1-m^2)/2 cos k, without cancellation at small k
    e = np.sqrt(m * m + (1 - m * m) * np.sin(np.asarray(k_minus) / 2) ** 2)
    return e, -e


def zeta(k, p):
    """Non-negative bulk energy of the static Hamiltonian at momentum ``k``.

    ``k`` is a :class:`MomentumPoint` or a pair of (broadcastable) arrays.
    """
    if isinstance(k, MomentumPoint):
        kp, km = k.k_plus, k.k_minus
    else:
        kp, km = k
    m = p.m
    cp, cm = np.cos(kp), np.cos(km)
    rad = (3 + m * m) / 4 - (1 - m * m) / 4 * (cp + cm + cp * cm)
    if np.any(rad < RADICAND_ERROR):
        raise ArithmeticError(f"negative radicand {np.min(rad):.3e} in zeta")
    out = np.sqrt(np.maximum(rad, 0.0)) / p.T
    return float(out) if np.ndim(out) == 0 else out


def hs_bloch_grid(k_plus, k_minus, p):
    """``H_s(k) = (h1(k_+) (x) 1 + h2(k_+) (x) H_chain(k_-)) / T`` for arrays of ``k``, shape ``(..., 4, 4)``."""
    k_plus, k_minus = np.broadcast_arrays(np.asarray(k_plus, float), np.asarray(k_minus, float))
    kind, params = variant_params(p.variant, p.m)
    h1 = stagger_bloch("sin", k_plus)
    h2 = stagger_bloch("cos", k_plus)
    hc = chain_bloch(kind, params, k_minus)
    eye = np.eye(2)
    H = np.einsum("...ij,kl->...ikjl", h1, eye) + np.einsum("...ij,...kl->...ikjl", h2, hc)
    return H.reshape(k_plus.shape + (4, 4)) / p.T


def hs_bloch(k, p):
    """4x4 Bloch Hamiltonian of the static theory for ``p.variant``."""
    if isinstance(k, MomentumPoint):
        kp, km = k.k_plus, k.k_minus
    else:
        kp, km = k
    return hs_bloch_grid(kp, km, p)


def hs_strip(open_dir, conserved_k, p):
    """Static strip Hamiltonian at one conserved momentum.

    ``x-minus``: ``h(k_+) (x) chain_open``, dimension ``4 N_-``, basis index
    ``s * 2N_- + chain_index``. ``x-plus``: ``h_open (x) chain(k_-)``,
    dimension ``4 N_+``, basis index ``2 * site_+ + chain_component``.
    """
    check_open_dir(open_dir)
    kind, params = variant_params(p.variant, p.m)
    if open_dir == "x-minus":
        chain = chain_build(ChainSpec(kind, params, p.n_minus, "open"))
        eye = np.eye(chain.shape[0])
        H = numerics.kron(stagger_bloch("sin", conserved_k), eye) + numerics.kron(
            stagger_bloch("cos", conserved_k), chain
        )
    else:
        hc = chain_bloch(kind, params, conserved_k)
        H = numerics.kron(stagger_position("sin", p.n_plus), np.eye(2)) + numerics.kron(
            stagger_position("cos", p.n_plus), hc
        )
    return H / p.T


def _strip_cells(open_dir, N):
    if open_dir == "x-minus":
        return np.tile(np.repeat(np.arange(N), 2), 2)
    return np.repeat(np.arange(N), 4)


def static_strip_spectrum(ks, p, open_dir, vectors=False, backend=None):
    """Eigenvalues of :func:`hs_strip` over conserved momenta ``ks``."""
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    if ks.size == 0:
        raise ValueError("momentum grid is empty")
    stack = np.stack([hs_strip(open_dir, k, p) for k in ks])
    values, V = numerics.eigh_stack(stack, backend=backend)
    N = p.sites(open_dir)
    return StripSpectrum(
        k=ks,
        values=values,
        open_dir=open_dir,
        model="static",
        cell_index=_strip_cells(open_dir, N),
        n_cells=N,
        vectors=V if vectors else None,
        meta={"params": p.as_dict(), "flavors": 2},
    )


def discrete_time_frequencies(eps_s, T=1.0, scheme="staggered"):
    """Frequencies ``k0`` in ``(-pi/T, pi/T]`` solving the discrete-time equation of motion.

    ``staggered``: ``sin(k0 T / 2) / T = eps_s``, one solution
    ``(2/T) asin(eps_s T)``. ``naive``: ``sin(k0 T) / T = eps_s``, two
    solutions ``asin(eps_s T)/T`` and its doubler ``pi/T - asin(eps_s T)/T``.
    """
    x = eps_s * T
    if abs(x) > 1:
        raise ValueError(f"|eps_s T| = {abs(x):g} > 1: energy outside the discrete-time band")
    base = np.arcsin(x)
    if scheme == "staggered":
        return [2 * base / T]
    if scheme == "naive":
        sols = np.array([base, np.pi - base])
        sols = sols - 2 * np.pi * np.ceil((sols - np.pi) / (2 * np.pi))
        return [float(s) / T for s in sols]
    raise ValueError(f"scheme must be 'naive' or 'staggered', got {scheme!r}")


@dataclass(frozen=True)
class NoGoReport:
    """Outcome of matching the 2D Wilson-Dirac bands to the static target."""

    m: float
    T: float
    solutions: tuple
    required_abs_m: float
    compatible: bool
    violated: str
    boundary_line_residual: float


def wilson_dirac_2d_energy(k_plus, k_minus, M, R):
    """Positive band of the 2D Wilson-Dirac Hamiltonian with mass ``M`` and Wilson parameter ``R``."""
    s2 = np.sin(k_plus) ** 2 + np.sin(k_minus) ** 2
    mass = M + R * ((1 - np.cos(k_plus)) + (1 - np.cos(k_minus)))
    return np.sqrt(R * R * s2 + mass * mass)


def wd2p1_nogo(m, T=1.0, atol=1e-12):
    """Show that no 2D Wilson-Dirac Hamiltonian reproduces the target bulk bands.

    Flat ``1/T`` on the ``k_+ = pi`` line forces ``M = -3R`` and
    ``M^2 + 6MR + 10R^2 = R^2 = 1/T^2``, so ``(M, R) = (-3/T, 1/T)`` or
    ``(3/T, -1/T)``. Matching ``|m|/T`` at ``k = 0`` then needs ``|M| = |m|/T``,
    i.e. ``|m| = 3``.
    """
    if abs(m) > 1:
        raise ValueError(f"|m| must be <= 1, got {m}")
    solutions = ((-3.0 / T, 1.0 / T), (3.0 / T, -1.0 / T))
    kms = np.linspace(-np.pi, np.pi, 65)
    resid = max(
        float(np.max(np.abs(wilson_dirac_2d_energy(np.pi, kms, M, R) - 1.0 / T)))
        for M, R in solutions
    )
    required = abs(solutions[0][0]) * T
    compatible = abs(abs(m) - required) <= atol
    return NoGoReport(
        m=float(m),
        T=float(T),
        solutions=solutions,
        required_abs_m=required,
        compatible=bool(compatible),
        violated="" if compatible else f"M = ±m/T needs |m| = {required:g}, got |m| = {abs(m):g}",
        boundary_line_residual=resid,
    )


def static_pbc_spectrum(n_grid, p, backend=None):
    """Eigenvalues of :func:`hs_bloch` on the same grid layout as :func:`floquet.pbc_spectrum`."""
    ks = bz_grid(n_grid)
    kp, km = np.meshgrid(ks, ks, indexing="ij")
    kp, km = kp.ravel(), km.ravel()
    values = numerics.eigvalsh_stack(hs_bloch_grid(kp, km, p), backend=backend)
    return SpectrumTable(
        np.stack([kp, km], axis=1),
        values,
        meta={"model": "static", "variant": p.variant, "params": p.as_dict()},
    )
