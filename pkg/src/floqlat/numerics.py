"""Dense complex spectral decompositions used throughout the package.

Matrices are plain ``numpy`` complex arrays. Every routine accepts either a
single ``(n, n)`` matrix or a stack ``(..., n, n)``; the ``*_stack`` variants
return bare arrays, the single-matrix entry points return
:class:`EigenDecomposition`.
"""
from dataclasses import dataclass

import numpy as np

from floqlat import kernels

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
CLUSTER_TOL = 1e-8
PHASE_EPS = 1e-10


@dataclass(frozen=True)
class EigenDecomposition:
    """Sorted eigenvalues (or eigenphases) with orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray
    residual: float


def _as_square(M, name="matrix"):
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def dagger(M):
    return np.conj(np.swapaxes(M, -1, -2))


def hermiticity_error(M):
    M = np.asarray(M)
    return float(np.max(np.abs(M - dagger(M)), initial=0.0))


def unitarity_error(U):
    U = np.asarray(U)
    n = U.shape[-1]
    return float(np.max(np.abs(dagger(U) @ U - np.eye(n)), initial=0.0))


def check_hermitian(M, tol=HERMITIAN_TOL, name="matrix"):
    M = _as_square(M, name)
    err = hermiticity_error(M)
    if err > tol:
        raise ValueError(f"{name} is not Hermitian: max|A - A^H| = {err:.3e} > {tol:g}")
    return M


def check_unitary(U, tol=UNITARY_TOL, name="matrix"):
    U = _as_square(U, name)
    err = unitarity_error(U)
    if err > tol:
        raise ValueError(f"{name} is not unitary: max|U^H U - I| = {err:.3e} > {tol:g}")
    return U


def _canonicalize(values, vectors):
    # ascending order, then each column's first non-negligible entry real-positive
    order = np.argsort(values, axis=-1, kind="stable")
    values = np.take_along_axis(values, order, axis=-1)
    vectors = np.take_along_axis(vectors, order[..., None, :], axis=-1)
    first = np.argmax(np.abs(vectors) > PHASE_EPS, axis=-2)
    lead = np.take_along_axis(vectors, first[..., None, :], axis=-2)
    mag = np.abs(lead)
    phase = np.where(mag > 0, np.conj(lead) / np.where(mag > 0, mag, 1.0), 1.0)
    return values, vectors * phase


def _flat(stack):
    lead = stack.shape[:-2]
    n = stack.shape[-1]
    return stack.reshape((-1, n, n)), lead


def eigh_stack(stack, backend=None):
    """Sorted eigenvalues and eigenvectors of a Hermitian stack ``(..., n, n)``.

    No Hermiticity check; the input is symmetrized as ``(A + A^H)/2``.
    """
    stack = _as_square(stack)
    flat, lead = _flat(0.5 * (stack + dagger(stack)))
    n = flat.shape[-1]
    if flat.shape[0] == 0:
        return np.zeros(lead + (n,)), np.zeros(lead + (n, n), dtype=np.complex128)
    values, vectors = kernels.jacobi_eigh(flat, backend=backend)
    values, vectors = _canonicalize(values, vectors)
    return values.reshape(lead + (n,)), vectors.reshape(lead + (n, n))


def eigvalsh_stack(stack, backend=None):
    return eigh_stack(stack, backend=backend)[0]


def _residual(M, values, vectors):
    r = M @ vectors - vectors * values[..., None, :]
    return float(np.max(np.linalg.norm(r, axis=-2), initial=0.0))


def hermitian_eig(M, backend=None):
    """Eigen-decomposition of one Hermitian matrix, values ascending.

    Raises ``ValueError`` for non-square input or if ``max|M - M^H|`` exceeds
    ``HERMITIAN_TOL``.
    """
    M = check_hermitian(M)
    if M.ndim != 2:
        raise ValueError(f"expected a single matrix, got shape {M.shape}")
    values, vectors = eigh_stack(M, backend=backend)
    return EigenDecomposition(values, vectors, _residual(M, values, vectors))


def _runs(mask):
    # (start, stop) index ranges of clusters given "gap to next is small" flags
    runs = []
    i, n = 0, len(mask) + 1
    while i < n:
        j = i
        while j < n - 1 and mask[j]:
            j += 1
        if j > i:
            runs.append((i, j + 1))
        i = j + 1
    return runs


def eigenphases_stack(stack, backend=None, cluster_tol=CLUSTER_TOL):
    """Eigenphases in ``(-pi, pi]`` and eigenvectors of a unitary stack.

    Uses normality: the Hermitian parts ``(U + U^H)/2`` and ``(U - U^H)/2i``
    commute. The first is diagonalized; clusters of its eigenvalues closer
    than ``cluster_tol`` are resolved by diagonalizing the second inside the
    cluster. Phases then come from the diagonal of ``V^H U V``.
    """
    stack = _as_square(stack)
    flat, lead = _flat(stack)
    n = flat.shape[-1]
    re_part = 0.5 * (flat + dagger(flat))
    im_part = (flat - dagger(flat)) / 2j
    cosines, V = eigh_stack(re_part, backend=backend)
    close = np.diff(cosines, axis=-1) <= cluster_tol
    for b in np.flatnonzero(np.any(close, axis=-1)):
        for lo, hi in _runs(close[b]):
            Vc = V[b, :, lo:hi]
            _, W = eigh_stack(dagger(Vc) @ im_part[b] @ Vc, backend=backend)
            V[b, :, lo:hi] = Vc @ W
    z = np.einsum("bji,bjk,bki->bi", np.conj(V), flat, V)
    theta = np.angle(z)
    theta = np.where(theta <= -np.pi, theta + 2 * np.pi, theta)
    theta, V = _canonicalize(theta, V)
    return theta.reshape(lead + (n,)), V.reshape(lead + (n, n))


def unitary_eigenphases(U, backend=None):
    """Eigenphases ``theta`` with ``U v = exp(i theta) v``, sorted ascending in ``(-pi, pi]``.

    Raises ``ValueError`` if ``max|U^H U - I|`` exceeds ``UNITARY_TOL``.
    """
    U = check_unitary(U)
    if U.ndim != 2:
        raise ValueError(f"expected a single matrix, got shape {U.shape}")
    theta, V = eigenphases_stack(U, backend=backend)
    return EigenDecomposition(theta, V, _residual(U, np.exp(1j * theta), V))


def kron(A, B):
    """Kronecker product ``A (x) B``; thin wrapper over ``np.kron``."""
    return np.kron(np.asarray(A), np.asarray(B))
