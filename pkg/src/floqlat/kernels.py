"""Cyclic Jacobi diagonalization of stacks of complex Hermitian matrices.

Two interchangeable implementations of the same algorithm:

* :func:`jacobi_numba` -- row-cyclic sweeps compiled with numba, with the
  stack dimension distributed over threads via ``prange``.
* :func:`jacobi_numpy` -- round-robin (parallel) ordering, where each round
  applies ``n // 2`` disjoint rotations at once as vectorized numpy updates
  across the entire stack.

Both stop when the off-diagonal Frobenius norm of every matrix in the stack
falls below ``tol * ||A||_F``. Eigenvalues are returned unsorted; sorting and
phase normalization live in :mod:`floqlat.numerics`.
"""
import math

import numpy as np

from floqlat import _accel
from floqlat._accel import njit, prange

TOL = 1e-13
MAX_SWEEPS = 100
# below this |a_pq| is dropped instead of rotated: subnormal phases lose unit modulus
TINY = 1e-250


class JacobiConvergenceError(RuntimeError):
    pass


@njit(cache=True)
def _off_norm2(a):
    n = a.shape[0]
    off = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            off += a[p, q].real ** 2 + a[p, q].imag ** 2
    return 2.0 * off


@njit(cache=True)
def _jacobi_one(a, v, tol, max_sweeps):
    # a is overwritten with its diagonal form; v accumulates rotations.
    n = a.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += a[i, j].real ** 2 + a[i, j].imag ** 2
    thresh2 = (tol * tol) * total
    for sweep in range(max_sweeps):
        if _off_norm2(a) <= thresh2:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g < TINY:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                ph = complex(apq.real / g, apq.imag / g)
                phc = ph.conjugate()
                tau = (a[q, q].real - a[p, p].real) / (2.0 * g)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * phc * akq
                    a[k, q] = s * akp + c * phc * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * ph * aqk
                    a[q, k] = s * apk + c * ph * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * phc * vkq
                    v[k, q] = s * vkp + c * phc * vkq
    if _off_norm2(a) <= thresh2:
        return max_sweeps
    return -1


@njit(cache=True, parallel=True)
def _jacobi_stack(a, v, tol, max_sweeps, sweeps):
    for b in prange(a.shape[0]):
        sweeps[b] = _jacobi_one(a[b], v[b], tol, max_sweeps)


def jacobi_numba(stack, tol=TOL, max_sweeps=MAX_SWEEPS):
    """Diagonalize a ``(batch, n, n)`` Hermitian stack with the compiled kernel.

    Returns ``(values, vectors)`` with values of shape ``(batch, n)``
    (unsorted) and eigenvectors as columns.
    """
    if not _accel.NUMBA_AVAILABLE:
        raise RuntimeError("numba is not available")
    a = np.array(stack, dtype=np.complex128, order="C", copy=True)
    batch, n, _ = a.shape
    v = np.zeros_like(a)
    v[:, np.arange(n), np.arange(n)] = 1.0
    sweeps = np.zeros(batch, dtype=np.int64)
    _jacobi_stack(a, v, tol, max_sweeps, sweeps)
    if np.any(sweeps < 0):
        raise JacobiConvergenceError(
            f"Jacobi did not converge in {max_sweeps} sweeps for "
            f"{int(np.sum(sweeps < 0))} matrices"
        )
    values = np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
    return values, v


def round_robin_pairs(n):
    """Pair schedule covering every ``(p, q)``, ``p < q``, in ``n-1`` (or ``n``) rounds.

    Within a round no index appears twice, so its rotations commute.
    """
    m = n if n % 2 == 0 else n + 1
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p >= n or q >= n:
                continue
            ps.append(min(p, q))
            qs.append(max(p, q))
        if ps:
            rounds.append((np.array(ps), np.array(qs)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_numpy(stack, tol=TOL, max_sweeps=MAX_SWEEPS):
    """Pure-numpy twin of :func:`jacobi_numba` using round-robin ordering."""
    a = np.array(stack, dtype=np.complex128, copy=True)
    batch, n, _ = a.shape
    idx = np.arange(n)
    v = np.zeros_like(a)
    v[:, idx, idx] = 1.0
    if n < 2:
        return np.real(a[:, idx, idx]).copy(), v
    rounds = round_robin_pairs(n)
    total = np.sum(np.abs(a) ** 2, axis=(1, 2))
    thresh2 = tol * tol * total
    offmask = ~np.eye(n, dtype=bool)

    def off2():
        return np.sum(np.abs(a[:, offmask]) ** 2, axis=1)

    for _ in range(max_sweeps):
        if np.all(off2() <= thresh2):
            break
        for P, Q in rounds:
            apq = a[:, P, Q]
            g = np.abs(apq)
            live = g >= TINY
            gs = np.where(live, g, 1.0)
            ph = np.where(live, (apq.real / gs) + 1j * (apq.imag / gs), 1.0)
            tau = (a[:, Q, Q].real - a[:, P, P].real) / (2.0 * gs)
            sgn = np.where(tau >= 0.0, 1.0, -1.0)
            t = np.where(live, sgn / (np.abs(tau) + np.hypot(1.0, tau)), 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            phc = np.conj(ph)

            cc = c[:, None, :]
            sp = (s * phc)[:, None, :]
            cp = (c * phc)[:, None, :]
            ss = s[:, None, :]
            ap, aq = a[:, :, P], a[:, :, Q]
            a[:, :, P] = cc * ap - sp * aq
            a[:, :, Q] = ss * ap + cp * aq
            vp, vq = v[:, :, P], v[:, :, Q]
            v[:, :, P] = cc * vp - sp * vq
            v[:, :, Q] = ss * vp + cp * vq

            cr = c[:, :, None]
            sr = (s * ph)[:, :, None]
            cpr = (c * ph)[:, :, None]
            sr0 = s[:, :, None]
            ap, aq = a[:, P, :], a[:, Q, :]
            a[:, P, :] = cr * ap - sr * aq
            a[:, Q, :] = sr0 * ap + cpr * aq
            a[:, P, Q] = 0.0
            a[:, Q, P] = 0.0
    else:
        bad = off2() > thresh2
        if np.any(bad):
            raise JacobiConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps for "
                f"{int(np.sum(bad))} matrices"
            )
    return np.real(a[:, idx, idx]).copy(), v


def backend_name():
    return "numba" if _accel.USE_NUMBA else "numpy"


def jacobi_eigh(stack, tol=TOL, max_sweeps=MAX_SWEEPS, backend=None):
    """Dispatch to the configured backend (``"numba"`` or ``"numpy"``)."""
    backend = backend or backend_name()
    if backend == "numba":
        return jacobi_numba(stack, tol, max_sweeps)
    if backend == "numpy":
        return jacobi_numpy(stack, tol, max_sweeps)
    raise ValueError(f"unknown backend {backend!r}")
