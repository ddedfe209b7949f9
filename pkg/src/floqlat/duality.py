"""Mapping Floquet quasienergies onto static discrete-time energies and comparing them.

The relabeling shifts the Floquet gap at ``pi/T`` to zero:

    eps'_+ = eps_+/2 - pi/(2T),   eps'_- = eps_-/2 + pi/(2T),   eps_s = sin(eps' T)/T

with ``eps >= 0`` on the ``+`` branch. Staggered discrete-time frequencies
``k0 = (2/T) asin(eps_s T)`` then equal ``2 eps'``.
"""
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from floqlat import floquet, numerics, staticlat
from floqlat.floquet import ModelParams
from floqlat.spectra import SpectrumTable, StripSpectrum, bz_grid

WINDOW_TOL = 1e-12
ZERO_TOL = 1e-9
PAIR_TOL = 1e-9
EDGE_WEIGHT = 0.5
GAPLESS_GAP = 1e-3


@dataclass
class ShiftedSpectrum:
    """Floquet quasienergies with their relabeled ``eps'`` and static targets ``eps_s``.

    ``branch`` is True on the ``+`` branch (``eps >= 0``).
    """

    source: SpectrumTable
    eps_prime: np.ndarray
    eps_s: np.ndarray
    branch: np.ndarray
    T: float

    def table(self):
        order = np.argsort(self.eps_s, axis=1, kind="stable")
        return SpectrumTable(
            self.source.k,
            np.take_along_axis(self.eps_s, order, axis=1),
            meta=dict(self.source.meta, mapped="sin(eps' T)/T"),
            gapless=self.source.gapless,
        )


def pi_shift(spectrum, T):
    """Relabel quasienergies in ``[-pi/T, pi/T]`` onto the static energy axis.

    Points where a quasienergy sits at zero (within ``ZERO_TOL / T``) are
    flagged gapless: there the two branches meet and only the absolute values
    of ``eps_s`` are meaningful.
    """
    eps = spectrum.values
    lim = np.pi / T
    # -pi/T is accepted as the '-' image of the gap center and maps to 0 as well
    if np.any(np.abs(eps) > lim * (1 + WINDOW_TOL)):
        raise ValueError("quasienergies must lie in [-pi/T, pi/T]")
    plus = eps >= 0
    eps_prime = np.where(plus, eps / 2 - lim / 2, eps / 2 + lim / 2)
    eps_s = np.sin(eps_prime * T) / T
    gapless = np.any(np.abs(eps) <= ZERO_TOL / T, axis=1)
    if spectrum.gapless is not None:
        gapless = gapless | spectrum.gapless
    source = SpectrumTable(spectrum.k, spectrum.values, spectrum.unit, spectrum.meta, gapless)
    return ShiftedSpectrum(source, eps_prime, eps_s, plus, T)


def unshift(shifted):
    """Inverse relabeling ``eps = 2 eps' +- pi/T`` on the recorded branches."""
    lim = np.pi / shifted.T
    return np.where(shifted.branch, 2 * shifted.eps_prime + lim, 2 * shifted.eps_prime - lim)


def roundtrip_frequencies(shifted):
    """Staggered discrete-time frequencies ``(2/T) asin(eps_s T)`` per point, sorted."""
    T = shifted.T
    x = np.clip(shifted.eps_s * T, -1.0, 1.0)
    k0 = np.sort(2 * np.arcsin(x) / T, axis=1)
    return SpectrumTable(shifted.source.k, k0, meta=dict(shifted.source.meta, quantity="k0"))


@dataclass
class ComparisonReport:
    max_abs_dev: float
    mean_abs_dev: float
    pairs_matched: int
    degeneracy_factor: int
    total_compared: int
    max_pair_split: float
    tol: float
    verdict: str
    reason: str = ""
    worst_k: Optional[list] = None
    edge_census: Optional[dict] = None

    def as_dict(self):
        return asdict(self)


def _collapse(values, degeneracy):
    npts, nb = values.shape
    groups = np.sort(values, axis=1).reshape(npts, nb // degeneracy, degeneracy)
    split = groups.max(axis=2) - groups.min(axis=2)
    return groups.mean(axis=2), split


def compare_spectra(a, b, degeneracy=1, tol=1e-10):
    """Compare ``a`` with ``b`` after collapsing ``b``'s ``degeneracy``-fold multiplets.

    Raises on a momentum-grid mismatch or if ``b`` does not carry exactly
    ``degeneracy`` values per value of ``a``. A multiplet wider than
    ``PAIR_TOL`` does not raise; it turns the verdict to ``"fail"``.
    """
    if a.k.shape != b.k.shape or not np.allclose(a.k, b.k, atol=1e-12, rtol=0):
        raise ValueError("spectra are sampled on different momentum grids")
    if degeneracy < 1 or b.nbands != degeneracy * a.nbands:
        raise ValueError(
            f"expected {degeneracy} x {a.nbands} values per point in b, got {b.nbands}"
        )
    collapsed, split = _collapse(b.values, degeneracy)
    lhs = np.sort(a.values, axis=1)
    gapless = np.zeros(a.npoints, dtype=bool)
    for t in (a, b):
        if t.gapless is not None:
            gapless |= t.gapless
    if np.any(gapless):
        lhs[gapless] = np.sort(np.abs(lhs[gapless]), axis=1)
        collapsed[gapless] = np.sort(np.abs(collapsed[gapless]), axis=1)
    dev = np.abs(lhs - collapsed)
    max_dev = float(dev.max(initial=0.0))
    max_split = float(split.max(initial=0.0))
    reasons = []
    if max_split > PAIR_TOL:
        reasons.append(f"degenerate multiplets split by {max_split:.3e} > {PAIR_TOL:g}")
    if max_dev > tol:
        reasons.append(f"max deviation {max_dev:.3e} > tol {tol:g}")
    worst = None
    if dev.size:
        w = int(np.argmax(dev.max(axis=1)))
        worst = np.atleast_1d(a.k[w]).tolist()
    return ComparisonReport(
        max_abs_dev=max_dev,
        mean_abs_dev=float(dev.mean()) if dev.size else 0.0,
        pairs_matched=int(collapsed.size),
        degeneracy_factor=int(degeneracy),
        total_compared=int(b.values.size),
        max_pair_split=max_split,
        tol=float(tol),
        verdict="fail" if reasons else "pass",
        reason="; ".join(reasons),
        worst_k=worst,
    )


# -- edge analysis ---------------------------------------------------------


@dataclass
class EdgeState:
    k: float
    energy: float
    side: str
    edge_weight: float
    center: float


@dataclass
class EdgeProfile:
    density: np.ndarray
    side: str
    center: float
    decay_length: float


@dataclass
class EdgeReport:
    model: str
    open_dir: str
    gapless: bool
    threshold: float
    census_k: float
    branch_count: Optional[int]
    census: Optional[np.ndarray]
    states: list = field(default_factory=list)
    profiles: list = field(default_factory=list)

    def sides(self, k=None):
        """Edge-localized in-gap states per side, optionally at one momentum."""
        out = {"left": [], "right": [], "both": []}
        for s in self.states:
            if k is None or np.isclose(s.k, k):
                out[s.side].append(s)
        return out


def in_gap_threshold(model, p):
    """Distance from the gap center below which a state counts as in-gap.

    Half the distance from gap center to the analytic band edge: ``|m|/(2T)``
    for the static theory, ``asin(|m|)/T`` for the Floquet gap at ``pi/T``.
    """
    m = abs(p.m)
    if model == "static":
        return m / (2 * p.T)
    return np.arcsin(m) / p.T


def _gap_distance(model, values, T):
    if model == "static":
        return np.abs(values)
    return np.pi / T - np.abs(values)


def _outer(n_cells):
    return int(np.ceil(n_cells / 4))


def cell_density(vec, cell_index, n_cells):
    return np.bincount(cell_index, weights=np.abs(vec) ** 2, minlength=n_cells)


def decay_length(density, side):
    """Density decay length from a log-linear fit over the outer half of cells."""
    n = len(density)
    half = int(np.ceil(n / 2))
    rho = density[:half] if side != "right" else density[::-1][:half]
    x = np.arange(half)
    ok = rho > 1e-300
    if ok.sum() < 2:
        return float("nan")
    slope = np.polyfit(x[ok], np.log(rho[ok]), 1)[0]
    return float(-1.0 / slope) if slope < 0 else float("inf")


def _side(density):
    # edge weight over the outer cells; side from the center of mass
    n = len(density)
    o = _outer(n)
    weight = density[:o].sum() + density[-o:].sum()
    center = float(np.dot(np.arange(n), density) / density.sum())
    if abs(center - (n - 1) / 2) < 1e-9:
        return "both", weight, center
    return ("left" if center < (n - 1) / 2 else "right"), weight, center


def _localize(vecs, cell_index):
    # rotate a degenerate/in-gap subspace to eigenvectors of the cell position
    X = cell_index.astype(float)
    P = numerics.dagger(vecs) @ (X[:, None] * vecs)
    _, W = numerics.eigh_stack(P)
    return vecs @ W


def edge_report(strip, p, census_k=0.0):
    """Census and profiles of in-gap edge states of a strip spectrum.

    Per momentum, the in-gap eigenvectors are rotated to eigenstates of the
    cell position inside the in-gap subspace; a state counts as an edge mode
    when more than half its weight lies in the outer ``ceil(N/4)`` cells, and
    its side follows from its center of mass. The energy reported per state is
    that of its dominant in-gap eigenvector. Static counts are divided by the
    two flavors. Profiles are taken at the momentum closest to ``census_k``.
    """
    if strip.vectors is None:
        raise ValueError("edge analysis needs eigenvectors; compute the strip with vectors=True")
    model, N, T = strip.model, strip.n_cells, p.T
    thr = in_gap_threshold(model, p)
    ic = int(np.argmin(np.abs(strip.k - census_k)))
    report = EdgeReport(model, strip.open_dir, False, float(thr), float(strip.k[ic]), None, None)
    if 2 * abs(p.m) < GAPLESS_GAP:
        report.gapless = True
        return report
    flavors = 2 if model == "static" else 1
    census = np.zeros(len(strip.k), dtype=int)
    for j, k in enumerate(strip.k):
        vals = strip.values[j]
        sel = np.flatnonzero(_gap_distance(model, vals, T) < thr)
        if not len(sel):
            continue
        # edge-edge tunneling splits the in-gap doublets; position eigenstates undo it
        vecs = _localize(strip.vectors[j][:, sel], strip.cell_index)
        count = 0
        for c in range(vecs.shape[1]):
            dens = cell_density(vecs[:, c], strip.cell_index, N)
            side, weight, center = _side(dens)
            if weight > EDGE_WEIGHT and side != "both":
                count += 1
                # quasienergies wrap at pi/T, so take the dominant component, not a mean
                overlap = np.abs(strip.vectors[j][:, sel].conj().T @ vecs[:, c])
                e = float(vals[sel][np.argmax(overlap)])
                report.states.append(EdgeState(float(k), e, side, float(weight), center))
        census[j] = count // flavors
    report.census = census
    report.branch_count = int(census[ic])
    sel = np.flatnonzero(_gap_distance(model, strip.values[ic], T) < thr)
    if len(sel):
        vecs = _localize(strip.vectors[ic][:, sel], strip.cell_index)
        for c in range(vecs.shape[1]):
            dens = cell_density(vecs[:, c], strip.cell_index, N)
            side, _, center = _side(dens)
            report.profiles.append(EdgeProfile(dens, side, center, decay_length(dens, side)))
    return report


def edge_wavefunctions(p, k_plus=0.0, variants=("A", "B")):
    """Left-edge density profiles at ``k_plus`` for the Floquet strip and each static variant (open ``x_-``)."""
    out = {}
    fl = floquet.strip_quasienergies([k_plus], p, "x-minus", vectors=True)
    strips = {"floquet": fl}
    for v in variants:
        q = ModelParams(p.jt, p.T, v, p.n_minus, p.n_plus)
        strips[f"static_{v}"] = staticlat.static_strip_spectrum([k_plus], q, "x-minus", vectors=True)
    for name, strip in strips.items():
        rep = edge_report(strip, p, census_k=k_plus)
        left = [pr for pr in rep.profiles if pr.side == "left"]
        out[name] = min(left, key=lambda pr: pr.center) if left else None
    return out


# -- pipelines -------------------------------------------------------------


def pbc_equivalence(p, n_grid=48, tol=1e-10, method="numeric"):
    """Shifted Floquet bulk bands vs. ``hs_bloch`` (two flavors) on an ``n_grid^2`` grid."""
    shifted = pi_shift(floquet.pbc_spectrum(n_grid, p, method=method), p.T)
    static = staticlat.static_pbc_spectrum(n_grid, p)
    return compare_spectra(shifted.table(), static, degeneracy=2, tol=tol)


def strip_tables(p, ks, floquet_dir="x-minus", static_dir="x-minus", vectors=False):
    fl = floquet.strip_quasienergies(ks, p, floquet_dir, vectors=vectors)
    st = staticlat.static_strip_spectrum(ks, p, static_dir, vectors=vectors)
    return fl, st


def side_census(report):
    """Edge modes per side at the census momentum (static counts per flavor)."""
    if report.gapless:
        return "gapless"
    flavors = 2 if report.model == "static" else 1
    sides = report.sides(report.census_k)
    return {side: len(sides[side]) // flavors for side in ("left", "right")}


def strip_equivalence(p, ks, tol=1e-10, floquet_dir="x-minus", static_dir="x-minus"):
    """Shifted Floquet strip vs. flavor-collapsed static strip at the same momenta.

    The report's ``edge_census`` holds per-side edge counts at the momentum
    nearest ``k = 0`` for both strips.
    """
    fl, st = strip_tables(p, ks, floquet_dir, static_dir, vectors=True)
    shifted = pi_shift(fl.table(), p.T)
    report = compare_spectra(shifted.table(), st.table(), degeneracy=2, tol=tol)
    report.edge_census = {
        "floquet": side_census(edge_report(fl, p)),
        "static": side_census(edge_report(st, p)),
    }
    return report


@dataclass
class PhaseRow:
    jt: float
    m: float
    gap: float
    gap_numeric: float
    gapless: bool
    floquet_edges: Optional[int]
    static_edges: Optional[int]


def phase_scan(jt_grid, p, n_grid=33):
    """Bulk gap and edge census at ``k_+ = 0`` (open ``x_-``) for each ``JT``."""
    rows = []
    ks = bz_grid(n_grid)
    kp, km = np.meshgrid(ks, ks, indexing="ij")
    for jt in jt_grid:
        if not 0 < jt < 2 * np.pi:
            raise ValueError(f"JT must lie in (0, 2 pi), got {jt}")
        q = ModelParams(float(jt), p.T, p.variant, p.n_minus, p.n_plus)
        gap = 2 * abs(q.m) / q.T
        gap_num = 2 * float(np.min(staticlat.zeta((kp, km), q)))
        gapless = gap < GAPLESS_GAP / q.T
        fe = se = None
        if not gapless:
            fl, st = strip_tables(q, [0.0], vectors=True)
            fe = edge_report(fl, q).branch_count
            se = edge_report(st, q).branch_count
        rows.append(PhaseRow(float(jt), q.m, gap, gap_num, bool(gapless), fe, se))
    return rows
