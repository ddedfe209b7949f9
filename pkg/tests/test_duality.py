import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floqlat import duality, floquet, staticlat
from floqlat.floquet import ModelParams
from floqlat.spectra import SpectrumTable, bz_grid


def table(values, k=None):
    values = np.atleast_2d(values)
    k = np.arange(len(values), dtype=float) if k is None else k
    return SpectrumTable(k, np.sort(values, axis=1))


def test_pi_shift_examples():
    T = 2.0
    s = duality.pi_shift(table([[-np.pi / T, np.pi / (2 * T), np.pi / T]]), T)
    np.testing.assert_allclose(s.eps_s[0], [0.0, -np.sin(np.pi / 4) / T, 0.0], atol=1e-15)
    np.testing.assert_allclose(s.eps_prime[0], [0.0, -np.pi / (4 * T), 0.0], atol=1e-15)
    assert s.branch[0].tolist() == [False, True, True]
    # the gap center maps to the band center, zero quasienergy to the band edge
    z = duality.pi_shift(table([[0.0, 0.5]]), 1.0)
    assert z.eps_s[0, 0] == pytest.approx(-1.0) and z.branch[0, 0]
    assert z.source.gapless[0]


def test_pi_shift_matches_zeta_at_origin():
    p = ModelParams(1.5 * np.pi)
    eps = floquet.quasienergy_analytic((0, 0), p)
    s = duality.pi_shift(table([sorted(eps)]), p.T)
    np.testing.assert_allclose(np.sort(s.eps_s[0]), [-0.70711, 0.70711], atol=1e-5)
    assert staticlat.zeta((0, 0), p) == pytest.approx(np.max(s.eps_s))


def test_pi_shift_window_error():
    with pytest.raises(ValueError):
        duality.pi_shift(table([[0.0, 3.5]]), 1.0)
    with pytest.raises(ValueError):
        duality.pi_shift(table([[-np.pi - 1e-6, 0.0]]), 1.0)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(-np.pi, np.pi).filter(lambda x: abs(x) > 1e-6), min_size=1, max_size=6),
    st.floats(0.2, 5.0),
)
def test_mapping_bijective(eps, T):
    t = table(np.array(eps) / T)
    s = duality.pi_shift(t, T)
    assert np.all(np.abs(s.eps_s * T) <= 1)
    np.testing.assert_allclose(duality.unshift(s), t.values, atol=1e-12)
    assert np.array_equal(s.branch, t.values >= 0)


def test_roundtrip_frequencies():
    T = 1.0
    p = ModelParams(1.5 * np.pi)
    s = duality.pi_shift(floquet.pbc_spectrum(32, p), T)
    k0 = duality.roundtrip_frequencies(s)
    expected = np.where(s.branch, s.source.values - np.pi / T, s.source.values + np.pi / T)
    np.testing.assert_allclose(k0.values, np.sort(expected, axis=1), atol=1e-12)
    np.testing.assert_allclose(k0.values, np.sort(2 * s.eps_prime, axis=1), atol=1e-12)
    # gap center
    z = duality.pi_shift(table([[np.pi]]), 1.0)
    assert duality.roundtrip_frequencies(z).values[0, 0] == pytest.approx(0, abs=1e-15)


def test_edge_branch_frequencies():
    T = 1.0
    ks = np.linspace(-3, 3, 13)
    eps_s = np.sort(np.stack([np.sin(ks / 2), -np.sin(ks / 2)], 1), axis=1) / T
    shifted = duality.ShiftedSpectrum(table(eps_s, ks), np.arcsin(eps_s * T) / T, eps_s, eps_s >= 0, T)
    k0 = duality.roundtrip_frequencies(shifted).values
    np.testing.assert_allclose(k0, np.stack([-np.abs(ks), np.abs(ks)], 1) / T, atol=1e-12)


def test_compare_identical_and_errors():
    a = table([[-1.0, 2.0], [0.0, 0.5]])
    r = duality.compare_spectra(a, a)
    assert r.max_abs_dev == 0 and r.verdict == "pass"
    assert r.pairs_matched * r.degeneracy_factor == r.total_compared == 4
    with pytest.raises(ValueError, match="grid"):
        duality.compare_spectra(a, table([[-1.0, 2.0], [0.0, 0.5]], k=np.array([0.0, 2.0])))
    with pytest.raises(ValueError):
        duality.compare_spectra(a, a, degeneracy=2)


def test_compare_degeneracy_accounting():
    a = table([[-1.0, 1.0]])
    b = table([[-1.0, -1.0, 1.0, 1.0]])
    r = duality.compare_spectra(a, b, degeneracy=2)
    assert r.verdict == "pass" and r.pairs_matched == 2 and r.total_compared == 4
    split = table([[-1.0, -1.0 + 1e-6, 1.0, 1.0]])
    r = duality.compare_spectra(a, split, degeneracy=2, tol=1e-3)
    assert r.verdict == "fail" and "split" in r.reason
    assert r.as_dict()["max_pair_split"] == pytest.approx(1e-6)


def test_compare_gapless_uses_absolute_values():
    a = SpectrumTable([0.0], [[-1e-12, 1e-12]], gapless=[True])
    b = table([[-1e-12, -1e-12, 1e-12, 1e-12]], k=np.array([0.0]))
    assert duality.compare_spectra(a, b, degeneracy=2).verdict == "pass"


@pytest.mark.parametrize("variant", "AB")
@pytest.mark.parametrize("jt", [0.3, 0.5, 1.5, 1.7])
def test_pbc_equivalence(jt, variant):
    r = duality.pbc_equivalence(ModelParams(jt * np.pi, variant=variant), 48)
    assert r.verdict == "pass" and r.max_abs_dev <= 1e-10 and r.max_pair_split <= 1e-9


def test_pbc_equivalence_analytic_source():
    r = duality.pbc_equivalence(ModelParams(1.5 * np.pi, T=0.7), 24, method="analytic")
    assert r.verdict == "pass"


def test_strip_equivalence_scaling():
    ks = np.linspace(-np.pi, np.pi, 64, endpoint=False)
    d = {N: duality.strip_equivalence(ModelParams(1.5 * np.pi, n_minus=N), ks).max_abs_dev for N in (6, 12, 24)}
    assert d[24] < d[12] < d[6] and d[24] <= 0.5 * d[6]
    # frozen from the oracle run: clean 1/N scaling
    assert d[6] == pytest.approx(0.020358, abs=1e-5)
    assert d[6] * 6 == pytest.approx(d[12] * 12, rel=0.05)


def test_strip_edge_branches_match_sine():
    p = ModelParams(1.5 * np.pi, n_minus=24)
    ks = np.linspace(-0.8, 0.8, 9)
    fl, st_ = duality.strip_tables(p, ks)
    target = np.abs(np.sin(ks / 2)) / p.T
    shifted = duality.pi_shift(fl.table(), p.T).table().values
    for vals in (shifted, st_.values):
        inner = np.sort(np.abs(vals), axis=1)
        # two edge values per k (four for the static strip's flavors)
        np.testing.assert_allclose(inner[:, 0], target, atol=1e-6)
        np.testing.assert_allclose(inner[:, 1], target, atol=1e-6)


def test_anisotropy_negative_control():
    p = ModelParams(1.5 * np.pi, n_minus=6, n_plus=6)
    ks = bz_grid(24)
    r = duality.strip_equivalence(p, ks, tol=1e-2, static_dir="x-plus")
    assert r.verdict == "fail"
    assert r.edge_census["static"] == {"left": 0, "right": 0}


def test_edge_report_requires_vectors():
    p = ModelParams(1.5 * np.pi)
    with pytest.raises(ValueError, match="vectors"):
        duality.edge_report(floquet.strip_quasienergies([0.0], p, "x-minus"), p)


def test_edge_report_gapless_marker():
    p = ModelParams(np.pi)
    rep = duality.edge_report(floquet.strip_quasienergies([0.0], p, "x-minus", vectors=True), p)
    assert rep.gapless and rep.branch_count is None
    assert duality.side_census(rep) == "gapless"


@pytest.mark.parametrize("variant", "AB")
def test_edge_report_static_pairs(variant):
    p = ModelParams(1.5 * np.pi, variant=variant, n_minus=6)
    rep = duality.edge_report(staticlat.static_strip_spectrum([0.0], p, "x-minus", vectors=True), p)
    sides = rep.sides(0.0)
    # each edge hosts two states once both flavors are counted
    assert len(sides["left"]) == len(sides["right"]) == 2
    assert rep.branch_count == 2
    assert duality.side_census(rep) == {"left": 1, "right": 1}


def test_floquet_branches_on_opposite_edges():
    p = ModelParams(1.5 * np.pi, n_minus=6)
    ks = bz_grid(16)
    rep = duality.edge_report(floquet.strip_quasienergies(ks, p, "x-minus", vectors=True), p)
    left = [s for s in rep.states if s.side == "left"]
    right = [s for s in rep.states if s.side == "right"]
    assert left and right
    # chirality: at fixed k away from 0 the two edges sit on opposite sides of pi/T
    for k in ks[(np.abs(ks) > 0) & (rep.census == 2)]:
        el = [s.energy for s in left if s.k == k]
        er = [s.energy for s in right if s.k == k]
        assert np.sign(el[0]) != np.sign(er[0])


def test_edge_wavefunctions_agree():
    p = ModelParams(1.5 * np.pi, n_minus=7)
    prof = duality.edge_wavefunctions(p)
    fl = prof["floquet"].density
    assert fl.sum() == pytest.approx(1.0)
    assert fl[0] == pytest.approx(0.97056, abs=1e-5)
    for name in ("static_A", "static_B"):
        np.testing.assert_allclose(prof[name].density, fl, atol=1e-6)
        assert prof[name].decay_length == pytest.approx(prof["floquet"].decay_length, rel=0.1)
    # density ratio between neighbouring cells is ((1+m)/(1-m))^2
    ratio = ((1 + p.m) / (1 - p.m)) ** 2
    np.testing.assert_allclose(fl[1:4] / fl[:3], ratio, rtol=0.01)


def test_decay_length_of_exponential():
    rho = np.exp(-np.arange(8) / 1.7)
    assert duality.decay_length(rho, "left") == pytest.approx(1.7)
    assert duality.decay_length(rho[::-1], "right") == pytest.approx(1.7)


def test_phase_scan():
    grid = np.linspace(0.1, 1.9, 19) * np.pi
    rows = duality.phase_scan(grid, ModelParams(1.0, n_minus=6))
    gaps = np.array([r.gap for r in rows])
    np.testing.assert_allclose(gaps, 2 * np.abs(np.cos(grid / 2)), atol=1e-12)
    np.testing.assert_allclose([r.gap_numeric for r in rows], gaps, atol=1e-12)
    mid = int(np.argmin(gaps))
    assert grid[mid] == pytest.approx(np.pi) and rows[mid].gapless
    for r in rows:
        if r.gapless:
            assert r.floquet_edges is None
        elif r.jt > 1.2 * np.pi:
            assert r.floquet_edges == r.static_edges == 2
        elif r.jt < 0.8 * np.pi:
            assert r.floquet_edges == r.static_edges == 0
    with pytest.raises(ValueError):
        duality.phase_scan([2 * np.pi], ModelParams(1.0))
