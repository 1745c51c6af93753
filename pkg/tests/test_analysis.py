import numpy as np
import pytest

from zenoladder import analysis, basis, dynamics, hamiltonian as ham
from zenoladder.analysis import EETimeSeries, PTDegeneracyError
from zenoladder.dynamics import QuenchSpec


def make_series(times, entropies, lam=0.1, V=100.0, sector="+-", pert="transverse"):
    return EETimeSeries(
        times=np.asarray(times, dtype=float),
        entropies=np.asarray(entropies, dtype=float),
        metadata={"lambda": lam, "V": V, "sector": sector, "perturbation": pert},
    )


def synthetic_curve(times, lam, V, k, plateau_height=None, c_pref=1.0):
    """Plateau at (lam/V)^2 that departs at t = V^k / (c_pref * lam)."""
    h = plateau_height if plateau_height is not None else (lam / V) ** 2
    t_dep = V**k / (c_pref * lam)
    return h * (1.0 + (times / t_dep) ** 2)


def test_plateau_stats_flat_window():
    t = np.geomspace(0.1, 1e4, 200)
    s = make_series(t, synthetic_curve(t, 0.1, 100.0, 2))
    stats = analysis.plateau_stats(s, window=(10.0, 1e3))
    assert stats.mean == pytest.approx((0.1 / 100.0) ** 2, rel=1e-2)
    assert stats.max_deviation < 0.02 * stats.mean
    assert stats.rescaled == pytest.approx(1.0, rel=1e-2)


def test_plateau_stats_requires_enough_points():
    s = make_series(np.geomspace(0.1, 1e4, 20), np.ones(20))
    with pytest.raises(ValueError):
        analysis.plateau_stats(s, window=(10.0, 20.0))
    with pytest.raises(ValueError):
        analysis.plateau_stats(s, window=(100.0, 10.0))


def test_lifetime_detects_departure():
    t = np.geomspace(0.1, 1e8, 400)
    lam, V, k = 0.1, 100.0, 2
    s = make_series(t, synthetic_curve(t, lam, V, k), lam=lam, V=V)
    stats = analysis.plateau_stats(s, window=(10.0, 1e3))
    life = analysis.lifetime(s, stats)
    # doubling time of the synthetic curve is about V^k / lam
    assert life == pytest.approx(V**k / lam, rel=0.2)
    resc = analysis.rescaled_lifetime(s, stats, time_exponent=k)
    assert resc == pytest.approx(1.0, rel=0.2)


def test_lifetime_none_when_flat():
    t = np.geomspace(0.1, 1e4, 100)
    s = make_series(t, np.full(100, 1e-6))
    stats = analysis.plateau_stats(s, window=(10.0, 1e3))
    assert analysis.lifetime(s, stats) is None
    assert analysis.rescaled_lifetime(s, stats, 2) is None
    with pytest.raises(ValueError):
        analysis.lifetime(s, stats, factor=1.0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_collapse_identifies_true_exponent(k):
    pairs = [(0.05, 100.0), (0.1, 100.0), (0.1, 50.0), (0.2, 200.0)]
    series = []
    for lam, V in pairs:
        t = np.geomspace(0.1, 1e10, 500)
        series.append(make_series(t, synthetic_curve(t, lam, V, k), lam=lam, V=V))
    right = analysis.rescale_collapse(series, value_exponent=2, time_exponent=k)
    assert right.collapsed
    assert right.max_ratio < 1.1
    wrong = analysis.rescale_collapse(series, value_exponent=2, time_exponent=k + 1)
    assert not wrong.collapsed


def test_collapse_requires_shared_labels():
    t = np.geomspace(0.1, 100, 50)
    a = make_series(t, np.ones(50), sector="++")
    b = make_series(t, np.ones(50), sector="+-")
    with pytest.raises(ValueError):
        analysis.rescale_collapse([a, b], 2, 2)
    with pytest.raises(ValueError):
        analysis.rescale_collapse([a], 2, 2)


def test_spectrum_single_rung_protection():
    # H = V c sz tz at L=1: eigenvalues {-V, -V, V, V}
    V = 9.0
    h = ham.build_protection(1, V, (1,))
    report = analysis.spectrum_report(h, 1)
    np.testing.assert_allclose(np.sort(report.eigenvalues), [-V, -V, V, V])
    np.testing.assert_allclose(report.dominant_weights, 1.0)
    np.testing.assert_allclose(np.sort(report.eigenvalues_of((1,))), [V, V])


def test_spectrum_trace_invariant():
    h = ham.build_h0(3) + ham.build_protection(3, 5.0, (1, -1, 1))
    report = analysis.spectrum_report(h, 3)
    assert report.eigenvalues.sum() == pytest.approx(h.diagonal().sum(), abs=1e-9)
    assert len(report.eigenvalues) == 64


def test_spectrum_sector_isolation_grows_with_V():
    L = 3
    c = (1, -1, 1)
    h0 = ham.build_h0(L)
    gaps = []
    for V in (20.0, 40.0):
        report = analysis.spectrum_report(h0 + ham.build_protection(L, V, c), L)
        gaps.append(analysis.sector_isolation_gap(report, c))
    assert gaps[1] > gaps[0] > 1.0


def test_pt_identity_at_zero_coupling():
    h = ham.build_h0(2) + ham.build_protection(2, 10.0, (1, -1))
    h1 = ham.build_perturbation("transverse", 2, 1.0)
    pt = analysis.pt_first_order(h, h1, lam=0.0)
    np.testing.assert_allclose(pt.forward, np.eye(16), atol=1e-15)
    np.testing.assert_allclose(pt.inverse, np.eye(16), atol=1e-15)


def test_pt_forward_inverse_first_order():
    h = ham.build_h0(2) + ham.build_protection(2, 10.0, (1, -1))
    h1 = ham.build_perturbation("transverse", 2, 1.0)
    lam = 0.05
    pt = analysis.pt_first_order(h, h1, lam)
    resid = pt.forward @ pt.inverse - np.eye(16)
    assert np.abs(resid).max() < 2 * lam**2 * np.abs(pt.forward).max() ** 2
    # the correction matrix is antisymmetric (real symmetric h1, real basis)
    C = (pt.forward - np.eye(16)) / lam
    np.testing.assert_allclose(C, -C.T, atol=1e-10)


def test_pt_single_rung_admixture_coefficient():
    # protected single rung: |00> gains the flipped rung at lam/(2V+2J)
    # under the transverse term; check against exact diagonalization
    L, V, lam = 1, 20.0, 0.05
    h0 = ham.build_h0(L)
    hv = ham.build_protection(L, V, (1,))
    h1 = ham.build_perturbation("transverse", L, 1.0)
    pt = analysis.pt_first_order(h0 + hv, h1, lam)
    full = (h0 + hv + lam * h1).toarray()
    evals, evecs = np.linalg.eigh(full)
    states = pt.perturbed_states()
    # match each perturbed state to the exact one with the same energy order
    order = np.argsort(pt.energies)
    for col, k in zip(order, np.argsort(evals)[: len(order)]):
        v = states[:, col] / np.linalg.norm(states[:, col])
        exact = evecs[:, k]
        overlap = abs(np.vdot(v, exact))
        assert overlap > 1 - (lam / V) ** 2


def test_pt_degeneracy_raises_on_connected_degenerate_levels():
    # with c=(+,-) the ++ and -- sectors share the zero plateau, and the
    # leg flip-flop couples them directly: first order is ill defined
    h_diag = ham.build_protection(2, 5.0, (1, -1))
    h1 = ham.build_perturbation("heisenberg", 2, 1.0)
    with pytest.raises(PTDegeneracyError):
        analysis.pt_first_order(h_diag, h1, 0.1)


def test_pt_evolution_tracks_full_dynamics_plateau():
    # the first-order map should reproduce the protected plateau within 20%
    L, lam, V = 3, 0.05, 40.0
    sector = (1, 1, -1)
    spec = QuenchSpec(
        L=L, sector=sector, seed=4, perturbation="transverse",
        lam=lam, V=V, c=sector, t_max=200.0, n_times=60,
    )
    full = dynamics.run_quench(spec)
    h_diag = ham.build_h0(L) + ham.build_protection(L, V, sector)
    h1 = ham.build_perturbation("transverse", L, 1.0)
    pt = analysis.pt_first_order(h_diag, h1, lam)
    psi0 = dynamics.random_sector_product_state(sector, seed=4)
    states = analysis.pt_evolve(pt, psi0, full.times)
    from zenoladder import entanglement
    ents = np.array([
        entanglement.cut_entropy(s / np.linalg.norm(s), spec.cut_or_default)
        for s in states
    ])
    window = (full.times >= 10.0) & (full.times <= 200.0)
    a = full.entropies[window].mean()
    b = ents[window].mean()
    assert abs(a - b) / a < 0.2
