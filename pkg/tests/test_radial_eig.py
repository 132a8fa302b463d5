import warnings

import numpy as np
import pytest

from scottlab import radial_eig
from scottlab.cutoffs import SmoothCutoff
from scottlab.hydrogen import trace_neg_coulomb
from scottlab.radial_eig import (ChannelCascadeError, build_channel,
                                 cutoff_weyl_coulomb, fit_expansion,
                                 localized_trace_neg, make_grid,
                                 negative_eigenvalues, sturm_count, trace_neg)

VC = lambda r: 1.0 / r


def test_coulomb_levels_across_channels():
    grid = radial_eig.auto_grid(VC, 1.0, 1.0 / 150.0)
    for ell in range(5):
        op = build_channel(VC, 1.0, ell, grid)
        vals = negative_eigenvalues(op, mu=1.0 / 150.0)
        for k, e in enumerate(vals):
            n = ell + 1 + k
            assert e == pytest.approx(-0.25 / n ** 2, abs=1e-5)


def test_lowest_channel_eigenvalues():
    grid = radial_eig.auto_grid(VC, 1.0, 1.0 / 20.0)
    e0 = negative_eigenvalues(build_channel(VC, 1.0, 0, grid), mu=1 / 20.0)[0]
    e1 = negative_eigenvalues(build_channel(VC, 1.0, 1, grid), mu=1 / 20.0)[0]
    assert e0 == pytest.approx(-0.25, abs=1e-5)
    assert e1 == pytest.approx(-1.0 / 16.0, abs=1e-5)
    # mu = 0 on a fixed grid: the per-channel lowest values are unaffected
    fixed = make_grid("sinh", 0.3, 400.0, 4000)
    assert negative_eigenvalues(build_channel(VC, 1.0, 0, fixed))[0] == \
        pytest.approx(-0.25, abs=1e-5)
    assert negative_eigenvalues(build_channel(VC, 1.0, 1, fixed))[0] == \
        pytest.approx(-1.0 / 16.0, abs=1e-5)


def test_nonpositive_potential_has_no_bound_states():
    grid = make_grid("sinh", 0.1, 30.0, 1500)
    op = build_channel(lambda r: -np.ones_like(r), 1.0, 0, grid)
    assert negative_eigenvalues(op, mu=0.0).size == 0


def test_sturm_count_consistency():
    # mu between hydrogen levels, away from any threshold
    mu = 1.0 / 90.0
    grid = make_grid("sinh", 0.3, 300.0, 2500)
    for ell in (0, 1, 3):
        op = build_channel(VC, 1.0, ell, grid)
        vals = negative_eigenvalues(op, mu=mu)
        assert sturm_count(op.diag, op.off, -mu) == vals.size


def test_kinetic_stencil_nonnegative():
    # the continuum kinetic term is >= 0; the stencils reproduce that up to
    # discretization (exactly for the uniform map)
    for mapping, core in (("sinh", 0.2), ("log", 0.01), ("uniform", 0.1)):
        grid = make_grid(mapping, core, 50.0, 1200)
        op = build_channel(VC, 1.0, 0, grid)
        floor = op.kinetic_floor()
        assert floor > -1e-6


def test_trace_matches_exact_coulomb_sum():
    s = trace_neg(VC, 1.0, mu=1.0 / 400.0, refine=True)
    assert s.trace == pytest.approx(trace_neg_coulomb(1.0 / 400.0), abs=2e-3)
    assert s.trace == pytest.approx(-3.075, abs=2e-3)
    assert s.n_states == 285  # sum of n^2 for n <= 9


def test_trace_zero_when_supremum_below_mu():
    s = trace_neg(lambda r: 0.05 / (1 + r ** 4), 1.0, mu=0.1,
                  grid=make_grid("sinh", 0.1, 30.0, 1200))
    assert s.trace == 0.0
    assert s.n_states == 0


def test_trace_h_monotone():
    # fewer bound states and shallower sums as h grows
    grid = make_grid("sinh", 0.05, 60.0, 3000)
    V = lambda r: 2.0 / (1.0 + r ** 2) ** 2
    traces = [trace_neg(V, h, mu=0.0, grid=grid).trace for h in (0.2, 0.35, 0.5, 1.0)]
    assert all(a <= b + 1e-12 for a, b in zip(traces, traces[1:]))


def test_tf_trace_regression_baseline(tf_solution):
    # self-oracle under refinement, value frozen as the regression baseline
    s = trace_neg(tf_solution.potential(), 0.25, mu=0.0, refine=True)
    assert s.trace == pytest.approx(-12.4888, rel=2e-4)


def test_trace_grid_refinement_stability():
    grid = radial_eig.auto_grid(VC, 1.0, 1.0 / 100.0, resolution=12.0)
    t1 = trace_neg(VC, 1.0, mu=1.0 / 100.0, grid=grid).trace
    t2 = trace_neg(VC, 1.0, mu=1.0 / 100.0, grid=grid.refined()).trace
    assert abs(t2 - t1) < 0.005 * abs(t1)


def test_channel_emptiness_is_monotone():
    grid = make_grid("sinh", 0.3, 200.0, 2500)
    sizes = []
    for ell in range(12):
        sizes.append(negative_eigenvalues(
            build_channel(VC, 1.0, ell, grid), mu=1.0 / 50.0).size)
    empty_seen = False
    for s in sizes:
        if s == 0:
            empty_seen = True
        assert not (empty_seen and s > 0)


def test_grid_too_coarse_warning():
    # a mesh far too coarse for the shallow shells changes its eigenvalue
    # count on refinement and must say so
    coarse = make_grid("sinh", 2.0, 900.0, 40)
    op = build_channel(VC, 1.0, 0, coarse)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        negative_eigenvalues(op, mu=1.0 / 900.0, verify_count=True)
    assert any("refinement" in str(w.message) for w in caught)


def test_channel_cascade_cap():
    with pytest.raises(ChannelCascadeError):
        trace_neg(VC, 1.0, mu=1.0 / 400.0, lmax_cap=3)


def test_mapping_variants_agree():
    # same physics on sinh, log and uniform meshes; the log map pays its
    # documented wall-plus-conditioning penalty O(r_min), so its tolerance
    # is the loosest
    sinh_grid = make_grid("sinh", 0.2, 80.0, 3000)
    log_grid = make_grid("log", 3e-3, 80.0, 6000)
    uni_grid = make_grid("uniform", 0.2, 80.0, 16000)
    e_sinh = negative_eigenvalues(build_channel(VC, 1.0, 0, sinh_grid), mu=0.02)
    e_log = negative_eigenvalues(build_channel(VC, 1.0, 0, log_grid), mu=0.02)
    e_uni = negative_eigenvalues(build_channel(VC, 1.0, 0, uni_grid), mu=0.02)
    np.testing.assert_allclose(e_log[:3], e_sinh[:3], atol=2e-3)
    np.testing.assert_allclose(e_uni[:3], e_sinh[:3], atol=5e-3)


def test_parallel_map_matches_sequential():
    s1 = trace_neg(VC, 1.0, mu=1.0 / 64.0, max_workers=1)
    s4 = trace_neg(VC, 1.0, mu=1.0 / 64.0, max_workers=4)
    assert s4.trace == pytest.approx(s1.trace, rel=1e-14)


# ---------------------------------------------------------------------------
# cutoff route
# ---------------------------------------------------------------------------


def test_localized_trace_inactive_cutoff_reduces_to_trace_neg():
    # phi identically 1 on a huge ball around the bound states, mu-shifted
    phi = SmoothCutoff(600.0, inner=0.9)
    mu = 1.0 / 16.0
    shifted = lambda r: 1.0 / r - mu
    loc = localized_trace_neg(shifted, phi, 1.0,
                              grid=make_grid("sinh", 0.2, 600.0, 6000))
    ref = trace_neg(VC, 1.0, mu=mu, grid=make_grid("sinh", 0.2, 600.0, 6000))
    assert loc.trace == pytest.approx(ref.trace, abs=1e-6)


def test_localized_trace_zero_cutoff():
    class Zero:
        R = 20.0

        def __call__(self, r):
            return np.zeros_like(np.asarray(r, dtype=float))

    z = Zero()
    s = localized_trace_neg(VC, z, 1.0, grid=make_grid("sinh", 0.2, 20.0, 800))
    assert s.trace == 0.0


def test_localized_trace_requires_support_radius():
    with pytest.raises(ValueError):
        localized_trace_neg(VC, lambda r: np.ones_like(r), 1.0)


def test_cutoff_scott_estimate_moves_toward_quarter():
    d20 = radial_eig.scott_cutoff_value(20.0, refine=False)
    d160 = radial_eig.scott_cutoff_value(160.0, refine=False)
    assert abs(d160 - 0.25) < abs(d20 - 0.25)
    est = radial_eig.scott_cutoff_schedule([20.0, 40.0], refine=False)
    assert est.R == 40.0
    assert est.meta["d_values"][1] < est.meta["d_values"][0]
    assert "extrapolated" in est.meta


def test_cutoff_scott_limit_via_extrapolation():
    # the finite-R excess decays like ~c R^(-1/2); eliminating it from an
    # (R, 2R) pair brings the estimate close to the limit 2 S(0) = 1/4.
    # Radii much beyond ~200 are excluded: marginal high-l states carry
    # 2(2l+1)-weighted threshold jitter that dominates the value there.
    est = radial_eig.scott_cutoff_schedule([80.0, 160.0], refine=True)
    d80, d160 = est.meta["d_values"]
    scaled = [(d80 - 0.25) * np.sqrt(80.0), (d160 - 0.25) * np.sqrt(160.0)]
    assert abs(scaled[1] / scaled[0] - 1.0) < 0.25  # approximate R^(-1/2) law
    assert est.meta["extrapolated"] == pytest.approx(0.25, abs=0.025)


# ---------------------------------------------------------------------------
# semiclassical fit
# ---------------------------------------------------------------------------


def test_fit_expansion_recovers_exact_model():
    c3, c2 = -0.2562, 0.25
    hs = [0.125, 0.1, 1 / 12, 1 / 16, 0.05]
    samples = [(h, c3 * h ** -3 + c2 * h ** -2) for h in hs]
    fit = fit_expansion(samples)
    assert fit.c3 == pytest.approx(c3, rel=1e-12)
    assert fit.c2 == pytest.approx(c2, rel=1e-12)
    assert fit.max_rel_residual < 1e-12
    pinned = fit_expansion(samples, weyl_coeff=c3)
    assert pinned.c2 == pytest.approx(c2, rel=1e-12)
    assert pinned.pinned


def test_fit_expansion_zero_c2():
    hs = [0.2, 0.1, 0.05]
    samples = [(h, -0.3 * h ** -3) for h in hs]
    fit = fit_expansion(samples, weyl_coeff=-0.3)
    assert abs(fit.c2) < 1e-10


def test_fit_expansion_validation():
    with pytest.raises(ValueError):
        fit_expansion([(0.1, -1.0), (0.1, -1.0), (0.1, -1.0)])
    with pytest.raises(ValueError):
        fit_expansion([(0.1, -1.0), (0.05, -2.0)])


def test_cutoff_weyl_value():
    # independent check of the phi^2-weighted Coulomb Weyl integral: the
    # r^(-1/2) head over [0, 1] (where phi = 1) is 2 analytically, the rest
    # is a dense trapezoid
    phi = SmoothCutoff(20.0)
    r = np.linspace(1.0, 20.0, 200001)
    oracle = -(8.0 / (15.0 * np.pi)) * (2.0 + np.trapezoid(phi.sq(r) / np.sqrt(r), r))
    assert cutoff_weyl_coulomb(phi) == pytest.approx(oracle, rel=1e-6)
