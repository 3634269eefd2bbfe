import numpy as np
import pytest

from mrqm import (
    MemoryConfig,
    SymmetryError,
    char_poly_storage,
    design,
    kappa_closed_form,
    scan_merge,
    solve_f,
    solve_kappa,
    verify_plateau,
)


def root_ratio(weights, delta, f):
    cfg = MemoryConfig(delta=delta, coupling_weights=tuple(weights), f=f)
    _, c2, c0 = char_poly_storage(cfg)
    d = np.sqrt(c2 * c2 - 4 * c0)
    return np.sqrt((-c2 + d) / (-c2 - d))


def bisection_oracle(weights, delta, ratio, f_lo=1e-3, f_hi=5.0, n=2000):
    """Dense scan of ratio(f) with sign-change bisection, no closed form."""
    fs = np.linspace(f_lo, f_hi, n)
    vals = np.array([root_ratio(weights, delta, f) - ratio for f in fs])
    hits = []
    for i in range(n - 1):
        if vals[i] == 0.0:
            hits.append(fs[i])
        elif vals[i] * vals[i + 1] < 0:
            lo, hi = fs[i], fs[i + 1]
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if (root_ratio(weights, delta, mid) - ratio) * (
                    root_ratio(weights, delta, lo) - ratio
                ) <= 0:
                    hi = mid
                else:
                    lo = mid
            hits.append(0.5 * (lo + hi))
    return hits


def printed_matching_formula(config):
    """The published algebraic matching expression, kept only for regression:

        kappa = sqrt((delta^2 f2^2 + (f1^2+f2^2+f3^2)(f1^2+f3^2)) / (delta^2/12))

    It does not reproduce the reported optima; the smoothness condition and
    its derived reduction (kappa_closed_form) do.
    """
    f1, f2, f3 = config.f_n
    d2 = config.delta**2
    return np.sqrt((d2 * f2**2 + (f1**2 + f2**2 + f3**2) * (f1**2 + f3**2)) / (d2 / 12))


class TestSolveF:
    def test_equal_weights_ratio_four(self):
        sols = solve_f([1.0, 1.0, 1.0], 1.0, 4)
        oracle = bisection_oracle([1.0, 1.0, 1.0], 1.0, 4)
        assert len(sols) == 2 and len(oracle) == 2
        np.testing.assert_allclose(sols, oracle, rtol=1e-9)
        np.testing.assert_allclose(sols, [0.2979643, 1.1187024], atol=1e-6)
        # the larger branch is the published coupling 1.119
        assert sols[-1] == pytest.approx(1.119, rel=3e-4)

    def test_tapered_weights_ratio_three(self):
        sols = solve_f([0.8, 1.0, 0.8], 1.0, 3)
        oracle = bisection_oracle([0.8, 1.0, 0.8], 1.0, 3)
        np.testing.assert_allclose(sols, oracle, rtol=1e-9)
        np.testing.assert_allclose(sols, [0.4215496, 1.0404387], atol=1e-6)
        # published value 1.038 is within 0.3% of the exact solution
        assert sols[-1] == pytest.approx(1.038, rel=3e-3)

    def test_every_solution_reproduces_the_ratio(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            w_edge = rng.uniform(0.3, 1.2)
            r = int(rng.integers(3, 7))
            delta = rng.uniform(0.5, 2.0)
            try:
                sols = solve_f([w_edge, 1.0, w_edge], delta, r)
            except ValueError:
                continue
            for f in sols:
                assert root_ratio([w_edge, 1.0, w_edge], delta, f) == pytest.approx(r, abs=1e-6)

    def test_degenerate_ratio_one_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            solve_f([1.0, 1.0, 1.0], 1.0, 1)

    def test_unreachable_ratio_reports_no_solution(self):
        with pytest.raises(ValueError, match="no real coupling"):
            solve_f([1.0, 1.0, 1.0], 1.0, 2)

    def test_asymmetric_weights_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            solve_f([1.0, 1.0, 0.5], 1.0, 4)


class TestSolveKappa:
    def test_case_a_reproduces_published_coupling(self, case_a):
        k = solve_kappa(case_a)
        assert k == pytest.approx(7.256, rel=5e-3)
        assert k == pytest.approx(7.2564250, abs=1e-5)

    def test_case_b_reproduces_published_coupling(self, case_b):
        k = solve_kappa(case_b)
        assert k == pytest.approx(5.546, rel=5e-3)
        assert k == pytest.approx(5.5462177, abs=1e-5)

    def test_closed_form_matches_numeric_on_random_configs(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            cfg = MemoryConfig(
                delta=rng.uniform(0.5, 2.0),
                coupling_weights=(w := rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5), w),
                f=rng.uniform(0.3, 3.0),
            )
            num = solve_kappa(cfg)
            closed = kappa_closed_form(cfg)
            assert abs(num - closed) / closed < 1e-6

    def test_printed_formula_disagrees_with_smoothness_condition(self, case_a):
        # regression for the published expression: 11.31 on case A, far from
        # the 7.256 the smoothness condition (and the reported data) give
        printed = printed_matching_formula(case_a)
        assert printed == pytest.approx(11.31, rel=1e-2)
        assert abs(printed - solve_kappa(case_a)) / solve_kappa(case_a) > 0.5

    def test_zero_central_coupling_rejected(self):
        cfg = MemoryConfig(delta=1.0, coupling_weights=(1.0, 0.0, 1.0), f=1.0)
        with pytest.raises(ValueError, match="f2"):
            solve_kappa(cfg)

    def test_lossy_config_rejected(self, case_b):
        with pytest.raises(ValueError, match="decay"):
            solve_kappa(case_b.with_gamma(0.01))

    def test_asymmetric_config_rejected(self):
        cfg = MemoryConfig(delta=1.0, coupling_weights=(1.0, 1.0, 0.7), f=1.0)
        with pytest.raises(SymmetryError):
            solve_kappa(cfg)


class TestVerifyPlateau:
    def test_matched_coupling_is_flat(self, case_b):
        m = verify_plateau(case_b, case_b.kappa0)
        assert m.tau0 == pytest.approx(case_b.kappa0 / 1.038**2, rel=1e-10)
        assert abs(m.second_derivative_residual) < 1e-4 * m.tau0

    def test_mismatched_coupling_is_curved(self, case_b):
        m = verify_plateau(case_b, 2.0)
        assert abs(m.second_derivative_residual) > 1e-2 * m.tau0

    def test_band_halfwidth_case_b(self, case_b):
        m = verify_plateau(case_b, case_b.kappa0)
        # the relative delay stays within 5% out to the first quartic root
        assert m.band_halfwidth == pytest.approx(0.588, abs=2e-3)

    def test_single_resonator_limit(self):
        cfg = MemoryConfig(delta=1.0, coupling_weights=(0.0, 1.0, 0.0), f=1.2)
        k = solve_kappa(cfg)
        m = verify_plateau(cfg, k)
        assert np.isfinite(m.tau0) and m.band_halfwidth > 0
        assert len(m.curve.omega_grid) == len(m.curve.values)

    def test_curve_normalized_at_center(self, case_b):
        m = verify_plateau(case_b, case_b.kappa0)
        mid = np.argmin(np.abs(m.curve.omega_grid))
        assert m.curve.real_values[mid] == pytest.approx(1.0, rel=1e-12)


class TestDesign:
    def test_case_a_pipeline(self, design_a):
        assert design_a.config.f == pytest.approx(1.119, rel=3e-4)
        assert design_a.kappa == pytest.approx(7.256, rel=5e-3)
        assert design_a.target_pattern == (-4, -1, 1, 4)
        assert design_a.delta_prime == pytest.approx(0.5288436, abs=1e-6)
        assert design_a.revival_period == pytest.approx(2 * np.pi / design_a.delta_prime, rel=1e-12)
        assert design_a.f_candidates[-1] == design_a.config.f
        assert design_a.config.kappa0 == design_a.kappa

    def test_case_b_pipeline(self, design_b):
        assert design_b.config.f == pytest.approx(1.0404387, abs=1e-6)
        assert design_b.kappa == pytest.approx(5.546, rel=5e-3)
        assert design_b.delta_prime == pytest.approx(0.5889082, abs=1e-6)
        assert design_b.revival_period == pytest.approx(10.66921, abs=1e-4)

    def test_plateau_invariants(self, design_a, design_b):
        for rep in (design_a, design_b):
            assert abs(rep.plateau.second_derivative_residual) < 1e-6 * rep.plateau.tau0

    def test_multiplet_reproduced_within_one_percent(self, design_a, design_b):
        from mrqm import eigenfreqs, multiplet_base

        for rep in (design_a, design_b):
            freqs = eigenfreqs(rep.config, 0.0).real_parts()
            base, pattern = multiplet_base(freqs)
            assert pattern == rep.target_pattern
            np.testing.assert_allclose(
                np.sort(freqs), base * np.sort(np.array(pattern, float)), rtol=1e-2
            )

    def test_scaling_equivariance(self):
        ref = design([0.8, 1.0, 0.8], 1.0, 3)
        for c in (0.5, 2.0, 10.0):
            scaled = design([0.8, 1.0, 0.8], c * 1.0, 3)
            assert scaled.config.f == pytest.approx(c * ref.config.f, rel=1e-8)
            assert scaled.kappa == pytest.approx(c * ref.kappa, rel=1e-8)
            assert scaled.delta_prime == pytest.approx(c * ref.delta_prime, rel=1e-8)
            assert scaled.revival_period == pytest.approx(ref.revival_period / c, rel=1e-8)

    def test_matched_coupling_sits_near_merge_point(self, design_a, design_b):
        for rep in (design_a, design_b):
            scan = scan_merge(rep.config, 0.0, 3 * rep.kappa, 151)
            assert scan.merge_point is not None
            assert abs(rep.kappa - scan.merge_point) / rep.kappa < 0.15

    def test_report_serialization(self, design_b):
        doc = design_b.to_dict()
        assert doc["f"] == design_b.config.f
        assert doc["plateau_metrics"]["tau0"] == design_b.plateau.tau0
        assert doc["target_pattern"] == [-3, -1, 1, 3]
