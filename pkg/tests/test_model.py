import json

import numpy as np
import pytest

from mrqm import (
    GaussianPulse,
    MemoryConfig,
    SwitchSchedule,
    load_config_file,
    make_case,
    validate,
)


class TestMakeCase:
    def test_case_a_parameters(self, case_a):
        assert case_a.f == 1.119
        assert case_a.coupling_weights == (1.0, 1.0, 1.0)
        assert case_a.delta == 1.0
        assert case_a.lossless

    def test_case_b_parameters(self, case_b):
        assert case_b.f == 1.038
        assert case_b.coupling_weights == (0.8, 1.0, 0.8)
        assert case_b.delta == 1.0

    def test_case_a_kappa_matches_reported_value(self, case_a):
        assert case_a.kappa0 == pytest.approx(7.256, rel=5e-4)

    def test_case_b_kappa_matches_reported_value(self, case_b):
        assert case_b.kappa0 == pytest.approx(5.546, rel=5e-4)

    def test_cases_validate_clean(self, case_a, case_b):
        assert validate(case_a) == []
        assert validate(case_b) == []

    def test_unknown_label_rejected(self):
        with pytest.raises(ValueError, match="label"):
            make_case("C")


class TestValidate:
    def test_negative_f_names_field(self):
        cfg = MemoryConfig(delta=1.0, f=-1.0)
        problems = validate(cfg)
        assert len(problems) == 1
        assert "f " in problems[0] or problems[0].startswith("f")

    def test_length_mismatch_reported(self):
        cfg = MemoryConfig(delta=1.0, offsets=(-1.0, 0.0, 1.0), gamma=(0.0, 0.0))
        problems = validate(cfg)
        assert any("gamma length" in p for p in problems)

    def test_negative_rates_reported(self):
        cfg = MemoryConfig(delta=1.0, gamma=(0.0, -0.1, 0.0), gamma0=-1.0, kappa0=-2.0)
        msgs = "\n".join(validate(cfg))
        assert "gamma[1]" in msgs and "gamma0" in msgs and "kappa0" in msgs

    def test_nonpositive_delta_reported(self):
        assert any("delta" in p for p in validate(MemoryConfig(delta=0.0)))


class TestSymmetry:
    def test_default_offsets_are_symmetric(self):
        cfg = MemoryConfig(delta=2.0, f=1.0)
        assert cfg.offsets == (-2.0, 0.0, 2.0)
        assert cfg.is_symmetric()

    def test_unequal_edge_weights_break_symmetry(self):
        cfg = MemoryConfig(delta=1.0, coupling_weights=(0.8, 1.0, 0.9), f=1.0)
        assert not cfg.is_symmetric()

    def test_unequal_edge_decay_breaks_symmetry(self):
        cfg = MemoryConfig(delta=1.0, f=1.0, gamma=(0.1, 0.0, 0.0))
        assert not cfg.is_symmetric()

    def test_general_n_config_accepted(self):
        cfg = MemoryConfig(
            delta=1.0,
            offsets=(-1.5, -0.5, 0.5, 1.5),
            coupling_weights=(1.0, 1.0, 1.0, 1.0),
            gamma=(0.0,) * 4,
            f=0.7,
        )
        assert validate(cfg) == []
        assert cfg.n_modes == 4
        assert not cfg.is_symmetric()


class TestGaussianPulse:
    def test_normalized_energy_by_quadrature(self):
        # oracle: trapezoid integral of |a_in|^2 over +-8 sigma
        for sigma in (0.3, 1.0, 2.5):
            p = GaussianPulse(sigma=sigma, center=5.0)
            t = np.linspace(5.0 - 8 * sigma, 5.0 + 8 * sigma, 40001)
            e = np.trapezoid(np.abs(p.waveform(t)) ** 2, t)
            assert e == pytest.approx(1.0, abs=1e-6)

    def test_explicit_amplitude_kept(self):
        p = GaussianPulse(sigma=1.0, center=0.0, amplitude=2.0 + 0j)
        assert p.waveform(0.0) == pytest.approx(2.0)
        assert p.energy() == pytest.approx(4.0 * np.sqrt(np.pi))

    def test_nonpositive_sigma_rejected(self):
        with pytest.raises(ValueError, match="sigma"):
            GaussianPulse(sigma=0.0)


class TestSwitchSchedule:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError, match="increasing"):
            SwitchSchedule(((0.0, 1.0), (0.0, 0.0)))

    def test_negative_coupling_rejected(self):
        with pytest.raises(ValueError, match=">= 0"):
            SwitchSchedule(((0.0, -1.0),))

    def test_k_at_lookup(self):
        s = SwitchSchedule(((0.0, 2.0), (5.0, 0.0), (8.0, 2.0)))
        assert s.k_at(1.0) == 2.0
        assert s.k_at(5.0) == 0.0
        assert s.k_at(9.0) == 2.0

    def test_last_switch_on(self):
        s = SwitchSchedule(((0.0, 2.0), (5.0, 0.0), (8.0, 2.0)))
        assert s.last_switch_on() == 8.0
        assert SwitchSchedule.always_on(2.0).last_switch_on() is None


class TestConfigFile:
    def test_roundtrip_with_pulse_and_schedule(self, tmp_path, case_b):
        doc = case_b.to_dict()
        doc["pulse"] = {"sigma": 1.0, "center": 8.0}
        doc["schedule"] = {"segments": [[0.0, case_b.kappa0], [11.0, 0.0]]}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(doc))
        cfg, pulse, schedule = load_config_file(path)
        assert cfg == case_b
        assert pulse.sigma == 1.0 and pulse.center == 8.0
        assert schedule.segments == ((0.0, case_b.kappa0), (11.0, 0.0))

    def test_invalid_config_rejected_with_fields(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"delta": 1.0, "f": -2.0}))
        with pytest.raises(ValueError, match="f must be"):
            load_config_file(path)

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"delta": 1.0, "coupling": 3.0}))
        with pytest.raises(ValueError, match="unknown configuration keys"):
            load_config_file(path)
