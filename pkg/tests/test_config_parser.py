# ABOUTME: Tests for TOML experiment parsing, validation and CLI overrides
# ABOUTME: Every invalid field must be reported with its path

import pytest

from src.core.exceptions import ConfigurationError
from src.core.models import AfVariant, CurveSpec, Gamma0Policy, Metric, RelayOffset, Strategy
from src.experiments.config_parser import apply_overrides, build_spec, parse_config, parse_sweep

MINIMAL = """
[network]
relays = 2

[channel]
gamma_e_db = 10.0

[experiment]
strategy = "SDF"
"""

def error_fields(error: ConfigurationError):
    return {e.field for e in error.errors}

class TestParseConfig:

    def test_minimal_config_fills_defaults(self):
        spec = parse_config(MINIMAL)
        assert spec.relays == [RelayOffset(), RelayOffset()]
        assert spec.strategy is Strategy.SDF
        assert spec.gamma_e_db == 10.0
        assert spec.outputs is Metric.BOTH
        assert spec.target_rate == 0.5
        assert spec.af_model.variant is AfVariant.APPROX_PRODUCT
        assert spec.af_model.shared_first_hop is True
        assert spec.sweep.points() == [0.0, 5.0, 10.0, 15.0, 20.0]
        assert spec.gamma0_policy is Gamma0Policy.RELAY_AVERAGE

    def test_full_config(self):
        spec = parse_config("""
[experiment]
strategy = "saf"
outputs = "asr"
trials = 5000
seed = 7
normalize_awgn = true
workers = 2

[[network.relay]]
main_offset_db = 0.0
eve_offset_db = 0.0

[[network.relay]]
main_offset_db = -3.0
eve_offset_db = 2.0

[sweep]
start = -5
stop = 5
step = 2.5

[af_model]
variant = "EXACT-APS"
first_hop_boost_db = 16
shared_first_hop = false

[opa]
gamma0_policy = "fixed"
gamma0 = 10.0
""")
        assert spec.strategy is Strategy.SAF
        assert spec.outputs is Metric.ASR
        assert spec.relays[1] == RelayOffset(main_offset_db=-3.0, eve_offset_db=2.0)
        assert spec.sweep.points() == [-5.0, -2.5, 0.0, 2.5, 5.0]
        assert spec.af_model.first_hop_boost_db == 16.0
        assert not spec.af_model.shared_first_hop
        assert spec.gamma0 == 10.0
        assert (spec.trials, spec.seed, spec.workers, spec.normalize_awgn) == (5000, 7, 2, True)

    def test_curves(self):
        spec = parse_config(MINIMAL + '\n[[curve]]\nstrategy = "sdf"\nrelays = 1\n'
                                      '\n[[curve]]\nstrategy = "SAF"\n')
        assert spec.curves == [CurveSpec(Strategy.SDF, (RelayOffset(),)), CurveSpec(Strategy.SAF)]
        labels = [label for label, _ in spec.curve_specs()]
        assert labels == ["SDF N=1", "SAF N=2"]
        assert [curve.strategy for _, curve in spec.curve_specs()] == [Strategy.SDF, Strategy.SAF]

    def test_no_curves_means_one_strategy_curve(self):
        spec = parse_config(MINIMAL)
        assert spec.curves == []
        assert spec.curve_specs() == [("SDF", spec)]

    def test_curve_errors(self):
        with pytest.raises(ConfigurationError) as info:
            parse_config(MINIMAL + '\n[[curve]]\nrelays = 0\ncolour = "red"\n'
                                   '\n[[curve]]\nstrategy = "XYZ"\nrelays = 0\n')
        assert error_fields(info.value) == {"curve[0].strategy", "curve[0].colour",
                                            "curve[1].strategy", "curve[1].relays"}

    def test_zero_step_names_sweep_field(self):
        with pytest.raises(ConfigurationError) as info:
            parse_config(MINIMAL + "\n[sweep]\nstep = 0\n")
        assert "sweep.step" in error_fields(info.value)

    def test_zero_relays_rejected(self):
        with pytest.raises(ConfigurationError) as info:
            parse_config("[network]\nrelays = 0\n")
        assert "network.relays" in error_fields(info.value)

    def test_all_errors_reported_together(self):
        with pytest.raises(ConfigurationError) as info:
            parse_config("""
[experiment]
strategy = "XYZ"
trials = 0
colour = "blue"

[channel]
decoding_threshold = -1

[bogus]
x = 1
""")
        assert error_fields(info.value) >= {
            "experiment.strategy", "experiment.trials", "experiment.colour",
            "channel.decoding_threshold", "bogus",
        }
        assert "experiment.colour: unknown key" in str(info.value)

    def test_start_after_stop(self):
        with pytest.raises(ConfigurationError) as info:
            parse_config("[sweep]\nstart = 10\nstop = 0\n")
        assert "sweep.start" in error_fields(info.value)

    def test_type_errors(self):
        with pytest.raises(ConfigurationError) as info:
            parse_config('[channel]\ngamma_e_db = "loud"\n[af_model]\nshared_first_hop = 1\n')
        assert error_fields(info.value) == {"channel.gamma_e_db", "af_model.shared_first_hop"}

    def test_fixed_policy_needs_gamma0(self):
        with pytest.raises(ConfigurationError) as info:
            parse_config('[opa]\ngamma0_policy = "fixed"\n')
        assert "opa.gamma0" in error_fields(info.value)

    def test_conflicting_network_forms(self):
        with pytest.raises(ConfigurationError) as info:
            parse_config("[network]\nrelays = 2\n[[network.relay]]\nmain_offset_db = 1.0\n")
        assert "network" in error_fields(info.value)

    def test_relay_table_unknown_key(self):
        with pytest.raises(ConfigurationError) as info:
            parse_config("[[network.relay]]\nmain_offset = 1.0\n")
        assert "network.relay[0].main_offset" in error_fields(info.value)

    def test_invalid_toml(self):
        with pytest.raises(ConfigurationError):
            parse_config("[network\nrelays = 2")

    def test_network_file(self, tmp_path):
        (tmp_path / "relays.toml").write_text(
            "[[relay]]\nmain_offset_db = 1.0\n[[relay]]\neve_offset_db = -1.0\n", encoding="utf-8")
        spec = parse_config('[network]\nfile = "relays.toml"\n', base_dir=tmp_path)
        assert spec.relays == [RelayOffset(1.0, 0.0), RelayOffset(0.0, -1.0)]

    def test_missing_network_file(self, tmp_path):
        with pytest.raises(ConfigurationError) as info:
            parse_config('[network]\nfile = "absent.toml"\n', base_dir=tmp_path)
        assert "network.file" in error_fields(info.value)

class TestOverrides:

    def test_parse_sweep(self):
        assert parse_sweep("0:20:5") == {'start': 0.0, 'stop': 20.0, 'step': 5.0}
        assert parse_sweep("12") == {'start': 12.0, 'stop': 12.0, 'step': 1.0}

    @pytest.mark.parametrize("text", ["a:b:c", "1:2"])
    def test_bad_sweep(self, text):
        with pytest.raises(ConfigurationError):
            parse_sweep(text)

    def test_overrides_replace_values_and_network(self):
        raw = {'network': {'relay': [{'main_offset_db': 3.0}]}, 'channel': {'gamma_e_db': 5.0}}
        apply_overrides(raw, {
            'network.relays': 3,
            'channel.gamma_e_db': 0.0,
            'sweep.*': {'start': 1.0, 'stop': 1.0, 'step': 1.0},
            'experiment.seed': None,
        })
        spec = build_spec(raw)
        assert spec.relay_count == 3
        assert spec.gamma_e_db == 0.0
        assert spec.sweep.points() == [1.0]
        assert 'experiment' not in raw
