import json

import pytest

from electrovac.shared.config import (
    BoundsConfig,
    ReduceConfig,
    SeparabilityConfig,
    VerifyConfig,
    load_run_config,
    parse_run_config,
    run_config_schema,
)
from electrovac.shared.utils import ConfigError
from tests.conftest import CONFIG_DIR


EXPECTED_MODELS = {
    "verify": VerifyConfig,
    "reduce": ReduceConfig,
    "separability": SeparabilityConfig,
    "bounds": BoundsConfig,
}


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_parse(path):
    config = load_run_config(path)
    assert isinstance(config, EXPECTED_MODELS[config.command])
    again = parse_run_config(config.model_dump(mode="json"), config.command)
    assert again == config


def test_defaults(config_path):
    config = load_run_config(config_path("quadric_rotation.json"), "reduce")
    assert config.tolerances == {}
    assert config.reduction.rtol == 1e-10
    assert config.reduction.drift_tol == 1e-6
    assert config.reduction.Lambda == 0.0
    assert config.output.report is None


def test_command_is_injected():
    config = parse_run_config(
        {"solution": {"family": "minkowski", "n": 3}, "points": 10}, "verify"
    )
    assert isinstance(config, VerifyConfig)
    assert config.seed == 0
    assert config.region.lower is None


def test_command_mismatch(config_path):
    with pytest.raises(ConfigError, match="not 'bounds'"):
        load_run_config(config_path("mp_single.json"), "bounds")


def test_unknown_key_is_rejected():
    with pytest.raises(ConfigError):
        parse_run_config({"solution": {"family": "minkowski", "n": 3}, "colour": "red"}, "verify")
    with pytest.raises(ConfigError):
        parse_run_config({"solution": {"family": "minkowski", "n": 3, "extra": 1}}, "verify")


def test_malformed_and_missing_files(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{ not json")
    with pytest.raises(ConfigError, match="malformed JSON"):
        load_run_config(broken)
    with pytest.raises(ConfigError, match="cannot read"):
        load_run_config(tmp_path / "absent.json")
    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="JSON object"):
        load_run_config(listed)


def test_invalid_values():
    with pytest.raises(ConfigError):
        parse_run_config({"solution": {"family": "minkowski", "n": 2}}, "verify")
    with pytest.raises(ConfigError):
        parse_run_config(
            {"solution": {"family": "minkowski", "n": 3}, "tolerances": {"curvature": 1e-6}}, "verify"
        )
    with pytest.raises(ConfigError):
        parse_run_config({"solution": {"family": "minkowski", "n": 3}, "tolerances": {"trace": -1.0}}, "verify")
    with pytest.raises(ConfigError, match="n=3 coordinates"):
        parse_run_config(
            {"solution": {"family": "multicenter", "n": 3, "centers": [[0.0, 0.0]], "weights": [1.0]}}, "verify"
        )
    with pytest.raises(ConfigError, match="one weight per center"):
        parse_run_config(
            {"solution": {"family": "multicenter", "n": 3, "centers": [[0.0, 0.0, 0.0]], "weights": [1.0, 2.0]}},
            "verify",
        )


def test_reduce_discriminators():
    config = parse_run_config(
        {
            "reduction": {
                "mode": "quadric",
                "invariant": {"kind": "quadric", "n": 3, "tau": 1.0, "gamma": [0, 0, 0], "theta": [0, 0, 0]},
                "initial": {"kind": "complete", "xi0": 1.0, "phi": 1.0, "dphi": 0.0, "N": 1.0, "dN": 0.0},
                "Lambda": -0.4,
                "xi_end": 2.0,
            }
        },
        "reduce",
    )
    assert config.reduction.initial.kind == "complete"
    assert config.reduction.initial.sign == 1
    with pytest.raises(ConfigError):
        parse_run_config(
            {
                "reduction": {
                    "mode": "quadric",
                    "invariant": {"kind": "dilation", "n": 3, "a": [1.0], "b": [1.0, 1.0]},
                    "initial": {"kind": "mp", "xi0": 1.0, "U": 2.0, "dU": -0.5},
                    "xi_end": 2.0,
                }
            },
            "reduce",
        )


def test_schema_export():
    schema = run_config_schema()
    assert schema["$comment"].startswith("electrovac run configuration")
    text = json.dumps(schema)
    for name in ("VerifyConfig", "ReduceConfig", "SeparabilityConfig", "BoundsConfig"):
        assert name in text
