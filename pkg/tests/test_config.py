import json
from pathlib import Path

import numpy as np
import pytest

from osig.config import ConfigError, build_spec, load_spec

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"


def _corridor():
    return json.loads((CONFIGS / "corridor.json").read_text())


@pytest.mark.parametrize("name", ["beer_quiche", "corridor", "hexner_stateless"])
def test_shipped_configs_load(name):
    spec = load_spec(CONFIGS / f"{name}.json")
    assert spec.n_types == 2 and spec.L >= 1


def test_corridor_config_fields():
    spec = build_spec(_corridor())
    assert spec.tau == pytest.approx(spec.grid.horizon / spec.L)
    assert spec.prior is not None and spec.prior.weights.sum() == pytest.approx(1.0)
    assert spec.info["radius"] == 0.05


def test_unknown_key_names_the_field():
    cfg = _corridor()
    cfg["time"]["step"] = 3
    with pytest.raises(ConfigError, match="time"):
        build_spec(cfg)


def test_bad_cap():
    cfg = _corridor()
    cfg["caps"]["K"] = 0.5
    with pytest.raises(ConfigError, match="cap"):
        build_spec(cfg)
    cfg["caps"]["K"] = -1
    with pytest.raises(ConfigError, match="caps/K"):
        build_spec(cfg)


def test_prior_length():
    cfg = _corridor()
    cfg["types"]["prior"] = [0.2, 0.3, 0.5]
    with pytest.raises(ConfigError, match="prior"):
        build_spec(cfg)


def test_time_step():
    cfg = _corridor()
    cfg["time"] = {"horizon": 1.0, "steps": 10}
    cfg["actions"] = {"u": [-0.2, 0, 0.2], "v": {"range": [-0.2, 0.2], "count": 3}}
    spec = build_spec(cfg)
    assert spec.tau == pytest.approx(0.1)
    assert np.allclose(spec.actions_at(0).v[:, 0], [-0.2, 0.0, 0.2])


def test_missing_targets():
    cfg = _corridor()
    cfg["payoffs"]["terminal"]["params"]["targets"] = [0.5]
    with pytest.raises(ConfigError, match="targets"):
        build_spec(cfg)


def test_invalid_json(tmp_path):
    (tmp_path / "x.json").write_text("{nope")
    with pytest.raises(ConfigError):
        load_spec(tmp_path / "x.json")
