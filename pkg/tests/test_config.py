import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinchlink.config import (
    ConfigError,
    Geometry,
    SystemConfig,
    config_from_dict,
    config_hash,
    config_to_dict,
    db,
    dumps_config,
    eta,
    from_db,
    load_config,
    noise_power,
    save_config,
    transmit_snr,
    wavelengths,
)


def test_wavelengths_at_defaults(cfg_c3e8):
    lam, lam_g = wavelengths(cfg_c3e8)
    assert lam == pytest.approx(0.0857142857, rel=1e-9)
    assert lam_g == pytest.approx(0.0571428571, rel=1e-9)


def test_eta_matches_quarter_wavelength_squared(cfg_c3e8):
    lam, _ = wavelengths(cfg_c3e8)
    assert eta(cfg_c3e8) == pytest.approx((lam / (4 * math.pi)) ** 2, rel=1e-14)
    assert eta(cfg_c3e8) == pytest.approx(4.6523e-5, rel=1e-4)


def test_exact_speed_of_light_is_default():
    assert SystemConfig().c == 299_792_458.0
    assert eta(SystemConfig()) == pytest.approx(4.6459e-5, rel=1e-4)


def test_noise_power_and_transmit_snr(cfg_c3e8):
    assert noise_power(cfg_c3e8) == pytest.approx(1e-12, rel=1e-12)
    assert transmit_snr(cfg_c3e8) == pytest.approx(1e12, rel=1e-12)
    assert db(transmit_snr(cfg_c3e8)) == pytest.approx(120.0)


@given(st.floats(-50, 50))
def test_db_roundtrip(x):
    assert db(from_db(x)) == pytest.approx(x, abs=1e-9)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"f_c": 0.0},
        {"n_eff": 1.0},
        {"N_B": 0},
        {"K": 0},
        {"N_G": 2.5},
        {"alpha": -1.0},
        {"L_B": 0.0},
        {"P_t": 0.0},
        {"trials": 0},
        {"seed": -1},
        {"c": 0.0},
        {"L_G_k": (100.0, 100.0)},
        {"L_G_k": (100.0, -1.0, 100.0, 100.0)},
    ],
)
def test_invalid_parameters_rejected(kwargs):
    with pytest.raises(ConfigError):
        SystemConfig(**kwargs)


def test_replace_drops_sized_overrides_when_k_changes():
    cfg = SystemConfig(L_G_k=(50.0, 60.0, 70.0, 80.0))
    assert cfg.replace(K=2).L_G_k is None
    assert cfg.replace(alpha=2.0).L_G_k == cfg.L_G_k


def test_distances_and_equality_flag():
    assert SystemConfig().equal_distances
    cfg = SystemConfig(K=2, L_G_k=(50.0, 100.0))
    assert not cfg.equal_distances
    assert list(cfg.distances) == [50.0, 100.0]


def _geometry_cfg():
    geo = Geometry(
        ue=(30.0, 5.0, 0.0),
        feeds=((0.0, 0.0, 10.0), (0.0, 30.0, 10.0)),
        references=((20.0, 0.0, 10.0), (20.0, 30.0, 10.0)),
        length_limits=(40.0, 40.0),
    )
    return SystemConfig(K=2, N_G=2, L_G_k=(30.0, 40.0), seed=7, geometry=geo)


def test_toml_roundtrip(tmp_path):
    cfg = _geometry_cfg()
    path = tmp_path / "run.toml"
    save_config(cfg, path)
    back = load_config(path, env=False)
    assert back == cfg
    assert dumps_config(back) == dumps_config(cfg)


def test_missing_keys_fall_back_to_defaults(tmp_path):
    path = tmp_path / "partial.toml"
    path.write_text("alpha = 2.0\nN_B = 16\n")
    cfg = load_config(path)
    assert cfg.alpha == 2.0 and cfg.N_B == 16 and cfg.K == 4


@pytest.mark.parametrize(
    "text",
    [
        "alpha_b = 2.0\n",
        "N_B = 2.5\n",
        "alpha = 'x'\n",
        "[geometry]\nue = [0, 0, 0]\n",
        "not toml at all = = =\n",
    ],
)
def test_bad_files_raise_config_error(tmp_path, text):
    path = tmp_path / "bad.toml"
    path.write_text(text)
    with pytest.raises(ConfigError):
        load_config(path)


def test_unknown_key_in_dict():
    with pytest.raises(ConfigError, match="unknown"):
        config_from_dict({"bogus": 1})


def test_seed_environment_override(tmp_path, monkeypatch):
    path = tmp_path / "c.toml"
    path.write_text("seed = 3\n")
    monkeypatch.setenv("PINCHLINK_SEED", "42")
    assert load_config(path).seed == 42
    assert load_config(path, env=False).seed == 3
    monkeypatch.setenv("PINCHLINK_SEED", "abc")
    with pytest.raises(ConfigError):
        load_config(path)


def test_config_hash_is_stable_and_sensitive():
    a, b = SystemConfig(), SystemConfig()
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(a.replace(alpha=2.5))
    assert config_hash(a, trials=1) != config_hash(a, trials=2)


@settings(max_examples=50)
@given(
    n_b=st.integers(1, 256),
    k=st.integers(1, 16),
    alpha=st.floats(1.5, 5.0),
    seed=st.integers(0, 2**31),
)
def test_dict_roundtrip_property(n_b, k, alpha, seed):
    cfg = SystemConfig(N_B=n_b, K=k, alpha=alpha, seed=seed)
    assert config_from_dict(config_to_dict(cfg)) == cfg
