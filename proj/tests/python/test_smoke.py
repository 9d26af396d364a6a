import json

import numpy as np
import pytest

import chuarc


def test_lwe_round_trip():
    assert chuarc.lwe_encrypt([0, 4, 20, 21, 11], [1, 15, 17, 0, 5], 1, 29) == (27, 23)
    assert chuarc.lwe_decrypt(27, 23, 11, 29) == (16, 1)
    cases = chuarc.lwe_generate(20, 5)
    assert len(cases) == 20
    for c in cases:
        assert chuarc.lwe_decrypt(c["u"], c["v"], 2, 7)[1] == c["phi"]


def test_normalize_and_nmse():
    v = chuarc.normalize([0, 3, 6], 6.0, 0.1, 0.5)
    assert v == pytest.approx([0.1, 0.3, 0.5])
    assert chuarc.nmse_case([0.02], [0.01]) == 1.0


def test_diode_is_odd():
    assert chuarc.diode_current(0.5) == pytest.approx(-chuarc.diode_current(-0.5))
    assert chuarc.diode_current(0.5) < 0


def test_integrate_taps():
    t = chuarc.integrate(1e-5, 1e-7)
    assert set(t) == {"dt", "V_CD", "V_L"}
    assert len(t["V_CD"]) == 101
    assert t["V_CD"][0] == pytest.approx(0.1)


def test_readout_interpolates_one_case():
    rng = np.random.default_rng(1)
    x = 0.5 + 0.1 * rng.standard_normal((11, 40))
    w = chuarc.train_readout([x], [np.array([5.0, 4.0])])
    assert chuarc.predict(w, x) == pytest.approx([5.0, 4.0], rel=1e-6)


def test_run_case_shape():
    states = chuarc.run_case([0.3, 0.7], json.dumps({"reservoir": {"n_mask": 4}}), 1.0)
    assert states.shape[1] == 8


def test_experiment_and_config():
    cfg = json.dumps({"reservoir": {"n_mask": 10}, "task": {"kind": "polynomial", "n_cases": 20}})
    report = chuarc.run_experiment(cfg, 2)
    assert report["n_validation"] == 4
    assert 0.0 <= report["mean"] <= 1.0
    assert report["config_digest"] == chuarc.config_digest(cfg)
    assert chuarc.canonical_config(chuarc.canonical_config(cfg)) == chuarc.canonical_config(cfg)
    with pytest.raises(chuarc.ConfigError):
        chuarc.canonical_config('{"bogus": 1}')


def test_datasets():
    d = chuarc.make_dataset("circles", 10)
    assert len(d["inputs"]) == 10
    assert d["labels"][0] == 1
    assert chuarc.polynomial_teacher(0.5) == 452.197265625
