import json
import math

import numpy as np
import pytest

import rabies_dyn as rd

R0_LITERAL = 6.282292262859812
R0_CORRECTED = 66.75734141302085
CONTACT = ["tau1", "tau2", "tau3", "kappa1", "kappa2", "kappa3", "psi1", "psi2", "psi3"]


def test_defaults():
    p = rd.default_params()
    assert len(p) == 33
    assert p["gamma"] == pytest.approx(1 / 6)
    y0 = rd.reference_initial_condition()
    assert list(y0) == rd.compartments()
    assert y0["S_H"] == 142000


def test_r0_matches_frozen_values():
    assert rd.r0() == pytest.approx(R0_LITERAL, rel=1e-10)
    assert rd.r0(mode="corrected") == pytest.approx(R0_CORRECTED, rel=1e-10)
    ngm = rd.next_generation_matrix()
    assert ngm["r0"] == pytest.approx(R0_LITERAL, rel=1e-12)
    assert len(ngm["ngm"]) == 7


def test_r0_zero_without_contact():
    assert rd.r0({k: 0.0 for k in CONTACT}) == 0.0


def test_simulate_shapes_and_positivity():
    out = rd.simulate({"t_span": [0, 20], "sample_every": 0.5})
    assert out["t"].shape == (41,)
    assert out["y"].shape == (41, 12)
    assert out["names"][0] == "S_H"
    assert np.all(out["y"] >= -1e-9)
    np.testing.assert_array_equal(out["y"][0], list(rd.reference_initial_condition().values()))


def test_simulate_is_deterministic():
    a = rd.simulate({"t_span": [0, 10]})
    b = rd.simulate({"t_span": [0, 10]})
    np.testing.assert_array_equal(a["y"], b["y"])


def test_sensitivity_table():
    analytic = rd.sensitivity()
    fd = rd.sensitivity(method="fd")
    assert len(analytic["entries"]) == 14
    for a, f in zip(analytic["entries"], fd["entries"]):
        assert a["parameter"] == f["parameter"]
        assert a["index"] == pytest.approx(f["index"], abs=1e-4)


def test_dfe_stability_agrees_with_r0():
    assert rd.dfe_stability()["classification"] == "unstable"
    quiet = rd.dfe_stability({k: 0.0 for k in CONTACT})
    assert quiet["classification"] == "locally-stable"


def test_fit_recovers_truth_without_noise():
    data = rd.generate_synthetic(t_end=50, noise_sd=0.0, seed=3)
    assert data.observations.shape == (51, 4)
    assert data.observed == ["E_H", "I_H", "I_F", "I_D"]
    truth = rd.default_params()
    start = dict(truth, tau1=truth["tau1"] * 1.5)
    result = rd.fit(data, ["tau1"], init=start)
    assert result["estimates"]["tau1"]["estimate"] == pytest.approx(truth["tau1"], rel=1e-2)


def test_noisy_data_is_seeded():
    a = rd.generate_synthetic(noise_sd=0.05, seed=9)
    b = rd.generate_synthetic(noise_sd=0.05, seed=9)
    c = rd.generate_synthetic(noise_sd=0.05, seed=10)
    np.testing.assert_array_equal(a.observations, b.observations)
    assert not np.array_equal(a.observations, c.observations)


def test_run_writes_provenance(tmp_path):
    files = rd.run("r0", tmp_path, {"seed": 4})
    assert files == ["r0.json", "ngm.csv", "r_entries.csv"]
    line = f"# rabies-dyn {rd.__version__} seed=4 mode=paper-literal"
    assert (tmp_path / "ngm.csv").read_text().splitlines()[0] == line
    assert json.loads((tmp_path / "r0.json").read_text())["provenance"] == line


def test_config_errors():
    with pytest.raises(rd.ConfigError, match="tua1"):
        rd.simulate({"tua1": 1})
    with pytest.raises(rd.ConfigError):
        rd.r0({"tua1": 1})
    with pytest.raises(rd.ConfigError):
        rd.run("plot", ".")
    with pytest.raises(rd.RabiesError):
        rd.r0(mode="literal")
    assert issubclass(rd.ConfigError, rd.RabiesError)
    assert math.isfinite(rd.r0({"tau1": 0.001}))
