# SPDX-License-Identifier: Apache-2.0
import json

import numpy as np
import pytest

import helio


@pytest.fixture(scope="module")
def data():
    d = helio.synth(n=600, seed=3)
    train, test = helio.split_train_test(600, 0.8, 0)
    return d, train, test


def test_metrics_worked_examples():
    assert helio.mae(np.array([1.0, 2.0]), np.array([2.0, 4.0])) == pytest.approx(1.5)
    assert helio.rmse(np.array([1.0, 2.0]), np.array([2.0, 4.0])) == pytest.approx(2.5 ** 0.5)
    assert helio.r2(np.array([1.0, 2.0, 4.0]), np.array([1.0, 2.0, 3.0])) == 0.5
    assert helio.expected_improvement(0.0, 1.0, 0.0) == pytest.approx(0.39894, abs=1e-5)
    assert helio.pearson(np.arange(5.0), 3 * np.arange(5.0) + 1) == pytest.approx(1.0)


def test_errors_map_to_python_exception():
    with pytest.raises(helio.HelioError, match="LengthMismatch"):
        helio.mae(np.array([1.0]), np.array([1.0, 2.0]))


def test_forest_fit_predict_shap_roundtrip(data, tmp_path):
    d, train, test = data
    x, y = d["x"], d["y"]
    model = helio.fit(x[train], y[train], d["feature_names"], forest={"n_estimators": 10})
    assert model.kind == "forest"
    pred = model.predict(x[test])
    assert helio.r2(pred, y[test]) > 0.7
    base, phi = model.shap(x[test][:5])
    assert phi.shape == (5, 7)
    np.testing.assert_allclose(base + phi.sum(axis=1), pred[:5], atol=1e-6)

    path = tmp_path / "model.json"
    model.save(str(path))
    again = helio.load_model(str(path))
    np.testing.assert_array_equal(again.predict(x[test]), pred)


def test_mlp_with_selection_and_shap_rejected(data):
    d, train, _ = data
    x, y = d["x"], d["y"]
    model = helio.fit(x[train], y[train], d["feature_names"], learner="mlp", selection={"rule": "top_k", "k": 3},
                      mlp={"max_iter": 5})
    assert model.kind == "mlp"
    assert len(model.feature_names) == 3
    assert np.all(np.isfinite(model.predict(x[:10], d["feature_names"])))
    with pytest.raises(helio.HelioError, match="NotATreeModel"):
        model.shap(x[:2], d["feature_names"])


def test_run_command_writes_manifest(tmp_path):
    cfg = {"data": {"n": 300}, "learner": {"forest": {"n_estimators": 5}}, "output_dir": str(tmp_path)}
    manifest = helio.run("run", cfg)
    assert manifest["command"] == "run"
    names = {a["path"] for a in manifest["artifacts"]}
    assert {"model.json", "metrics.csv"} <= names
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["metrics"]["n"] == 60
