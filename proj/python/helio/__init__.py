# SPDX-License-Identifier: Apache-2.0
"""Solar irradiance forecasting with tree ensembles, an MLP and exact SHAP."""

import json

from ._core import (
    HelioError,
    Model,
    expected_improvement,
    load_model,
    mae,
    model_from_json,
    pearson,
    r2,
    rmse,
    split_train_test,
    synth,
)
from . import _core

__all__ = [
    "HelioError",
    "Model",
    "expected_improvement",
    "fit",
    "load_model",
    "mae",
    "model_from_json",
    "pearson",
    "r2",
    "rmse",
    "run",
    "split_train_test",
    "synth",
]


def fit(x, y, feature_names=None, learner="forest", selection=None, **options):
    """Train one learner.

    ``options`` are the learner section of a pipeline config, for example
    ``fit(x, y, learner="boosted", boosted={"n_rounds": 50})``.
    """
    if feature_names is None:
        feature_names = [f"f{i}" for i in range(len(x[0]))]
    doc = {"learner": {"kind": learner, **options}}
    if selection is not None:
        doc["selection"] = selection
    return _core.fit(x, y, list(feature_names), json.dumps(doc))


def run(command, config=None, model=None, max_rows=None):
    """Run a pipeline command and return its manifest as a dict."""
    text = _core.run_command(command, json.dumps(config or {}), model, max_rows)
    return json.loads(text)
