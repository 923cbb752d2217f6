import json
from types import SimpleNamespace

import pytest

from casetriage.corpus import save_dataset
from casetriage.synthetic import planted_dataset


def write_run_inputs(root, n_cases=400, n_labels=3, seed=23, model_grid=None, out="run"):
    """Write a small planted dataset plus a run config into `root`."""
    schema, cases = planted_dataset(n_cases, n_labels, seed=seed)
    schema_path = root / "schema.json"
    schema_path.write_text(json.dumps({"name": schema.name, "labels": list(schema.labels)}))
    dataset_path = root / "cases.jsonl"
    save_dataset(cases, schema, dataset_path)
    config = {
        "task": schema.name,
        "schema": "schema.json",
        "dataset": "cases.jsonl",
        "out": out,
        "seed": seed,
        "features": {"min_df": 2, "ngram_orders": [1]},
        "model_grid": model_grid
        or [
            {"loss": "logistic", "weighting": "balanced", "learning_rate": 2.5,
             "epochs": 300, "l2": 0.0005},
            {"loss": "logistic", "weighting": "uniform", "learning_rate": 1e-9,
             "epochs": 1},
        ],
    }
    config_path = root / "config.json"
    config_path.write_text(json.dumps(config))
    return SimpleNamespace(
        schema=schema,
        cases=cases,
        schema_path=schema_path,
        dataset_path=dataset_path,
        config_path=config_path,
        out=root / out,
    )


@pytest.fixture
def mini_run(tmp_path):
    return write_run_inputs(tmp_path)
