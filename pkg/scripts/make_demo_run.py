#!/usr/bin/env python3
"""Generate a synthetic dataset and run the full pipeline on it.

Leaves a directory ready for `casetriage serve`:
    <dir>/schema.json, <dir>/cases.jsonl, <dir>/config.json
    <dir>/run/  (split, model, reports, review queue, exported scores)
Prints the produced paths as JSON.
"""

import argparse
import json
import sys
from pathlib import Path

from casetriage import cli
from casetriage.corpus import save_dataset
from casetriage.synthetic import planted_dataset


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dir", required=True, help="target directory")
    parser.add_argument("--cases", type=int, default=5000)
    parser.add_argument("--labels", type=int, default=6)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    root = Path(args.dir)
    root.mkdir(parents=True, exist_ok=True)
    schema, cases = planted_dataset(args.cases, args.labels, seed=args.seed)
    (root / "schema.json").write_text(
        json.dumps({"name": schema.name, "labels": list(schema.labels)}, indent=2) + "\n"
    )
    save_dataset(cases, schema, root / "cases.jsonl")
    config = {
        "task": schema.name,
        "schema": "schema.json",
        "dataset": "cases.jsonl",
        "out": "run",
        "seed": args.seed,
        "features": {"min_df": 2, "ngram_orders": [1, 2, 3]},
        "model_grid": [
            {"loss": "logistic", "weighting": "balanced", "learning_rate": 2.5,
             "epochs": 1500, "l2": 0.0005},
            {"loss": "logistic", "weighting": "uniform", "learning_rate": 1e-9,
             "epochs": 1},
        ],
    }
    config_path = root / "config.json"
    config_path.write_text(json.dumps(config, indent=2) + "\n")

    for command in ("split", "train", "evaluate"):
        code = cli.main([command, "--config", str(config_path)])
        if code != cli.EXIT_OK:
            return code

    print(
        json.dumps(
            {
                "schema": str(root / "schema.json"),
                "dataset": str(root / "cases.jsonl"),
                "config": str(config_path),
                "run": str(root / "run"),
                "queue": str(root / "run" / "queue.json"),
                "report": str(root / "run" / "triage_report.json"),
            }
        )
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
