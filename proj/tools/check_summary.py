#!/usr/bin/env python3
"""Run every bundled scenario through the CLI and validate each summary
against docs/summary_schema.json. Also checks the scenario files in
docs/examples against docs/scenario_schema.json when present."""

import argparse
import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schema", required=True)
    ap.add_argument("--work", required=True)
    args = ap.parse_args()

    work = pathlib.Path(args.work)
    schema_path = pathlib.Path(args.schema)
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)

    subprocess.run([args.cli, "run-all", "--out", str(work), "--horizon", "300"], check=True,
                   stdout=subprocess.DEVNULL)
    summaries = sorted(work.glob("*.summary.json"))
    if len(summaries) < 6:
        print(f"expected at least 6 summaries, found {len(summaries)}")
        return 1
    bad = 0
    for path in summaries:
        errors = list(jsonschema.Draft202012Validator(schema).iter_errors(json.loads(path.read_text())))
        for err in errors:
            print(f"{path.name}: {err.json_path}: {err.message}")
        bad += bool(errors)

    scenario_schema = schema_path.with_name("scenario_schema.json")
    examples = sorted((schema_path.parent / "examples").glob("*.json"))
    if scenario_schema.exists():
        sv = jsonschema.Draft202012Validator(json.loads(scenario_schema.read_text()))
        for path in examples:
            errors = list(sv.iter_errors(json.loads(path.read_text())))
            for err in errors:
                print(f"{path.name}: {err.json_path}: {err.message}")
            bad += bool(errors)
            subprocess.run([args.cli, "validate", str(path)], check=True, stdout=subprocess.DEVNULL)

    print(f"{len(summaries)} summaries, {len(examples)} example configs, {bad} invalid")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
