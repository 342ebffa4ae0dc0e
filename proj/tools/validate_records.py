"""Validate every run record under a results directory against the schema.

usage: validate_records.py SCHEMA RESULTS_DIR
"""

import json
import pathlib
import sys

import jsonschema


def main() -> int:
    schema = json.loads(pathlib.Path(sys.argv[1]).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    records = sorted(pathlib.Path(sys.argv[2]).glob("runs/*/*.json"))
    if not records:
        print("no run records found", file=sys.stderr)
        return 1
    bad = 0
    for path in records:
        record = json.loads(path.read_text())
        errors = list(validator.iter_errors(record))
        n = record["budget"]
        lengths = {k: len(record[k]) for k in ("x", "y", "incumbent", "simple_regret", "iteration_seconds")}
        if record["w_lf"] is not None:
            lengths["w_lf"] = len(record["w_lf"])
        for key, length in lengths.items():
            if length != n:
                errors.append(f"{key} has {length} entries, budget is {n}")
        for e in errors:
            print(f"{path}: {getattr(e, 'message', e)}", file=sys.stderr)
        bad += bool(errors)
    print(f"{len(records) - bad}/{len(records)} records valid")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
